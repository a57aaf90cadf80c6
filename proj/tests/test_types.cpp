#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "senscap/info.hpp"
#include "senscap/types.hpp"

using namespace senscap;

namespace {

CountVector direct_sensor_type(const TargetField& f, int c) {
  const Coverage cov(c);
  CountVector g(static_cast<std::size_t>(cov.patterns()), f.cells());
  for (int r = 0; r < f.k(); ++r)
    for (int col = 0; col < f.k(); ++col) ++g.counts[static_cast<std::size_t>(cov.pattern_at(f, {r, col}))];
  return g;
}

Matrix two_by_two(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

}  // namespace

TEST_SUITE("types") {
  TEST_CASE("sensor type examples") {
    const auto zero = sensor_type(TargetField::filled(5, 0), 1);
    CHECK(zero.counts[0] == 25);
    CHECK(zero.total == 25);
    const auto cb = sensor_type(TargetField::checkerboard(4), 0).probabilities();
    CHECK(cb == std::vector<double>{0.5, 0.5});

    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
      const auto f = random_field(4, rng);
      const auto g = sensor_type(f, 1);
      const auto phi = field_type(f);
      CHECK(gamma_to_phi(g, 1) == phi);
      for (int w = 0; w < 32; ++w)
        CHECK(g.counts[static_cast<std::size_t>(w)] ==
              phi.counts[static_cast<std::size_t>(footprint1_to_quintuplet(w))]);
      CHECK(phi_to_gamma(phi) == sensor_type(f, 0));
      CHECK(sensor_type(f, 0) == direct_sensor_type(f, 0));
    }
    for (int w = 0; w < 32; ++w) CHECK(quintuplet_to_footprint1(footprint1_to_quintuplet(w)) == w);
  }

  TEST_CASE("joint types and marginals") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
      const int k = trial % 2 ? 3 : 4;
      const int c = (trial / 2) % 2;
      const auto fi = random_field(k, rng);
      const auto fj = random_field(k, rng);
      const auto lambda = joint_sensor_type(fi, fj, c);
      const auto [gi, gj] = lambda_marginals(lambda);
      CHECK(gi == sensor_type(fi, c));
      CHECK(gj == sensor_type(fj, c));

      double dh = 0;
      for (std::size_t i = 0; i < fi.cells(); ++i) dh += fi.bits()[i] != fj.bits()[i];
      const auto cp = center_pair(lambda, c == 0 ? PatternSpace::footprint(0) : PatternSpace::footprint(1));
      CHECK(cp.at(0, 1) + cp.at(1, 0) == static_cast<std::uint64_t>(dh));
      CHECK(distortion(cp) == dh / (k * k));

      const auto mu = joint_field_type(fi, fj);
      CHECK(center_pair(mu, PatternSpace::quintuplets()) == center_pair(joint_sensor_type(fi, fj, 0), PatternSpace::footprint(0)));
    }

    const auto f = TargetField::checkerboard(4);
    const auto diag = joint_sensor_type(f, f, 1).probabilities();
    for (std::size_t a = 0; a < 32; ++a)
      for (std::size_t b = 0; b < 32; ++b)
        if (a != b) CHECK(diag(a, b) == 0.0);
    const auto anti = joint_sensor_type(f, f.complement(), 0);
    CHECK(anti.at(0, 0) == 0);
    CHECK(anti.at(1, 1) == 0);
    CHECK(distortion(center_pair(anti, PatternSpace::footprint(0))) == 1.0);

    auto g = TargetField::filled(3, 0);
    g.flip({1, 1});
    CHECK(distortion(center_pair(joint_sensor_type(TargetField::filled(3, 0), g, 1), PatternSpace::footprint(1))) ==
          doctest::Approx(1.0 / 9).epsilon(1e-15));
    CHECK_CODE(joint_sensor_type(TargetField(3), TargetField(4), 0), DimensionMismatch);

    const Matrix uniform(4, 4, 1.0 / 16);
    const auto [ui, uj] = lambda_marginals(uniform);
    for (double v : ui) CHECK(v == doctest::Approx(0.25));
    for (double v : uj) CHECK(v == doctest::Approx(0.25));
  }

  TEST_CASE("marginalization maps") {
    const auto point = sensor_type(TargetField::filled(3, 0), 1);
    CHECK(gamma_to_phi(point, 1).counts[0] == 9);
    const auto all_one = sensor_type(TargetField::filled(5, 1), 2);
    CHECK(gamma_to_phi(all_one, 2).counts[31] == 25);
    CHECK_CODE(gamma_to_phi(sensor_type(TargetField::filled(3, 0), 0), 0), WrongDirection);

    std::vector<double> e0(32, 0.0);
    e0[0] = 1.0;
    CHECK(phi_to_gamma(e0) == std::vector<double>{1.0, 0.0});
    const std::vector<double> flat(32, 1.0 / 32);
    const auto half = phi_to_gamma(flat);
    CHECK(half[0] == doctest::Approx(0.5));
    CHECK(half[1] == doctest::Approx(0.5));

    // c = 2 marginalization agrees with the field type of the same field.
    std::mt19937_64 rng(3);
    const auto f = random_field(5, rng);
    CHECK(gamma_to_phi(sensor_type(f, 2), 2) == field_type(f));
  }

  TEST_CASE("output distributions") {
    const auto id = SensingFunction::identity();
    const std::vector<double> g{0.7, 0.3};
    CHECK(output_dist(g, id) == g);

    const auto count = SensingFunction::count(1);
    std::vector<double> ones(32, 0.0);
    ones[31] = 1.0;
    const auto px = output_dist(ones, count);
    CHECK(px[5] == 1.0);

    // Random placements over a fixed field reproduce P^γ.
    std::mt19937_64 rng(9);
    const auto f = random_field(6, rng);
    const auto gamma = sensor_type(f, 1).probabilities();
    const auto expected = output_dist(gamma, count);
    const int n = 100000;
    const auto net = generate_network(6, n, 1, count, NoiseChannel::symmetric(6, 0.1), 13);
    const auto x = ideal_output(net, f);
    std::vector<double> freq(6, 0.0);
    for (int v : x) freq[static_cast<std::size_t>(v)] += 1.0;
    for (std::size_t s = 0; s < 6; ++s) {
      const double sd = std::sqrt(expected[s] * (1 - expected[s]) / n);
      CHECK(std::abs(freq[s] / n - expected[s]) <= 3 * sd + 1e-12);
    }
  }

  TEST_CASE("conditional outputs") {
    const auto id = SensingFunction::identity();
    const auto diag = cond_output_dist(two_by_two(0.6, 0, 0, 0.4), id);
    CHECK(diag(0, 0) == 1.0);
    CHECK(diag(1, 1) == 1.0);
    CHECK(diag(0, 1) == 0.0);

    const auto prod = cond_output_dist(two_by_two(0.7 * 0.2, 0.7 * 0.8, 0.3 * 0.2, 0.3 * 0.8), id);
    CHECK(prod(0, 0) == doctest::Approx(0.2));
    CHECK(prod(1, 0) == doctest::Approx(0.2));

    const auto partial = cond_output_dist(two_by_two(0.5, 0.5, 0, 0), id);
    CHECK(partial.defined(0));
    CHECK_FALSE(partial.defined(1));
    CHECK_CODE(partial(1, 0), UndefinedConditional);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto count = SensingFunction::count(1);
    Matrix lam(32, 32);
    double total = 0;
    for (double& v : lam.flat()) total += (v = u(rng));
    for (double& v : lam.flat()) v /= total;
    const auto cond = cond_output_dist(lam, count);
    for (int a = 0; a < cond.size(); ++a) {
      const auto row = cond.row(a);
      CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("pxy and qxy") {
    const auto id = SensingFunction::identity();
    const auto bsc = NoiseChannel::bsc(0.1);
    const std::vector<double> half{0.5, 0.5};
    const auto p = pxy(half, id, bsc);
    CHECK(p(0, 0) == doctest::Approx(0.45));
    CHECK(p(0, 1) == doctest::Approx(0.05));
    CHECK(p(1, 0) == doctest::Approx(0.05));
    CHECK(p(1, 1) == doctest::Approx(0.45));

    const std::vector<double> g{0.3, 0.7};
    const auto clean = pxy(g, id, NoiseChannel::noiseless(2));
    CHECK(clean(0, 1) == 0.0);
    CHECK(clean(1, 0) == 0.0);
    const auto rows = pxy(g, id, bsc).row_sums();
    CHECK(rows[0] == doctest::Approx(0.3));
    CHECK(rows[1] == doctest::Approx(0.7));

    const auto q = qxy(half, two_by_two(0.4, 0.1, 0.1, 0.4), id, bsc);
    CHECK(q(0, 0) == doctest::Approx(0.5 * (0.8 * 0.9 + 0.2 * 0.1)).epsilon(1e-14));
    CHECK(q(0, 0) == doctest::Approx(0.37).epsilon(1e-14));
    const auto qr = q.row_sums();
    CHECK(qr[0] == doctest::Approx(0.5));

    const auto qd = qxy(g, two_by_two(0.3, 0, 0, 0.7), id, bsc);
    const auto pd = pxy(g, id, bsc);
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y) CHECK(qd(x, y) == doctest::Approx(pd(x, y)));

    const std::vector<double> g2{0.6, 0.4};
    const auto qi = qxy(g, two_by_two(0.3 * 0.6, 0.3 * 0.4, 0.7 * 0.6, 0.7 * 0.4), id, bsc);
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y)
        CHECK(qi(x, y) == doctest::Approx(g[x] * (g2[0] * bsc(0, static_cast<int>(y)) + g2[1] * bsc(1, static_cast<int>(y)))));

    CHECK_CODE(qxy(half, two_by_two(0.6, 0.1, 0.1, 0.2), id, bsc), InconsistentTypes);
  }

  TEST_CASE("information measures") {
    const std::vector<double> flat(32, 1.0 / 32);
    CHECK(entropy(flat) == doctest::Approx(5.0));
    const std::vector<double> p{0.2, 0.3, 0.5};
    CHECK(kl(p, p) == 0.0);
    CHECK(kl(std::vector<double>{1, 0}, std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(std::isinf(kl(std::vector<double>{0.5, 0.5}, std::vector<double>{1, 0})));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> a(32), b(32);
      double sa = 0, sb = 0;
      for (int i = 0; i < 32; ++i) {
        sa += a[i] = trial % 3 == 0 && i % 4 == 0 ? 0.0 : u(rng);
        sb += b[i] = u(rng);
      }
      for (int i = 0; i < 32; ++i) {
        a[i] /= sa;
        b[i] /= sb;
      }
      CHECK(std::abs(kl(a, b) + entropy(a) - cross_entropy(a, b)) <= 1e-12);
    }
  }

  TEST_CASE("alpha and beta counts") {
    CHECK(alpha_count(field_type(TargetField::filled(3, 0)), 3) == 1);
    CHECK(alpha_count(field_type(TargetField::filled(4, 0)), 4) == 1);
    CHECK(alpha_count(field_type(TargetField::checkerboard(4)), 4) == 2);
    CHECK_CODE(alpha_count(field_type(TargetField::filled(5, 0)), 5), EnumerationTooLarge);

    std::mt19937_64 rng(11);
    const auto fi = random_field(3, rng);
    CHECK(beta_count(fi, joint_sensor_type(fi, fi, 1), 1) == 1);

    const auto zero = TargetField::filled(3, 0);
    CountMatrix lam(2, 2, 9);
    lam.at(0, 0) = 7;
    lam.at(0, 1) = 2;
    CHECK(beta_count(zero, lam, 0) == 36);

    std::uint64_t brute = 0;
    for (std::uint64_t idx = 0; idx < 512; ++idx)
      brute += joint_sensor_type(zero, TargetField::from_index(3, idx), 0) == lam;
    CHECK(brute == 36);
  }
}
