#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "senscap/capacity.hpp"
#include "senscap/info.hpp"
#include "senscap/types.hpp"

using namespace senscap;

namespace {

CapacityQuery query(double p, int c, SensingFunction psi, NoiseChannel channel, double D) {
  return CapacityQuery{.model = MRFModel::symmetric_family(p), .c = c, .psi = std::move(psi),
                       .channel = std::move(channel), .D = D};
}

CapacityQuery bsc_query(double p, double q, double D) {
  return query(p, 0, SensingFunction::identity(), NoiseChannel::bsc(q), D);
}

std::vector<int> iota32() {
  std::vector<int> table(32);
  std::iota(table.begin(), table.end(), 0);
  return table;
}

// Range-1 sensor that reports only the center bit.
SensingFunction center_bit_sensor() {
  std::vector<int> table(32);
  for (int w = 0; w < 32; ++w) table[static_cast<std::size_t>(w)] = (w >> 2) & 1;
  return SensingFunction::lookup(1, table);
}

std::array<std::array<double, 2>, 2> bsc2(double q) { return {{{1 - q, q}, {q, 1 - q}}}; }

Matrix random_joint(std::mt19937_64& rng, std::size_t n) {
  std::gamma_distribution<double> g(0.5, 1.0);
  Matrix m(n, n);
  double total = 0.0;
  for (double& v : m.flat()) total += (v = g(rng) + 1e-12);
  for (double& v : m.flat()) v /= total;
  return m;
}

std::vector<double> as_vector(const std::array<double, 32>& a) { return {a.begin(), a.end()}; }

}  // namespace

TEST_SUITE("capacity") {
  TEST_CASE("typical field type") {
    for (double v : typical_field_type(MRFModel::symmetric_family(0.5))) CHECK(v == doctest::Approx(1.0 / 32).epsilon(1e-14));

    const auto point = typical_field_type(MRFModel({1.0, 0.0}, {{{1.0, 0.0}, {0.0, 1.0}}}));
    CHECK(point[0] == doctest::Approx(1.0));
    for (int t = 1; t < 32; ++t) CHECK(point[static_cast<std::size_t>(t)] == 0.0);

    for (double p : {0.6, 0.7, 0.9}) {
      const auto phi = typical_field_type(MRFModel::symmetric_family(p));
      const auto ref = oracle::phi_star(oracle::symmetric(p));
      double total = 0;
      for (int t = 0; t < 32; ++t) {
        total += phi[static_cast<std::size_t>(t)];
        CHECK(std::abs(phi[static_cast<std::size_t>(t)] - ref[static_cast<std::size_t>(t)]) <= 1e-15);
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("field type probability bound") {
    const auto m = MRFModel::symmetric_family(0.5);
    const auto flat = as_vector(typical_field_type(m));
    CHECK(std::log2(field_type_prob_bound(flat, m, 3)) == doctest::Approx(-45.0).epsilon(1e-12));
    CHECK(oracle::log2_unnorm(oracle::symmetric(0.5), 3, 77) == doctest::Approx(-45.0).epsilon(1e-12));

    const auto m7 = MRFModel::symmetric_family(0.7);
    const auto star = as_vector(typical_field_type(m7));
    std::vector<double> e0(32, 0.0);
    e0[0] = 1.0;
    CHECK(std::log2(field_type_prob_bound(e0, m7, 3)) == doctest::Approx(-9 * kl(e0, star)).epsilon(1e-12));

    // Moving from φ* toward e0 increases D(φ||φ*), and the bound is
    // 2^{-k²(D + H)} with H shrinking slower than D grows near e0.
    std::vector<double> mid(32);
    for (int t = 0; t < 32; ++t) mid[static_cast<std::size_t>(t)] = 0.5 * e0[t] + 0.5 * star[t];
    const double d_mid = kl(mid, star) + entropy(mid);
    const double d_e0 = kl(e0, star) + entropy(e0);
    CHECK((field_type_prob_bound(mid, m7, 3) > field_type_prob_bound(e0, m7, 3)) == (d_mid < d_e0));

    const auto report = check_field_type_bound(m7, 3);
    CHECK(report.fields == 512);
    CHECK(std::isfinite(report.worst_log2_excess));
  }

  TEST_CASE("denominators") {
    std::mt19937_64 rng(21);
    const auto star5 = as_vector(typical_field_type(MRFModel::symmetric_family(0.5)));
    for (int trial = 0; trial < 20; ++trial) {
      const auto lam = random_joint(rng, 32);
      const auto [gi, gj] = lambda_marginals(lam);
      CHECK(denom_t1(lam, gi, star5, gj) == doctest::Approx(entropy(lam.flat()) - entropy(gi)).epsilon(1e-12));
      CHECK(denom_t2(lam, star5) == doctest::Approx(entropy(lam.flat()) - 5.0).epsilon(1e-12));

      const auto star = as_vector(typical_field_type(MRFModel::symmetric_family(0.6 + 0.015 * trial)));
      CHECK(std::abs(denom_t1(lam, gi, star, gj) - denom_t1_direct(lam, gi, star, gj)) <= 1e-12);
      CHECK(std::abs(denom_t2(lam, star) - denom_t2_direct(lam, star)) <= 1e-12);
    }

    Matrix diag(32, 32), prod(32, 32);
    for (std::size_t a = 0; a < 32; ++a) {
      diag(a, a) = star5[a];
      for (std::size_t b = 0; b < 32; ++b) prod(a, b) = star5[a] * star5[b];
    }
    CHECK(std::abs(denom_t1(diag, star5, star5, star5)) <= 1e-12);
    CHECK(denom_t2(prod, star5) == doctest::Approx(5.0));
    CHECK(std::abs(denom_t2(diag, star5)) <= 1e-12);
  }

  TEST_CASE("exponent E") {
    std::mt19937_64 rng(31);
    const auto id = SensingFunction::identity();
    for (int trial = 0; trial < 20; ++trial) {
      const auto lam = random_joint(rng, 2);
      const auto gi = lam.row_sums();
      const auto ch = NoiseChannel::bsc(0.05 + 0.02 * trial);
      CHECK(exponent_E(0.0, lam, gi, id, ch) == 0.0);
      for (double rho : {0.3, 1.0}) CHECK(std::abs(exponent_E(rho, lam, gi, id, NoiseChannel::bsc(0.5))) <= 1e-14);

      const double h = 1e-5;
      const double slope = (exponent_E_extended(h, lam, gi, id, ch) - exponent_E_extended(-h, lam, gi, id, ch)) / (2 * h);
      const double ref = kl(pxy(gi, id, ch).flat(), qxy(gi, lam, id, ch).flat());
      CHECK(std::abs(slope - ref) <= 1e-5 * std::abs(ref) + 1e-12);
    }

    // E(1, λ) on a BSC with independent rows reduces to the Bhattacharyya form.
    const double q = 0.1;
    Matrix lam(2, 2);
    lam(0, 0) = 0.45;
    lam(0, 1) = 0.05;
    lam(1, 0) = 0.05;
    lam(1, 1) = 0.45;
    const double dist = 0.1;
    const double expected = -std::log2(1 - (1 - 2 * std::sqrt(q * (1 - q))) * dist);
    CHECK(exponent_E(1.0, lam, lam.row_sums(), id, NoiseChannel::bsc(q)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_CODE(exponent_E(0.5, lam, std::vector<double>{0.7, 0.3}, id, NoiseChannel::bsc(q)), InconsistentTypes);
  }

  TEST_CASE("range-0 bound against the two-parameter reduction") {
    for (double p : {0.5, 0.7, 0.9})
      for (double D : {0.05, 0.2}) {
        const auto r = clb_c0(bsc_query(p, 0.1, D));
        const oracle::RangeZeroBound ref(oracle::symmetric(p), bsc2(0.1));
        const double expected = ref.on_boundary(D);
        CHECK(r.value == doctest::Approx(expected).epsilon(1e-6));
        CHECK(std::abs(r.certificate) <= 1e-7);
        CHECK(r.witness_distortion >= D - 1e-8);
        CHECK(r.denom > 0);
        CHECK(r.numerator / r.denom == doctest::Approx(r.value).epsilon(1e-6));
      }
    const oracle::RangeZeroBound ref(oracle::symmetric(0.7), bsc2(0.1));
    CHECK(ref.on_region(0.1) >= ref.on_boundary(0.1) - 1e-9);
  }

  TEST_CASE("witness structure") {
    const auto r = clb_c0(bsc_query(0.7, 0.1, 0.1));
    const auto star = typical_field_type(MRFModel::symmetric_family(0.7));
    const auto rows = r.mu.row_sums();
    for (int t = 0; t < 32; ++t) CHECK(std::abs(rows[static_cast<std::size_t>(t)] - star[static_cast<std::size_t>(t)]) <= 1e-8);
    for (double v : r.mu.flat()) CHECK(v >= 0.0);
    CHECK(r.lambda.rows() == 2);
    CHECK(std::abs(distortion(r.lambda) - r.witness_distortion) <= 1e-12);
    CHECK(r.gamma_i.size() == 2);
  }

  TEST_CASE("monotone in D and degenerate channel") {
    for (double p : {0.5, 0.9}) {
      const double lo = clb_c0(bsc_query(p, 0.1, 0.1)).value;
      const double hi = clb_c0(bsc_query(p, 0.1, 0.2)).value;
      CHECK(hi >= lo);
      CHECK(clb_c0(bsc_query(p, 0.5, 0.1)).value == 0.0);
      CHECK(clb_c1(query(p, 1, center_bit_sensor(), NoiseChannel::bsc(0.5), 0.1)).value == 0.0);
      CHECK(clb_c1(query(p, 1, SensingFunction::count(1), NoiseChannel(Matrix(6, 6, 1.0 / 6)), 0.1)).value == 0.0);
    }
    CHECK_CODE(clb_c0(bsc_query(0.7, 0.1, 1.0)), Infeasible);
    CHECK_CODE(clb_c1(bsc_query(0.7, 0.1, 0.1)), InvalidArgument);
    CHECK(oracle_local_search(bsc_query(0.7, 0.5, 0.1), 200, 1) == 0.0);
  }

  TEST_CASE("range-1 lookup sensing against the random search") {
    for (double p : {0.5, 0.9}) {
      auto q = query(p, 1, SensingFunction::lookup(1, iota32()), NoiseChannel::noiseless(32), 0.0);
      q.options.eps_dist = 1e-3;
      const auto r = clb_c1(q);
      CHECK(std::abs(r.certificate) <= 1e-7);
      const double found = oracle_local_search(q, 2000, 3);
      CHECK(found >= r.value - 1e-3);
      CHECK(found <= r.value + 1e-3);
    }
  }

  TEST_CASE("range-1 count sensing") {
    // Swapping the center with a differing neighbour keeps the count, so at
    // small D there is a zero-numerator joint type with positive DENOM.
    const auto ch = NoiseChannel::symmetric(6, 0.1);
    for (double p : {0.5, 0.9}) {
      const auto r = clb_c1(query(p, 1, SensingFunction::count(1), ch, 0.1));
      CHECK(r.value <= 1e-6);
      CHECK(r.denom > 0);
    }
    const double lo = clb_c1(query(0.5, 1, SensingFunction::count(1), ch, 0.4)).value;
    const double hi = clb_c1(query(0.9, 1, SensingFunction::count(1), ch, 0.4)).value;
    CHECK(hi > lo + 0.1);
  }

  TEST_CASE("random exponent") {
    const auto grid = default_rho_grid();
    CHECK(grid.size() == 101);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 1.0);

    const auto q = bsc_query(0.7, 0.1, 0.1);
    const auto at_zero = exponent_Er(0.0, q, grid);
    CHECK(at_zero.value >= 0.0);
    CHECK(at_zero.value == doctest::Approx(-std::log2(1 - (1 - 2 * std::sqrt(0.09)) * 0.1)).epsilon(1e-3));

    const double clb = clb_c0(q).value;
    std::vector<double> fine;
    for (int i = 0; i <= 200; ++i) fine.push_back(i / 2000.0);
    CHECK(exponent_Er(0.5 * clb, q, grid).value > 0.0);
    CHECK(exponent_Er(clb - 1e-3, q, fine).value > 0.0);

    CHECK(exponent_Er(0.3, bsc_query(0.7, 0.5, 0.1), grid).value <= 0.0);
    CHECK_CODE(exponent_Er(0.1, bsc_query(0.7, 0.1, 1.0), grid), Infeasible);
  }

  TEST_CASE("random search is deterministic") {
    const auto q = bsc_query(0.7, 0.1, 0.1);
    const double a = oracle_local_search(q, 300, 5);
    CHECK(a == oracle_local_search(q, 300, 5));
    CHECK(a >= clb_c0(q).value - 1e-3);
  }

  TEST_CASE("bound is reproducible") {
    const auto q = query(0.9, 1, SensingFunction::count(1), NoiseChannel::symmetric(6, 0.1), 0.4);
    const auto a = clb_c1(q);
    const auto b = clb_c1(q);
    CHECK(a.value == b.value);
    CHECK(a.mu == b.mu);
  }
}
