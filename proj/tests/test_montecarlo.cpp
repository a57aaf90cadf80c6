#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "senscap/montecarlo.hpp"

using namespace senscap;

namespace {

SensorNetwork full_coverage(int k, NoiseChannel channel) {
  SensorNetwork net{k, 0, {}, SensingFunction::identity(), std::move(channel)};
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) net.placements.push_back({r, c});
  return net;
}

TrialConfig base_config(double p, double q, int n, double D, int trials) {
  return TrialConfig{.model = MRFModel::symmetric_family(p), .k = 3, .n = n, .c = 0,
                     .psi = SensingFunction::identity(), .channel = NoiseChannel::bsc(q),
                     .D = D, .trials = trials, .seed = 17};
}

}  // namespace

TEST_SUITE("montecarlo") {
  TEST_CASE("wilson interval") {
    for (auto [f, n] : {std::pair{0, 100}, {3, 100}, {50, 100}, {100, 100}, {7, 2000}}) {
      const auto e = wilson_estimate(f, n);
      const auto ref = oracle::wilson(f, n);
      CHECK(e.p_e_hat == doctest::Approx(static_cast<double>(f) / n));
      CHECK(e.ci_lo == doctest::Approx(ref[0]).epsilon(1e-12));
      CHECK(e.ci_hi == doctest::Approx(ref[1]).epsilon(1e-12));
      CHECK(e.ci_lo <= e.p_e_hat);
      CHECK(e.p_e_hat <= e.ci_hi);
    }
    CHECK(wilson_estimate(0, 1000).ci_hi <= 3.9 / 1000);
    CHECK_CODE(wilson_estimate(5, 4), InvalidArgument);
  }

  TEST_CASE("hamming distortion") {
    std::mt19937_64 rng(3);
    const auto f = random_field(3, rng);
    CHECK(hamming_distortion(f, f) == 0.0);
    CHECK(hamming_distortion(f, f.complement()) == 1.0);
    auto g = f;
    g.flip({2, 0});
    CHECK(hamming_distortion(f, g) == doctest::Approx(1.0 / 9).epsilon(1e-15));
    CHECK_CODE(hamming_distortion(f, TargetField(4)), DimensionMismatch);
    CHECK(within_distortion(0.0, 0.0));
    CHECK_FALSE(within_distortion(1.0 / 9, 0.0));
    CHECK_FALSE(within_distortion(0.1, 0.1));
    CHECK(within_distortion(0.05, 0.1));
  }

  TEST_CASE("map decoding examples") {
    std::mt19937_64 rng(8);
    const auto model = MRFModel::symmetric_family(0.7);
    const auto net = full_coverage(3, NoiseChannel::noiseless(2));
    for (int trial = 0; trial < 10; ++trial) {
      const auto f = random_field(3, rng);
      const auto y = ideal_output(net, f);
      CHECK(map_decode(y, net, model) == f);
    }

    SensorNetwork empty{3, 0, {}, SensingFunction::identity(), NoiseChannel::bsc(0.1)};
    const std::vector<int> none;
    CHECK(map_decode(none, empty, model) == TargetField::filled(3, 0));
    CHECK(map_decode(none, empty, MRFModel::symmetric_family(0.5)).index() == 0);
    CHECK_CODE(MapDecoder(model, 5), EnumerationTooLarge);
  }

  TEST_CASE("map decoder maximizes the posterior score") {
    std::mt19937_64 rng(10);
    const auto model = MRFModel::symmetric_family(0.7);
    const MapDecoder decoder(model, 3);
    for (int trial = 0; trial < 6; ++trial) {
      const int c = trial % 2;
      const auto psi = c == 0 ? SensingFunction::identity() : SensingFunction::count(1);
      const auto ch = NoiseChannel::symmetric(psi.alphabet_size(), 0.15);
      const auto net = generate_network(3, 12, c, psi, ch, 100 + trial);
      const auto y = noisy_output(ideal_output(net, random_field(3, rng)), ch, 200 + trial);

      std::uint64_t best = 0;
      double best_score = -INFINITY;
      for (std::uint64_t i = 0; i < 512; ++i) {
        const double s = posterior_score(y, net, model, TargetField::from_index(3, i));
        if (s > best_score + 1e-9) best = i, best_score = s;
      }
      const auto decoded = decoder.decode(y, net);
      CHECK(posterior_score(y, net, model, decoded) == doctest::Approx(best_score).epsilon(1e-12));
      CHECK(decoded.index() == best);
    }
  }

  TEST_CASE("icm decoding") {
    std::mt19937_64 rng(12);
    const auto model = MRFModel::symmetric_family(0.7);
    const auto clean = full_coverage(4, NoiseChannel::noiseless(2));
    const auto f = random_field(4, rng);
    CHECK(icm_decode(ideal_output(clean, f), clean, model, 20, 1, f) == f);

    int agree = 0;
    const int trials = 60;
    const auto ch = NoiseChannel::bsc(0.1);
    const MapDecoder decoder(model, 3);
    for (int t = 0; t < trials; ++t) {
      const auto truth = TargetField::from_index(3, rng() % 512);
      const auto net = generate_network(3, 18, 0, SensingFunction::identity(), ch, 300 + t);
      const auto y = noisy_output(ideal_output(net, truth), ch, 400 + t);
      const auto start = random_field(3, rng);
      const auto icm = icm_decode(y, net, model, 20, 500 + t);
      CHECK(icm == icm_decode(y, net, model, 20, 500 + t));
      CHECK(posterior_score(y, net, model, icm_decode(y, net, model, 20, 1, start)) >=
            posterior_score(y, net, model, start));
      agree += icm == decoder.decode(y, net);
    }
    CHECK(agree >= 0.8 * trials);
  }

  TEST_CASE("trials") {
    // 200 random placements on 9 cells leave none unobserved in practice.
    auto cfg = base_config(0.7, 0.0, 200, 0.1, 50);
    const auto clean = estimate_pe(cfg);
    CHECK(clean.failures == 0);
    CHECK(clean.ci_hi <= 3.9 / cfg.trials);

    const auto noisy = base_config(0.7, 0.1, 9, 1.0 / 9, 40);
    for (int i = 0; i < 10; ++i) CHECK(run_trial(noisy, i) == run_trial(noisy, i));

    const Simulator sim(noisy);
    const auto est = sim.estimate();
    int failures = 0;
    for (int i = 0; i < noisy.trials; ++i) failures += !sim.run(i).success;
    CHECK(est.failures == failures);

    auto fixed = noisy;
    fixed.fixed_network = true;
    CHECK(estimate_pe(fixed).failures == estimate_pe(fixed).failures);
  }

  TEST_CASE("uninformative channel at D = 0") {
    const auto cfg = base_config(0.5, 0.5, 20, 0.0, 3000);
    const auto est = estimate_pe(cfg);
    const double expected = 1.0 - 1.0 / 512;
    CHECK(est.ci_lo <= expected);
    CHECK(expected <= est.ci_hi + 1e-12);
  }

  TEST_CASE("rate sweep") {
    const auto cfg = base_config(0.7, 0.1, 0, 1.0 / 9, 30);
    const std::vector<int> ns{9, 18, 36};
    const auto rows = rate_sweep(cfg, ns);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].R == 1.0);
    CHECK(rows[1].R == 0.5);
    CHECK(rows[2].R == 0.25);
    const auto again = rate_sweep(cfg, ns);
    for (std::size_t i = 0; i < 3; ++i) CHECK(rows[i].estimate.failures == again[i].estimate.failures);
    const std::vector<int> bad{0};
    CHECK_CODE(rate_sweep(cfg, bad), InvalidArgument);
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  }
}
