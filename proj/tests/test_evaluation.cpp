#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sparsebss/evaluation.hpp"
#include "sparsebss/simgen.hpp"

using namespace sparsebss;

namespace {

// Independent reference: the greedy pairing is the permutation whose matched
// |c| values, sorted descending, are lexicographically largest.
std::vector<std::size_t> brute_force_pairing(const Matrix& c) {
  const std::size_t n = c.rows();
  std::vector<std::size_t> perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> best_key;
  do {
    std::vector<double> key;
    for (std::size_t r = 0; r < n; ++r) key.push_back(std::abs(c(r, perm[r])));
    std::sort(key.rbegin(), key.rend());
    if (best.empty() || key > best_key) {
      best_key = key;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Scenario clean_example(double noise_sd) {
  return {generate_gaussian_sources(two_pulse_sources(), kTwoPulseSampleRate, kTwoPulseDuration), two_pulse_mixing(),
          noise_sd};
}

}  // namespace

TEST_CASE("pearson", "[evaluation]") {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8}, z{4, 3, 2, 1}, k{5, 5, 5, 5};
  CHECK(pearson(x, y) == Catch::Approx(1.0));
  CHECK(pearson(x, z) == Catch::Approx(-1.0));
  CHECK(pearson(x, k) == 0.0);
}

TEST_CASE("associate", "[evaluation]") {
  const SignalMatrix s{{1, 0, 0, 2, 1}, {0, 3, 1, 0, 0}};
  SECTION("identity") {
    const auto a = associate(s, s);
    CHECK(a.estimate_for_source == std::vector<std::size_t>{0, 1});
    CHECK(a.signs == std::vector<int>{1, 1});
  }
  SECTION("swapped and negated") {
    const SignalMatrix e{{0, -3, -1, 0, 0}, {2, 0, 0, 4, 2}};
    const auto a = associate(s, e);
    CHECK(a.estimate_for_source == std::vector<std::size_t>{1, 0});
    CHECK(a.signs == std::vector<int>{1, -1});
    CHECK(a.correlations[1] == Catch::Approx(-1.0));
  }
  SECTION("shape mismatch") { CHECK_THROWS_AS(associate(s, SignalMatrix(3, 5)), BssError); }

  SECTION("matches the brute-force oracle") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      SignalMatrix a(3, 12), e(3, 12);
      for (double& v : a.matrix().data()) v = g(rng);
      for (double& v : e.matrix().data()) v = g(rng);
      Matrix c(3, 3);
      for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t s2 = 0; s2 < 3; ++s2) c(r, s2) = pearson(a.channel(r), e.channel(s2));
      const auto got = associate(a, e);
      CHECK(got.estimate_for_source == brute_force_pairing(c));
      for (std::size_t r = 0; r < 3; ++r) CHECK(got.signs[r] == (c(r, got.estimate_for_source[r]) < 0 ? -1 : 1));
    }
  }
}

TEST_CASE("pointwise_error and rms_metrics", "[evaluation]") {
  const std::vector<double> a{1, 2, 3}, e{1, 1, 1};
  CHECK(pointwise_error(a, e, 1) == std::vector<double>{0, 1, 2});
  CHECK(pointwise_error(a, e, -1) == std::vector<double>{2, 3, 4});

  SECTION("two runs") {
    // RMS[n] = sqrt((e1^2 + e2^2) / 2)
    const auto m = rms_metrics({{3.0, 0.0}, {4.0, 0.0}});
    CHECK(m.per_sample[0] == Catch::Approx(std::sqrt(12.5)));
    CHECK(m.per_sample[1] == 0.0);
    CHECK(m.max == Catch::Approx(std::sqrt(12.5)));
    CHECK(m.total == Catch::Approx(std::sqrt(12.5 / 2.0)));
  }
  SECTION("perfect estimates") {
    const auto m = rms_metrics({{0.0, 0.0, 0.0}});
    CHECK(m.total == 0.0);
    CHECK(m.max == 0.0);
  }
  SECTION("bad input") {
    CHECK_THROWS_AS(rms_metrics({}), BssError);
    CHECK_THROWS_AS(rms_metrics({{1.0}, {1.0, 2.0}}), BssError);
  }
  SECTION("ordering") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::vector<double>> errs(5, std::vector<double>(20));
      for (auto& e2 : errs)
        for (double& x : e2) x = g(rng);
      const auto m = rms_metrics(errs);
      CHECK(m.total <= m.max + 1e-15);
    }
  }
}

TEST_CASE("monte_carlo", "[evaluation]") {
  const MethodParams params{0.4, 1.0, Method::Global};

  SECTION("noise-free runs are exact and identical across sets") {
    const auto rep = monte_carlo(clean_example(0.0), params, {3, 4, 0, 1});
    CHECK(rep.failed_runs == 0);
    CHECK(rep.total_runs == 12);
    for (const auto& s : rep.sources) {
      CHECK(s.rms_max_mean < 1e-6);
      CHECK(s.rms_max_sd == 0.0);
      CHECK(s.rms_tot_sd == 0.0);
    }
  }
  SECTION("reproducible and independent of thread count") {
    const auto sc = clean_example(0.005);
    const auto a = monte_carlo(sc, params, {3, 20, 17, 1});
    const auto b = monte_carlo(sc, params, {3, 20, 17, 1});
    const auto c = monte_carlo(sc, params, {3, 20, 17, 4});
    for (std::size_t r = 0; r < 2; ++r) {
      CHECK(a.sources[r].rms_max_per_set == b.sources[r].rms_max_per_set);
      CHECK(a.sources[r].rms_max_per_set == c.sources[r].rms_max_per_set);
      CHECK(a.sources[r].rms_tot_per_set == c.sources[r].rms_tot_per_set);
      CHECK(a.sources[r].rms_max_sd == c.sources[r].rms_max_sd);
    }
    CHECK(a.failed_runs == c.failed_runs);
    const auto d = monte_carlo(sc, params, {3, 20, 18, 1});
    CHECK_FALSE(a.sources[0].rms_max_per_set == d.sources[0].rms_max_per_set);
  }
  SECTION("every run failing is an error") {
    try {
      (void)monte_carlo(clean_example(0.0), MethodParams{0.999, 1.0, Method::MHC}, {1, 3, 0, 1});
      FAIL("expected AllRunsFailed");
    } catch (const BssError& e) {
      CHECK(e.code() == ErrorCode::AllRunsFailed);
    }
  }
  SECTION("invalid options") { CHECK_THROWS_AS(monte_carlo(clean_example(0.0), params, {0, 1, 0, 1}), BssError); }
}
