#include <catch_amalgamated.hpp>

#include <cmath>

#include "sparsebss/simgen.hpp"

using namespace sparsebss;

TEST_CASE("gaussian pulses", "[simgen]") {
  SECTION("single pulse values") {
    const auto s = generate_gaussian_sources({{1.0, 0.1, 0.0125}}, 250.0, 0.2);
    REQUIRE(s.samples() == 50);
    CHECK(s(0, 25) == 1.0);
    // 5 sigma from the centre is past the truncation.
    const auto far = generate_gaussian_sources({{1.0, 0.1, 0.004}}, 250.0, 0.2);
    CHECK(far(0, 30) == 0.0);
    // One sigma: t = 0.1 + 0.0125 is not on the grid; use fs = 80 so sample 9 sits there.
    const auto one_sigma = generate_gaussian_sources({{1.0, 0.1, 0.0125}}, 80.0, 0.2);
    CHECK(std::abs(one_sigma(0, 9) - std::exp(-0.5)) < 1e-12);
  }
  SECTION("two-pulse example") {
    const auto s = generate_gaussian_sources(two_pulse_sources(), kTwoPulseSampleRate, kTwoPulseDuration);
    REQUIRE(s.channels() == 2);
    REQUIRE(s.samples() == 50);
    std::size_t peak1 = 0, peak2 = 0;
    for (std::size_t n = 0; n < 50; ++n) {
      if (s(0, n) > s(0, peak1)) peak1 = n;
      if (s(1, n) > s(1, peak2)) peak2 = n;
    }
    CHECK(peak1 == 25);
    // The second centre falls between samples 6 and 7.
    CHECK((peak2 == 6 || peak2 == 7));
    CHECK(std::abs(s(1, 6) - s(1, 7)) < 1e-12);
    CHECK(std::abs(s(1, 6) - 0.1 * std::exp(-0.002 * 0.002 / (2 * 0.00625 * 0.00625))) < 1e-15);
    // Disjoint supports.
    for (std::size_t n = 0; n < 50; ++n) CHECK((s(0, n) == 0.0 || s(1, n) == 0.0));
  }
  SECTION("bad parameters") {
    CHECK_THROWS_AS(generate_gaussian_sources({{1.0, 0.1, 0.0}}, 250.0, 0.2), BssError);
    CHECK_THROWS_AS(sample_count(0.0, 1.0), BssError);
  }
}

TEST_CASE("shifted uniform sources", "[simgen]") {
  SECTION("shift equal to length gives disjoint halves") {
    const auto s = generate_shifted_uniform_sources(100, 100, 3);
    REQUIRE(s.samples() == 200);
    for (std::size_t n = 0; n < 100; ++n) {
      CHECK(s(1, n) == 0.0);
      CHECK(s(0, n + 100) == 0.0);
      CHECK((s(0, n) >= 0.0 && s(0, n) < 1.0));
    }
  }
  SECTION("zero shift overlaps fully") {
    const auto s = generate_shifted_uniform_sources(20, 0, 3);
    REQUIRE(s.samples() == 20);
    // Source 1 draws come first in the stream.
    RandomStream rng(3);
    for (std::size_t n = 0; n < 20; ++n) CHECK(s(0, n) == rng.uniform());
    for (std::size_t n = 0; n < 20; ++n) CHECK(s(1, n) == rng.uniform());
  }
  SECTION("partial overlap") {
    const auto s = generate_shifted_uniform_sources(100, 90, 7);
    REQUIRE(s.samples() == 190);
    std::size_t both = 0;
    for (std::size_t n = 0; n < 190; ++n) both += (n >= 90 && n < 100) ? 1 : 0;
    CHECK(both == 10);
    for (std::size_t n = 0; n < 90; ++n) CHECK(s(1, n) == 0.0);
    for (std::size_t n = 100; n < 190; ++n) CHECK(s(0, n) == 0.0);
  }
  CHECK_THROWS_AS(generate_shifted_uniform_sources(5, 6, 1), BssError);
}

TEST_CASE("mix", "[simgen]") {
  const SignalMatrix unit{{1.0}, {0.0}};
  CHECK(mix(unit, two_pulse_mixing()) == SignalMatrix{{1.3}, {1.0}});
  const SignalMatrix second{{0.0}, {1.0}};
  const auto z = mix(second, shifted_uniform_mixing());
  CHECK(z(0, 0) == -0.498);
  CHECK(z(1, 0) == -0.133);
  CHECK_THROWS_AS(mix(unit, Matrix{{1.0, 2.0, 3.0}}), BssError);
}

TEST_CASE("compute_R", "[simgen]") {
  CHECK(compute_R(two_pulse_sources(), two_pulse_mixing()) == Catch::Approx(0.2).epsilon(1e-15));
  const auto s = generate_gaussian_sources(two_pulse_sources(), kTwoPulseSampleRate, kTwoPulseDuration);
  // No sample lands exactly on the second pulse centre.
  const double sampled = compute_R(s, two_pulse_mixing());
  CHECK(sampled < 0.2);
  CHECK(sampled > 0.18);
  CHECK(compute_R(SignalMatrix{{1.0, -2.0}, {0.5, 0.0}}, Matrix{{1.0, 0.0}, {0.0, 1.0}}) == 0.0);
  CHECK(compute_R(SignalMatrix{{1.0, -2.0}, {0.5, 1.0}}, Matrix{{1.0, 1.0}, {1.0, 1.0}}) == 1.0);
  CHECK(compute_R(SignalMatrix{{1.0, -2.0}, {0.0, 0.0}}, Matrix{{1.0, 1.0}, {1.0, 1.0}}) == 0.0);
}

TEST_CASE("add_noise", "[simgen]") {
  const auto s = generate_gaussian_sources(two_pulse_sources(), kTwoPulseSampleRate, kTwoPulseDuration);
  const auto z = mix(s, two_pulse_mixing());
  CHECK(add_noise(z, {0.0, 5}) == z);
  CHECK(add_noise(z, {0.01, 5}) == add_noise(z, {0.01, 5}));
  CHECK_FALSE(add_noise(z, {0.01, 5}) == add_noise(z, {0.01, 6}));
  CHECK_THROWS_AS(add_noise(z, {-1.0, 5}), BssError);

  SECTION("empirical moments") {
    const SignalMatrix zero(4, 250000);
    const auto noisy = add_noise(zero, {0.3, 11});
    double sum = 0.0, sq = 0.0;
    for (double v : noisy.matrix().data()) {
      sum += v;
      sq += v * v;
    }
    const double n = 1e6;
    const double mean = sum / n;
    CHECK(std::abs(mean) < 0.002);
    CHECK(std::abs(std::sqrt(sq / n - mean * mean) - 0.3) < 0.003);
  }
}

TEST_CASE("simgen properties", "[simgen][property]") {
  RandomStream pick(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t seed = static_cast<std::uint64_t>(trial) * 7919u;
    const auto a = generate_shifted_uniform_sources(30, static_cast<std::size_t>(trial % 30), seed);
    const auto b = generate_shifted_uniform_sources(30, static_cast<std::size_t>(trial % 30), seed);
    CHECK(a == b);

    // Mixing is linear.
    Matrix m(2, 2);
    for (double& x : m.data()) x = pick.normal();
    const double k = 1.0 + pick.uniform();
    SignalMatrix combo = a;
    for (std::size_t i = 0; i < combo.matrix().data().size(); ++i) combo.matrix().data()[i] = k * a.matrix().data()[i];
    const auto lhs = mix(combo, m);
    const auto rhs = mix(a, m);
    for (std::size_t i = 0; i < lhs.matrix().data().size(); ++i)
      CHECK(std::abs(lhs.matrix().data()[i] - k * rhs.matrix().data()[i]) < 1e-12);
  }
}
