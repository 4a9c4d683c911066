#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "sparsebss/core.hpp"

using namespace sparsebss;
using Catch::Approx;

namespace {

SignalMatrix random_signal(std::mt19937_64& rng, std::size_t channels, std::size_t samples) {
  std::normal_distribution<double> dist(0.0, 3.0);
  SignalMatrix s(channels, samples);
  for (std::size_t c = 0; c < channels; ++c)
    for (double& v : s.channel(c)) v = dist(rng);
  return s;
}

}  // namespace

TEST_CASE("normalize_rms scales each channel to unit rms", "[core]") {
  SECTION("two-sample channel") {
    const SignalMatrix s{{3.0, 4.0}};
    const auto out = normalize_rms(s);
    // rms(3,4) = sqrt((9+16)/2) = sqrt(12.5)
    CHECK(out(0, 0) == Approx(0.8485281374238570).epsilon(1e-14));
    CHECK(out(0, 1) == Approx(1.1313708498984760).epsilon(1e-14));
  }
  SECTION("unit-rms channel is unchanged") {
    const SignalMatrix s{{1.0, -1.0, 1.0, -1.0}};
    CHECK(normalize_rms(s) == s);
  }
  SECTION("zero channel") {
    const SignalMatrix s{{1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}};
    try {
      (void)normalize_rms(s);
      FAIL("expected ZeroChannel");
    } catch (const BssError& e) {
      CHECK(e.code() == ErrorCode::ZeroChannel);
    }
  }
}

TEST_CASE("normalize_rms properties", "[core][property]") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> scale(-50.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = random_signal(rng, 1 + trial % 4, 2 + trial % 37);
    const auto once = normalize_rms(x);
    const auto twice = normalize_rms(once);
    for (std::size_t c = 0; c < x.channels(); ++c) {
      CHECK(rms(once.channel(c)) == Approx(1.0).margin(1e-12));
      for (std::size_t n = 0; n < x.samples(); ++n) CHECK(std::abs(twice(c, n) - once(c, n)) < 1e-12);
    }

    double k = scale(rng);
    if (k == 0.0) k = 1.0;
    SignalMatrix scaled = x;
    for (std::size_t c = 0; c < x.channels(); ++c)
      for (double& v : scaled.channel(c)) v *= k;
    const auto ns = normalize_rms(scaled);
    const double sign = k > 0 ? 1.0 : -1.0;
    for (std::size_t c = 0; c < x.channels(); ++c)
      for (std::size_t n = 0; n < x.samples(); ++n) CHECK(std::abs(ns(c, n) - sign * once(c, n)) < 1e-12);
  }
}

TEST_CASE("validate reports invariant violations", "[core]") {
  SignalMatrix ok(2, 1000);
  for (std::size_t n = 0; n < 1000; ++n) ok(0, n) = ok(1, n) = std::sin(0.01 * static_cast<double>(n));
  CHECK_NOTHROW(validate(ok));
  CHECK(is_valid(ok));

  SignalMatrix bad = ok;
  bad(1, 500) = std::numeric_limits<double>::quiet_NaN();
  try {
    validate(bad);
    FAIL("expected NonFinite");
  } catch (const BssError& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }

  const SignalMatrix short_signal(2, 1);
  try {
    validate(short_signal);
    FAIL("expected TooShort");
  } catch (const BssError& e) {
    CHECK(e.code() == ErrorCode::TooShort);
  }
}

TEST_CASE("MethodParams range checks", "[core]") {
  CHECK_NOTHROW(MethodParams{0.4, 1.0, Method::Global}.check());
  CHECK_THROWS_AS((MethodParams{0.0, 1.0, Method::Global}.check()), BssError);
  CHECK_THROWS_AS((MethodParams{1.0, 1.0, Method::MHC}.check()), BssError);
  CHECK_THROWS_AS((MethodParams{0.5, 0.0, Method::Global}.check()), BssError);
  CHECK_THROWS_AS((MethodParams{0.5, 1.5, Method::Global}.check()), BssError);
}

TEST_CASE("matrix product", "[core]") {
  const Matrix a{{1.0, 2.0}, {3.0, 4.0}};
  const Matrix b{{5.0}, {6.0}};
  const Matrix p = a * b;
  CHECK(p(0, 0) == 17.0);
  CHECK(p(1, 0) == 39.0);
  CHECK_THROWS_AS(b * b, BssError);
}
