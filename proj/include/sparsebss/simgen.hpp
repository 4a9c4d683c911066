#ifndef SPARSEBSS_SIMGEN_HPP
#define SPARSEBSS_SIMGEN_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "sparsebss/core.hpp"

namespace sparsebss {

struct GaussianSourceSpec {
  double amplitude = 1.0;
  double center_s = 0.0;
  double width_s = 1.0;  // sigma; support is center +/- 4 sigma

  friend bool operator==(const GaussianSourceSpec&, const GaussianSourceSpec&) = default;
};

struct NoiseSpec {
  double sd = 0.0;
  std::uint64_t seed = 0;
};

/// Portable random stream: std::mt19937_64 (output fully specified by the
/// standard), 53-bit uniform doubles and Box-Muller normals. Both Box-Muller
/// outputs are used, cosine branch first.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline std::size_t sample_count(double sample_rate_hz, double duration_s) {
  if (!(sample_rate_hz > 0.0) || !(duration_s > 0.0))
    throw BssError(ErrorCode::InvalidArgument, "sample rate and duration must be positive");
  // Absorbs representation error such as 0.2 * 250 = 50.000000000000007.
  return static_cast<std::size_t>(std::ceil(duration_s * sample_rate_hz - 1e-9));
}

/// Truncated Gaussian pulses sampled at t = n / fs:
/// a exp(-(t-t0)^2 / (2 sigma^2)) for |t - t0| <= 4 sigma, else exactly 0.
inline SignalMatrix generate_gaussian_sources(const std::vector<GaussianSourceSpec>& specs, double sample_rate_hz,
                                              double duration_s) {
  const std::size_t len = sample_count(sample_rate_hz, duration_s);
  SignalMatrix out(specs.size(), len, sample_rate_hz);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    if (!(s.width_s > 0.0)) throw BssError(ErrorCode::InvalidArgument, "gaussian width must be positive");
    for (std::size_t n = 0; n < len; ++n) {
      const double dt = static_cast<double>(n) / sample_rate_hz - s.center_s;
      if (std::abs(dt) <= 4.0 * s.width_s) out(i, n) = s.amplitude * std::exp(-dt * dt / (2.0 * s.width_s * s.width_s));
    }
  }
  return out;
}

/// Two uniform [0,1) sources of `length` samples each; source 1 is padded with
/// `shift` trailing zeros, source 2 with `shift` leading zeros. Source 1's
/// samples are drawn before source 2's.
inline SignalMatrix generate_shifted_uniform_sources(std::size_t length, std::size_t shift, std::uint64_t seed) {
  if (shift > length) throw BssError(ErrorCode::InvalidArgument, "shift must not exceed length");
  RandomStream rng(seed);
  SignalMatrix out(2, length + shift);
  for (std::size_t n = 0; n < length; ++n) out(0, n) = rng.uniform();
  for (std::size_t n = 0; n < length; ++n) out(1, shift + n) = rng.uniform();
  return out;
}

/// z = A s
inline SignalMatrix mix(const SignalMatrix& sources, const Matrix& mixing) {
  if (mixing.cols() != sources.channels())
    throw BssError(ErrorCode::DimensionMismatch, "mixing matrix columns must equal the source count");
  return SignalMatrix(mixing * sources.matrix(), sources.sample_rate_hz());
}

/// R = min_ij max_n |A_ij s_j[n]|.
inline double compute_R(const SignalMatrix& sources, const Matrix& mixing) {
  if (mixing.cols() != sources.channels())
    throw BssError(ErrorCode::DimensionMismatch, "mixing matrix columns must equal the source count");
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mixing.rows(); ++i)
    for (std::size_t j = 0; j < mixing.cols(); ++j) {
      double peak = 0.0;
      for (double s : sources.channel(j)) peak = std::max(peak, std::abs(mixing(i, j) * s));
      r = std::min(r, peak);
    }
  return r;
}

/// R from the continuous pulse model, whose peak magnitude is |a_j|. The
/// sampled form can be lower when no sample lands on a pulse centre.
inline double compute_R(const std::vector<GaussianSourceSpec>& specs, const Matrix& mixing) {
  if (mixing.cols() != specs.size())
    throw BssError(ErrorCode::DimensionMismatch, "mixing matrix columns must equal the source count");
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mixing.rows(); ++i)
    for (std::size_t j = 0; j < mixing.cols(); ++j) r = std::min(r, std::abs(mixing(i, j) * specs[j].amplitude));
  return r;
}

/// Adds i.i.d. N(0, sd^2) noise, channel by channel in sample order.
inline SignalMatrix add_noise(const SignalMatrix& mixtures, const NoiseSpec& noise) {
  if (!(noise.sd >= 0.0)) throw BssError(ErrorCode::InvalidArgument, "noise sd must be non-negative");
  if (noise.sd == 0.0) return mixtures;
  RandomStream rng(noise.seed);
  SignalMatrix out = mixtures;
  for (std::size_t c = 0; c < out.channels(); ++c)
    for (double& v : out.channel(c)) v += noise.sd * rng.normal();
  return out;
}

// Two disjoint truncated Gaussians mixed by a fixed 2x2 matrix.
inline std::vector<GaussianSourceSpec> two_pulse_sources() {
  return {{1.0, 0.1, 0.0125}, {0.1, 0.026, 0.00625}};
}
inline Matrix two_pulse_mixing() { return Matrix{{1.3, 2.0}, {1.0, 2.85}}; }
inline constexpr double kTwoPulseSampleRate = 250.0;
inline constexpr double kTwoPulseDuration = 0.2;

inline Matrix shifted_uniform_mixing() { return Matrix{{0.799, -0.498}, {-0.373, -0.133}}; }

}  // namespace sparsebss

#endif  // SPARSEBSS_SIMGEN_HPP
