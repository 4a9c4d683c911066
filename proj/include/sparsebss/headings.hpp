#ifndef SPARSEBSS_HEADINGS_HPP
#define SPARSEBSS_HEADINGS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "sparsebss/core.hpp"

namespace sparsebss {

/// Phase-space velocities and headings of a (whitened) signal.
/// Index k here corresponds to the velocity between samples k and k+1.
struct HeadingSet {
  Matrix velocities;          // (L-1) x N
  Matrix headings;            // (L-1) x N, zero rows where the velocity is zero
  std::vector<bool> zero;     // velocity has zero norm
  std::vector<bool> accepted; // passed the velocity threshold
  double v_max = 0.0;         // largest Euclidean velocity norm

  std::size_t size() const noexcept { return velocities.rows(); }
  std::size_t dimension() const noexcept { return velocities.cols(); }

  std::vector<std::size_t> accepted_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < accepted.size(); ++k)
      if (accepted[k]) out.push_back(k);
    return out;
  }
};

/// v[k] = e[k+1] - e[k]; one row per adjacent pair.
inline Matrix compute_velocities(const SignalMatrix& data) {
  if (data.samples() < 2) throw BssError(ErrorCode::TooShort, "at least two samples are required");
  const std::size_t n_ch = data.channels();
  Matrix v(data.samples() - 1, n_ch);
  for (std::size_t k = 0; k + 1 < data.samples(); ++k)
    for (std::size_t c = 0; c < n_ch; ++c) v(k, c) = data(c, k + 1) - data(c, k);
  return v;
}

struct NormalizedHeadings {
  Matrix headings;
  std::vector<bool> zero;
};

inline NormalizedHeadings normalize_headings(const Matrix& velocities) {
  NormalizedHeadings out{Matrix(velocities.rows(), velocities.cols()),
                         std::vector<bool>(velocities.rows(), false)};
  for (std::size_t k = 0; k < velocities.rows(); ++k) {
    const double mag = norm(velocities.row(k));
    if (mag == 0.0) {
      out.zero[k] = true;
      continue;
    }
    auto h = out.headings.row(k);
    const auto v = velocities.row(k);
    for (std::size_t c = 0; c < h.size(); ++c) h[c] = v[c] / mag;
  }
  return out;
}

inline double max_velocity_norm(const Matrix& velocities) {
  double v_max = 0.0;
  for (std::size_t k = 0; k < velocities.rows(); ++k) v_max = std::max(v_max, norm(velocities.row(k)));
  return v_max;
}

/// Accepts k when max_i |v_i[k]| >= v_th * max_m |v[m]|. The left side is the
/// largest component, the right side uses the full Euclidean norm.
inline std::vector<bool> apply_velocity_threshold(const Matrix& velocities, double v_th) {
  if (!(v_th > 0.0 && v_th < 1.0)) throw BssError(ErrorCode::InvalidArgument, "v_th must lie in (0,1)");
  const double limit = v_th * max_velocity_norm(velocities);
  std::vector<bool> mask(velocities.rows(), false);
  for (std::size_t k = 0; k < velocities.rows(); ++k) {
    const auto v = velocities.row(k);
    double largest = 0.0;
    for (double x : v) largest = std::max(largest, std::abs(x));
    mask[k] = largest > 0.0 && largest >= limit;
  }
  return mask;
}

inline HeadingSet build_heading_set(const Matrix& velocities, double v_th) {
  auto normalized = normalize_headings(velocities);
  HeadingSet hs;
  hs.accepted = apply_velocity_threshold(velocities, v_th);
  hs.v_max = max_velocity_norm(velocities);
  hs.velocities = velocities;
  hs.headings = std::move(normalized.headings);
  hs.zero = std::move(normalized.zero);
  return hs;
}

inline HeadingSet build_heading_set(const SignalMatrix& data, double v_th) {
  return build_heading_set(compute_velocities(data), v_th);
}

}  // namespace sparsebss

#endif  // SPARSEBSS_HEADINGS_HPP
