#ifndef SPARSEBSS_SEPARATION_HPP
#define SPARSEBSS_SEPARATION_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "sparsebss/clustering.hpp"
#include "sparsebss/core.hpp"
#include "sparsebss/headings.hpp"
#include "sparsebss/whitening.hpp"

namespace sparsebss {

struct EstimatedDirection {
  std::vector<double> unit_vector;
  std::size_t support_size = 0;
};

struct IterationDiagnostics {
  std::size_t accepted_headings = 0;
  std::size_t cluster_size = 0;  // 1 for MHC
  double epsilon = 0.0;          // 0 for MHC
  double residual_energy = 0.0;  // sum_n |z'[n]|^2 after deflation
};

struct SeparationResult {
  SignalMatrix estimates;  // one row per extracted source, extraction order
  std::vector<EstimatedDirection> directions;
  std::vector<IterationDiagnostics> iterations;
  Matrix whitening_transform;
};

/**
 * Magnitude-weighted cluster average.
 *
 * Members are first flipped onto the half-space of the largest member, then
 * V_i = sum_j M[j] v_i[j] / sum_j M[j]^2 with M[j] = |v[j]|; the result is V/|V|.
 */
inline EstimatedDirection weighted_average_heading(const Cluster& cluster) {
  const Matrix& v = cluster.velocities;
  if (v.rows() == 0) throw BssError(ErrorCode::EmptyCluster, "cannot average an empty cluster");
  const std::size_t dim = v.cols();

  std::vector<double> mag(v.rows());
  std::size_t ref = 0;
  for (std::size_t j = 0; j < v.rows(); ++j) {
    mag[j] = norm(v.row(j));
    if (mag[j] > mag[ref]) ref = j;
  }

  std::vector<double> acc(dim, 0.0);
  double weight_sq = 0.0;
  for (std::size_t j = 0; j < v.rows(); ++j) {
    const double sign = dot(v.row(j), v.row(ref)) < 0.0 ? -1.0 : 1.0;
    const auto row = v.row(j);
    for (std::size_t i = 0; i < dim; ++i) acc[i] += mag[j] * sign * row[i];
    weight_sq += mag[j] * mag[j];
  }
  if (weight_sq == 0.0) throw BssError(ErrorCode::DegenerateCluster, "cluster members have zero magnitude");
  for (double& a : acc) a /= weight_sq;

  const double len = norm(acc);
  if (len < 1e-12) throw BssError(ErrorCode::DegenerateCluster, "cluster members cancel");
  for (double& a : acc) a /= len;
  return {std::move(acc), v.rows()};
}

/// Minimum heading change: among consecutive accepted headings pick the pair
/// whose change min(|r[k]-r[k-1]|, |r[k]+r[k-1]|) is smallest and return the
/// later heading. Ties go to the earliest pair.
inline EstimatedDirection mhc_find_direction(const HeadingSet& hs) {
  const std::size_t dim = hs.dimension();
  bool found = false;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 1; k < hs.size(); ++k) {
    if (!hs.accepted[k] || !hs.accepted[k - 1]) continue;
    const auto a = hs.headings.row(k);
    const auto b = hs.headings.row(k - 1);
    double minus = 0.0, plus = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      minus += (a[i] - b[i]) * (a[i] - b[i]);
      plus += (a[i] + b[i]) * (a[i] + b[i]);
    }
    const double change = std::sqrt(std::min(minus, plus));
    if (!found || change < best) {
      best = change;
      best_k = k;
      found = true;
    }
  }
  if (!found) throw BssError(ErrorCode::NoConsecutivePair, "no two consecutive headings pass the velocity threshold");
  const auto r = hs.headings.row(best_k);
  return {std::vector<double>(r.begin(), r.end()), 1};
}

/// s[n] = R . e[n]
inline std::vector<double> project_source(const SignalMatrix& data, const EstimatedDirection& direction) {
  const auto& r = direction.unit_vector;
  if (r.size() != data.channels()) throw BssError(ErrorCode::DimensionMismatch, "direction and data dimensions differ");
  std::vector<double> s(data.samples(), 0.0);
  for (std::size_t c = 0; c < data.channels(); ++c) {
    const auto ch = data.channel(c);
    for (std::size_t n = 0; n < s.size(); ++n) s[n] += r[c] * ch[n];
  }
  return s;
}

/// z'[n] = e[n] - s[n] R
inline SignalMatrix deflate(const SignalMatrix& data, const EstimatedDirection& direction,
                            std::span<const double> source) {
  const auto& r = direction.unit_vector;
  if (r.size() != data.channels() || source.size() != data.samples())
    throw BssError(ErrorCode::DimensionMismatch, "deflation shapes differ");
  SignalMatrix out = data;
  for (std::size_t c = 0; c < out.channels(); ++c) {
    auto ch = out.channel(c);
    for (std::size_t n = 0; n < ch.size(); ++n) ch[n] -= source[n] * r[c];
  }
  return out;
}

inline double total_energy(const SignalMatrix& data) {
  double e = 0.0;
  for (double v : data.matrix().data()) e += v * v;
  return e;
}

/// Extraction loop on already-whitened data: one source per channel.
inline SeparationResult separate_whitened(const SignalMatrix& whitened, const MethodParams& params) {
  params.check();
  const std::size_t n_src = whitened.channels();
  SeparationResult result;
  result.estimates = SignalMatrix(n_src, whitened.samples(), whitened.sample_rate_hz());

  SignalMatrix current = whitened;
  for (std::size_t it = 0; it < n_src; ++it) {
    const HeadingSet hs = build_heading_set(current, params.v_th);
    IterationDiagnostics diag;
    for (bool a : hs.accepted) diag.accepted_headings += a ? 1 : 0;

    EstimatedDirection dir;
    try {
      if (params.method == Method::Global) {
        const ClusterResult cr = find_cluster_alpha(hs, params.alpha);
        diag.epsilon = cr.tables.epsilon;
        dir = weighted_average_heading(cr.cluster);
      } else {
        dir = mhc_find_direction(hs);
      }
    } catch (const BssError& err) {
      const ErrorCode code = params.method == Method::Global ? ErrorCode::ClusterFormationFailed : err.code();
      throw BssError(code, "iteration " + std::to_string(it + 1) + ": " + err.what(), it + 1);
    }
    diag.cluster_size = dir.support_size;

    const auto source = project_source(current, dir);
    current = deflate(current, dir, source);
    diag.residual_energy = total_energy(current);

    std::copy(source.begin(), source.end(), result.estimates.channel(it).begin());
    result.directions.push_back(std::move(dir));
    result.iterations.push_back(diag);
  }
  return result;
}

/// Whitens once, then extracts all sources by deflation.
inline SeparationResult separate(const SignalMatrix& mixtures, const MethodParams& params) {
  params.check();
  validate(mixtures);
  auto whitened = gram_schmidt_whiten(mixtures);
  SeparationResult result = separate_whitened(whitened.components, params);
  result.whitening_transform = std::move(whitened.transform);
  return result;
}

}  // namespace sparsebss

#endif  // SPARSEBSS_SEPARATION_HPP
