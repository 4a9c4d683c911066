#ifndef SPARSEBSS_CLUSTERING_HPP
#define SPARSEBSS_CLUSTERING_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sparsebss/core.hpp"
#include "sparsebss/headings.hpp"

namespace sparsebss {

// Heading clustering by per-component sorting and run detection.
//
// Positions m index the sorted order of one component; heading indices n refer
// to the original time order. All indices are 0-based.

struct SortedComponent {
  std::vector<double> values;          // ascending |r_i|
  std::vector<std::size_t> index_map;  // sorted position -> heading index
};

/// Sorts |r_i[n]| over the given heading indices. Equal values keep ascending
/// heading index order.
inline SortedComponent sort_component(const Matrix& headings, const std::vector<std::size_t>& indices,
                                      std::size_t component) {
  if (indices.size() < 2) throw BssError(ErrorCode::TooFewHeadings, "at least two accepted headings are required");
  if (component >= headings.cols()) throw BssError(ErrorCode::DimensionMismatch, "component out of range");
  SortedComponent out;
  out.index_map = indices;
  std::sort(out.index_map.begin(), out.index_map.end());
  std::stable_sort(out.index_map.begin(), out.index_map.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(headings(a, component)) < std::abs(headings(b, component));
  });
  out.values.reserve(out.index_map.size());
  for (std::size_t n : out.index_map) out.values.push_back(std::abs(headings(n, component)));
  return out;
}

/// epsilon = alpha / M for M accepted headings.
inline double epsilon_from_alpha(double alpha, std::size_t accepted_count) {
  if (accepted_count < 2) throw BssError(ErrorCode::TooFewHeadings, "epsilon needs at least two headings");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw BssError(ErrorCode::InvalidArgument, "alpha must lie in (0,1]");
  return alpha / static_cast<double>(accepted_count);
}

/// C[m] = (values[m] - values[m-1] < epsilon); C[0] is always false.
inline std::vector<bool> build_adjacency(const SortedComponent& sorted, double epsilon) {
  if (!(epsilon > 0.0)) throw BssError(ErrorCode::InvalidArgument, "epsilon must be positive");
  std::vector<bool> column(sorted.values.size(), false);
  for (std::size_t m = 1; m < sorted.values.size(); ++m)
    column[m] = sorted.values[m] - sorted.values[m - 1] < epsilon;
  return column;
}

struct Run {
  std::size_t component = 0;
  std::size_t first = 0;  // first true entry of C (inclusive)
  std::size_t last = 0;   // last true entry of C (inclusive)

  std::size_t length() const noexcept { return last - first + 1; }
  friend bool operator==(const Run&, const Run&) = default;
};

/// Longest contiguous run of true entries over all columns. Ties go to the
/// lowest component, then the earliest start.
inline Run find_largest_run(const std::vector<std::vector<bool>>& columns) {
  bool found = false;
  Run best;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto& col = columns[i];
    std::size_t m = 0;
    while (m < col.size()) {
      if (!col[m]) {
        ++m;
        continue;
      }
      std::size_t end = m;
      while (end + 1 < col.size() && col[end + 1]) ++end;
      const Run r{i, m, end};
      if (!found || r.length() > best.length()) {
        best = r;
        found = true;
      }
      m = end + 1;
    }
  }
  if (!found) throw BssError(ErrorCode::NoRunFound, "no adjacent heading components fall within epsilon");
  return best;
}

struct ClusterTables {
  std::vector<SortedComponent> sorted;      // one per component
  std::vector<std::vector<bool>> C;         // C[i][m]
  std::vector<std::vector<bool>> C_U;       // C_U[i][n], time ordered
  std::vector<bool> D;                      // D[n]
  Run seed;
  double epsilon = 0.0;
};

/// Marks the seed run, widened by its left anchor, in time order.
inline std::vector<bool> expand_and_remap(const Run& run, const SortedComponent& sorted, std::size_t heading_count) {
  std::vector<bool> column(heading_count, false);
  const std::size_t lo = run.first > 0 ? run.first - 1 : 0;
  for (std::size_t m = lo; m <= run.last; ++m) column[sorted.index_map[m]] = true;
  return column;
}

/// Fills C_U for every component other than the seed's. A seed heading counts
/// for component i when its sorted position sits in an epsilon run of C[i],
/// the run's left anchor included.
inline void cross_check_components(ClusterTables& tables) {
  const std::size_t n_comp = tables.C.size();
  const std::size_t heading_count = tables.C_U[tables.seed.component].size();
  const auto& seed_col = tables.C_U[tables.seed.component];

  for (std::size_t i = 0; i < n_comp; ++i) {
    if (i == tables.seed.component) continue;
    const auto& sorted = tables.sorted[i];
    const auto& c = tables.C[i];
    std::vector<std::size_t> position(heading_count, heading_count);
    for (std::size_t m = 0; m < sorted.index_map.size(); ++m) position[sorted.index_map[m]] = m;

    auto& col = tables.C_U[i];
    col.assign(heading_count, false);
    for (std::size_t n = 0; n < heading_count; ++n) {
      if (!seed_col[n]) continue;
      const std::size_t m = position[n];
      if (m == heading_count) continue;
      col[n] = c[m] || (m + 1 < c.size() && c[m + 1]);
    }
  }
}

struct Cluster {
  std::vector<std::size_t> members;  // heading indices, ascending
  Matrix velocities;                 // one row per member
};

inline Cluster extract_cluster(ClusterTables& tables, const Matrix& velocities) {
  const std::size_t heading_count = tables.C_U.empty() ? 0 : tables.C_U.front().size();
  tables.D.assign(heading_count, true);
  for (const auto& col : tables.C_U)
    for (std::size_t n = 0; n < heading_count; ++n) tables.D[n] = tables.D[n] && col[n];

  Cluster cluster;
  for (std::size_t n = 0; n < heading_count; ++n)
    if (tables.D[n]) cluster.members.push_back(n);
  if (cluster.members.empty()) throw BssError(ErrorCode::EmptyCluster, "no heading survives the component AND");

  cluster.velocities = Matrix(cluster.members.size(), velocities.cols());
  for (std::size_t j = 0; j < cluster.members.size(); ++j) {
    const auto src = velocities.row(cluster.members[j]);
    std::copy(src.begin(), src.end(), cluster.velocities.row(j).begin());
  }
  return cluster;
}

struct ClusterResult {
  Cluster cluster;
  ClusterTables tables;
};

/// Runs the full sort / adjacency / run / cross-check / AND pipeline over the
/// accepted headings with an explicit epsilon.
inline ClusterResult find_cluster(const HeadingSet& hs, double epsilon) {
  const auto indices = hs.accepted_indices();
  const std::size_t n_comp = hs.dimension();

  ClusterResult out;
  auto& t = out.tables;
  t.epsilon = epsilon;
  t.sorted.reserve(n_comp);
  for (std::size_t i = 0; i < n_comp; ++i) {
    t.sorted.push_back(sort_component(hs.headings, indices, i));
    t.C.push_back(build_adjacency(t.sorted.back(), epsilon));
  }
  t.seed = find_largest_run(t.C);
  t.C_U.assign(n_comp, std::vector<bool>(hs.size(), false));
  t.C_U[t.seed.component] = expand_and_remap(t.seed, t.sorted[t.seed.component], hs.size());
  cross_check_components(t);
  out.cluster = extract_cluster(t, hs.velocities);
  return out;
}

/// Same, with epsilon = alpha / (number of accepted headings).
inline ClusterResult find_cluster_alpha(const HeadingSet& hs, double alpha) {
  std::size_t accepted = 0;
  for (bool a : hs.accepted) accepted += a ? 1 : 0;
  return find_cluster(hs, epsilon_from_alpha(alpha, accepted));
}

}  // namespace sparsebss

#endif  // SPARSEBSS_CLUSTERING_HPP
