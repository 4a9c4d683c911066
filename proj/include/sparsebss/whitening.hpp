#ifndef SPARSEBSS_WHITENING_HPP
#define SPARSEBSS_WHITENING_HPP

#include <string>

#include "sparsebss/core.hpp"

namespace sparsebss {

/// Residual rms below this fraction of the channel's own rms is treated as
/// linear dependence on the earlier channels.
inline constexpr double kRankTolerance = 1e-12;

struct WhitenedData {
  SignalMatrix components;  // e_i[n], unit rms, mutually orthogonal
  Matrix transform;         // W with components = W * input
};

/**
 * Gram-Schmidt whitening in channel order, each output scaled to unit rms.
 *
 * Inner products are sample averages (1/L) sum x[n] y[n]; no mean is removed.
 * Every projection is applied twice (re-orthogonalisation) so the output stays
 * orthogonal to ~1e-15 even for nearly collinear channels. The transform rows
 * are updated in lockstep, so W is lower triangular.
 */
inline WhitenedData gram_schmidt_whiten(const SignalMatrix& mixtures) {
  validate(mixtures);
  const std::size_t n_ch = mixtures.channels();
  const std::size_t len = mixtures.samples();

  SignalMatrix e(n_ch, len, mixtures.sample_rate_hz());
  Matrix w(n_ch, n_ch);

  for (std::size_t i = 0; i < n_ch; ++i) {
    const auto z = mixtures.channel(i);
    const double z_rms = rms(z);
    if (z_rms == 0.0) throw BssError(ErrorCode::ZeroChannel, "channel " + std::to_string(i) + " is identically zero");

    auto u = e.channel(i);
    std::copy(z.begin(), z.end(), u.begin());
    auto w_row = w.row(i);
    w_row[i] = 1.0;

    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < i; ++k) {
        const auto ek = e.channel(k);
        const double c = sample_inner(u, ek);  // e_k has unit rms
        for (std::size_t n = 0; n < len; ++n) u[n] -= c * ek[n];
        const auto wk = w.row(k);
        for (std::size_t j = 0; j <= k; ++j) w_row[j] -= c * wk[j];
      }
    }

    const double u_rms = rms(u);
    if (u_rms < kRankTolerance * z_rms)
      throw BssError(ErrorCode::RankDeficient,
                     "channel " + std::to_string(i) + " is linearly dependent on earlier channels");
    for (double& v : u) v /= u_rms;
    for (std::size_t j = 0; j <= i; ++j) w_row[j] /= u_rms;
  }
  return {std::move(e), std::move(w)};
}

}  // namespace sparsebss

#endif  // SPARSEBSS_WHITENING_HPP
