#ifndef SPARSEBSS_CORE_HPP
#define SPARSEBSS_CORE_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sparsebss {

enum class ErrorCode {
  ZeroChannel,
  NonFinite,
  TooShort,
  RankDeficient,
  DimensionMismatch,
  InvalidArgument,
  TooFewHeadings,
  NoRunFound,
  EmptyCluster,
  DegenerateCluster,
  NoConsecutivePair,
  ClusterFormationFailed,
  AllRunsFailed,
  ParseError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroChannel: return "ZeroChannel";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooFewHeadings: return "TooFewHeadings";
    case ErrorCode::NoRunFound: return "NoRunFound";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::DegenerateCluster: return "DegenerateCluster";
    case ErrorCode::NoConsecutivePair: return "NoConsecutivePair";
    case ErrorCode::ClusterFormationFailed: return "ClusterFormationFailed";
    case ErrorCode::AllRunsFailed: return "AllRunsFailed";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this exception. `code()`
/// identifies the condition; `iteration()` is set when the failure happened
/// inside the deflation loop (1-based).
class BssError : public std::runtime_error {
 public:
  BssError(ErrorCode code, const std::string& what, std::optional<std::size_t> iteration = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), iteration_(iteration) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> iteration() const noexcept { return iteration_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> iteration_;
};

/// Dense row-major real matrix. Used for mixing matrices, transforms and
/// sequences of N-vectors (one vector per row).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw BssError(ErrorCode::DimensionMismatch, "matrix data size does not match shape");
  }
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw BssError(ErrorCode::DimensionMismatch, "ragged matrix initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw BssError(ErrorCode::DimensionMismatch, "matrix product shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

/// N channels x L samples; row = channel, column = time sample.
class SignalMatrix {
 public:
  SignalMatrix() = default;
  SignalMatrix(std::size_t channels, std::size_t samples, double sample_rate_hz = 1.0)
      : data_(channels, samples), sample_rate_hz_(sample_rate_hz) {}
  explicit SignalMatrix(Matrix data, double sample_rate_hz = 1.0)
      : data_(std::move(data)), sample_rate_hz_(sample_rate_hz) {}
  SignalMatrix(std::initializer_list<std::initializer_list<double>> rows) : data_(rows) {}

  std::size_t channels() const noexcept { return data_.rows(); }
  std::size_t samples() const noexcept { return data_.cols(); }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }

  double& operator()(std::size_t channel, std::size_t n) { return data_(channel, n); }
  double operator()(std::size_t channel, std::size_t n) const { return data_(channel, n); }

  std::span<double> channel(std::size_t c) { return data_.row(c); }
  std::span<const double> channel(std::size_t c) const { return data_.row(c); }

  const Matrix& matrix() const noexcept { return data_; }
  Matrix& matrix() noexcept { return data_; }

  friend bool operator==(const SignalMatrix& a, const SignalMatrix& b) { return a.data_ == b.data_; }

 private:
  Matrix data_;
  double sample_rate_hz_ = 1.0;
};

enum class Method { Global, MHC };

inline const char* to_string(Method m) { return m == Method::Global ? "global" : "mhc"; }

struct MethodParams {
  double v_th = 0.4;
  double alpha = 1.0;
  Method method = Method::Global;

  void check() const {
    if (!(v_th > 0.0 && v_th < 1.0)) throw BssError(ErrorCode::InvalidArgument, "v_th must lie in (0,1)");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw BssError(ErrorCode::InvalidArgument, "alpha must lie in (0,1]");
  }
};

// ---------------------------------------------------------------------------
// Small vector helpers shared by the numerical modules.

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Population rms (divisor = length).
inline double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::sqrt(dot(x, x) / static_cast<double>(x.size()));
}

/// Sample inner product (1/L) sum x[n] y[n].
inline double sample_inner(std::span<const double> x, std::span<const double> y) {
  return dot(x, y) / static_cast<double>(x.size());
}

// ---------------------------------------------------------------------------

/// Throws NonFinite or TooShort when the SignalMatrix invariants do not hold.
inline void validate(const SignalMatrix& signal) {
  if (signal.channels() < 1) throw BssError(ErrorCode::TooShort, "signal has no channels");
  if (signal.samples() < 2) throw BssError(ErrorCode::TooShort, "at least two samples are required");
  for (double v : signal.matrix().data())
    if (!std::isfinite(v)) throw BssError(ErrorCode::NonFinite, "signal contains NaN or Inf");
  if (!(signal.sample_rate_hz() > 0.0) || !std::isfinite(signal.sample_rate_hz()))
    throw BssError(ErrorCode::InvalidArgument, "sample rate must be positive");
}

inline bool is_valid(const SignalMatrix& signal) noexcept {
  try {
    validate(signal);
    return true;
  } catch (const BssError&) {
    return false;
  }
}

/// Scales every channel to unit rms.
inline SignalMatrix normalize_rms(const SignalMatrix& signal) {
  SignalMatrix out = signal;
  for (std::size_t c = 0; c < out.channels(); ++c) {
    auto ch = out.channel(c);
    const double r = rms(ch);
    if (r == 0.0) throw BssError(ErrorCode::ZeroChannel, "channel " + std::to_string(c) + " is identically zero");
    for (double& v : ch) v /= r;
  }
  return out;
}

}  // namespace sparsebss

#endif  // SPARSEBSS_CORE_HPP
