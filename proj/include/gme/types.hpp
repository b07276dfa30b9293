#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gme {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Default limit on the number of complex entries any single dense buffer may hold (2^24).
inline constexpr std::size_t kDefaultMaxEntries = std::size_t{1} << 24;

/// Raised when a requested computation would exceed a configured memory cap.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(const std::string& what, std::size_t requested, std::size_t cap)
      : std::runtime_error(what + ": needs " + std::to_string(requested) +
                           " entries, cap is " + std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}
  std::size_t requested() const { return requested_; }
  std::size_t cap() const { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

inline void check_cap(const std::string& what, std::size_t requested, std::size_t cap) {
  if (requested > cap) throw CapExceeded(what, requested, cap);
}

/// Product of extents with overflow saturation at SIZE_MAX.
inline std::size_t checked_product(const std::vector<int>& dims) {
  std::size_t total = 1;
  for (int d : dims) {
    auto ud = static_cast<std::size_t>(d);
    if (ud != 0 && total > SIZE_MAX / ud) return SIZE_MAX;
    total *= ud;
  }
  return total;
}

/// Row-major strides for the given extents (last index fastest).
inline std::vector<std::size_t> row_major_strides(const std::vector<int>& dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) strides[i - 1] = strides[i] * static_cast<std::size_t>(dims[i]);
  return strides;
}

/// Neumaier-compensated sum of doubles.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Exact binomial coefficient as double (exact up to 2^53).
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

/// x^(1/k) evaluated as exp(log(x)/k); returns 0 for x <= 0.
inline double kth_root(double x, double k) {
  if (x <= 0.0) return 0.0;
  return std::exp(std::log(x) / k);
}

}  // namespace gme
