#pragma once

#include "dpbeam/types.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace dpbeam {

/// H(x) = sum_{i <= j} Q_ij x_i x_j + offset over x in {0,1}^N_V.
///
/// Q is upper triangular with the linear terms on its diagonal. Storage is a
/// symmetric coupling matrix with zero diagonal (coupling(i,j) = Q_ij for
/// i < j) plus the diagonal as a vector, which gives the annealer contiguous
/// column access without a second dense copy.
class QuboInstance {
 public:
  QuboInstance() = default;

  /// From the upper triangle of `q` (entries below the diagonal are ignored).
  static QuboInstance from_upper(const RMatrix& q, double offset, double t = 0.0) {
    detail::require(q.rows() == q.cols(), "QUBO matrix must be square");
    QuboInstance out;
    const Eigen::Index n = q.rows();
    out.coupling_ = RMatrix::Zero(n, n);
    out.linear_ = q.diagonal();
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < j; ++i) out.coupling_(i, j) = out.coupling_(j, i) = q(i, j);
    out.offset_ = offset;
    out.t_ = t;
    return out;
  }

  /// From x^T M x + linear^T x + offset with M symmetric.
  static QuboInstance from_quadratic(RMatrix m, const RVector& linear, double offset, double t = 0.0) {
    detail::require(m.rows() == m.cols() && m.rows() == linear.size(), "quadratic form dimensions disagree");
    QuboInstance out;
    out.linear_ = m.diagonal() + linear;
    m *= 2.0;
    m.diagonal().setZero();
    out.coupling_ = std::move(m);
    out.offset_ = offset;
    out.t_ = t;
    return out;
  }

  Eigen::Index size() const { return linear_.size(); }
  double offset() const { return offset_; }
  double t() const { return t_; }
  const RVector& linear() const { return linear_; }
  const RMatrix& coupling() const { return coupling_; }

  double q(Eigen::Index i, Eigen::Index j) const {
    if (i == j) return linear_[i];
    return i < j ? coupling_(i, j) : 0.0;
  }

  RMatrix upper_triangular() const {
    RMatrix q = coupling_.triangularView<Eigen::StrictlyUpper>();
    q.diagonal() = linear_;
    return q;
  }

  /// Sum of |terms|; bounds |H(x) - offset| for every x.
  double magnitude() const {
    return std::abs(offset_) + linear_.cwiseAbs().sum() + 0.5 * coupling_.cwiseAbs().sum();
  }

  /// Mean |Q_ij| over the nonzero upper-triangular entries.
  double mean_abs_entry() const {
    double sum = 0.0;
    std::size_t count = 0;
    const Eigen::Index n = size();
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const double v = std::abs(coupling_(i, j));
        if (v != 0.0) {
          sum += v;
          ++count;
        }
      }
      if (linear_[j] != 0.0) {
        sum += std::abs(linear_[j]);
        ++count;
      }
    }
    return count ? sum / static_cast<double>(count) : 0.0;
  }

 private:
  RMatrix coupling_;
  RVector linear_;
  double offset_ = 0.0;
  double t_ = 0.0;
};

/// Full evaluation of H(x), offset included.
inline double qubo_energy(const QuboInstance& instance, const Bits& x) {
  detail::require(static_cast<Eigen::Index>(x.size()) == instance.size(), "bit vector length does not match QUBO size");
  const Eigen::Index n = instance.size();
  double e = instance.offset();
  const RMatrix& c = instance.coupling();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!x[static_cast<std::size_t>(j)]) continue;
    e += instance.linear()[j];
    double s = 0.0;
    for (Eigen::Index i = 0; i < j; ++i) s += x[static_cast<std::size_t>(i)] ? c(i, j) : 0.0;
    e += s;
  }
  return e;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Sparse triplet text format:
///   # optional comment lines
///   N_V offset
///   i j value      (0-based, i <= j, one line per nonzero Q_ij)
inline void write_qubo_triplets(std::ostream& os, const QuboInstance& instance) {
  os << "# dpbeam qubo t=" << detail::format_double(instance.t()) << "\n";
  os << instance.size() << ' ' << detail::format_double(instance.offset()) << '\n';
  const Eigen::Index n = instance.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = instance.q(i, j);
      if (v != 0.0) os << i << ' ' << j << ' ' << detail::format_double(v) << '\n';
    }
  }
}

inline QuboInstance read_qubo_triplets(std::istream& is) {
  std::string line;
  Eigen::Index n = -1;
  double offset = 0.0;
  RMatrix q;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (n < 0) {
      if (!(ls >> n >> offset) || n < 0) throw InvalidArgument("QUBO triplet header must be 'N_V offset'");
      q = RMatrix::Zero(n, n);
      continue;
    }
    Eigen::Index i = 0, j = 0;
    double v = 0.0;
    if (!(ls >> i >> j >> v)) throw InvalidArgument("malformed QUBO triplet line: " + line);
    if (i < 0 || j < 0 || i >= n || j >= n) throw InvalidArgument("QUBO triplet index out of range: " + line);
    if (i > j) std::swap(i, j);
    q(i, j) += v;
  }
  if (n < 0) throw InvalidArgument("QUBO triplet stream has no header");
  return QuboInstance::from_upper(q, offset);
}

}  // namespace dpbeam
