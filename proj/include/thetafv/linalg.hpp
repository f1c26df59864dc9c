#pragma once

// Direct solvers for the truncated coefficient matrices: scalar and block
// diagonal, scalar tridiagonal (Thomas) and block tridiagonal, plus the
// row-sum check that decides whether dropping entries keeps the iteration
// stable.

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace thetafv::linalg {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 8, 8>;

/// N x M, one row per cell.
template <typename Scalar>
using Field = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr Eigen::Index kMaxBlockSize = 8;
inline constexpr double kPivotTolerance = 1e-14;

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A(i, i) = diag(i), A(i+1, i) = sub(i), A(i, i+1) = sup(i).
template <typename Scalar>
struct TriDiagonal {
  Vector<Scalar> sub;
  Vector<Scalar> diag;
  Vector<Scalar> sup;

  TriDiagonal() = default;
  explicit TriDiagonal(Eigen::Index n)
      : sub(Vector<Scalar>::Zero(std::max<Eigen::Index>(n - 1, 0))),
        diag(Vector<Scalar>::Zero(n)),
        sup(Vector<Scalar>::Zero(std::max<Eigen::Index>(n - 1, 0))) {}

  Eigen::Index size() const { return diag.size(); }
  bool consistent() const { return diag.size() >= 1 && sub.size() == diag.size() - 1 && sup.size() == diag.size() - 1; }

  Vector<Scalar> multiply(const Vector<Scalar>& x) const {
    const Eigen::Index n = size();
    Vector<Scalar> y = diag.cwiseProduct(x);
    if (n > 1) {
      y.tail(n - 1) += sub.cwiseProduct(x.head(n - 1));
      y.head(n - 1) += sup.cwiseProduct(x.tail(n - 1));
    }
    return y;
  }
};

/// Same layout as TriDiagonal with dense M x M blocks per entry.
template <typename Scalar>
struct BlockTriDiagonal {
  std::vector<Block<Scalar>> sub;   // N-1
  std::vector<Block<Scalar>> diag;  // N
  std::vector<Block<Scalar>> sup;   // N-1

  BlockTriDiagonal() = default;
  BlockTriDiagonal(Eigen::Index n, Eigen::Index m)
      : sub(static_cast<std::size_t>(std::max<Eigen::Index>(n - 1, 0)), Block<Scalar>::Zero(checked_block_size(m), m)),
        diag(static_cast<std::size_t>(n), Block<Scalar>::Zero(m, m)),
        sup(static_cast<std::size_t>(std::max<Eigen::Index>(n - 1, 0)), Block<Scalar>::Zero(m, m)) {}

  static Eigen::Index checked_block_size(Eigen::Index m) {
    if (m > kMaxBlockSize) throw DimensionError("block size " + std::to_string(m) + " exceeds " + std::to_string(kMaxBlockSize));
    return m;
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(diag.size()); }
  Eigen::Index block_size() const { return diag.empty() ? 0 : diag.front().rows(); }

  void check() const {
    const Eigen::Index n = size();
    const Eigen::Index m = block_size();
    if (n < 3 || m < 1) throw DimensionError("block system needs N >= 3 and M >= 1");
    if (m > kMaxBlockSize) throw DimensionError("block size " + std::to_string(m) + " exceeds " + std::to_string(kMaxBlockSize));
    if (static_cast<Eigen::Index>(sub.size()) != n - 1 || static_cast<Eigen::Index>(sup.size()) != n - 1) {
      throw DimensionError("off-diagonal block count must be N-1");
    }
    auto square = [m](const Block<Scalar>& b) { return b.rows() == m && b.cols() == m; };
    if (!std::all_of(diag.begin(), diag.end(), square) || !std::all_of(sub.begin(), sub.end(), square) ||
        !std::all_of(sup.begin(), sup.end(), square)) {
      throw DimensionError("block dimensions are not uniform");
    }
  }

  Field<Scalar> multiply(const Field<Scalar>& x) const {
    const Eigen::Index n = size();
    Field<Scalar> y(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      auto row = y.row(i);
      row = (diag[i] * x.row(i).transpose()).transpose();
      if (i > 0) row += (sub[i - 1] * x.row(i - 1).transpose()).transpose();
      if (i + 1 < n) row += (sup[i] * x.row(i + 1).transpose()).transpose();
    }
    return y;
  }
};

/// Truncated coefficient matrix that keeps only the (block) diagonal.
/// Scalar form: one positive entry per cell and variable (N x M).
/// Block form: one M x M block per cell.
template <typename Scalar>
struct DiagonalApprox {
  Field<Scalar> entries;
  std::vector<Block<Scalar>> blocks;

  static DiagonalApprox scalar(Field<Scalar> e) { return DiagonalApprox{std::move(e), {}}; }
  static DiagonalApprox block(std::vector<Block<Scalar>> b) { return DiagonalApprox{{}, std::move(b)}; }

  bool is_block() const { return !blocks.empty(); }
  Eigen::Index size() const { return is_block() ? static_cast<Eigen::Index>(blocks.size()) : entries.rows(); }
};

namespace detail {

template <typename Scalar>
Eigen::PartialPivLU<Block<Scalar>> factor_block(const Block<Scalar>& b, Eigen::Index row) {
  if (b.rows() > kMaxBlockSize) throw DimensionError("block size exceeds " + std::to_string(kMaxBlockSize));
  Eigen::PartialPivLU<Block<Scalar>> lu(b);
  // rcond() alone misses exactly singular blocks (it can report 1), so also
  // compare the U pivots with the block's row-sum norm.
  const Scalar scale = b.cwiseAbs().rowwise().sum().maxCoeff();
  const Scalar min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > Scalar(kPivotTolerance) * scale) || !(lu.rcond() > Scalar(kPivotTolerance))) {
    throw SingularSystemError("singular block at row " + std::to_string(row));
  }
  return lu;
}

}  // namespace detail

/**
 * Thomas elimination without pivoting.
 *
 * Intended for diagonally dominant systems; every pivot is compared with the
 * magnitude of its original row and the solve aborts when it falls below
 * kPivotTolerance of it.
 */
template <typename Scalar>
Vector<Scalar> solve_tridiagonal(const TriDiagonal<Scalar>& system, const Vector<Scalar>& rhs) {
  if (!system.consistent()) throw DimensionError("inconsistent tridiagonal lengths");
  const Eigen::Index n = system.size();
  if (rhs.size() != n) throw DimensionError("rhs length does not match system");

  auto row_scale = [&](Eigen::Index i) {
    Scalar s = std::abs(system.diag(i));
    if (i > 0) s += std::abs(system.sub(i - 1));
    if (i + 1 < n) s += std::abs(system.sup(i));
    return s;
  };
  auto check_pivot = [&](Scalar pivot, Eigen::Index i) {
    const Scalar scale = row_scale(i);
    if (!(std::abs(pivot) > Scalar(kPivotTolerance) * scale) || !std::isfinite(pivot)) {
      throw SingularSystemError("zero pivot at row " + std::to_string(i));
    }
  };

  Vector<Scalar> c(n);
  Vector<Scalar> x(n);
  Scalar pivot = system.diag(0);
  check_pivot(pivot, 0);
  c(0) = n > 1 ? system.sup(0) / pivot : Scalar(0);
  x(0) = rhs(0) / pivot;
  for (Eigen::Index i = 1; i < n; ++i) {
    pivot = system.diag(i) - system.sub(i - 1) * c(i - 1);
    check_pivot(pivot, i);
    c(i) = i + 1 < n ? system.sup(i) / pivot : Scalar(0);
    x(i) = (rhs(i) - system.sub(i - 1) * x(i - 1)) / pivot;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= c(i) * x(i + 1);
  return x;
}

/// Block Thomas elimination; each pivot block is factored with partial-pivoting LU.
template <typename Scalar>
Field<Scalar> solve_block_tridiagonal(const BlockTriDiagonal<Scalar>& system, const Field<Scalar>& rhs) {
  system.check();
  const Eigen::Index n = system.size();
  const Eigen::Index m = system.block_size();
  if (rhs.rows() != n || rhs.cols() != m) throw DimensionError("rhs shape does not match block system");

  std::vector<Block<Scalar>> c(static_cast<std::size_t>(n));
  Field<Scalar> x(n, m);
  Vector<Scalar> y;
  for (Eigen::Index i = 0; i < n; ++i) {
    Block<Scalar> pivot = system.diag[i];
    y = rhs.row(i).transpose();
    if (i > 0) {
      pivot.noalias() -= system.sub[i - 1] * c[i - 1];
      y.noalias() -= system.sub[i - 1] * x.row(i - 1).transpose();
    }
    const auto lu = detail::factor_block<Scalar>(pivot, i);
    if (i + 1 < n) c[i] = lu.solve(system.sup[i]);
    x.row(i) = lu.solve(y).transpose();
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    x.row(i) -= (c[i] * x.row(i + 1).transpose()).transpose();
  }
  return x;
}

/// Independent per-cell solve of a (block) diagonal system.
template <typename Scalar>
Field<Scalar> solve_diagonal(const DiagonalApprox<Scalar>& approx, const Field<Scalar>& rhs) {
  if (approx.size() != rhs.rows()) throw DimensionError("rhs rows do not match diagonal system");
  Field<Scalar> x(rhs.rows(), rhs.cols());
  if (!approx.is_block()) {
    if (approx.entries.cols() != rhs.cols()) throw DimensionError("rhs columns do not match diagonal system");
    for (Eigen::Index j = 0; j < rhs.rows(); ++j) {
      for (Eigen::Index k = 0; k < rhs.cols(); ++k) {
        const Scalar d = approx.entries(j, k);
        if (!(d > Scalar(0))) throw SingularSystemError("non-positive diagonal entry at row " + std::to_string(j));
        x(j, k) = rhs(j, k) / d;
      }
    }
    return x;
  }
  for (Eigen::Index j = 0; j < rhs.rows(); ++j) {
    const auto& b = approx.blocks[static_cast<std::size_t>(j)];
    if (b.rows() != rhs.cols() || b.cols() != rhs.cols()) throw DimensionError("block size does not match rhs");
    const auto lu = detail::factor_block<Scalar>(b, j);
    x.row(j) = lu.solve(Vector<Scalar>(rhs.row(j).transpose())).transpose();
  }
  return x;
}

enum class Retained { All, Diagonal, Identity };

template <typename Scalar>
struct RowSumResult {
  bool satisfied;
  Scalar margin;  ///< min over rows of (kept diagonal measure - dropped row sum)
};

/**
 * Row-sum criterion for replacing the full matrix by a truncated one.
 *
 * `time_diagonal` holds the 1/dt part of each diagonal entry. With
 * Retained::Identity only that part is kept and the off-diagonal moduli are
 * the dropped row sum. With Retained::Diagonal (or All) the whole diagonal is
 * kept and must dominate the off-diagonal moduli.
 */
template <typename Scalar>
RowSumResult<Scalar> row_sum_criterion(const TriDiagonal<Scalar>& full, const Vector<Scalar>& time_diagonal,
                                       Retained kept) {
  if (!full.consistent() || time_diagonal.size() != full.size()) throw DimensionError("inconsistent row-sum input");
  const Eigen::Index n = full.size();
  Scalar margin = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar dropped = 0;
    if (i > 0) dropped += std::abs(full.sub(i - 1));
    if (i + 1 < n) dropped += std::abs(full.sup(i));
    const Scalar kept_diag = kept == Retained::Identity ? time_diagonal(i) : full.diag(i);
    margin = std::min(margin, kept_diag - dropped);
  }
  return {margin > Scalar(0), margin};
}

/// Block form: a block's modulus is its infinity norm; the kept side of a row
/// is the smallest row dominance |B_ii| - sum_{k != i} |B_ik| of the diagonal block.
template <typename Scalar>
RowSumResult<Scalar> row_sum_criterion(const BlockTriDiagonal<Scalar>& full, const Vector<Scalar>& time_diagonal,
                                       Retained kept) {
  full.check();
  const Eigen::Index n = full.size();
  if (time_diagonal.size() != n) throw DimensionError("inconsistent row-sum input");
  auto inf_norm = [](const Block<Scalar>& b) { return b.cwiseAbs().rowwise().sum().maxCoeff(); };
  Scalar margin = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar dropped = 0;
    if (i > 0) dropped += inf_norm(full.sub[i - 1]);
    if (i + 1 < n) dropped += inf_norm(full.sup[i]);
    Scalar kept_diag = time_diagonal(i);
    if (kept != Retained::Identity) {
      const auto& d = full.diag[static_cast<std::size_t>(i)];
      kept_diag = std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index r = 0; r < d.rows(); ++r) {
        const Scalar off = d.row(r).cwiseAbs().sum() - std::abs(d(r, r));
        kept_diag = std::min(kept_diag, std::abs(d(r, r)) - off);
      }
    }
    margin = std::min(margin, kept_diag - dropped);
  }
  return {margin > Scalar(0), margin};
}

}  // namespace thetafv::linalg
