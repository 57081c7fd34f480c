#include "vdpkit/exact_matrix.hpp"

#include <utility>

#include "vdpkit/errors.hpp"

namespace vdpkit {

ExactMatrix::ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

ExactMatrix::ExactMatrix(std::initializer_list<std::initializer_list<GaussianRational>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ContractViolation("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ExactMatrix ExactMatrix::from_rows(std::span<const ExactVector> rows, std::size_t cols) {
  ExactMatrix m(0, cols);
  for (const auto& r : rows) m.append_row(r);
  return m;
}

ExactMatrix ExactMatrix::identity(std::size_t n) {
  ExactMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

ExactVector ExactMatrix::row(std::size_t r) const {
  return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
          data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
}

void ExactMatrix::append_row(std::span<const GaussianRational> row) {
  if (row.size() != cols_) throw ContractViolation("row has wrong length");
  data_.insert(data_.end(), row.begin(), row.end());
  ++rows_;
}

namespace {

// Gauss-Jordan on the first `pivot_cols` columns; remaining columns ride along.
std::vector<std::size_t> gauss_jordan(ExactMatrix& m, std::size_t pivot_cols) {
  std::vector<std::size_t> pivots;
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < pivot_cols && pivot_row < m.rows(); ++col) {
    std::size_t r = pivot_row;
    while (r < m.rows() && m(r, col).is_zero()) ++r;
    if (r == m.rows()) continue;
    if (r != pivot_row) {
      for (std::size_t c = col; c < m.cols(); ++c) std::swap(m(r, c), m(pivot_row, c));
    }
    const GaussianRational inv = m(pivot_row, col).inverse();
    for (std::size_t c = col; c < m.cols(); ++c) {
      if (!m(pivot_row, c).is_zero()) m(pivot_row, c) *= inv;
    }
    for (std::size_t rr = 0; rr < m.rows(); ++rr) {
      if (rr == pivot_row || m(rr, col).is_zero()) continue;
      const GaussianRational factor = m(rr, col);
      for (std::size_t c = col; c < m.cols(); ++c) {
        if (!m(pivot_row, c).is_zero()) m(rr, c) -= factor * m(pivot_row, c);
      }
    }
    pivots.push_back(col);
    ++pivot_row;
  }
  return pivots;
}

}  // namespace

RowEchelon row_reduce(ExactMatrix m) {
  RowEchelon out;
  out.pivots = gauss_jordan(m, m.cols());
  out.reduced = std::move(m);
  return out;
}

std::size_t exact_rank(const ExactMatrix& m) { return row_reduce(m).pivots.size(); }

std::vector<ExactVector> nullspace(const ExactMatrix& m) {
  const RowEchelon e = row_reduce(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t p : e.pivots) is_pivot[p] = true;
  std::vector<ExactVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    ExactVector x(m.cols());
    x[free] = 1;
    for (std::size_t k = 0; k < e.pivots.size(); ++k) x[e.pivots[k]] = -e.reduced(k, free);
    basis.push_back(std::move(x));
  }
  return basis;
}

std::vector<std::optional<ExactVector>> solve_many(const ExactMatrix& m, std::span<const ExactVector> rhs) {
  const std::size_t n = m.cols();
  ExactMatrix aug(m.rows(), n + rhs.size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = m(r, c);
    for (std::size_t k = 0; k < rhs.size(); ++k) {
      if (rhs[k].size() != m.rows()) throw ContractViolation("right-hand side has wrong length");
      aug(r, n + k) = rhs[k][r];
    }
  }
  const std::vector<std::size_t> pivots = gauss_jordan(aug, n);
  std::vector<std::optional<ExactVector>> out;
  out.reserve(rhs.size());
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    bool consistent = true;
    for (std::size_t r = pivots.size(); r < aug.rows(); ++r) {
      if (!aug(r, n + k).is_zero()) {
        consistent = false;
        break;
      }
    }
    if (!consistent) {
      out.emplace_back(std::nullopt);
      continue;
    }
    ExactVector x(n);
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, n + k);
    out.emplace_back(std::move(x));
  }
  return out;
}

ExactVector wedge2(std::span<const GaussianRational> a, std::span<const GaussianRational> b) {
  if (a.size() != b.size()) throw ContractViolation("wedge of vectors of different dimension");
  ExactVector out;
  out.reserve(binomial(a.size(), 2));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) out.push_back(a[i] * b[j] - a[j] * b[i]);
  }
  return out;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace vdpkit
