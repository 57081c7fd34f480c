#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vdpkit/gaussian_rational.hpp"

namespace vdpkit {

using ExactVector = std::vector<GaussianRational>;

/// Dense row-major matrix over Q(i).
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(std::size_t rows, std::size_t cols);
  ExactMatrix(std::initializer_list<std::initializer_list<GaussianRational>> rows);
  static ExactMatrix from_rows(std::span<const ExactVector> rows, std::size_t cols);
  static ExactMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  GaussianRational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const GaussianRational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ExactVector row(std::size_t r) const;
  void append_row(std::span<const GaussianRational> row);

  friend bool operator==(const ExactMatrix&, const ExactMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<GaussianRational> data_;
};

/// Reduced row echelon form; pivots[k] is the pivot column of row k.
struct RowEchelon {
  ExactMatrix reduced;
  std::vector<std::size_t> pivots;
};

/// Gauss-Jordan elimination, leftmost nonzero pivot, no scaling heuristics.
RowEchelon row_reduce(ExactMatrix m);

/// Rank over Q(i).
std::size_t exact_rank(const ExactMatrix& m);

/// Basis of {x : m x = 0}.
std::vector<ExactVector> nullspace(const ExactMatrix& m);

/// One solution of m x = b per right-hand side (free variables set to zero),
/// or nullopt for inconsistent systems. A single elimination serves all of them.
std::vector<std::optional<ExactVector>> solve_many(const ExactMatrix& m, std::span<const ExactVector> rhs);

/// Coordinates of a vector in the 2-vector basis e_i ^ e_j (i < j), ordered
/// lexicographically by (i, j).
ExactVector wedge2(std::span<const GaussianRational> a, std::span<const GaussianRational> b);

std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace vdpkit
