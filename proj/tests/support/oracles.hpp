#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the library routine it is meant to check.

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vdpkit/exact_matrix.hpp"
#include "vdpkit/field_calculus.hpp"
#include "vdpkit/fuzz.hpp"
#include "vdpkit/lifting.hpp"
#include "vdpkit/poly.hpp"
#include "vdpkit/suspension.hpp"

namespace oracle {

using vdpkit::DiffForm;
using vdpkit::ExactMatrix;
using vdpkit::ExactVector;
using vdpkit::GaussianRational;
using vdpkit::Poly;
using vdpkit::SpacePtr;
using vdpkit::VectorField;
using cvec = std::vector<std::complex<double>>;

inline Poly P(const std::string& text, const SpacePtr& space) { return vdpkit::parse_poly(text, space); }
inline VectorField F(const std::string& text, const SpacePtr& space) { return vdpkit::parse_vector_field(text, space); }

inline GaussianRational determinant(const ExactMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  GaussianRational det = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m(0, c).is_zero()) continue;
    ExactMatrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t k = 0, kk = 0; k < n; ++k)
        if (k != c) minor(r - 1, kk++) = m(r, k);
    const GaussianRational term = m(0, c) * determinant(minor);
    det = c % 2 == 0 ? det + term : det - term;
  }
  return det;
}

inline void subsets(std::size_t n, std::size_t k, std::size_t from, std::vector<std::size_t>& cur,
                    const std::function<void(const std::vector<std::size_t>&)>& visit) {
  if (cur.size() == k) {
    visit(cur);
    return;
  }
  for (std::size_t i = from; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, visit);
    cur.pop_back();
  }
}

/// Largest k with a nonzero k x k minor.
inline std::size_t minor_rank(const ExactMatrix& m) {
  for (std::size_t k = std::min(m.rows(), m.cols()); k > 0; --k) {
    bool found = false;
    std::vector<std::size_t> rows, cols;
    subsets(m.rows(), k, 0, rows, [&](const std::vector<std::size_t>& rs) {
      if (found) return;
      subsets(m.cols(), k, 0, cols, [&](const std::vector<std::size_t>& cs) {
        if (found) return;
        ExactMatrix sub(k, k);
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) sub(i, j) = m(rs[i], cs[j]);
        if (!determinant(sub).is_zero()) found = true;
      });
    });
    if (found) return k;
  }
  return 0;
}

/// Rewrites one factor uv -> f at a time until no monomial contains uv.
inline Poly stepwise_normal_form(const Poly& p, const Poly& f) {
  Poly cur = p;
  for (;;) {
    Poly next(cur.space_ptr());
    bool changed = false;
    for (const auto& [e, c] : cur.terms()) {
      if (e[0] > 0 && e[1] > 0) {
        auto reduced = e;
        --reduced[0];
        --reduced[1];
        next += Poly::monomial(cur.space_ptr(), reduced, c) * f;
        changed = true;
      } else {
        next += Poly::monomial(cur.space_ptr(), e, c);
      }
    }
    if (!changed) return cur;
    cur = next;
  }
}

/// (L_X a)_I = X(a_I) + sum over slots of a with that slot's dx replaced by d(X_i).
inline DiffForm lie_derivative_by_coordinates(const VectorField& x, const DiffForm& a) {
  DiffForm out(a.space_ptr(), a.degree());
  for (const auto& [index, coeff] : a.coefficients()) {
    out.add(index, x.apply(coeff));
    for (std::size_t s = 0; s < index.size(); ++s)
      for (std::size_t k = 0; k < a.space().size(); ++k) {
        auto replaced = index;
        replaced[s] = k;
        out.add(replaced, coeff * x[index[s]].derivative(k));
      }
  }
  return out;
}

/// Exact surface point over uv = f with u != 0.
inline ExactVector surface_point(const vdpkit::SuspensionContext& ctx, std::mt19937_64& rng) {
  auto draw = [&] {
    return GaussianRational(vdpkit::Rational(static_cast<long>(rng() % 9) - 4, 2),
                            vdpkit::Rational(static_cast<long>(rng() % 5) - 2, 2));
  };
  ExactVector z;
  for (int j = 0; j < ctx.n(); ++j) z.push_back(draw());
  GaussianRational u = draw();
  while (u.is_zero()) u = draw();
  ExactVector p{u, ctx.f_base().evaluate(z) / u};
  p.insert(p.end(), z.begin(), z.end());
  return p;
}

inline cvec to_complex(std::span<const GaussianRational> x) {
  cvec out;
  for (const auto& c : x) out.emplace_back(c.re().get_d(), c.im().get_d());
  return out;
}

/// Flow and Jacobian of a polynomial field by RK4 on the variational equation,
/// plus the integral of `density` along the path.
struct Variational {
  cvec end;
  std::vector<cvec> jacobian;  // jacobian[i][k] = d end_i / d start_k
  std::complex<double> integral;
};

inline Variational integrate_variational(const VectorField& x, const Poly& density, const cvec& start, double t,
                                         int steps) {
  const std::size_t m = start.size();
  std::vector<std::vector<Poly>> dx(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) dx[i].push_back(x[i].derivative(k));
  const std::size_t size = m + m * m + 1;
  auto rhs = [&](const cvec& s) {
    cvec out(size);
    const std::span<const std::complex<double>> p(s.data(), m);
    for (std::size_t i = 0; i < m; ++i) out[i] = x[i].evaluate(p);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < m; ++k) {
        std::complex<double> acc = 0;
        for (std::size_t l = 0; l < m; ++l) acc += dx[i][l].evaluate(p) * s[m + l * m + k];
        out[m + i * m + k] = acc;
      }
    out[size - 1] = density.evaluate(p);
    return out;
  };
  cvec s(size, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    s[i] = start[i];
    s[m + i * m + i] = 1.0;
  }
  const double h = t / steps;
  for (int k = 0; k < steps; ++k) {
    const cvec k1 = rhs(s);
    cvec tmp(size);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
    const cvec k2 = rhs(tmp);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
    const cvec k3 = rhs(tmp);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = s[i] + h * k3[i];
    const cvec k4 = rhs(tmp);
    for (std::size_t i = 0; i < size; ++i) s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  Variational out;
  out.end.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(m));
  out.jacobian.assign(m, cvec(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) out.jacobian[i][k] = s[m + i * m + k];
  out.integral = s[size - 1];
  return out;
}

inline std::complex<double> complex_determinant(std::vector<cvec> a) {
  const std::size_t n = a.size();
  std::complex<double> det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) == 0) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const auto factor = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= factor * a[c][k];
    }
  }
  return det;
}

/// Volume ratio of a map on uv = f in the chart (u, z): the Jacobian of
/// (u, z) -> (F_u, F_z) times u / F_u, from the ambient Jacobian by the chain rule.
inline std::complex<double> chart_ratio_u(const vdpkit::SuspensionContext& ctx, const cvec& start, const cvec& end,
                                          const std::vector<cvec>& jac) {
  const std::size_t m = start.size();
  const std::size_t n = m - 2;
  const std::span<const std::complex<double>> z(start.data() + 2, n);
  const std::complex<double> u = start[0];
  // d(u, v, z)/d(u, z) on the surface
  std::vector<cvec> embed(m, cvec(n + 1, 0.0));
  embed[0][0] = 1.0;
  embed[1][0] = -ctx.f_base().evaluate(z) / (u * u);
  for (std::size_t j = 0; j < n; ++j) {
    embed[1][j + 1] = ctx.f_base().derivative(j).evaluate(z) / u;
    embed[j + 2][j + 1] = 1.0;
  }
  std::vector<cvec> chart(n + 1, cvec(n + 1, 0.0));
  for (std::size_t r = 0; r <= n; ++r) {
    const std::size_t row = r == 0 ? 0 : r + 1;
    for (std::size_t c = 0; c <= n; ++c)
      for (std::size_t l = 0; l < m; ++l) chart[r][c] += jac[row][l] * embed[l][c];
  }
  return complex_determinant(chart) * u / end[0];
}

inline double max_abs_diff(const cvec& a, const cvec& b) {
  double d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace oracle
