#include "vdpkit/field_calculus.hpp"

#include <algorithm>

#include "vdpkit/errors.hpp"

namespace vdpkit {

// ---------------------------------------------------------------------------
// VectorField

VectorField::VectorField(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw ContractViolation("vector field needs a variable space");
  coeffs_.assign(space_->size(), Poly(space_));
}

VectorField::VectorField(std::vector<Poly> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw ContractViolation("vector field needs at least one coefficient");
  space_ = coeffs_.front().space_ptr();
  if (coeffs_.size() != space_->size()) throw ContractViolation("one coefficient per variable expected");
  for (const auto& c : coeffs_) {
    if (!(c.space() == *space_)) throw ContextMismatch("vector field coefficients over different spaces");
  }
}

VectorField VectorField::coordinate(SpacePtr space, std::size_t index) {
  VectorField x(space);
  x.set(index, Poly::constant(space, 1));
  return x;
}

void VectorField::set(std::size_t k, Poly p) {
  if (!(p.space() == *space_)) throw ContextMismatch("coefficient over a different space");
  coeffs_.at(k) = std::move(p);
}

Poly VectorField::apply(const Poly& p) const {
  if (!(p.space() == *space_)) throw ContextMismatch("field and function over different spaces");
  Poly out(space_);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k].is_zero()) continue;
    Poly dp = p.derivative(k);
    if (!dp.is_zero()) out += coeffs_[k] * dp;
  }
  return out;
}

bool VectorField::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Poly& c) { return c.is_zero(); });
}

VectorField& VectorField::operator+=(const VectorField& o) {
  if (!(*space_ == *o.space_)) throw ContextMismatch("fields over different spaces");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  if (!(*space_ == *o.space_)) throw ContextMismatch("fields over different spaces");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  return *this;
}

VectorField VectorField::operator-() const {
  VectorField out(*this);
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

VectorField operator*(const Poly& h, const VectorField& x) {
  VectorField out(x.space_);
  for (std::size_t k = 0; k < x.coeffs_.size(); ++k) out.coeffs_[k] = h * x.coeffs_[k];
  return out;
}

VectorField operator*(const GaussianRational& c, const VectorField& x) {
  VectorField out(x.space_);
  for (std::size_t k = 0; k < x.coeffs_.size(); ++k) out.coeffs_[k] = c * x.coeffs_[k];
  return out;
}

ExactVector VectorField::evaluate(std::span<const GaussianRational> point) const {
  ExactVector out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c.evaluate(point));
  return out;
}

std::vector<std::complex<double>> VectorField::evaluate(std::span<const std::complex<double>> point) const {
  std::vector<std::complex<double>> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c.evaluate(point));
  return out;
}

std::string VectorField::to_string() const {
  std::string out = "[";
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (k) out += ", ";
    out += coeffs_[k].to_string();
  }
  return out + "]";
}

bool operator==(const VectorField& a, const VectorField& b) {
  return *a.space_ == *b.space_ && a.coeffs_ == b.coeffs_;
}

VectorField parse_vector_field(std::string_view text, SpacePtr space, std::size_t line) {
  std::size_t open = text.find_first_not_of(" \t");
  if (open == std::string_view::npos || text[open] != '[') {
    throw ParseError("expected '[' to open a vector field", line, open == std::string_view::npos ? 1 : open + 1);
  }
  std::size_t close = text.find_last_not_of(" \t\r");
  if (text[close] != ']') throw ParseError("expected ']' to close a vector field", line, close + 1);

  std::vector<Poly> coeffs;
  std::size_t start = open + 1;
  while (start <= close) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos || end > close) end = close;
    const std::string_view piece = text.substr(start, end - start);
    if (piece.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == close && coeffs.empty() && space->size() == 0) break;
      throw ParseError("empty coefficient", line, start + 1);
    }
    try {
      coeffs.push_back(parse_poly(piece, space, line));
    } catch (const ParseError& e) {
      throw ParseError(e.message(), line, start + e.column());
    }
    start = end + 1;
  }
  if (coeffs.size() != space->size()) {
    throw ParseError("expected " + std::to_string(space->size()) + " coefficients, got " +
                         std::to_string(coeffs.size()),
                     line, open + 1);
  }
  return VectorField(std::move(coeffs));
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  if (!(x.space() == y.space())) throw ContextMismatch("bracket of fields over different spaces");
  VectorField out(x.space_ptr());
  for (std::size_t k = 0; k < x.dimension(); ++k) out.set(k, x.apply(y[k]) - y.apply(x[k]));
  return out;
}

// ---------------------------------------------------------------------------
// DiffForm

namespace {

// Sorts `index` in place and returns the permutation sign, or 0 on a repeat.
int sort_with_sign(DiffForm::Index& index) {
  int sign = 1;
  for (std::size_t i = 1; i < index.size(); ++i) {
    for (std::size_t j = i; j > 0 && index[j - 1] >= index[j]; --j) {
      if (index[j - 1] == index[j]) return 0;
      std::swap(index[j - 1], index[j]);
      sign = -sign;
    }
  }
  return sign;
}

}  // namespace

DiffForm::DiffForm(SpacePtr space, int degree) : space_(std::move(space)), degree_(degree) {
  if (!space_) throw ContractViolation("form needs a variable space");
  if (degree_ < 0) throw ContractViolation("negative form degree");
}

DiffForm DiffForm::function(const Poly& p) {
  DiffForm a(p.space_ptr(), 0);
  a.add({}, p);
  return a;
}

DiffForm DiffForm::differential(SpacePtr space, std::size_t index) {
  if (index >= space->size()) throw ContractViolation("differential index out of range");
  DiffForm a(space, 1);
  a.add({index}, Poly::constant(space, 1));
  return a;
}

DiffForm DiffForm::exact(const Poly& p) { return exterior_derivative(function(p)); }

void DiffForm::add(const Index& index, const Poly& p) {
  if (static_cast<int>(index.size()) != degree_) throw ContractViolation("index tuple of wrong length");
  if (!(p.space() == *space_)) throw ContextMismatch("form coefficient over a different space");
  if (p.is_zero()) return;
  Index sorted = index;
  for (std::size_t k : sorted) {
    if (k >= space_->size()) throw ContractViolation("differential index out of range");
  }
  const int sign = sort_with_sign(sorted);
  if (sign == 0) return;
  auto [it, inserted] = coeffs_.try_emplace(sorted, space_);
  if (sign > 0) {
    it->second += p;
  } else {
    it->second -= p;
  }
  if (it->second.is_zero()) coeffs_.erase(it);
}

Poly DiffForm::component(const Index& index) const {
  if (static_cast<int>(index.size()) != degree_) throw ContractViolation("index tuple of wrong length");
  Index sorted = index;
  const int sign = sort_with_sign(sorted);
  auto it = coeffs_.find(sorted);
  if (sign == 0 || it == coeffs_.end()) return Poly(space_);
  return sign > 0 ? it->second : -it->second;
}

void DiffForm::require_compatible(const DiffForm& o) const {
  if (!(*space_ == *o.space_)) throw ContextMismatch("forms over different spaces");
  if (degree_ != o.degree_) throw ContractViolation("sum of forms of different degree");
}

DiffForm& DiffForm::operator+=(const DiffForm& o) {
  require_compatible(o);
  for (const auto& [idx, c] : o.coeffs_) add(idx, c);
  return *this;
}

DiffForm& DiffForm::operator-=(const DiffForm& o) {
  require_compatible(o);
  for (const auto& [idx, c] : o.coeffs_) add(idx, -c);
  return *this;
}

DiffForm DiffForm::operator-() const {
  DiffForm out(space_, degree_);
  for (const auto& [idx, c] : coeffs_) out.coeffs_.emplace(idx, -c);
  return out;
}

DiffForm operator*(const Poly& h, const DiffForm& a) {
  DiffForm out(a.space_, a.degree_);
  for (const auto& [idx, c] : a.coeffs_) out.add(idx, h * c);
  return out;
}

std::string DiffForm::to_string() const {
  if (coeffs_.empty()) return "0";
  std::string out;
  for (const auto& [idx, c] : coeffs_) {
    if (!out.empty()) out += " + ";
    out += "(" + c.to_string() + ")";
    for (std::size_t k = 0; k < idx.size(); ++k) out += (k ? "^d" : "*d") + space_->name(idx[k]);
  }
  return out;
}

bool operator==(const DiffForm& a, const DiffForm& b) {
  return *a.space_ == *b.space_ && a.degree_ == b.degree_ && a.coeffs_ == b.coeffs_;
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
  if (!(a.space() == b.space())) throw ContextMismatch("wedge of forms over different spaces");
  DiffForm out(a.space_ptr(), a.degree() + b.degree());
  for (const auto& [ia, ca] : a.coefficients()) {
    for (const auto& [ib, cb] : b.coefficients()) {
      DiffForm::Index idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      out.add(idx, ca * cb);
    }
  }
  return out;
}

DiffForm interior_product(const VectorField& x, const DiffForm& a) {
  if (!(x.space() == a.space())) throw ContextMismatch("contraction across variable spaces");
  if (a.degree() == 0) throw ContractViolation("interior product of a 0-form");
  DiffForm out(a.space_ptr(), a.degree() - 1);
  for (const auto& [idx, c] : a.coefficients()) {
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const Poly& xr = x[idx[r]];
      if (xr.is_zero()) continue;
      DiffForm::Index rest = idx;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(r));
      out.add(rest, (r % 2 == 0 ? xr : -xr) * c);
    }
  }
  return out;
}

DiffForm exterior_derivative(const DiffForm& a) {
  DiffForm out(a.space_ptr(), a.degree() + 1);
  for (const auto& [idx, c] : a.coefficients()) {
    for (std::size_t j = 0; j < a.space().size(); ++j) {
      if (std::find(idx.begin(), idx.end(), j) != idx.end()) continue;
      Poly dc = c.derivative(j);
      if (dc.is_zero()) continue;
      DiffForm::Index full{j};
      full.insert(full.end(), idx.begin(), idx.end());
      out.add(full, dc);
    }
  }
  return out;
}

DiffForm lie_derivative(const VectorField& x, const DiffForm& a) {
  if (!(x.space() == a.space())) throw ContextMismatch("Lie derivative across variable spaces");
  DiffForm out = interior_product(x, exterior_derivative(a));
  if (a.degree() > 0) out += exterior_derivative(interior_product(x, a));
  return out;
}

// ---------------------------------------------------------------------------
// Volume forms and divergence

namespace {

DiffForm::Index top_index(std::size_t m) {
  DiffForm::Index idx(m);
  for (std::size_t k = 0; k < m; ++k) idx[k] = k;
  return idx;
}

}  // namespace

VolumeForm::VolumeForm(DiffForm form) : form_(std::move(form)) {
  if (form_.degree() != static_cast<int>(form_.space().size())) {
    throw ContractViolation("volume form must have top degree");
  }
  if (form_.is_zero()) throw ContractViolation("degenerate volume form");
}

VolumeForm VolumeForm::standard(SpacePtr space) {
  DiffForm w(space, static_cast<int>(space->size()));
  w.add(top_index(space->size()), Poly::constant(space, 1));
  return VolumeForm(std::move(w));
}

const Poly& VolumeForm::density() const { return form_.coefficients().begin()->second; }

Poly divergence(const VectorField& x, const VolumeForm& w) {
  const DiffForm lw = lie_derivative(x, w.form());
  if (lw.is_zero()) return Poly(x.space_ptr());
  auto q = divide_exact(lw.coefficients().begin()->second, w.density());
  if (!q) throw ContractViolation("divergence is not polynomial for this volume form");
  return *q;
}

DiffForm field_to_closed_form(const VectorField& x, const VolumeForm& w) {
  const Poly div = divergence(x, w);
  if (!div.is_zero()) throw ContractViolation("field has nonzero divergence " + div.to_string());
  return interior_product(x, w.form());
}

DiffForm pair_to_form(const VectorField& nu, const VectorField& mu, const VolumeForm& w) {
  return interior_product(nu, interior_product(mu, w.form()));
}

}  // namespace vdpkit
