#include "vdpkit/poly.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "vdpkit/errors.hpp"

namespace vdpkit {

// ---------------------------------------------------------------------------
// VarSpace

VarSpace::VarSpace(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    for (std::size_t j = i + 1; j < names_.size(); ++j) {
      if (names_[i] == names_[j]) throw ContractViolation("duplicate variable name " + names_[i]);
    }
  }
}

SpacePtr VarSpace::make(std::vector<std::string> names) {
  return std::make_shared<const VarSpace>(std::move(names));
}

SpacePtr VarSpace::suspension(int n) {
  std::vector<std::string> names{"u", "v"};
  for (int j = 1; j <= n; ++j) names.push_back("z" + std::to_string(j));
  return make(std::move(names));
}

SpacePtr VarSpace::base(int n) {
  std::vector<std::string> names;
  for (int j = 1; j <= n; ++j) names.push_back("z" + std::to_string(j));
  return make(std::move(names));
}

SpacePtr VarSpace::with_time(const VarSpace& space) {
  auto names = space.names();
  names.emplace_back("t");
  return make(std::move(names));
}

std::optional<std::size_t> VarSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Monomials

int total_degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

bool GradedOrder::operator()(const Exponents& a, const Exponents& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da > db;
  return a > b;
}

// ---------------------------------------------------------------------------
// Poly

Poly::Poly(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw ContractViolation("polynomial needs a variable space");
}

Poly Poly::constant(SpacePtr space, const GaussianRational& c) {
  Poly p(space);
  p.add_term(Exponents(p.space_->size(), 0), c);
  return p;
}

Poly Poly::variable(SpacePtr space, std::size_t index) {
  Poly p(space);
  if (index >= p.space_->size()) throw ContractViolation("variable index out of range");
  Exponents e(p.space_->size(), 0);
  e[index] = 1;
  p.add_term(e, 1);
  return p;
}

Poly Poly::variable(SpacePtr space, std::string_view name) {
  auto idx = space->index_of(name);
  if (!idx) throw ContractViolation("unknown variable " + std::string(name));
  return variable(std::move(space), *idx);
}

Poly Poly::monomial(SpacePtr space, Exponents exps, const GaussianRational& c) {
  Poly p(space);
  if (exps.size() != p.space_->size()) throw ContractViolation("exponent vector has wrong length");
  p.add_term(exps, c);
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && vdpkit::total_degree(terms_.begin()->first) == 0);
}

int Poly::total_degree() const {
  if (terms_.empty()) return -1;
  return vdpkit::total_degree(terms_.begin()->first);
}

int Poly::degree_in(std::size_t var) const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& [e, c] : terms_) d = std::max<int>(d, e.at(var));
  return d;
}

bool Poly::depends_on(std::size_t var) const {
  return std::any_of(terms_.begin(), terms_.end(), [&](const auto& t) { return t.first.at(var) > 0; });
}

GaussianRational Poly::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? GaussianRational{} : it->second;
}

GaussianRational Poly::constant_term() const { return coefficient(Exponents(space_->size(), 0)); }

void Poly::add_term(const Exponents& e, const GaussianRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void Poly::require_same_space(const Poly& o) const {
  if (space_ != o.space_ && !(*space_ == *o.space_)) {
    throw ContextMismatch("polynomials live over different variable spaces");
  }
}

Poly& Poly::operator+=(const Poly& o) {
  require_same_space(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  require_same_space(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  a.require_same_space(b);
  Poly out(a.space_);
  const std::size_t n = a.space_->size();
  Exponents e(n);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t k = 0; k < n; ++k) e[k] = static_cast<std::uint16_t>(ea[k] + eb[k]);
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Poly& Poly::operator*=(const Poly& o) {
  *this = *this * o;
  return *this;
}

Poly& Poly::operator*=(const GaussianRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, coef] : terms_) coef *= c;
  return *this;
}

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& [e, c] : out.terms_) c = -c;
  return out;
}

Poly Poly::pow(unsigned k) const {
  Poly result = constant(space_, 1);
  Poly base = *this;
  while (k > 0) {
    if (k & 1u) result *= base;
    k >>= 1u;
    if (k > 0) base *= base;
  }
  return result;
}

Poly Poly::derivative(std::size_t var) const {
  if (var >= space_->size()) throw ContractViolation("derivative variable out of range");
  Poly out(space_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents d = e;
    --d[var];
    out.add_term(d, c * GaussianRational(static_cast<long>(e[var])));
  }
  return out;
}

Poly Poly::antiderivative(std::size_t var) const {
  if (var >= space_->size()) throw ContractViolation("integration variable out of range");
  Poly out(space_);
  for (const auto& [e, c] : terms_) {
    Exponents d = e;
    ++d[var];
    out.add_term(d, c / GaussianRational(static_cast<long>(d[var])));
  }
  return out;
}

namespace {

template <typename Scalar>
Scalar evaluate_terms(const Poly::Terms& terms, std::span<const Scalar> point, std::size_t nvars) {
  if (point.size() != nvars) throw ContractViolation("evaluation point has wrong dimension");
  // Power tables per variable up to the largest exponent used.
  std::vector<std::vector<Scalar>> powers(nvars);
  for (const auto& [e, c] : terms) {
    for (std::size_t k = 0; k < nvars; ++k) {
      auto& table = powers[k];
      if (table.empty()) table.push_back(Scalar(1));
      while (table.size() <= e[k]) table.push_back(table.back() * point[k]);
    }
  }
  Scalar sum(0);
  for (const auto& [e, c] : terms) {
    Scalar term;
    if constexpr (std::is_same_v<Scalar, GaussianRational>) {
      term = c;
    } else {
      term = c.to_complex();
    }
    for (std::size_t k = 0; k < nvars; ++k) {
      if (e[k] > 0) term *= powers[k][e[k]];
    }
    sum += term;
  }
  return sum;
}

}  // namespace

GaussianRational Poly::evaluate(std::span<const GaussianRational> point) const {
  return evaluate_terms<GaussianRational>(terms_, point, space_->size());
}

std::complex<double> Poly::evaluate(std::span<const std::complex<double>> point) const {
  return evaluate_terms<std::complex<double>>(terms_, point, space_->size());
}

Poly Poly::substitute(std::span<const Poly> images) const {
  if (images.size() != space_->size()) throw ContractViolation("substitution needs one image per variable");
  if (images.empty()) return constant(space_, constant_term());
  const SpacePtr& target = images.front().space_ptr();
  for (const auto& img : images) img.require_same_space(images.front());
  std::vector<std::vector<Poly>> powers(images.size());
  Poly out(target);
  for (const auto& [e, c] : terms_) {
    Poly term = constant(target, c);
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      auto& table = powers[k];
      if (table.empty()) table.push_back(constant(target, 1));
      while (table.size() <= e[k]) table.push_back(table.back() * images[k]);
      term *= table[e[k]];
    }
    out += term;
  }
  return out;
}

Poly Poly::embed(SpacePtr target, std::span<const std::size_t> index_map) const {
  if (index_map.size() != space_->size()) throw ContractViolation("embedding map has wrong length");
  Poly out(std::move(target));
  const std::size_t m = out.space_->size();
  for (std::size_t k : index_map) {
    if (k >= m) throw ContractViolation("embedding index out of range");
  }
  for (const auto& [e, c] : terms_) {
    Exponents f(m, 0);
    for (std::size_t k = 0; k < e.size(); ++k) f[index_map[k]] = static_cast<std::uint16_t>(f[index_map[k]] + e[k]);
    out.add_term(f, c);
  }
  return out;
}

Poly Poly::embed_by_name(SpacePtr target) const {
  std::vector<std::size_t> map(space_->size());
  for (std::size_t k = 0; k < space_->size(); ++k) {
    auto idx = target->index_of(space_->name(k));
    if (!idx) {
      if (depends_on(k)) throw ContextMismatch("variable " + space_->name(k) + " missing from target space");
      idx = 0;  // unused variable; any slot works since its exponent is zero
    }
    map[k] = *idx;
  }
  return embed(std::move(target), map);
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    std::string mono;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += space_->name(k);
      if (e[k] > 1) mono += "^" + std::to_string(e[k]);
    }
    std::string term;
    if (mono.empty()) {
      term = c.to_string();
    } else if (c.is_one()) {
      term = mono;
    } else if (c == GaussianRational(-1)) {
      term = "-" + mono;
    } else {
      term = c.to_string() + "*" + mono;
    }
    if (first) {
      out = term;
      first = false;
    } else if (term.front() == '-') {
      out += " - " + term.substr(1);
    } else {
      out += " + " + term;
    }
  }
  return out;
}

bool operator==(const Poly& a, const Poly& b) {
  a.require_same_space(b);
  return a.terms_ == b.terms_;
}

std::optional<Poly> divide_exact(const Poly& p, const Poly& d) {
  if (d.is_zero()) throw ContractViolation("division by the zero polynomial");
  if (!(p.space() == d.space())) throw ContextMismatch("division across variable spaces");
  const auto& [lead_e, lead_c] = *d.terms().begin();
  Poly rem = p;
  Poly quot(p.space_ptr());
  const std::size_t n = p.space().size();
  // Division by a single polynomial: the remainder is zero iff d divides p.
  while (!rem.is_zero()) {
    const auto& [e, c] = *rem.terms().begin();
    Exponents q(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (e[k] < lead_e[k]) return std::nullopt;
      q[k] = static_cast<std::uint16_t>(e[k] - lead_e[k]);
    }
    Poly step = Poly::monomial(p.space_ptr(), q, c / lead_c);
    quot += step;
    rem -= step * d;
  }
  return quot;
}

std::vector<Exponents> monomials_up_to(std::size_t nvars, std::span<const std::size_t> vars, int max_degree) {
  std::vector<Exponents> out;
  if (max_degree < 0) return out;
  Exponents cur(nvars, 0);
  for (int deg = 0; deg <= max_degree; ++deg) {
    // All distributions of `deg` among `vars`, in lexicographic order.
    auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
      if (pos + 1 == vars.size()) {
        cur[vars[pos]] = static_cast<std::uint16_t>(remaining);
        out.push_back(cur);
        cur[vars[pos]] = 0;
        return;
      }
      for (int a = remaining; a >= 0; --a) {
        cur[vars[pos]] = static_cast<std::uint16_t>(a);
        self(self, pos + 1, remaining - a);
      }
      cur[vars[pos]] = 0;
    };
    if (vars.empty()) {
      if (deg == 0) out.push_back(cur);
      continue;
    }
    rec(rec, 0, deg);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, SpacePtr space, std::size_t line)
      : text_(text), space_(std::move(space)), line_(line) {}

  Poly parse() {
    Poly p = expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, column()); }

  std::size_t column() const {
    // 1-based, counting UTF-8 code points.
    std::size_t col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if ((static_cast<unsigned char>(text_[i]) & 0xC0) != 0x80) ++col;
    }
    return col;
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  // Recognises '-' and U+2212 (E2 88 92).
  bool accept_minus() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '-') {
      ++pos_;
      return true;
    }
    if (text_.substr(pos_, 3) == "\xE2\x88\x92") {
      pos_ += 3;
      return true;
    }
    return false;
  }

  bool accept(char ch) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  Poly expr() {
    Poly acc = term();
    for (;;) {
      if (accept('+')) {
        acc += term();
      } else if (accept_minus()) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  Poly term() {
    Poly acc = unary();
    while (accept('*')) acc *= unary();
    return acc;
  }

  Poly unary() {
    if (accept_minus()) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Poly power() {
    Poly base = primary();
    if (accept('^')) {
      skip_ws();
      std::string digits = read_digits();
      if (digits.empty()) fail("expected a non-negative integer exponent");
      if (digits.size() > 4) fail("exponent too large");
      base = base.pow(static_cast<unsigned>(std::stoul(digits)));
    }
    return base;
  }

  std::string read_digits() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  bool at_identifier_char() const {
    return pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_');
  }

  Poly primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char ch = text_[pos_];
    if (ch == '(') {
      ++pos_;
      Poly inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) return literal();
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t start = pos_;
      while (at_identifier_char()) ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      if (name == "i") return Poly::constant(space_, GaussianRational::i());
      auto idx = space_->index_of(name);
      if (!idx) {
        pos_ = start;
        fail("unknown variable '" + std::string(name) + "'");
      }
      return Poly::variable(space_, *idx);
    }
    fail("unexpected character '" + std::string(1, ch) + "'");
  }

  Poly literal() {
    std::string num = read_digits();
    std::string den = "1";
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      den = read_digits();
      if (den.empty()) fail("expected a denominator after '/'");
      if (den.find_first_not_of('0') == std::string::npos) fail("zero denominator");
    }
    Rational q(num + "/" + den, 10);
    q.canonicalize();
    GaussianRational value(q);
    if (pos_ < text_.size() && text_[pos_] == 'i') {
      // Imaginary suffix, but not the start of a longer identifier.
      if (pos_ + 1 >= text_.size() ||
          !(std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])) || text_[pos_ + 1] == '_')) {
        ++pos_;
        value = GaussianRational(0, q);
      }
    }
    if (at_identifier_char()) fail("missing '*' between literal and identifier");
    return Poly::constant(space_, value);
  }

  std::string_view text_;
  SpacePtr space_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, SpacePtr space, std::size_t line) {
  return PolyParser(text, std::move(space), line).parse();
}

}  // namespace vdpkit
