#include "vdpkit/scenario.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "vdpkit/errors.hpp"

namespace vdpkit {

namespace {

struct Value {
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
};

using Section = std::map<std::string, Value>;

constexpr std::string_view kTopKeys[] = {"name",         "n",         "f",          "cohomology",
                                         "samples",      "seed",      "region",     "grid",
                                         "exactness",    "u_zero",    "u_zero_variable",
                                         "degree_bound", "lift_bound", "smoothness_degree", "g_twist"};
constexpr std::string_view kPairKeys[] = {"alpha", "beta", "kernel_alpha", "kernel_beta", "ideal"};
constexpr std::string_view kApproxKeys[] = {"degree_min", "degree_max", "samples", "twists", "brackets", "target"};

template <std::size_t N>
bool known(const std::string_view (&keys)[N], std::string_view key) {
  for (auto k : keys)
    if (k == key) return true;
  return false;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Re-throws a ParseError raised while parsing `value` with columns relative
// to the whole line.
template <class F>
auto within(const Value& value, F&& parse) -> decltype(parse()) {
  try {
    return parse();
  } catch (const ParseError& e) {
    throw ParseError(e.message(), value.line, value.column + e.column() - 1);
  }
}

template <class Int>
Int parse_integer(const Value& v, Int min_value) {
  Int out{};
  const char* first = v.text.data();
  const char* last = first + v.text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || v.text.empty())
    throw ParseError("expected an integer, got '" + v.text + "'", v.line, v.column);
  if (out < min_value)
    throw ParseError("value must be at least " + std::to_string(min_value), v.line, v.column);
  return out;
}

bool parse_bool(const Value& v) {
  if (v.text == "true") return true;
  if (v.text == "false") return false;
  throw ParseError("expected true or false, got '" + v.text + "'", v.line, v.column);
}

Rational parse_rational(const std::string& text, std::size_t line, std::size_t column) {
  Rational r;
  if (text.empty() || r.set_str(text, 10) != 0)
    throw ParseError("expected a rational number, got '" + text + "'", line, column);
  if (r.get_den() == 0) throw ParseError("zero denominator", line, column);
  r.canonicalize();
  return r;
}

std::vector<Poly> parse_poly_list(const Value& v, const SpacePtr& space) {
  std::vector<Poly> out;
  if (v.text.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = v.text.find(',', start);
    const std::string item = v.text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t lead = 0;
    while (lead < item.size() && is_space(item[lead])) ++lead;
    const Value sub{item.substr(lead), v.line, v.column + start + lead};
    if (sub.text.find_first_not_of(" \t") == std::string::npos)
      throw ParseError("empty list item", sub.line, sub.column);
    out.push_back(within(sub, [&] { return parse_poly(sub.text, space, sub.line); }));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<Poly>& ps) {
  std::string out;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (k) out += ", ";
    out += ps[k].to_string();
  }
  return out;
}

const Value& require(const Section& s, std::string_view key, std::size_t line, const char* where) {
  auto it = s.find(std::string(key));
  if (it == s.end()) throw ParseError(std::string("missing key '") + std::string(key) + "' in " + where, line, 1);
  return it->second;
}

const Value* optional_value(const Section& s, std::string_view key) {
  auto it = s.find(std::string(key));
  return it == s.end() ? nullptr : &it->second;
}

}  // namespace

SuspensionContext Scenario::context() const { return make_suspension(n, f); }

CriterionOptions Scenario::criterion_options() const {
  CriterionOptions o;
  o.degree_bound = degree_bound;
  o.lift_bound = lift_bound;
  o.smoothness_degree = smoothness_degree;
  o.sampling = sampling;
  o.cohomology = cohomology;
  o.g_twist = g_twist;
  return o;
}

Scenario parse_scenario(std::string_view text) {
  Section top;
  std::vector<std::pair<Section, std::size_t>> pair_sections;
  std::optional<std::pair<Section, std::size_t>> approx_section;
  Section* current = &top;
  enum class Kind { top, pair, approx } kind = Kind::top;
  std::size_t last_line = 0;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    last_line = line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && is_space(line.back())) line.pop_back();
    std::size_t lead = 0;
    while (lead < line.size() && is_space(line[lead])) ++lead;
    if (lead == line.size()) continue;

    if (line[lead] == '[') {
      const std::string header = line.substr(lead);
      if (header == "[pair]") {
        pair_sections.emplace_back(Section{}, line_no);
        current = &pair_sections.back().first;
        kind = Kind::pair;
      } else if (header == "[approx]") {
        if (approx_section) throw ParseError("duplicate [approx] section", line_no, lead + 1);
        approx_section.emplace(Section{}, line_no);
        current = &approx_section->first;
        kind = Kind::approx;
      } else {
        throw ParseError("unknown section '" + header + "'", line_no, lead + 1);
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no, lead + 1);
    std::string key = line.substr(lead, eq - lead);
    while (!key.empty() && is_space(key.back())) key.pop_back();
    if (key.empty()) throw ParseError("missing key before '='", line_no, eq + 1);
    const bool ok = kind == Kind::top ? known(kTopKeys, key) : kind == Kind::pair ? known(kPairKeys, key)
                                                                                  : known(kApproxKeys, key);
    if (!ok) throw ParseError("unknown key '" + key + "'", line_no, lead + 1);
    if (current->count(key)) throw ParseError("duplicate key '" + key + "'", line_no, lead + 1);
    std::size_t vstart = eq + 1;
    while (vstart < line.size() && is_space(line[vstart])) ++vstart;
    (*current)[key] = Value{line.substr(vstart), line_no, vstart + 1};
  }

  Scenario s;
  const std::size_t end_line = last_line + 1;
  if (auto* v = optional_value(top, "name")) s.name = v->text;
  s.n = parse_integer<int>(require(top, "n", end_line, "scenario"), 1);
  const SpacePtr base = VarSpace::base(s.n);
  const SpacePtr ambient = VarSpace::suspension(s.n);
  {
    const Value& v = require(top, "f", end_line, "scenario");
    s.f = within(v, [&] { return parse_poly(v.text, base, v.line); });
    if (s.f.is_constant()) throw ParseError("f must be nonconstant", v.line, v.column);
  }
  if (auto* v = optional_value(top, "cohomology")) {
    if (v->text == "asserted") s.cohomology = Cohomology::asserted;
    else if (v->text == "refuted") s.cohomology = Cohomology::refuted;
    else if (v->text == "unknown") s.cohomology = Cohomology::unknown;
    else throw ParseError("expected asserted, refuted or unknown", v->line, v->column);
  }
  if (auto* v = optional_value(top, "samples")) s.sampling.count = parse_integer<std::size_t>(*v, 0);
  if (auto* v = optional_value(top, "seed")) s.sampling.seed = parse_integer<std::uint64_t>(*v, 0);
  if (auto* v = optional_value(top, "region")) {
    std::istringstream parts(v->text);
    std::string lo, hi, extra;
    parts >> lo >> hi;
    if (lo.empty() || hi.empty() || (parts >> extra))
      throw ParseError("expected 'lo hi'", v->line, v->column);
    s.sampling.region_lo = parse_rational(lo, v->line, v->column);
    s.sampling.region_hi = parse_rational(hi, v->line, v->column + v->text.find(hi, lo.size()));
    if (!(s.sampling.region_lo < s.sampling.region_hi))
      throw ParseError("region must satisfy lo < hi", v->line, v->column);
  }
  if (auto* v = optional_value(top, "grid")) s.sampling.grid = parse_integer<int>(*v, 1);
  if (auto* v = optional_value(top, "exactness")) {
    if (v->text == "exact") s.sampling.exactness = Exactness::exact;
    else if (v->text == "float") s.sampling.exactness = Exactness::floating;
    else throw ParseError("expected exact or float", v->line, v->column);
  }
  if (auto* v = optional_value(top, "u_zero")) s.sampling.u_zero_count = parse_integer<std::size_t>(*v, 0);
  if (auto* v = optional_value(top, "u_zero_variable")) {
    const int j = parse_integer<int>(*v, 1);
    if (j > s.n) throw ParseError("u_zero_variable exceeds n", v->line, v->column);
    s.sampling.u_zero_variable = j;
  }
  if (auto* v = optional_value(top, "degree_bound")) s.degree_bound = parse_integer<int>(*v, 0);
  if (auto* v = optional_value(top, "lift_bound")) s.lift_bound = parse_integer<int>(*v, 0);
  if (auto* v = optional_value(top, "smoothness_degree")) s.smoothness_degree = parse_integer<int>(*v, 0);
  if (auto* v = optional_value(top, "g_twist")) s.g_twist = within(*v, [&] { return parse_poly(v->text, base, v->line); });

  for (const auto& [sec, header_line] : pair_sections) {
    BasePair p{VectorField(base), VectorField(base), {}, {}, {}};
    const Value& a = require(sec, "alpha", header_line, "[pair]");
    const Value& b = require(sec, "beta", header_line, "[pair]");
    p.alpha = within(a, [&] { return parse_vector_field(a.text, base, a.line); });
    p.beta = within(b, [&] { return parse_vector_field(b.text, base, b.line); });
    if (auto* v = optional_value(sec, "kernel_alpha")) p.kernel_alpha = parse_poly_list(*v, base);
    if (auto* v = optional_value(sec, "kernel_beta")) p.kernel_beta = parse_poly_list(*v, base);
    if (auto* v = optional_value(sec, "ideal")) p.ideal = parse_poly_list(*v, base);
    s.pairs.push_back(std::move(p));
  }

  if (approx_section) {
    const Section& sec = approx_section->first;
    if (auto* v = optional_value(sec, "degree_min")) s.approx.degree_min = parse_integer<int>(*v, 0);
    if (auto* v = optional_value(sec, "degree_max")) s.approx.degree_max = parse_integer<int>(*v, 0);
    if (s.approx.degree_max < s.approx.degree_min)
      throw ParseError("degree_max must be at least degree_min", approx_section->second, 1);
    if (auto* v = optional_value(sec, "samples")) s.approx.samples = parse_integer<std::size_t>(*v, 1);
    if (auto* v = optional_value(sec, "twists")) s.approx.twists = parse_bool(*v);
    if (auto* v = optional_value(sec, "brackets")) s.approx.brackets = parse_bool(*v);
    if (auto* v = optional_value(sec, "target"))
      s.approx.target = within(*v, [&] { return parse_vector_field(v->text, ambient, v->line); });
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string print_scenario(const Scenario& s) {
  std::ostringstream out;
  if (!s.name.empty()) out << "name = " << s.name << '\n';
  out << "n = " << s.n << '\n';
  out << "f = " << s.f.to_string() << '\n';
  out << "cohomology = " << to_string(s.cohomology) << '\n';
  out << "samples = " << s.sampling.count << '\n';
  out << "seed = " << s.sampling.seed << '\n';
  out << "region = " << s.sampling.region_lo.get_str() << ' ' << s.sampling.region_hi.get_str() << '\n';
  out << "grid = " << s.sampling.grid << '\n';
  out << "exactness = " << (s.sampling.exactness == Exactness::exact ? "exact" : "float") << '\n';
  out << "u_zero = " << s.sampling.u_zero_count << '\n';
  if (s.sampling.u_zero_variable) out << "u_zero_variable = " << *s.sampling.u_zero_variable << '\n';
  out << "degree_bound = " << s.degree_bound << '\n';
  out << "lift_bound = " << s.lift_bound << '\n';
  out << "smoothness_degree = " << s.smoothness_degree << '\n';
  if (s.g_twist) out << "g_twist = " << s.g_twist->to_string() << '\n';
  for (const auto& p : s.pairs) {
    out << "\n[pair]\n";
    out << "alpha = " << p.alpha.to_string() << '\n';
    out << "beta = " << p.beta.to_string() << '\n';
    out << "kernel_alpha = " << join(p.kernel_alpha) << '\n';
    out << "kernel_beta = " << join(p.kernel_beta) << '\n';
    out << "ideal = " << join(p.ideal) << '\n';
  }
  out << "\n[approx]\n";
  out << "degree_min = " << s.approx.degree_min << '\n';
  out << "degree_max = " << s.approx.degree_max << '\n';
  out << "samples = " << s.approx.samples << '\n';
  out << "twists = " << (s.approx.twists ? "true" : "false") << '\n';
  out << "brackets = " << (s.approx.brackets ? "true" : "false") << '\n';
  if (s.approx.target) out << "target = " << s.approx.target->to_string() << '\n';
  return out.str();
}

bool operator==(const Scenario& a, const Scenario& b) {
  auto same_pair = [](const BasePair& x, const BasePair& y) {
    return x.alpha == y.alpha && x.beta == y.beta && x.kernel_alpha == y.kernel_alpha &&
           x.kernel_beta == y.kernel_beta && x.ideal == y.ideal;
  };
  if (a.pairs.size() != b.pairs.size()) return false;
  for (std::size_t k = 0; k < a.pairs.size(); ++k)
    if (!same_pair(a.pairs[k], b.pairs[k])) return false;
  const auto& sa = a.sampling;
  const auto& sb = b.sampling;
  return a.name == b.name && a.n == b.n && a.f == b.f && a.cohomology == b.cohomology && sa.count == sb.count &&
         sa.seed == sb.seed && sa.region_lo == sb.region_lo && sa.region_hi == sb.region_hi && sa.grid == sb.grid &&
         sa.exactness == sb.exactness && sa.u_zero_count == sb.u_zero_count &&
         sa.u_zero_variable == sb.u_zero_variable && a.degree_bound == b.degree_bound &&
         a.lift_bound == b.lift_bound && a.smoothness_degree == b.smoothness_degree && a.g_twist == b.g_twist &&
         a.approx.degree_min == b.approx.degree_min && a.approx.degree_max == b.approx.degree_max &&
         a.approx.samples == b.approx.samples && a.approx.twists == b.approx.twists &&
         a.approx.brackets == b.approx.brackets && a.approx.target == b.approx.target;
}

}  // namespace vdpkit
