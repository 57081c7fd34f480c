#include "vdpkit/approx.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "vdpkit/criterion.hpp"
#include "vdpkit/errors.hpp"

namespace vdpkit {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::complete_lift:
      return "complete-lift";
    case Provenance::kernel_multiple:
      return "kernel-multiple";
    case Provenance::twist_field:
      return "twist-field";
    case Provenance::bracket:
      return "bracket-of-two-entries";
  }
  return "unknown";
}

std::optional<std::size_t> Dictionary::find(const VectorField& field) const {
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (entries_[k].field.ambient == field) return k;
  }
  return std::nullopt;
}

VectorField twist_field(const SuspensionContext& ctx) {
  VectorField out(ctx.space());
  out.set(0, Poly::variable(ctx.space(), 0));
  out.set(1, -Poly::variable(ctx.space(), 1));
  return out;
}

namespace {

// Text of the field scaled so that its first nonzero coefficient is monic;
// equal keys mean proportional fields.
std::string proportionality_key(const VectorField& x) {
  for (std::size_t k = 0; k < x.dimension(); ++k) {
    if (x[k].is_zero()) continue;
    const GaussianRational lead = x[k].terms().begin()->second;
    return (lead.inverse() * x).to_string();
  }
  return "0";
}

class DictionaryBuilder {
 public:
  explicit DictionaryBuilder(const SuspensionContext& ctx) : ctx_(ctx) {}

  void add(const VectorField& raw, Provenance prov, std::string description, int degree,
           std::optional<std::pair<std::size_t, std::size_t>> parents = std::nullopt) {
    VectorField field(ctx_.space());
    for (std::size_t k = 0; k < raw.dimension(); ++k) field.set(k, ctx_.normal_form(raw[k]));
    if (field.is_zero()) return;
    if (!seen_.insert(proportionality_key(field)).second) return;
    SuspensionField tangent = [&] {
      try {
        return is_tangent(field, ctx_);
      } catch (const NotTangent& e) {
        throw Error("dictionary entry " + description + " is not tangent: " + e.what());
      }
    }();
    const Poly div = divergence_on_suspension(tangent, ctx_);
    if (!div.is_zero()) throw Error("dictionary entry " + description + " has divergence " + div.to_string());
    entries_.push_back({std::move(tangent), prov, std::move(description), degree, parents});
  }

  std::vector<DictionaryEntry>& entries() { return entries_; }

 private:
  const SuspensionContext& ctx_;
  std::set<std::string> seen_;
  std::vector<DictionaryEntry> entries_;
};

std::pair<std::string, std::string> field_names(const LiftedPair& lp) {
  const std::string tag = "#" + std::to_string(lp.source);
  if (lp.label == "(alpha_u, beta_v)") return {"alpha_u" + tag, "beta_v" + tag};
  return {"alpha_v" + tag, "beta_u" + tag};
}

}  // namespace

Dictionary build_dictionary(const SuspensionContext& ctx, std::span<const LiftedPair> pairs,
                            const DictionaryOptions& options) {
  const int d = options.degree_bound;
  DictionaryBuilder builder(ctx);
  for (const auto& lp : pairs) {
    const auto [first_name, second_name] = field_names(lp);
    const std::pair<const SuspensionField*, const std::vector<Poly>*> sides[] = {{&lp.first, &lp.kernel_first},
                                                                                 {&lp.second, &lp.kernel_second}};
    const std::string names[] = {first_name, second_name};
    for (int s = 0; s < 2; ++s) {
      for (const auto& k : kernel_closure(*sides[s].second, d, &ctx.relation())) {
        const bool unit = k.is_constant();
        builder.add(k * sides[s].first->ambient, unit ? Provenance::complete_lift : Provenance::kernel_multiple,
                    unit ? names[s] : "(" + k.to_string() + ")*" + names[s], std::max(0, k.total_degree()));
      }
    }
  }
  if (options.include_twists) {
    const VectorField twist = twist_field(ctx);
    std::vector<std::size_t> zvars;
    for (int j = 1; j <= ctx.n(); ++j) zvars.push_back(ctx.z_index(j));
    for (const auto& m : monomials_up_to(ctx.space()->size(), zvars, d)) {
      const Poly h = Poly::monomial(ctx.space(), m);
      builder.add(h * twist, Provenance::twist_field, "(" + h.to_string() + ")*(u du - v dv)", total_degree(m));
    }
  }
  if (options.include_brackets) {
    const std::size_t generators = builder.entries().size();
    for (std::size_t a = 0; a < generators; ++a) {
      for (std::size_t b = a + 1; b < generators; ++b) {
        const auto& ea = builder.entries()[a];
        const auto& eb = builder.entries()[b];
        if (ea.degree + eb.degree > d) continue;
        const VectorField br = lie_bracket(ea.field.ambient, eb.field.ambient);
        const int degree = ea.degree + eb.degree;
        builder.add(br, Provenance::bracket, "[" + ea.description + ", " + eb.description + "]", degree,
                    std::make_pair(a, b));
      }
    }
  }
  return Dictionary(std::move(builder.entries()), d);
}

std::vector<std::vector<std::complex<double>>> tangent_frame(const SuspensionContext& ctx,
                                                             std::span<const std::complex<double>> p) {
  const Eigen::Index m = static_cast<Eigen::Index>(ctx.space()->size());
  Eigen::VectorXcd normal(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    normal(k) = std::conj(ctx.defining().derivative(static_cast<std::size_t>(k)).evaluate(p));
  }
  if (normal.norm() < 1e-14) throw SingularPoint("d(uv - f) vanishes at the sample");
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(normal);
  const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, m);
  std::vector<std::vector<std::complex<double>>> frame;
  for (Eigen::Index c = 1; c < m; ++c) {
    std::vector<std::complex<double>> col(static_cast<std::size_t>(m));
    for (Eigen::Index r = 0; r < m; ++r) col[static_cast<std::size_t>(r)] = q(r, c);
    frame.push_back(std::move(col));
  }
  return frame;
}

namespace {

// Q^H w for the tangent frame Q.
std::vector<std::complex<double>> frame_coordinates(const std::vector<std::vector<std::complex<double>>>& frame,
                                                    const std::vector<std::complex<double>>& w) {
  std::vector<std::complex<double>> out;
  out.reserve(frame.size());
  for (const auto& q : frame) {
    std::complex<double> s = 0;
    for (std::size_t k = 0; k < w.size(); ++k) s += std::conj(q[k]) * w[k];
    out.push_back(s);
  }
  return out;
}

double norm2(std::span<const std::complex<double>> v) {
  double s = 0;
  for (const auto& c : v) s += std::norm(c);
  return std::sqrt(s);
}

void require_divergence_free(const SuspensionField& target, const SuspensionContext& ctx) {
  if (!divergence_on_suspension(target, ctx).is_zero()) throw ContractViolation("target has nonzero divergence");
}

}  // namespace

double sup_residual(const SuspensionField& target, const Dictionary& dict,
                    std::span<const std::complex<double>> coefficients, std::span<const SurfacePoint> samples,
                    const SuspensionContext& ctx) {
  if (coefficients.size() != dict.size()) throw ContractViolation("one coefficient per dictionary entry expected");
  double sup = 0;
  for (const auto& p : samples) {
    std::vector<std::complex<double>> r = target.ambient.evaluate(std::span<const std::complex<double>>(p.coords));
    for (std::size_t k = 0; k < dict.size(); ++k) {
      if (coefficients[k] == 0.0) continue;
      const auto e = dict[k].field.ambient.evaluate(std::span<const std::complex<double>>(p.coords));
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= coefficients[k] * e[i];
    }
    sup = std::max(sup, norm2(frame_coordinates(tangent_frame(ctx, p.coords), r)));
  }
  return sup;
}

FitResult fit_field(const SuspensionField& target, const Dictionary& dict, std::span<const SurfacePoint> samples,
                    const SuspensionContext& ctx) {
  if (dict.empty()) throw ContractViolation("empty dictionary");
  if (samples.empty()) throw ContractViolation("no samples");
  require_divergence_free(target, ctx);

  const std::size_t m = ctx.space()->size();
  const Eigen::Index rows = static_cast<Eigen::Index>(samples.size() * (m - 1));
  const Eigen::Index cols = static_cast<Eigen::Index>(dict.size());
  Eigen::MatrixXcd a(rows, cols);
  Eigen::VectorXcd b(rows);
  std::vector<std::vector<std::vector<std::complex<double>>>> frames;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const std::span<const std::complex<double>> p(samples[s].coords);
    frames.push_back(tangent_frame(ctx, p));
    const auto& frame = frames.back();
    const Eigen::Index base = static_cast<Eigen::Index>(s * (m - 1));
    const auto t = frame_coordinates(frame, target.ambient.evaluate(p));
    for (std::size_t i = 0; i + 1 < m; ++i) b(base + static_cast<Eigen::Index>(i)) = t[i];
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto e = frame_coordinates(frame, dict[static_cast<std::size_t>(k)].field.ambient.evaluate(p));
      for (std::size_t i = 0; i + 1 < m; ++i) a(base + static_cast<Eigen::Index>(i), k) = e[i];
    }
  }

  Eigen::MatrixXd real(2 * rows, 2 * cols);
  real << a.real(), -a.imag(), a.imag(), a.real();
  Eigen::VectorXd rhs(2 * rows);
  rhs << b.real(), b.imag();
  Eigen::VectorXd scale(2 * cols);
  for (Eigen::Index c = 0; c < 2 * cols; ++c) {
    const double nrm = real.col(c).norm();
    scale(c) = nrm > 0 ? 1.0 / nrm : 1.0;
    real.col(c) *= scale(c);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-12);
  cod.compute(real);
  Eigen::VectorXd y = cod.solve(rhs);
  // Iterative refinement against the rounding of the first solve.
  double residual_norm = (rhs - real * y).norm();
  for (int step = 0; step < 3 && residual_norm > 0; ++step) {
    const Eigen::VectorXd candidate = y + cod.solve(rhs - real * y);
    const double candidate_norm = (rhs - real * candidate).norm();
    if (!(candidate_norm < residual_norm)) break;
    y = candidate;
    residual_norm = candidate_norm;
  }
  const Eigen::VectorXd x = y.cwiseProduct(scale);

  FitResult out;
  out.numeric_rank = static_cast<std::size_t>(cod.rank());
  for (Eigen::Index k = 0; k < cols; ++k) out.coefficients.emplace_back(x(k), x(cols + k));

  const Eigen::VectorXcd c = Eigen::Map<const Eigen::VectorXcd>(out.coefficients.data(), cols);
  const Eigen::VectorXcd r = b - a * c;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    std::vector<std::complex<double>> res(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) res[i] = r(static_cast<Eigen::Index>(s * (m - 1) + i));
    out.sup_residual = std::max(out.sup_residual, norm2(res));
    out.residuals.push_back(std::move(res));
  }
  return out;
}

ResidualCurve residual_curve(const SuspensionField& target, const SuspensionContext& ctx,
                             std::span<const LiftedPair> pairs, std::span<const SurfacePoint> samples, int degree_min,
                             int degree_max, const DictionaryOptions& base_options) {
  if (degree_max < degree_min) throw ContractViolation("empty degree range");
  ResidualCurve curve;
  bool have_best = false;
  for (int d = degree_min; d <= degree_max; ++d) {
    DictionaryOptions opts = base_options;
    opts.degree_bound = d;
    Dictionary dict = build_dictionary(ctx, pairs, opts);
    FitResult fit = fit_field(target, dict, samples, ctx);
    CurvePoint pt{d, dict.size(), fit.sup_residual, fit.sup_residual};
    if (!have_best || fit.sup_residual < curve.best.sup_residual) {
      curve.best = std::move(fit);
      curve.best_dictionary = std::move(dict);
      have_best = true;
    }
    pt.sup_residual = curve.best.sup_residual;
    curve.points.push_back(pt);
  }
  return curve;
}

nlohmann::json ResidualCurve::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : points) {
    rows.push_back({{"degree", p.degree},
                    {"dictionary_size", p.dictionary_size},
                    {"fit_sup_residual", p.fit_sup_residual},
                    {"sup_residual", p.sup_residual}});
  }
  return rows;
}

std::string ResidualCurve::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "degree,dictionary_size,fit_sup_residual,sup_residual\n";
  for (const auto& p : points) {
    os << p.degree << ',' << p.dictionary_size << ',' << p.fit_sup_residual << ',' << p.sup_residual << '\n';
  }
  return os.str();
}

namespace {

using State = std::vector<std::complex<double>>;

// Complex-coefficient copy of a field for fast repeated evaluation.
class CompiledField {
 public:
  explicit CompiledField(std::size_t dim) : terms_(dim) {}

  void add(const VectorField& x, std::complex<double> scale) {
    for (std::size_t i = 0; i < x.dimension(); ++i) {
      for (const auto& [e, c] : x[i].terms()) terms_[i][e] += scale * c.to_complex();
    }
  }

  State operator()(const State& x) const {
    State out(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      for (const auto& [e, c] : terms_[i]) {
        std::complex<double> m = c;
        for (std::size_t k = 0; k < e.size(); ++k) {
          for (std::uint16_t p = 0; p < e[k]; ++p) m *= x[k];
        }
        out[i] += m;
      }
    }
    return out;
  }

 private:
  std::vector<std::map<Exponents, std::complex<double>>> terms_;
};

State rk4(const CompiledField& rhs, State y, double t, int steps) {
  const double h = t / steps;
  for (int s = 0; s < steps; ++s) {
    auto axpy = [&](const State& k, double c) {
      State out = y;
      for (std::size_t i = 0; i < y.size(); ++i) out[i] += c * k[i];
      return out;
    };
    const State k1 = rhs(y);
    const State k2 = rhs(axpy(k1, h / 2));
    const State k3 = rhs(axpy(k2, h / 2));
    const State k4 = rhs(axpy(k3, h));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return y;
}

}  // namespace

std::vector<FlowAudit> flow_audit(const SuspensionField& target, const Dictionary& dict, const FitResult& fit,
                                  std::span<const SurfacePoint> starts, double t_max, int checkpoints) {
  if (fit.coefficients.size() != dict.size()) throw ContractViolation("fit does not match the dictionary");
  const std::size_t dim = target.ambient.dimension();
  CompiledField fitted(dim);
  for (std::size_t k = 0; k < dict.size(); ++k) fitted.add(dict[k].field.ambient, fit.coefficients[k]);
  CompiledField exact(dim);
  exact.add(target.ambient, 1.0);

  std::vector<FlowAudit> out;
  for (int c = 1; c <= checkpoints; ++c) {
    const double t = t_max * c / checkpoints;
    const int steps = 40 * c;
    FlowAudit audit;
    audit.time = t;
    for (const auto& p : starts) {
      const State a = rk4(fitted, p.coords, t, steps);
      const State b = rk4(exact, p.coords, t, steps);
      double dev = 0;
      for (std::size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::abs(a[i] - b[i]));
      audit.max_deviation = std::max(audit.max_deviation, dev);
    }
    audit.bound = 10 * fit.sup_residual * t + 1e-12;
    audit.within_bound = audit.max_deviation <= audit.bound;
    out.push_back(audit);
  }
  return out;
}

}  // namespace vdpkit
