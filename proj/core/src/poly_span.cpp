#include "vdpkit/poly_span.hpp"

#include <map>

namespace vdpkit {

std::vector<std::optional<ExactVector>> solve_in_span(std::span<const Poly> columns, std::span<const Poly> targets) {
  std::map<Exponents, std::size_t, GradedOrder> row_of;
  auto index_terms = [&](const Poly& p) {
    for (const auto& [e, c] : p.terms()) row_of.try_emplace(e, row_of.size());
  };
  for (const auto& p : columns) index_terms(p);
  for (const auto& p : targets) index_terms(p);

  ExactMatrix m(row_of.size(), columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    for (const auto& [e, c] : columns[k].terms()) m(row_of.at(e), k) = c;
  }
  std::vector<ExactVector> rhs;
  rhs.reserve(targets.size());
  for (const auto& t : targets) {
    ExactVector b(row_of.size());
    for (const auto& [e, c] : t.terms()) b[row_of.at(e)] = c;
    rhs.push_back(std::move(b));
  }
  return solve_many(m, rhs);
}

}  // namespace vdpkit
