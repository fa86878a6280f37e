#include "expertbayes/sampling.hpp"

#include "expertbayes/error.hpp"

namespace expertbayes {

Dataset sample_dataset(const Network& network, std::size_t rows, Rng& rng) {
  if (!network.fully_estimated()) {
    throw Error(ErrorCode::UnestimatedCpt, "cannot sample from unestimated tables");
  }
  const NetworkStructure& s = network.structure();
  const auto order = topological_order(s);
  std::vector<Column> columns;
  for (const Variable& v : s.variables()) columns.push_back(Column{v.name, v.states});

  std::vector<int> cells(rows * s.size());
  for (std::size_t r = 0; r < rows; ++r) {
    std::span<int> row(cells.data() + r * s.size(), s.size());
    for (std::size_t v : order) {
      const Cpt& cpt = network.cpt(v);
      const auto probs = cpt.row(cpt.config_index(row));
      const double u = rng.unit();
      double cumulative = 0.0;
      std::size_t pick = probs.size() - 1;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        cumulative += probs[i];
        if (u < cumulative) {
          pick = i;
          break;
        }
      }
      row[v] = static_cast<int>(pick);
    }
  }
  return Dataset(std::move(columns), std::move(cells), network.class_variable());
}

}  // namespace expertbayes
