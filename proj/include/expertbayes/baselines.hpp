#pragma once

#include <span>
#include <string>
#include <vector>

#include "expertbayes/dataset.hpp"
#include "expertbayes/network.hpp"

namespace expertbayes {

struct K2Config {
  std::size_t max_parents = 1;
  // Variable names; empty means class first, then the remaining columns in
  // dataset order.
  std::vector<std::string> ordering;
  // Every attribute starts with the class as parent; that edge counts
  // toward max_parents.
  bool start_naive = true;
  double pseudocount = 1.0;
};

// Log Cooper-Herskovits marginal likelihood of one family (uniform Dirichlet
// priors):
//   sum_j [ lnG(r) - lnG(N_j + r) + sum_k lnG(N_jk + 1) ]
// Rows missing the node or a parent are skipped.
double k2_family_score(const Dataset& data, std::size_t node, std::span<const std::size_t> parents);

// Network variables are the dataset columns; throws Error(InvalidOrdering).
Network learn_k2(const Dataset& data, const K2Config& config = {});

// Class plus one edge class -> attribute for every other column.
NetworkStructure naive_bayes_structure(const Dataset& data);

// Class-conditional mutual information between attribute columns, in nats.
class MutualInfoTable {
 public:
  MutualInfoTable(std::vector<std::size_t> attributes, std::vector<double> values)
      : attributes_(std::move(attributes)), values_(std::move(values)) {}

  // Dataset column index of each attribute, in column order.
  const std::vector<std::size_t>& attributes() const noexcept { return attributes_; }
  std::size_t size() const noexcept { return attributes_.size(); }
  // i, j index into attributes().
  double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }

 private:
  std::vector<std::size_t> attributes_;
  std::vector<double> values_;
};

// Plug-in I(Xi; Xj | C) = sum p(x,y,c) ln[p(x,y|c) / (p(x|c) p(y|c))] from
// unsmoothed frequencies over rows where Xi, Xj and C are all present.
// The diagonal holds H(Xi | C). Throws Error(EmptyDataset) and
// Error(InvalidArgument) when fewer than two attributes exist.
MutualInfoTable conditional_mutual_info(const Dataset& data);

struct TanConfig {
  double pseudocount = 1.0;
};

// Maximum-weight spanning tree over attributes (Kruskal; equal weights are
// taken in lexicographic order of the name pair), rooted at the first
// attribute column, edges directed away from the root, class added as a
// parent of every attribute.
Network learn_tan(const Dataset& data, const TanConfig& config = {});

}  // namespace expertbayes
