#include "expertbayes/cpt_learning.hpp"

#include <numeric>

#include "expertbayes/error.hpp"

namespace expertbayes {

namespace {

void check_inputs(const BoundData& data, double pseudocount) {
  if (!(pseudocount >= 0.0)) throw Error(ErrorCode::InvalidArgument, "pseudocount must be >= 0");
  if (data.row_count() == 0) throw Error(ErrorCode::EmptyDataset, "dataset has no rows");
}

}  // namespace

Cpt estimate_cpt(const NetworkStructure& structure, std::size_t node, const BoundData& data,
                 double pseudocount) {
  check_inputs(data, pseudocount);
  const std::size_t card = structure.variable(node).cardinality();
  const auto& parents = structure.parents(node);
  std::vector<std::size_t> parent_cards;
  std::size_t configs = 1;
  for (std::size_t p : parents) {
    parent_cards.push_back(structure.variable(p).cardinality());
    configs *= parent_cards.back();
  }

  std::vector<double> counts(configs * card, 0.0);
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    const auto row = data.row(r);
    const int state = row[node];
    if (state == kMissing) continue;
    std::size_t config = 0;
    bool complete = true;
    for (std::size_t i = 0; i < parents.size(); ++i) {
      const int ps = row[parents[i]];
      if (ps == kMissing) {
        complete = false;
        break;
      }
      config = config * parent_cards[i] + static_cast<std::size_t>(ps);
    }
    if (complete) counts[config * card + static_cast<std::size_t>(state)] += 1.0;
  }

  std::vector<double> values(configs * card);
  for (std::size_t c = 0; c < configs; ++c) {
    const double total = std::accumulate(counts.begin() + c * card, counts.begin() + (c + 1) * card, 0.0);
    const double denom = total + pseudocount * static_cast<double>(card);
    for (std::size_t s = 0; s < card; ++s) {
      values[c * card + s] = denom > 0.0 ? (counts[c * card + s] + pseudocount) / denom
                                         : 1.0 / static_cast<double>(card);
    }
  }
  return Cpt(node, card, parents, std::move(parent_cards), std::move(values), true);
}

std::vector<Cpt> estimate_cpts(const NetworkStructure& structure, const BoundData& data,
                               double pseudocount) {
  check_inputs(data, pseudocount);
  std::vector<Cpt> cpts;
  cpts.reserve(structure.size());
  for (std::size_t v = 0; v < structure.size(); ++v) {
    cpts.push_back(estimate_cpt(structure, v, data, pseudocount));
  }
  return cpts;
}

std::vector<Cpt> estimate_cpts(const NetworkStructure& structure, const Dataset& data,
                               double pseudocount) {
  return estimate_cpts(structure, BoundData(structure, data), pseudocount);
}

Network rebuild_affected(const Network& network, const BoundData& data,
                         std::span<const std::size_t> changed, double pseudocount) {
  if (changed.empty()) return network;
  std::vector<Cpt> tables;
  tables.reserve(changed.size());
  for (std::size_t node : changed) {
    if (node >= network.structure().size()) {
      throw Error(ErrorCode::InvalidArgument, "changed node out of range");
    }
    tables.push_back(estimate_cpt(network.structure(), node, data, pseudocount));
  }
  return network.with_cpts(std::move(tables));
}

Network rebuild_affected(const Network& network, const Dataset& data,
                         std::span<const std::size_t> changed, double pseudocount) {
  return rebuild_affected(network, BoundData(network.structure(), data), changed, pseudocount);
}

Network fit_parameters(const Network& network, const BoundData& data, double pseudocount) {
  std::vector<std::size_t> all(network.structure().size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return rebuild_affected(network, data, all, pseudocount);
}

Network fit_parameters(const Network& network, const Dataset& data, double pseudocount) {
  return fit_parameters(network, BoundData(network.structure(), data), pseudocount);
}

Network fill_unestimated(const Network& network, const BoundData& data, double pseudocount) {
  std::vector<std::size_t> pending;
  for (std::size_t v = 0; v < network.cpts().size(); ++v) {
    if (!network.cpt(v).estimated()) pending.push_back(v);
  }
  return rebuild_affected(network, data, pending, pseudocount);
}

}  // namespace expertbayes
