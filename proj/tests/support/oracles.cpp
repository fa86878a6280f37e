#include "oracles.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "expertbayes/error.hpp"

namespace oracle {

using namespace expertbayes;

namespace {

// Row of `cpt` for a full assignment, computed from the parent list.
std::size_t row_of(const Cpt& cpt, const std::vector<int>& assignment) {
  std::size_t row = 0;
  for (std::size_t i = 0; i < cpt.parents().size(); ++i) {
    row = row * cpt.parent_cardinalities()[i] + static_cast<std::size_t>(assignment[cpt.parents()[i]]);
  }
  return row;
}

double joint(const Network& network, const std::vector<int>& assignment) {
  double p = 1.0;
  for (std::size_t v = 0; v < network.structure().size(); ++v) {
    const Cpt& cpt = network.cpt(v);
    p *= cpt.values()[row_of(cpt, assignment) * cpt.cardinality() + static_cast<std::size_t>(assignment[v])];
  }
  return p;
}

// Dataset cells translated to network state indices, -1 for missing.
std::vector<std::vector<int>> rows_for(const Network& network, const Dataset& data) {
  const NetworkStructure& s = network.structure();
  std::vector<std::size_t> column(s.size());
  for (std::size_t v = 0; v < s.size(); ++v) {
    const auto c = data.column_index(s.variable(v).name);
    if (!c) throw std::runtime_error("oracle: dataset lacks " + s.variable(v).name);
    column[v] = *c;
  }
  std::vector<std::vector<int>> out;
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    std::vector<int> row(s.size(), -1);
    for (std::size_t v = 0; v < s.size(); ++v) {
      const int cell = data.cell(r, column[v]);
      if (cell < 0) continue;
      const std::string& label = data.column(column[v]).states[static_cast<std::size_t>(cell)];
      const auto& states = s.variable(v).states;
      row[v] = static_cast<int>(std::find(states.begin(), states.end(), label) - states.begin());
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

std::vector<double> joint_posterior(const Network& network, const std::vector<int>& evidence) {
  const NetworkStructure& s = network.structure();
  const std::size_t c = network.class_variable();
  std::vector<double> mass(s.variable(c).cardinality(), 0.0);
  std::size_t combos = 1;
  for (const Variable& v : s.variables()) combos *= v.cardinality();
  std::vector<int> a(s.size(), 0);
  for (std::size_t index = 0; index < combos; ++index) {
    std::size_t rest = index;
    for (std::size_t v = s.size(); v-- > 0;) {
      a[v] = static_cast<int>(rest % s.variable(v).cardinality());
      rest /= s.variable(v).cardinality();
    }
    bool consistent = true;
    for (std::size_t v = 0; v < s.size(); ++v) {
      if (v != c && evidence[v] >= 0 && evidence[v] != a[v]) consistent = false;
    }
    if (consistent) mass[static_cast<std::size_t>(a[c])] += joint(network, a);
  }
  double total = 0.0;
  for (double m : mass) total += m;
  for (double& m : mass) m = total > 0.0 ? m / total : 1.0 / static_cast<double>(mass.size());
  return mass;
}

std::vector<std::size_t> moral_blanket(const NetworkStructure& structure, std::size_t node) {
  const std::size_t n = structure.size();
  std::vector<std::set<std::size_t>> adj(n);
  for (const Edge& e : structure.edges()) {
    adj[e.parent].insert(e.child);
    adj[e.child].insert(e.parent);
  }
  for (std::size_t child = 0; child < n; ++child) {
    std::vector<std::size_t> parents;
    for (const Edge& e : structure.edges()) {
      if (e.child == child) parents.push_back(e.parent);
    }
    for (std::size_t x : parents) {
      for (std::size_t y : parents) {
        if (x != y) adj[x].insert(y);
      }
    }
  }
  return {adj[node].begin(), adj[node].end()};
}

std::vector<CandidateEdit> all_single_edits(const NetworkStructure& structure) {
  std::vector<CandidateEdit> out;
  for (std::size_t a = 0; a < structure.size(); ++a) {
    for (std::size_t b = a + 1; b < structure.size(); ++b) {
      if (structure.has_edge(a, b) || structure.has_edge(b, a)) {
        out.push_back({EditKind::Remove, a, b, std::nullopt, 0});
        out.push_back({EditKind::Reverse, a, b, std::nullopt, 0});
      } else {
        out.push_back({EditKind::Add, a, b, Direction::AtoB, 0});
        out.push_back({EditKind::Add, a, b, Direction::BtoA, 0});
      }
    }
  }
  return out;
}

double brute_cci(const Network& fitted, const Dataset& data, double threshold, std::size_t positive) {
  const std::size_t c = fitted.class_variable();
  std::size_t hits = 0, scored = 0;
  for (const auto& row : rows_for(fitted, data)) {
    if (row[c] < 0) continue;
    const auto post = joint_posterior(fitted, row);
    std::size_t decided;
    if (post[positive] > threshold) {
      decided = positive;
    } else {
      decided = positive == 0 ? 1 : 0;
      for (std::size_t i = 0; i < post.size(); ++i) {
        if (i != positive && post[i] > post[decided]) decided = i;
      }
    }
    ++scored;
    if (decided == static_cast<std::size_t>(row[c])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(scored);
}

Network fit_by_counting(const Network& network, const Dataset& data, double pseudocount) {
  const NetworkStructure& s = network.structure();
  const auto rows = rows_for(network, data);
  std::vector<Cpt> cpts;
  for (std::size_t v = 0; v < s.size(); ++v) {
    const Cpt shape = Cpt::uniform(s, v);
    const std::size_t card = shape.cardinality();
    std::vector<double> counts(shape.values().size(), 0.0);
    for (const auto& row : rows) {
      bool complete = row[v] >= 0;
      for (std::size_t p : shape.parents()) complete = complete && row[p] >= 0;
      if (!complete) continue;
      counts[row_of(shape, row) * card + static_cast<std::size_t>(row[v])] += 1.0;
    }
    std::vector<double> values(counts.size());
    for (std::size_t r = 0; r < counts.size() / card; ++r) {
      double total = 0.0;
      for (std::size_t k = 0; k < card; ++k) total += counts[r * card + k];
      for (std::size_t k = 0; k < card; ++k) {
        const double denom = total + pseudocount * static_cast<double>(card);
        values[r * card + k] = denom > 0.0 ? (counts[r * card + k] + pseudocount) / denom
                                           : 1.0 / static_cast<double>(card);
      }
    }
    cpts.emplace_back(v, card, shape.parents(), shape.parent_cardinalities(), std::move(values), true);
  }
  return Network(s, std::move(cpts), network.class_variable());
}

ExhaustiveResult exhaustive_single_edit(const Network& original, const Dataset& train,
                                        double threshold, std::size_t positive, double pseudocount) {
  ExhaustiveResult out;
  out.original_score = brute_cci(fit_by_counting(original, train, pseudocount), train, threshold, positive);
  out.best_score = out.original_score;
  const NetworkStructure& s = original.structure();
  for (const CandidateEdit& edit : all_single_edits(s)) {
    std::vector<Edge> edges = s.edges();
    const auto erase = [&](std::size_t p, std::size_t c) {
      edges.erase(std::remove(edges.begin(), edges.end(), Edge{p, c}), edges.end());
    };
    const std::size_t a = edit.node_a, b = edit.node_b;
    if (edit.kind == EditKind::Add) {
      edges.push_back(*edit.direction == Direction::AtoB ? Edge{a, b} : Edge{b, a});
    } else {
      const bool ab = s.has_edge(a, b);
      erase(ab ? a : b, ab ? b : a);
      if (edit.kind == EditKind::Reverse) edges.push_back(ab ? Edge{b, a} : Edge{a, b});
    }
    std::optional<NetworkStructure> candidate;
    try {
      candidate.emplace(s.variables(), edges);
    } catch (const expertbayes::Error& e) {
      if (e.code() != ErrorCode::CyclicStructure) throw;
      continue;
    }
    const Network net = fit_by_counting(Network::with_uniform_cpts(*candidate, original.class_variable()),
                                        train, pseudocount);
    const double score = brute_cci(net, train, threshold, positive);
    out.scored.emplace_back(edit, score);
    out.best_score = std::max(out.best_score, score);
  }
  return out;
}

Network random_network(Rng& rng, std::size_t nodes, std::size_t max_states, double edge_probability) {
  std::vector<Variable> vars;
  for (std::size_t v = 0; v < nodes; ++v) {
    const std::size_t card = 2 + static_cast<std::size_t>(rng.below(max_states - 1));
    Variable var{"V" + std::to_string(v), {}};
    for (std::size_t k = 0; k < card; ++k) var.states.push_back("s" + std::to_string(k));
    vars.push_back(std::move(var));
  }
  // Edges follow a random permutation so the class is not always a root.
  std::vector<std::size_t> order(nodes);
  for (std::size_t i = 0; i < nodes; ++i) order[i] = i;
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = i + 1; j < nodes; ++j) {
      if (rng.unit() < edge_probability) edges.push_back({order[i], order[j]});
    }
  }
  NetworkStructure s(std::move(vars), std::move(edges));
  std::vector<Cpt> cpts;
  for (std::size_t v = 0; v < nodes; ++v) {
    const Cpt shape = Cpt::uniform(s, v);
    std::vector<double> values(shape.values().size());
    const std::size_t card = shape.cardinality();
    for (std::size_t r = 0; r < values.size() / card; ++r) {
      double total = 0.0;
      for (std::size_t k = 0; k < card; ++k) total += values[r * card + k] = 0.05 + rng.unit();
      for (std::size_t k = 0; k < card; ++k) values[r * card + k] /= total;
    }
    cpts.emplace_back(v, card, shape.parents(), shape.parent_cardinalities(), std::move(values), true);
  }
  return Network(std::move(s), std::move(cpts), 0);
}

std::vector<std::vector<std::pair<std::size_t, std::size_t>>> spanning_trees(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;
  const std::size_t m = pairs.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != n - 1) continue;
    std::vector<std::size_t> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = i;
    std::vector<std::pair<std::size_t, std::size_t>> chosen;
    bool acyclic = true;
    for (std::size_t k = 0; k < m && acyclic; ++k) {
      if (!(mask >> k & 1)) continue;
      const auto [x, y] = pairs[k];
      const std::size_t cx = comp[x], cy = comp[y];
      if (cx == cy) {
        acyclic = false;
        break;
      }
      for (auto& c : comp) {
        if (c == cy) c = cx;
      }
      chosen.push_back(pairs[k]);
    }
    if (acyclic) out.push_back(std::move(chosen));
  }
  return out;
}

}  // namespace oracle
