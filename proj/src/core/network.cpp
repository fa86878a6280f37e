#include "expertbayes/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <unordered_set>

#include "expertbayes/error.hpp"

namespace expertbayes {

std::optional<std::size_t> Variable::state_index(std::string_view label) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == label) return i;
  }
  return std::nullopt;
}

namespace {

std::vector<std::vector<std::size_t>> adjacency(std::size_t node_count,
                                                std::span<const Edge> edges) {
  std::vector<std::vector<std::size_t>> out(node_count);
  for (const Edge& e : edges) out[e.parent].push_back(e.child);
  for (auto& list : out) std::sort(list.begin(), list.end());
  return out;
}

void check_endpoints(std::size_t node_count, std::span<const Edge> edges) {
  for (const Edge& e : edges) {
    if (e.parent >= node_count || e.child >= node_count) {
      throw Error(ErrorCode::InvalidStructure, "edge endpoint out of range");
    }
  }
}

}  // namespace

bool detect_cycle(std::size_t node_count, std::span<const Edge> edges) {
  check_endpoints(node_count, edges);
  const auto out = adjacency(node_count, edges);
  enum Colour : unsigned char { White, Grey, Black };
  std::vector<Colour> colour(node_count, White);
  // Explicit stack of (node, next child position).
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < node_count; ++root) {
    if (colour[root] != White) continue;
    colour[root] = Grey;
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [node, pos] = stack.back();
      if (pos < out[node].size()) {
        const std::size_t next = out[node][pos++];
        if (colour[next] == Grey) return true;
        if (colour[next] == White) {
          colour[next] = Grey;
          stack.emplace_back(next, 0);
        }
      } else {
        colour[node] = Black;
        stack.pop_back();
      }
    }
  }
  return false;
}

std::vector<std::size_t> topological_order(std::size_t node_count, std::span<const Edge> edges) {
  check_endpoints(node_count, edges);
  const auto out = adjacency(node_count, edges);
  std::vector<std::size_t> in_degree(node_count, 0);
  for (const Edge& e : edges) ++in_degree[e.child];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < node_count; ++v) {
    if (in_degree[v] == 0) ready.push(v);
  }
  std::vector<std::size_t> order;
  order.reserve(node_count);
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (std::size_t c : out[v]) {
      if (--in_degree[c] == 0) ready.push(c);
    }
  }
  if (order.size() != node_count) {
    throw Error(ErrorCode::CyclicStructure, "graph contains a directed cycle");
  }
  return order;
}

NetworkStructure::NetworkStructure(std::vector<Variable> variables, std::vector<Edge> edges)
    : variables_(std::move(variables)), edges_(std::move(edges)) {
  std::unordered_set<std::string> names;
  for (const Variable& v : variables_) {
    if (v.name.empty()) throw Error(ErrorCode::InvalidStructure, "variable name is empty");
    if (!names.insert(v.name).second) {
      throw Error(ErrorCode::InvalidStructure, "duplicate variable name '" + v.name + "'");
    }
    if (v.states.size() < 2) {
      throw Error(ErrorCode::InvalidStructure,
                  "variable '" + v.name + "' needs at least two states");
    }
    std::unordered_set<std::string> labels;
    for (const auto& s : v.states) {
      if (!labels.insert(s).second) {
        throw Error(ErrorCode::InvalidStructure,
                    "duplicate state '" + s + "' in variable '" + v.name + "'");
      }
    }
  }
  check_endpoints(variables_.size(), edges_);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const Edge& e : edges_) {
    if (e.parent == e.child) {
      throw Error(ErrorCode::InvalidStructure,
                  "self-loop on '" + variables_[e.parent].name + "'");
    }
    if (!seen.emplace(e.parent, e.child).second) {
      throw Error(ErrorCode::InvalidStructure, "duplicate edge " + variables_[e.parent].name +
                                                   " -> " + variables_[e.child].name);
    }
  }
  if (detect_cycle(variables_.size(), edges_)) {
    throw Error(ErrorCode::CyclicStructure, "network structure contains a directed cycle");
  }
  parents_.assign(variables_.size(), {});
  children_.assign(variables_.size(), {});
  for (const Edge& e : edges_) {
    parents_[e.child].push_back(e.parent);
    children_[e.parent].push_back(e.child);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());
  for (auto& c : children_) std::sort(c.begin(), c.end());
}

bool NetworkStructure::has_edge(std::size_t parent, std::size_t child) const {
  const auto& p = parents_.at(child);
  return std::binary_search(p.begin(), p.end(), parent);
}

std::optional<std::size_t> NetworkStructure::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

bool operator==(const NetworkStructure& lhs, const NetworkStructure& rhs) {
  if (lhs.variables_ != rhs.variables_) return false;
  auto a = lhs.edges_;
  auto b = rhs.edges_;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

std::vector<std::size_t> topological_order(const NetworkStructure& structure) {
  return topological_order(structure.size(), structure.edges());
}

std::vector<std::size_t> markov_blanket(const NetworkStructure& structure, std::size_t node) {
  if (node >= structure.size()) throw Error(ErrorCode::InvalidArgument, "node out of range");
  std::set<std::size_t> blanket(structure.parents(node).begin(), structure.parents(node).end());
  for (std::size_t child : structure.children(node)) {
    blanket.insert(child);
    for (std::size_t co : structure.parents(child)) blanket.insert(co);
  }
  blanket.erase(node);
  return {blanket.begin(), blanket.end()};
}

Cpt::Cpt(std::size_t owner, std::size_t cardinality, std::vector<std::size_t> parents,
         std::vector<std::size_t> parent_cardinalities, std::vector<double> values,
         bool estimated)
    : owner_(owner),
      cardinality_(cardinality),
      parents_(std::move(parents)),
      parent_cards_(std::move(parent_cardinalities)),
      values_(std::move(values)),
      estimated_(estimated) {
  if (cardinality_ < 2) throw Error(ErrorCode::InvalidArgument, "CPT owner needs >= 2 states");
  if (parents_.size() != parent_cards_.size()) {
    throw Error(ErrorCode::InvalidArgument, "CPT parent/cardinality length mismatch");
  }
  if (!std::is_sorted(parents_.begin(), parents_.end()) ||
      std::adjacent_find(parents_.begin(), parents_.end()) != parents_.end()) {
    throw Error(ErrorCode::InvalidArgument, "CPT parents must be strictly ascending");
  }
  std::size_t rows = 1;
  for (std::size_t c : parent_cards_) rows *= c;
  if (values_.size() != rows * cardinality_) {
    throw Error(ErrorCode::InvalidArgument, "CPT value count does not match its layout");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t s = 0; s < cardinality_; ++s) {
      const double p = values_[r * cardinality_ + s];
      if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "CPT probability outside [0,1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowTolerance) {
      throw Error(ErrorCode::InvalidArgument, "CPT row does not sum to 1");
    }
  }
}

Cpt Cpt::uniform(const NetworkStructure& structure, std::size_t node) {
  const std::size_t card = structure.variable(node).cardinality();
  std::vector<std::size_t> parents = structure.parents(node);
  std::vector<std::size_t> cards;
  std::size_t rows = 1;
  for (std::size_t p : parents) {
    cards.push_back(structure.variable(p).cardinality());
    rows *= cards.back();
  }
  return Cpt(node, card, std::move(parents), std::move(cards),
             std::vector<double>(rows * card, 1.0 / static_cast<double>(card)), false);
}

std::span<const double> Cpt::row(std::size_t config) const {
  return std::span<const double>(values_).subspan(config * cardinality_, cardinality_);
}

std::size_t Cpt::config_index(std::span<const int> assignment) const {
  std::size_t index = 0;
  for (std::size_t i = 0; i < parents_.size(); ++i) {
    index = index * parent_cards_[i] + static_cast<std::size_t>(assignment[parents_[i]]);
  }
  return index;
}

namespace {

void check_layout(const NetworkStructure& structure, const Cpt& cpt, std::size_t node) {
  if (cpt.owner() != node || cpt.cardinality() != structure.variable(node).cardinality() ||
      cpt.parents() != structure.parents(node)) {
    throw Error(ErrorCode::InvalidArgument,
                "CPT layout of '" + structure.variable(node).name + "' disagrees with structure");
  }
  for (std::size_t i = 0; i < cpt.parents().size(); ++i) {
    if (cpt.parent_cardinalities()[i] != structure.variable(cpt.parents()[i]).cardinality()) {
      throw Error(ErrorCode::InvalidArgument, "CPT parent cardinality disagrees with structure");
    }
  }
}

}  // namespace

Network::Network(NetworkStructure structure, std::vector<Cpt> cpts, std::size_t class_variable)
    : structure_(std::move(structure)), cpts_(std::move(cpts)), class_variable_(class_variable) {
  if (class_variable_ >= structure_.size()) {
    throw Error(ErrorCode::InvalidArgument, "class variable index out of range");
  }
  if (cpts_.size() != structure_.size()) {
    throw Error(ErrorCode::InvalidArgument, "one CPT per variable is required");
  }
  for (std::size_t v = 0; v < cpts_.size(); ++v) check_layout(structure_, cpts_[v], v);
}

Network Network::with_uniform_cpts(NetworkStructure structure, std::size_t class_variable) {
  std::vector<Cpt> cpts;
  cpts.reserve(structure.size());
  for (std::size_t v = 0; v < structure.size(); ++v) cpts.push_back(Cpt::uniform(structure, v));
  return Network(std::move(structure), std::move(cpts), class_variable);
}

bool Network::fully_estimated() const {
  return std::all_of(cpts_.begin(), cpts_.end(), [](const Cpt& c) { return c.estimated(); });
}

Network Network::with_cpts(std::vector<Cpt> replacements) const {
  Network copy = *this;
  for (Cpt& c : replacements) {
    const std::size_t node = c.owner();
    if (node >= copy.cpts_.size()) throw Error(ErrorCode::InvalidArgument, "CPT owner out of range");
    check_layout(copy.structure_, c, node);
    copy.cpts_[node] = std::move(c);
  }
  return copy;
}

const char* to_string(EditKind kind) noexcept {
  switch (kind) {
    case EditKind::Add: return "add";
    case EditKind::Remove: return "remove";
    case EditKind::Reverse: return "reverse";
  }
  return "unknown";
}

std::vector<Edge> edited_edges(const NetworkStructure& structure, const CandidateEdit& edit) {
  const std::size_t n = structure.size();
  if (edit.node_a >= n || edit.node_b >= n) {
    throw Error(ErrorCode::InvalidArgument, "edit node out of range");
  }
  if (edit.node_a == edit.node_b) {
    throw Error(ErrorCode::InvalidArgument, "edit needs two distinct nodes");
  }
  const std::size_t a = edit.node_a;
  const std::size_t b = edit.node_b;
  std::vector<Edge> edges = structure.edges();
  const auto existing = std::find_if(edges.begin(), edges.end(), [&](const Edge& e) {
    return (e.parent == a && e.child == b) || (e.parent == b && e.child == a);
  });
  switch (edit.kind) {
    case EditKind::Add: {
      if (!edit.direction) throw Error(ErrorCode::InvalidArgument, "add edit needs a direction");
      if (existing != edges.end()) {
        throw Error(ErrorCode::EditInapplicable, "an edge already joins " +
                                                     structure.variable(a).name + " and " +
                                                     structure.variable(b).name);
      }
      if (*edit.direction == Direction::AtoB) {
        edges.push_back({a, b});
      } else {
        edges.push_back({b, a});
      }
      break;
    }
    case EditKind::Remove:
    case EditKind::Reverse: {
      if (existing == edges.end()) {
        throw Error(ErrorCode::EditInapplicable, "no edge joins " + structure.variable(a).name +
                                                     " and " + structure.variable(b).name);
      }
      if (edit.kind == EditKind::Remove) {
        edges.erase(existing);
      } else {
        std::swap(existing->parent, existing->child);
      }
      break;
    }
  }
  return edges;
}

std::vector<std::size_t> nodes_changed_by(const NetworkStructure& structure,
                                          const CandidateEdit& edit) {
  const std::vector<Edge> after = edited_edges(structure, edit);
  std::vector<std::size_t> changed;
  switch (edit.kind) {
    case EditKind::Add:
      changed.push_back(after.back().child);
      break;
    case EditKind::Remove:
      changed.push_back(structure.has_edge(edit.node_a, edit.node_b) ? edit.node_b : edit.node_a);
      break;
    case EditKind::Reverse:
      changed = {std::min(edit.node_a, edit.node_b), std::max(edit.node_a, edit.node_b)};
      break;
  }
  return changed;
}

NetworkStructure apply_edit(const NetworkStructure& structure, const CandidateEdit& edit) {
  std::vector<Edge> edges = edited_edges(structure, edit);
  if (detect_cycle(structure.size(), edges)) {
    throw Error(ErrorCode::CycleWouldForm, "edit would close a directed cycle");
  }
  return NetworkStructure(structure.variables(), std::move(edges));
}

Network apply_edit(const Network& network, const CandidateEdit& edit) {
  NetworkStructure next = apply_edit(network.structure(), edit);
  std::vector<Cpt> cpts;
  cpts.reserve(next.size());
  for (std::size_t v = 0; v < next.size(); ++v) {
    if (next.parents(v) == network.structure().parents(v)) {
      cpts.push_back(network.cpt(v));
    } else {
      cpts.push_back(Cpt::uniform(next, v));
    }
  }
  return Network(std::move(next), std::move(cpts), network.class_variable());
}

std::size_t edit_distance(const NetworkStructure& lhs, const NetworkStructure& rhs) {
  if (lhs.size() != rhs.size()) {
    throw Error(ErrorCode::InvalidArgument, "structures have different variable counts");
  }
  std::size_t distance = 0;
  for (std::size_t a = 0; a < lhs.size(); ++a) {
    for (std::size_t b = a + 1; b < lhs.size(); ++b) {
      const bool l_ab = lhs.has_edge(a, b), l_ba = lhs.has_edge(b, a);
      const bool r_ab = rhs.has_edge(a, b), r_ba = rhs.has_edge(b, a);
      if (l_ab != r_ab || l_ba != r_ba) ++distance;
    }
  }
  return distance;
}

}  // namespace expertbayes
