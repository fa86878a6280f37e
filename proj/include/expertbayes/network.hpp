#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace expertbayes {

// Unobserved state in assignments, evidence and dataset cells.
inline constexpr int kMissing = -1;

// A discrete variable with at least two distinct, ordered state labels.
struct Variable {
  std::string name;
  std::vector<std::string> states;

  std::size_t cardinality() const noexcept { return states.size(); }
  std::optional<std::size_t> state_index(std::string_view label) const;

  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Edge {
  std::size_t parent = 0;
  std::size_t child = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Three-colour depth-first search over nodes in index order.
bool detect_cycle(std::size_t node_count, std::span<const Edge> edges);

// Kahn's algorithm; ready nodes leave in ascending index order.
// Throws Error(CyclicStructure).
std::vector<std::size_t> topological_order(std::size_t node_count,
                                           std::span<const Edge> edges);

// Variables plus an acyclic edge list. Edge order is the declaration order
// and is preserved through edits and serialization; equality ignores it.
class NetworkStructure {
 public:
  NetworkStructure() = default;

  // Throws Error(InvalidStructure) for bad names, states, endpoints,
  // self-loops or duplicate edges, and Error(CyclicStructure) for cycles.
  NetworkStructure(std::vector<Variable> variables, std::vector<Edge> edges);

  std::size_t size() const noexcept { return variables_.size(); }
  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const Variable& variable(std::size_t index) const { return variables_.at(index); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  // Ascending by variable index.
  const std::vector<std::size_t>& parents(std::size_t node) const { return parents_.at(node); }
  const std::vector<std::size_t>& children(std::size_t node) const { return children_.at(node); }

  bool has_edge(std::size_t parent, std::size_t child) const;
  bool adjacent(std::size_t a, std::size_t b) const { return has_edge(a, b) || has_edge(b, a); }

  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const NetworkStructure& lhs, const NetworkStructure& rhs);

 private:
  std::vector<Variable> variables_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
};

std::vector<std::size_t> topological_order(const NetworkStructure& structure);

// parents ∪ children ∪ co-parents of children, ascending, excluding `node`.
std::vector<std::size_t> markov_blanket(const NetworkStructure& structure, std::size_t node);

// Conditional probability table of one node. Parents are in ascending index
// order; rows enumerate parent configurations row-major with the last parent
// varying fastest.
class Cpt {
 public:
  static constexpr double kRowTolerance = 1e-9;

  // Throws Error(InvalidArgument) when the layout or a row is malformed.
  Cpt(std::size_t owner, std::size_t cardinality, std::vector<std::size_t> parents,
      std::vector<std::size_t> parent_cardinalities, std::vector<double> values,
      bool estimated);

  // Uniform placeholder laid out for `node`'s current parent set.
  static Cpt uniform(const NetworkStructure& structure, std::size_t node);

  std::size_t owner() const noexcept { return owner_; }
  std::size_t cardinality() const noexcept { return cardinality_; }
  const std::vector<std::size_t>& parents() const noexcept { return parents_; }
  const std::vector<std::size_t>& parent_cardinalities() const noexcept { return parent_cards_; }
  std::size_t row_count() const noexcept { return values_.size() / cardinality_; }
  bool estimated() const noexcept { return estimated_; }
  const std::vector<double>& values() const noexcept { return values_; }

  std::span<const double> row(std::size_t config) const;
  double probability(std::size_t config, std::size_t state) const {
    return values_[config * cardinality_ + state];
  }

  // Row index for a full assignment indexed by network variable. Every
  // parent must be assigned (non-negative).
  std::size_t config_index(std::span<const int> assignment) const;

  friend bool operator==(const Cpt&, const Cpt&) = default;

 private:
  std::size_t owner_;
  std::size_t cardinality_;
  std::vector<std::size_t> parents_;
  std::vector<std::size_t> parent_cards_;
  std::vector<double> values_;
  bool estimated_;
};

// Structure, one CPT per node and the designated class variable.
class Network {
 public:
  // Throws Error(InvalidArgument) when a CPT layout disagrees with the
  // structure or the class index is out of range.
  Network(NetworkStructure structure, std::vector<Cpt> cpts, std::size_t class_variable);

  static Network with_uniform_cpts(NetworkStructure structure, std::size_t class_variable);

  const NetworkStructure& structure() const noexcept { return structure_; }
  const std::vector<Cpt>& cpts() const noexcept { return cpts_; }
  const Cpt& cpt(std::size_t node) const { return cpts_.at(node); }
  std::size_t class_variable() const noexcept { return class_variable_; }
  const Variable& class_info() const { return structure_.variable(class_variable_); }
  bool fully_estimated() const;

  // Copy with the given tables swapped in (layouts are re-validated).
  Network with_cpts(std::vector<Cpt> replacements) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  NetworkStructure structure_;
  std::vector<Cpt> cpts_;
  std::size_t class_variable_;
};

enum class EditKind { Add, Remove, Reverse };
enum class Direction { AtoB, BtoA };

const char* to_string(EditKind kind) noexcept;

// One structural edit on an unordered node pair. `direction` is set only for Add.
struct CandidateEdit {
  EditKind kind = EditKind::Add;
  std::size_t node_a = 0;
  std::size_t node_b = 0;
  std::optional<Direction> direction;
  std::uint64_t sequence_index = 0;

  friend bool operator==(const CandidateEdit&, const CandidateEdit&) = default;
};

// Edge list after the edit, without the acyclicity check.
// Throws Error(InvalidArgument) or Error(EditInapplicable).
std::vector<Edge> edited_edges(const NetworkStructure& structure, const CandidateEdit& edit);

// Nodes whose parent set changes under `edit`, ascending.
std::vector<std::size_t> nodes_changed_by(const NetworkStructure& structure,
                                          const CandidateEdit& edit);

NetworkStructure apply_edit(const NetworkStructure& structure, const CandidateEdit& edit);

// Returns a new network one edit away. CPTs of nodes whose parent set changed
// become uniform placeholders (not estimated); all others are carried over.
// Throws Error(EditInapplicable) or Error(CycleWouldForm).
Network apply_edit(const Network& network, const CandidateEdit& edit);

// Number of unordered node pairs whose connection differs (none, a->b, b->a).
// A reversal counts once.
std::size_t edit_distance(const NetworkStructure& lhs, const NetworkStructure& rhs);

}  // namespace expertbayes
