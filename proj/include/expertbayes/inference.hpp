#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expertbayes/network.hpp"

namespace expertbayes {

// Observed labels by variable name; absent variables are unobserved.
using EvidenceRow = std::map<std::string, std::string, std::less<>>;

struct Posterior {
  std::vector<std::string> class_states;
  std::vector<double> probabilities;

  double probability_of(std::string_view state) const;
};

// Per-variable state indices (kMissing = unobserved). Throws
// Error(InvalidEvidenceLabel) for unknown names or labels, or when the class
// variable itself is given.
std::vector<int> make_evidence(const Network& network, const EvidenceRow& evidence);

// Exact P(class | evidence). The class entry of `evidence` is ignored. Uses
// the Markov-blanket product when the blanket is fully observed and variable
// elimination otherwise. Evidence of probability zero under the model yields
// a uniform posterior. Throws Error(UnestimatedCpt).
std::vector<double> class_posterior(const Network& network, std::span<const int> evidence);
Posterior class_posterior(const Network& network, const EvidenceRow& evidence);

// Variable elimination over the class's relevant ancestral component,
// eliminating in topological order, accumulated in log space.
std::vector<double> posterior_by_elimination(const Network& network, std::span<const int> evidence);

// P(c | pa(c)) * prod over children P(k | pa(k)); requires every blanket
// variable observed, else Error(InvalidArgument).
std::vector<double> posterior_by_blanket(const Network& network, std::span<const int> evidence);

enum class MultiClassRule {
  Reject,     // more than two class states is an error
  OneVsRest,  // negative decision picks the likeliest non-positive state
};

// Index of the decided class state: `positive` iff its probability is
// strictly above `threshold`.
std::size_t decide(std::span<const double> probabilities, double threshold, std::size_t positive,
                   MultiClassRule rule = MultiClassRule::Reject);

std::string classify(const Network& network, const EvidenceRow& evidence, double threshold,
                     std::string_view positive_state, MultiClassRule rule = MultiClassRule::Reject);

}  // namespace expertbayes
