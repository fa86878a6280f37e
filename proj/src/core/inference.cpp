#include "expertbayes/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "expertbayes/error.hpp"

namespace expertbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_of(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

double log_sum_exp(std::span<const double> xs) {
  double peak = kNegInf;
  for (double x : xs) peak = std::max(peak, x);
  if (peak == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - peak);
  return peak + std::log(sum);
}

std::vector<double> normalize_logs(std::span<const double> logs) {
  const double total = log_sum_exp(logs);
  std::vector<double> out(logs.size());
  if (total == kNegInf) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(logs.size()));
    return out;
  }
  for (std::size_t i = 0; i < logs.size(); ++i) out[i] = std::exp(logs[i] - total);
  return out;
}

void check_ready(const Network& network, std::span<const int> evidence) {
  if (evidence.size() != network.structure().size()) {
    throw Error(ErrorCode::InvalidArgument, "evidence width does not match the network");
  }
  for (std::size_t v = 0; v < network.cpts().size(); ++v) {
    if (!network.cpt(v).estimated()) {
      throw Error(ErrorCode::UnestimatedCpt,
                  "CPT of '" + network.structure().variable(v).name + "' is not estimated");
    }
  }
}

// Log-space factor; values enumerate the scope row-major, last variable fastest.
struct Factor {
  std::vector<std::size_t> scope;  // ascending variable indices
  std::vector<std::size_t> cards;
  std::vector<double> logs;
};

// Advances `digits` as an odometer over `cards` (last digit fastest).
bool next_assignment(std::vector<std::size_t>& digits, std::span<const std::size_t> cards) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < cards[i]) return true;
    digits[i] = 0;
  }
  return false;
}

Factor cpt_factor(const Network& network, std::size_t node, std::vector<int>& assignment) {
  const NetworkStructure& s = network.structure();
  const Cpt& cpt = network.cpt(node);
  std::vector<std::size_t> family = s.parents(node);
  family.push_back(node);
  std::sort(family.begin(), family.end());

  Factor f;
  for (std::size_t v : family) {
    if (assignment[v] == kMissing) {
      f.scope.push_back(v);
      f.cards.push_back(s.variable(v).cardinality());
    }
  }
  std::vector<std::size_t> digits(f.scope.size(), 0);
  do {
    for (std::size_t i = 0; i < f.scope.size(); ++i) {
      assignment[f.scope[i]] = static_cast<int>(digits[i]);
    }
    f.logs.push_back(log_of(cpt.probability(cpt.config_index(assignment),
                                            static_cast<std::size_t>(assignment[node]))));
  } while (next_assignment(digits, f.cards));
  for (std::size_t v : f.scope) assignment[v] = kMissing;
  return f;
}

// Product of `factors`, then `target` summed out.
Factor multiply_and_marginalize(const std::vector<const Factor*>& factors, std::size_t target,
                                const NetworkStructure& s) {
  std::vector<std::size_t> scope;
  for (const Factor* f : factors) scope.insert(scope.end(), f->scope.begin(), f->scope.end());
  std::sort(scope.begin(), scope.end());
  scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
  std::vector<std::size_t> cards;
  for (std::size_t v : scope) cards.push_back(s.variable(v).cardinality());

  // For each input factor, position of each of its variables within `scope`.
  std::vector<std::vector<std::size_t>> where(factors.size());
  for (std::size_t k = 0; k < factors.size(); ++k) {
    for (std::size_t v : factors[k]->scope) {
      where[k].push_back(static_cast<std::size_t>(
          std::lower_bound(scope.begin(), scope.end(), v) - scope.begin()));
    }
  }
  const std::size_t target_pos = static_cast<std::size_t>(
      std::lower_bound(scope.begin(), scope.end(), target) - scope.begin());

  Factor out;
  for (std::size_t i = 0; i < scope.size(); ++i) {
    if (i != target_pos) {
      out.scope.push_back(scope[i]);
      out.cards.push_back(cards[i]);
    }
  }
  std::size_t out_size = 1;
  for (std::size_t c : out.cards) out_size *= c;
  const std::size_t target_card = cards[target_pos];
  std::vector<double> buckets(out_size * target_card, kNegInf);

  std::vector<std::size_t> digits(scope.size(), 0);
  do {
    double total = 0.0;
    for (std::size_t k = 0; k < factors.size(); ++k) {
      std::size_t idx = 0;
      for (std::size_t j = 0; j < where[k].size(); ++j) {
        idx = idx * factors[k]->cards[j] + digits[where[k][j]];
      }
      total += factors[k]->logs[idx];
    }
    std::size_t out_idx = 0;
    for (std::size_t i = 0; i < scope.size(); ++i) {
      if (i != target_pos) out_idx = out_idx * cards[i] + digits[i];
    }
    buckets[out_idx * target_card + digits[target_pos]] = total;
  } while (next_assignment(digits, cards));

  out.logs.resize(out_size);
  for (std::size_t i = 0; i < out_size; ++i) {
    out.logs[i] = log_sum_exp(std::span<const double>(buckets).subspan(i * target_card, target_card));
  }
  return out;
}

}  // namespace

double Posterior::probability_of(std::string_view state) const {
  for (std::size_t i = 0; i < class_states.size(); ++i) {
    if (class_states[i] == state) return probabilities[i];
  }
  throw Error(ErrorCode::InvalidArgument, "unknown class state '" + std::string(state) + "'");
}

std::vector<int> make_evidence(const Network& network, const EvidenceRow& evidence) {
  const NetworkStructure& s = network.structure();
  std::vector<int> out(s.size(), kMissing);
  for (const auto& [name, label] : evidence) {
    const auto v = s.index_of(name);
    if (!v) throw Error(ErrorCode::InvalidEvidenceLabel, "unknown variable '" + name + "'");
    if (*v == network.class_variable()) {
      throw Error(ErrorCode::InvalidEvidenceLabel, "class variable '" + name + "' given as evidence");
    }
    const auto state = s.variable(*v).state_index(label);
    if (!state) {
      throw Error(ErrorCode::InvalidEvidenceLabel,
                  "label '" + label + "' is not a state of '" + name + "'");
    }
    out[*v] = static_cast<int>(*state);
  }
  return out;
}

std::vector<double> posterior_by_blanket(const Network& network, std::span<const int> evidence) {
  check_ready(network, evidence);
  const NetworkStructure& s = network.structure();
  const std::size_t c = network.class_variable();
  for (std::size_t v : markov_blanket(s, c)) {
    if (evidence[v] == kMissing) {
      throw Error(ErrorCode::InvalidArgument, "Markov blanket of the class is not fully observed");
    }
  }
  std::vector<int> assignment(evidence.begin(), evidence.end());
  const std::size_t card = s.variable(c).cardinality();
  std::vector<double> logs(card);
  for (std::size_t state = 0; state < card; ++state) {
    assignment[c] = static_cast<int>(state);
    const Cpt& own = network.cpt(c);
    double total = log_of(own.probability(own.config_index(assignment), state));
    for (std::size_t k : s.children(c)) {
      const Cpt& t = network.cpt(k);
      total += log_of(t.probability(t.config_index(assignment), static_cast<std::size_t>(assignment[k])));
    }
    logs[state] = total;
  }
  return normalize_logs(logs);
}

std::vector<double> posterior_by_elimination(const Network& network, std::span<const int> evidence) {
  check_ready(network, evidence);
  const NetworkStructure& s = network.structure();
  const std::size_t n = s.size();
  const std::size_t c = network.class_variable();

  std::vector<int> assignment(evidence.begin(), evidence.end());
  assignment[c] = kMissing;

  // Ancestral closure of the class and observed nodes; other nodes are barren.
  std::vector<bool> relevant(n, false);
  std::vector<std::size_t> stack{c};
  for (std::size_t v = 0; v < n; ++v) {
    if (assignment[v] != kMissing) stack.push_back(v);
  }
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (relevant[v]) continue;
    relevant[v] = true;
    for (std::size_t p : s.parents(v)) stack.push_back(p);
  }
  // Connected component of the class within the relevant subgraph.
  std::vector<bool> in_component(n, false);
  stack.assign(1, c);
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (in_component[v]) continue;
    in_component[v] = true;
    for (std::size_t p : s.parents(v)) {
      if (relevant[p]) stack.push_back(p);
    }
    for (std::size_t ch : s.children(v)) {
      if (relevant[ch]) stack.push_back(ch);
    }
  }

  std::vector<Factor> factors;
  for (std::size_t v = 0; v < n; ++v) {
    if (in_component[v]) factors.push_back(cpt_factor(network, v, assignment));
  }

  for (std::size_t v : topological_order(s)) {
    if (!in_component[v] || v == c || assignment[v] != kMissing) continue;
    std::vector<const Factor*> touching;
    std::vector<Factor> rest;
    for (const Factor& f : factors) {
      if (std::binary_search(f.scope.begin(), f.scope.end(), v)) touching.push_back(&f);
    }
    Factor merged = multiply_and_marginalize(touching, v, s);
    for (Factor& f : factors) {
      if (!std::binary_search(f.scope.begin(), f.scope.end(), v)) rest.push_back(std::move(f));
    }
    rest.push_back(std::move(merged));
    factors = std::move(rest);
  }

  const std::size_t card = s.variable(c).cardinality();
  std::vector<double> logs(card, 0.0);
  for (const Factor& f : factors) {
    if (f.scope.empty()) continue;  // constant
    // Only the class can remain.
    for (std::size_t state = 0; state < card; ++state) logs[state] += f.logs[state];
  }
  return normalize_logs(logs);
}

std::vector<double> class_posterior(const Network& network, std::span<const int> evidence) {
  check_ready(network, evidence);
  const auto blanket = markov_blanket(network.structure(), network.class_variable());
  const bool complete = std::all_of(blanket.begin(), blanket.end(),
                                    [&](std::size_t v) { return evidence[v] != kMissing; });
  return complete ? posterior_by_blanket(network, evidence)
                  : posterior_by_elimination(network, evidence);
}

Posterior class_posterior(const Network& network, const EvidenceRow& evidence) {
  const auto e = make_evidence(network, evidence);
  return Posterior{network.class_info().states, class_posterior(network, e)};
}

std::size_t decide(std::span<const double> probabilities, double threshold, std::size_t positive,
                   MultiClassRule rule) {
  if (positive >= probabilities.size()) {
    throw Error(ErrorCode::InvalidArgument, "positive state out of range");
  }
  if (probabilities.size() > 2 && rule == MultiClassRule::Reject) {
    throw Error(ErrorCode::NonBinaryClass, "class has more than two states and no decision rule");
  }
  if (probabilities[positive] > threshold) return positive;
  std::size_t best = positive == 0 ? 1 : 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (i != positive && probabilities[i] > probabilities[best]) best = i;
  }
  return best;
}

std::string classify(const Network& network, const EvidenceRow& evidence, double threshold,
                     std::string_view positive_state, MultiClassRule rule) {
  const auto positive = network.class_info().state_index(positive_state);
  if (!positive) {
    throw Error(ErrorCode::InvalidArgument,
                "'" + std::string(positive_state) + "' is not a class state");
  }
  const Posterior post = class_posterior(network, evidence);
  return post.class_states[decide(post.probabilities, threshold, *positive, rule)];
}

}  // namespace expertbayes
