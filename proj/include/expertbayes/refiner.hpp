#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expertbayes/dataset.hpp"
#include "expertbayes/error.hpp"
#include "expertbayes/network.hpp"
#include "expertbayes/random.hpp"

namespace expertbayes {

// What happens when a drawn candidate would form a cycle.
enum class RejectPolicy {
  Count,   // recorded as rejected; it still uses up one of the iterations
  Redraw,  // drawn again from the same stream (bounded by kMaxRedraws)
};

struct RefinementConfig {
  static constexpr std::size_t kMaxRedraws = 1000;

  std::size_t iterations = 100;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  double pseudocount = 1.0;
  std::string positive_state;
  RejectPolicy reject_policy = RejectPolicy::Count;
  // Keep expert-supplied tables of the original for nodes whose parents are
  // unchanged instead of learning them from the training split.
  bool keep_supplied_cpts = false;
  unsigned workers = 0;  // 0 = auto; never affects results

  void validate() const;
};

struct CandidateResult {
  CandidateEdit edit;
  std::optional<double> train_score;       // set when the edit was applied
  std::optional<ErrorCode> rejection;      // CycleWouldForm or EditInapplicable
};

struct RefinementRun {
  RefinementConfig config;
  Network original;  // with parameters learned from the training split
  double original_train_score = 0.0;
  double original_test_score = 0.0;
  std::vector<CandidateResult> candidates;
  Network best;
  double best_train_score = 0.0;
  double best_test_score = 0.0;
  std::optional<std::uint64_t> best_edit_index;  // absent when the original wins
};

struct RefineHooks {
  std::function<void(std::size_t scored, std::size_t total)> on_progress;
  const std::atomic<bool>* cancel = nullptr;  // set -> Error(Cancelled)
};

// Uniform unordered pair; an existing edge gives Remove or Reverse with equal
// odds, otherwise Add with a uniform direction. node_a < node_b.
CandidateEdit draw_candidate(Rng& rng, const NetworkStructure& structure,
                             std::uint64_t sequence_index = 0);

// The full candidate stream of one run, drawn sequentially from config.seed.
std::vector<CandidateEdit> draw_candidates(const NetworkStructure& structure,
                                           const RefinementConfig& config);

// Fraction of rows with a class label whose decision matches it. Throws
// Error(EmptyDataset) when no row has a class label.
double score_cci(const Network& network, const BoundData& data, double threshold,
                 std::size_t positive_state);
double score_cci(const Network& network, const Dataset& data, double threshold,
                 std::string_view positive_state);

// Learns the original's parameters on `train`, scores every candidate (each
// one edit away from the original) on `train`, keeps the best by strict
// improvement with ties going to the earliest candidate, and scores the
// winner once on `test`.
RefinementRun refine(const Network& original, const Dataset& train, const Dataset& test,
                     const RefinementConfig& config, const RefineHooks& hooks = {});

}  // namespace expertbayes
