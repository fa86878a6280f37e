#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "expertbayes/dataset.hpp"
#include "expertbayes/evaluation.hpp"
#include "expertbayes/network.hpp"
#include "expertbayes/refiner.hpp"

// End-to-end runs shared by the C API, the CLI and the HTTP service, so that
// every entry point writes the same report for the same inputs.
namespace expertbayes::workflow {

// A dataset together with the digest of the bytes it was parsed from.
struct Source {
  Dataset data;
  std::string digest;
};

struct RefineParams {
  RefinementConfig config;  // empty positive_state -> first class state
  std::optional<std::size_t> folds;  // cross-validate instead of train/test
  bool stratified = true;
};

struct EvalParams {
  std::vector<std::string> learners;  // original, expertbayes, k2, tan
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  bool stratified = true;
  double threshold = 0.5;
  double pseudocount = 1.0;
  std::string positive_state;
  std::size_t iterations = 100;
  RejectPolicy reject_policy = RejectPolicy::Count;
  std::size_t max_parents = 1;  // k2
  bool keep_supplied_cpts = false;
  unsigned workers = 0;
};

struct LearnParams {
  std::string algorithm;  // k2 | tan
  std::size_t max_parents = 1;
  double pseudocount = 1.0;
};

struct Outcome {
  nlohmann::json report;
  double macro_cci = 0.0;        // test CCI of the winner for a single split
  std::string pr_table;          // empty unless cross-validated
  std::string cci_table;         // learner<TAB>macro_cci rows, same condition
  std::optional<Network> network;  // learned network (learn runs)
};

struct Progress {
  std::function<void(std::size_t done, std::size_t total)> on_progress;
  const std::atomic<bool>* cancel = nullptr;
};

// Digest recorded for a network input: sha256 of its canonical document.
std::string network_digest(const Network& network);

// Resolves an empty positive state to the first class state; throws
// Error(InvalidArgument) for an unknown label.
std::string positive_or_default(const Dataset& data, const std::string& positive);

// Train/test refinement, or cross-validation of the ExpertBayes learner when
// params.folds is set (test is then ignored and may be absent).
Outcome run_refine(const Network& network, const Source& train, const std::optional<Source>& test,
                   const RefineParams& params, const Progress& progress = {});

// Throws Error(InvalidArgument) for unknown learners or when original or
// expertbayes is requested without a network.
Outcome run_evaluate(const std::optional<Network>& network, const Source& data,
                     const EvalParams& params, const Progress& progress = {});

Outcome run_learn(const Source& data, const LearnParams& params);

// {"threshold": t, "warnings": [{first, second, nmi, involves_class}, ...]}
nlohmann::json screen_report(const Dataset& data, double threshold);

}  // namespace expertbayes::workflow
