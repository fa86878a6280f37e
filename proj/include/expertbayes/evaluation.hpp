#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expertbayes/baselines.hpp"
#include "expertbayes/dataset.hpp"
#include "expertbayes/network.hpp"
#include "expertbayes/refiner.hpp"

namespace expertbayes {

struct FoldPlan {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  bool stratified = true;
  std::vector<std::size_t> assignment;  // row -> fold id

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

// Rows of each class (in class-state order, missing labels last) are
// shuffled and dealt round-robin, continuing from the fold where the previous
// class stopped, so fold sizes differ by at most one overall and per class.
// Throws Error(TooFewRows) when k < 2 or a stratum has fewer than k rows
// (or the whole dataset has fewer than k rows when unstratified).
FoldPlan make_folds(const Dataset& data, std::size_t k, std::uint64_t seed, bool stratified = true);

// 0.0, 0.02, 0.1, 0.2, 0.3, ..., 1.0 (12 thresholds).
std::vector<double> default_threshold_grid();

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct PrPoint {
  double threshold = 0.0;
  std::optional<double> precision;  // absent when nothing is predicted positive
  double recall = 0.0;
  Confusion counts;
};

PrPoint make_pr_point(double threshold, const Confusion& counts);

// PR points of one fitted network on labelled rows of `data`.
std::vector<PrPoint> pr_curve(const Network& network, const Dataset& data,
                              std::string_view positive_state, std::span<const double> thresholds);

struct LearnerSpec {
  enum class Kind { Original, ExpertBayes, K2, Tan };

  Kind kind = Kind::Original;
  std::string name;
  std::optional<Network> network;  // Original and ExpertBayes
  RefinementConfig refine;         // ExpertBayes (threshold/positive/pseudocount taken from EvalConfig)
  K2Config k2;
  TanConfig tan;

  static LearnerSpec original(Network network);
  static LearnerSpec expert_bayes(Network network, RefinementConfig config);
  static LearnerSpec k2_learner(K2Config config = {});
  static LearnerSpec tan_learner(TanConfig config = {});
};

const char* to_string(LearnerSpec::Kind kind) noexcept;

struct EvalConfig {
  std::string positive_state;
  double threshold = 0.5;  // CCI threshold
  double pseudocount = 1.0;
  std::vector<double> thresholds = default_threshold_grid();
  bool keep_supplied_cpts = false;
  unsigned workers = 0;
};

struct FoldOutcome {
  std::size_t fold = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  double cci = 0.0;
  Network model;
  std::optional<RefinementRun> refinement;  // ExpertBayes only
};

struct LearnerResult {
  std::string name;
  LearnerSpec::Kind kind = LearnerSpec::Kind::Original;
  std::vector<FoldOutcome> folds;
  double macro_cci = 0.0;
  std::vector<PrPoint> pr;  // confusion counts pooled over folds
  // Per dataset row: 1 correct, 0 wrong, -1 not scored (missing class).
  std::vector<int> correct_by_row;

  std::vector<double> fold_cci() const;
};

struct SignificanceResult {
  std::string first, second;
  double paired_t_p = 1.0;
  double mcnemar_p = 1.0;
};

struct EvaluationReport {
  FoldPlan plan;
  EvalConfig config;
  double baseline_precision = 0.0;
  std::vector<LearnerResult> learners;
  std::vector<SignificanceResult> significance;  // every learner pair, in input order
};

struct EvalHooks {
  std::function<void(std::size_t done, std::size_t total)> on_progress;  // per fold and learner
  const std::atomic<bool>* cancel = nullptr;
};

struct FittedLearner {
  Network model;
  std::optional<RefinementRun> refinement;  // ExpertBayes only
};

// Fits one learner on `train`. ExpertBayes also needs `test` for its report
// scores; it never influences the selected network.
FittedLearner fit_learner(const LearnerSpec& spec, const Dataset& train, const Dataset& test,
                          const EvalConfig& config, unsigned workers, const EvalHooks& hooks = {});

LearnerResult cross_validate(const LearnerSpec& spec, const Dataset& data, const FoldPlan& plan,
                             const EvalConfig& config, const EvalHooks& hooks = {});

EvaluationReport evaluate(const std::vector<LearnerSpec>& learners, const Dataset& data,
                          const FoldPlan& plan, const EvalConfig& config, const EvalHooks& hooks = {});

// Share of labelled rows in the positive class, i.e. the precision of
// labelling every case positive.
double baseline_precision(const Dataset& data, std::string_view positive_state);

// Two-tailed paired t-test over per-fold scores. All-zero differences give 1;
// zero variance with a nonzero mean gives kSignificanceFloor. Throws
// Error(LengthMismatch).
inline constexpr double kSignificanceFloor = 1e-12;
double paired_significance(std::span<const double> first, std::span<const double> second);

// McNemar's test with continuity correction on paired per-row correctness
// (entries < 0 skipped). No discordant pairs gives 1.
double mcnemar_significance(std::span<const int> first, std::span<const int> second);

struct CorrelationWarning {
  std::size_t first = 0, second = 0;  // column indices, first < second
  std::string first_name, second_name;
  double nmi = 0.0;
  bool involves_class = false;
};

// Pairs with I(X;Y) / min(H(X), H(Y)) above `warn_threshold`, strongest
// first. Pairs with a constant column score 0.
std::vector<CorrelationWarning> screen_correlations(const Dataset& data, double warn_threshold);

}  // namespace expertbayes
