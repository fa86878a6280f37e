#include "expertbayes/refiner.hpp"

#include <atomic>
#include <cmath>

#include "expertbayes/cpt_learning.hpp"
#include "expertbayes/inference.hpp"
#include "expertbayes/parallel.hpp"

namespace expertbayes {

void RefinementConfig::validate() const {
  if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "iterations must be >= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in [0, 1]");
  }
  if (!(pseudocount >= 0.0)) throw Error(ErrorCode::InvalidArgument, "pseudocount must be >= 0");
  if (positive_state.empty()) throw Error(ErrorCode::InvalidArgument, "positive state is required");
}

CandidateEdit draw_candidate(Rng& rng, const NetworkStructure& structure,
                             std::uint64_t sequence_index) {
  const std::uint64_t n = structure.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "need at least two nodes to draw a pair");
  // Pairs (a, b), a < b, enumerated row by row.
  std::uint64_t k = rng.below(n * (n - 1) / 2);
  std::uint64_t a = 0;
  while (k >= n - 1 - a) {
    k -= n - 1 - a;
    ++a;
  }
  const std::uint64_t b = a + 1 + k;

  CandidateEdit edit;
  edit.node_a = static_cast<std::size_t>(a);
  edit.node_b = static_cast<std::size_t>(b);
  edit.sequence_index = sequence_index;
  if (structure.adjacent(edit.node_a, edit.node_b)) {
    edit.kind = rng.below(2) == 0 ? EditKind::Remove : EditKind::Reverse;
  } else {
    edit.kind = EditKind::Add;
    edit.direction = rng.below(2) == 0 ? Direction::AtoB : Direction::BtoA;
  }
  return edit;
}

std::vector<CandidateEdit> draw_candidates(const NetworkStructure& structure,
                                           const RefinementConfig& config) {
  Rng rng(config.seed);
  std::vector<CandidateEdit> stream;
  stream.reserve(config.iterations);
  for (std::size_t i = 0; i < config.iterations; ++i) {
    CandidateEdit edit = draw_candidate(rng, structure, i);
    if (config.reject_policy == RejectPolicy::Redraw) {
      for (std::size_t attempt = 0; attempt < RefinementConfig::kMaxRedraws; ++attempt) {
        if (!detect_cycle(structure.size(), edited_edges(structure, edit))) break;
        edit = draw_candidate(rng, structure, i);
      }
    }
    stream.push_back(edit);
  }
  return stream;
}

namespace {

struct Tally {
  std::size_t correct = 0;
  std::size_t total = 0;
};

Tally tally(const Network& network, const BoundData& data, double threshold,
            std::size_t positive) {
  const std::size_t c = network.class_variable();
  Tally t;
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    const auto row = data.row(r);
    if (row[c] == kMissing) continue;
    const auto post = class_posterior(network, row);
    const std::size_t decided = decide(post, threshold, positive);
    ++t.total;
    if (decided == static_cast<std::size_t>(row[c])) ++t.correct;
  }
  return t;
}

std::size_t positive_index(const Network& network, std::string_view positive_state) {
  const auto idx = network.class_info().state_index(positive_state);
  if (!idx) {
    throw Error(ErrorCode::InvalidArgument, "'" + std::string(positive_state) +
                                                "' is not a state of class '" +
                                                network.class_info().name + "'");
  }
  return *idx;
}

Network fit_original(const Network& original, const BoundData& train, const RefinementConfig& config) {
  return config.keep_supplied_cpts ? fill_unestimated(original, train, config.pseudocount)
                                   : fit_parameters(original, train, config.pseudocount);
}

Network candidate_network(const Network& fitted, const CandidateEdit& edit, const BoundData& train,
                          double pseudocount) {
  Network next = apply_edit(fitted, edit);
  const auto changed = nodes_changed_by(fitted.structure(), edit);
  return rebuild_affected(next, train, changed, pseudocount);
}

}  // namespace

double score_cci(const Network& network, const BoundData& data, double threshold,
                 std::size_t positive_state) {
  const Tally t = tally(network, data, threshold, positive_state);
  if (t.total == 0) throw Error(ErrorCode::EmptyDataset, "no rows carry a class label");
  return static_cast<double>(t.correct) / static_cast<double>(t.total);
}

double score_cci(const Network& network, const Dataset& data, double threshold,
                 std::string_view positive_state) {
  return score_cci(network, BoundData(network.structure(), data), threshold,
                   positive_index(network, positive_state));
}

RefinementRun refine(const Network& original, const Dataset& train, const Dataset& test,
                     const RefinementConfig& config, const RefineHooks& hooks) {
  config.validate();
  const std::size_t positive = positive_index(original, config.positive_state);
  const BoundData train_data(original.structure(), train);
  const BoundData test_data(original.structure(), test);

  const Network fitted = fit_original(original, train_data, config);
  const double original_train = score_cci(fitted, train_data, config.threshold, positive);

  const std::vector<CandidateEdit> stream = draw_candidates(fitted.structure(), config);
  std::vector<CandidateResult> results(stream.size());
  std::atomic<std::size_t> scored{0};
  parallel_for(stream.size(), resolve_workers(config.workers), [&](std::size_t i) {
    if (hooks.cancel && hooks.cancel->load()) throw Error(ErrorCode::Cancelled, "refinement cancelled");
    CandidateResult& out = results[i];
    out.edit = stream[i];
    try {
      const Network next = candidate_network(fitted, stream[i], train_data, config.pseudocount);
      out.train_score = score_cci(next, train_data, config.threshold, positive);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CycleWouldForm && e.code() != ErrorCode::EditInapplicable) throw;
      out.rejection = e.code();
    }
    const std::size_t done = ++scored;
    if (hooks.on_progress) hooks.on_progress(done, stream.size());
  });

  RefinementRun run{config, fitted, original_train, 0.0, std::move(results), fitted,
                    original_train, 0.0, std::nullopt};
  for (const CandidateResult& r : run.candidates) {
    if (r.train_score && *r.train_score > run.best_train_score) {
      run.best_train_score = *r.train_score;
      run.best_edit_index = r.edit.sequence_index;
    }
  }
  if (run.best_edit_index) {
    run.best = candidate_network(fitted, run.candidates[*run.best_edit_index].edit, train_data,
                                 config.pseudocount);
  }
  run.original_test_score = score_cci(fitted, test_data, config.threshold, positive);
  run.best_test_score = score_cci(run.best, test_data, config.threshold, positive);
  return run;
}

}  // namespace expertbayes
