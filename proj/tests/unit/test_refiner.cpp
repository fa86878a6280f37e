#include <doctest.h>

#include <atomic>
#include <map>

#include "expertbayes/cpt_learning.hpp"
#include "expertbayes/error.hpp"
#include "expertbayes/io.hpp"
#include "expertbayes/refiner.hpp"
#include "expertbayes/sampling.hpp"
#include "oracles.hpp"

using namespace expertbayes;
using doctest::Approx;

namespace {

const std::string kData = EB_DATA_DIR;

std::vector<Variable> binary_vars(std::initializer_list<const char*> names) {
  std::vector<Variable> out;
  for (const char* n : names) out.push_back({n, {"0", "1"}});
  return out;
}

struct Synthetic3 {
  Network network = io::load_network_file(kData + "/synthetic3/network.json");
  Dataset train = io::load_dataset_file(kData + "/synthetic3/train.csv", "C");
  Dataset test = io::load_dataset_file(kData + "/synthetic3/test.csv", "C");
};

}  // namespace

TEST_CASE("draw_candidate picks the operator from the pair's state") {
  Rng rng(1);
  const NetworkStructure linked(binary_vars({"A", "B"}), {{0, 1}});
  const NetworkStructure empty(binary_vars({"A", "B"}), {});
  std::map<EditKind, int> seen;
  for (int i = 0; i < 200; ++i) {
    const CandidateEdit e = draw_candidate(rng, linked);
    CHECK(e.kind != EditKind::Add);
    CHECK_FALSE(e.direction.has_value());
    ++seen[e.kind];
    const CandidateEdit f = draw_candidate(rng, empty);
    CHECK(f.kind == EditKind::Add);
    CHECK(f.direction.has_value());
    CHECK(f.node_a < f.node_b);
  }
  CHECK(seen[EditKind::Remove] > 60);
  CHECK(seen[EditKind::Reverse] > 60);
}

TEST_CASE("pairs are drawn uniformly") {
  Rng rng(42);
  const NetworkStructure s(binary_vars({"A", "B", "C", "D", "E"}), {});
  std::map<std::pair<std::size_t, std::size_t>, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const CandidateEdit e = draw_candidate(rng, s);
    ++counts[{e.node_a, e.node_b}];
  }
  REQUIRE(counts.size() == 10);
  double chi2 = 0.0;
  for (const auto& [pair, n] : counts) {
    CHECK(static_cast<double>(n) / draws == Approx(0.1).epsilon(0.1));
    chi2 += (n - 1000.0) * (n - 1000.0) / 1000.0;
  }
  // 99.9% quantile of chi-squared with 9 degrees of freedom.
  CHECK(chi2 < 27.88);
}

TEST_CASE("candidate streams depend only on the seed") {
  const NetworkStructure s(binary_vars({"A", "B", "C", "D"}), {{0, 1}});
  RefinementConfig config;
  config.iterations = 50;
  config.seed = 9;
  const auto a = draw_candidates(s, config);
  const auto b = draw_candidates(s, config);
  CHECK(a == b);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].sequence_index == i);
  config.seed = 10;
  CHECK(draw_candidates(s, config) != a);
}

TEST_CASE("score_cci") {
  // Class only, P(pos) > 0.5 from 55/45 data: every case is labelled pos.
  std::string csv = "C\n";
  for (int i = 0; i < 55; ++i) csv += "pos\n";
  for (int i = 0; i < 45; ++i) csv += "neg\n";
  const Dataset data = io::load_dataset(csv, "C");
  const NetworkStructure s({{"C", {"pos", "neg"}}}, {});
  const Network net = fit_parameters(Network::with_uniform_cpts(s, 0), data, 1.0);
  CHECK(score_cci(net, data, 0.5, "pos") == Approx(0.55));

  // Deterministic feature: every posterior is 1 on the true class.
  const Dataset exact = io::load_dataset("C,A\npos,a0\nneg,a1\npos,a0\n", "C");
  const NetworkStructure ca({{"C", {"pos", "neg"}}, {"A", {"a0", "a1"}}}, {{0, 1}});
  std::vector<Cpt> cpts{Cpt(0, 2, {}, {}, {0.5, 0.5}, true), Cpt(1, 2, {0}, {2}, {1, 0, 0, 1}, true)};
  CHECK(score_cci(Network(ca, std::move(cpts), 0), exact, 0.5, "pos") == 1.0);

  const Dataset unlabelled = io::load_dataset("C,A\n?,a0\npos,a0\nneg,a1\n", "C").subset(std::vector<std::size_t>{0});
  CHECK_THROWS_AS(score_cci(net, unlabelled, 0.5, "pos"), Error);
}

TEST_CASE("synthetic fixture: refine finds the A-C link and matches exhaustive scoring") {
  const Synthetic3 f;
  RefinementConfig config;
  config.iterations = 200;
  config.seed = 7;
  config.positive_state = "pos";
  const RefinementRun run = refine(f.network, f.train, f.test, config);
  const auto a = *f.network.structure().index_of("A");
  const auto c = *f.network.structure().index_of("C");
  CHECK(run.best.structure().adjacent(a, c));
  CHECK(run.best_train_score > run.original_train_score);

  const auto exhaustive = oracle::exhaustive_single_edit(f.network, f.train, 0.5, 0, 1.0);
  CHECK(exhaustive.scored.size() == 6);
  CHECK(run.original_train_score == Approx(exhaustive.original_score).epsilon(1e-12));
  CHECK(run.best_train_score == Approx(exhaustive.best_score).epsilon(1e-12));

  // Every scored candidate agrees with the oracle's score for the same edit.
  for (const CandidateResult& r : run.candidates) {
    REQUIRE(r.train_score.has_value());
    bool found = false;
    for (const auto& [edit, score] : exhaustive.scored) {
      if (edit.kind == r.edit.kind && edit.node_a == r.edit.node_a && edit.node_b == r.edit.node_b &&
          edit.direction == r.edit.direction) {
        CHECK(*r.train_score == Approx(score).epsilon(1e-12));
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("same seed gives identical runs for any worker count") {
  const Synthetic3 f;
  RefinementConfig config;
  config.iterations = 60;
  config.seed = 3;
  config.positive_state = "pos";
  config.workers = 1;
  const RefinementRun one = refine(f.network, f.train, f.test, config);
  config.workers = 4;
  const RefinementRun four = refine(f.network, f.train, f.test, config);
  CHECK(one.best == four.best);
  CHECK(one.best_edit_index == four.best_edit_index);
  CHECK(one.best_train_score == four.best_train_score);
  CHECK(one.best_test_score == four.best_test_score);
  REQUIRE(one.candidates.size() == four.candidates.size());
  for (std::size_t i = 0; i < one.candidates.size(); ++i) {
    CHECK(one.candidates[i].edit == four.candidates[i].edit);
    CHECK(one.candidates[i].train_score == four.candidates[i].train_score);
  }
}

TEST_CASE("the original is kept when no candidate improves on it") {
  // C -> A is the generating structure and A is perfectly predictive, so
  // the fitted original already scores 1.0 on train.
  std::string csv = "C,A,B\n";
  for (int i = 0; i < 20; ++i) csv += i % 2 ? "pos,a0,b0\n" : "neg,a1,b1\n";
  const Dataset data = io::load_dataset(csv, "C");
  const NetworkStructure s({{"C", {"pos", "neg"}}, {"A", {"a0", "a1"}}, {"B", {"b0", "b1"}}}, {{0, 1}});
  RefinementConfig config;
  config.iterations = 30;
  config.seed = 5;
  config.positive_state = "pos";
  const RefinementRun run = refine(Network::with_uniform_cpts(s, 0), data, data, config);
  CHECK(run.original_train_score == 1.0);
  CHECK_FALSE(run.best_edit_index.has_value());
  CHECK(run.best == run.original);
}

TEST_CASE("ties go to the earliest candidate") {
  const Synthetic3 f;
  RefinementConfig config;
  config.iterations = 100;
  config.seed = 7;
  config.positive_state = "pos";
  const RefinementRun run = refine(f.network, f.train, f.test, config);
  REQUIRE(run.best_edit_index.has_value());
  for (const CandidateResult& r : run.candidates) {
    if (!r.train_score) continue;
    CHECK(*r.train_score <= run.best_train_score);
    if (r.edit.sequence_index < *run.best_edit_index) CHECK(*r.train_score < run.best_train_score);
  }
}

TEST_CASE("cycle-forming candidates are counted or redrawn") {
  // A -> B -> C: Add(A, C) with C -> A closes a cycle.
  std::string csv = "A,B,C\n";
  Rng rng(4);
  for (int i = 0; i < 40; ++i) {
    csv += std::string(rng.below(2) ? "0" : "1") + "," + (rng.below(2) ? "0" : "1") + "," +
           (i % 2 ? "0" : "1") + "\n";
  }
  const Dataset data = io::load_dataset(csv, "C");
  const NetworkStructure s(binary_vars({"A", "B", "C"}), {{0, 1}, {1, 2}});
  const Network net = Network::with_uniform_cpts(s, 2);
  RefinementConfig config;
  config.iterations = 200;
  config.seed = 8;
  config.positive_state = "1";
  const RefinementRun counted = refine(net, data, data, config);
  CHECK(counted.candidates.size() == 200);
  std::size_t rejected = 0;
  for (const CandidateResult& r : counted.candidates) {
    if (r.rejection) {
      CHECK(*r.rejection == ErrorCode::CycleWouldForm);
      CHECK_FALSE(r.train_score.has_value());
      ++rejected;
    }
  }
  CHECK(rejected > 0);

  config.reject_policy = RejectPolicy::Redraw;
  const RefinementRun redrawn = refine(net, data, data, config);
  std::size_t scored = 0;
  for (const CandidateResult& r : redrawn.candidates) scored += r.train_score.has_value();
  CHECK(scored == 200);
}

TEST_CASE("progress and cancellation") {
  const Synthetic3 f;
  RefinementConfig config;
  config.iterations = 40;
  config.seed = 1;
  config.positive_state = "pos";
  std::size_t last = 0, total = 0;
  RefineHooks hooks;
  hooks.on_progress = [&](std::size_t done, std::size_t all) {
    last = std::max(last, done);
    total = all;
  };
  refine(f.network, f.train, f.test, config, hooks);
  CHECK(total == 40);
  CHECK(last == 40);

  std::atomic<bool> cancel{true};
  RefineHooks stop;
  stop.cancel = &cancel;
  try {
    refine(f.network, f.train, f.test, config, stop);
    FAIL("expected Cancelled");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Cancelled);
  }
}

TEST_CASE("config validation") {
  const Synthetic3 f;
  RefinementConfig config;
  config.positive_state = "nope";
  CHECK_THROWS_AS(refine(f.network, f.train, f.test, config), Error);
  config.positive_state = "pos";
  config.threshold = 1.5;
  CHECK_THROWS_AS(refine(f.network, f.train, f.test, config), Error);
}

TEST_CASE("supplied tables are kept on request") {
  const Synthetic3 f;
  std::vector<Cpt> cpts = f.network.cpts();
  cpts[0] = Cpt(0, 2, {}, {}, {0.95, 0.05}, true);
  const Network supplied = f.network.with_cpts(cpts);
  RefinementConfig config;
  config.iterations = 10;
  config.positive_state = "pos";
  config.keep_supplied_cpts = true;
  const RefinementRun kept = refine(supplied, f.train, f.test, config);
  CHECK(kept.original.cpt(0).probability(0, 0) == 0.95);
  config.keep_supplied_cpts = false;
  const RefinementRun learned = refine(supplied, f.train, f.test, config);
  CHECK(learned.original.cpt(0).probability(0, 0) != 0.95);
}
