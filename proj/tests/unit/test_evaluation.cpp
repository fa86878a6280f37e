#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "expertbayes/cpt_learning.hpp"
#include "expertbayes/error.hpp"
#include "expertbayes/evaluation.hpp"
#include "expertbayes/io.hpp"
#include "expertbayes/random.hpp"
#include "expertbayes/sampling.hpp"
#include "oracles.hpp"

using namespace expertbayes;
using doctest::Approx;

namespace {

const std::string kData = EB_DATA_DIR;

Dataset labelled(int pos, int neg) {
  std::string csv = "C,A\n";
  for (int i = 0; i < pos; ++i) csv += "pos,a" + std::to_string(i % 3) + "\n";
  for (int i = 0; i < neg; ++i) csv += "neg,a" + std::to_string(i % 3) + "\n";
  return io::load_dataset(csv, "C");
}

Dataset prostate() { return io::load_dataset_file(kData + "/prostate/prostate.csv", "status"); }

}  // namespace

TEST_CASE("stratified folds on ten rows") {
  const Dataset data = labelled(5, 5);
  const FoldPlan plan = make_folds(data, 5, 3);
  for (std::size_t f = 0; f < 5; ++f) {
    const auto rows = plan.test_rows(f);
    REQUIRE(rows.size() == 2);
    CHECK(data.cell(rows[0], 0) != data.cell(rows[1], 0));
  }
  CHECK(make_folds(data, 5, 3).assignment == plan.assignment);
  CHECK(make_folds(data, 5, 4).assignment != plan.assignment);
}

TEST_CASE("prostate-shaped folds") {
  const Dataset data = prostate();
  const FoldPlan plan = make_folds(data, 5, 1);
  const auto sizes = plan.fold_sizes();
  for (std::size_t s : sizes) CHECK((s == 99 || s == 100));
  for (std::size_t state = 0; state < 2; ++state) {
    std::vector<std::size_t> per(5, 0);
    for (std::size_t r = 0; r < data.row_count(); ++r) {
      if (data.cell(r, data.class_column()) == static_cast<int>(state)) ++per[plan.assignment[r]];
    }
    CHECK(*std::max_element(per.begin(), per.end()) - *std::min_element(per.begin(), per.end()) <= 1);
  }
  // Train and test partition the rows.
  for (std::size_t f = 0; f < 5; ++f) {
    auto all = plan.train_rows(f);
    const auto test = plan.test_rows(f);
    all.insert(all.end(), test.begin(), test.end());
    std::sort(all.begin(), all.end());
    CHECK(all.size() == data.row_count());
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  }
}

TEST_CASE("fold errors") {
  const Dataset data = labelled(3, 10);
  CHECK_THROWS_AS(make_folds(data, 1, 0), Error);
  try {
    make_folds(data, 5, 0);
    FAIL("expected TooFewRows");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewRows);
  }
  CHECK(make_folds(data, 5, 0, false).fold_sizes().size() == 5);
}

TEST_CASE("threshold grid") {
  const auto grid = default_threshold_grid();
  REQUIRE(grid.size() == 12);
  CHECK(grid[0] == 0.0);
  CHECK(grid[1] == 0.02);
  CHECK(grid[2] == 0.1);
  CHECK(grid[3] == Approx(0.2));
  CHECK(grid[11] == 1.0);
  CHECK(std::is_sorted(grid.begin(), grid.end()));
}

TEST_CASE("pr points") {
  const PrPoint p = make_pr_point(0.5, {3, 1, 2, 4});
  CHECK(*p.precision == Approx(0.75));
  CHECK(p.recall == Approx(0.6));
  const PrPoint none = make_pr_point(1.0, {0, 0, 5, 5});
  CHECK_FALSE(none.precision.has_value());
  CHECK(none.recall == 0.0);
}

TEST_CASE("a perfect classifier") {
  std::string csv = "C,A\n";
  for (int i = 0; i < 40; ++i) csv += i % 2 ? "pos,a0\n" : "neg,a1\n";
  const Dataset data = io::load_dataset(csv, "C");
  const NetworkStructure s({{"C", {"pos", "neg"}}, {"A", {"a0", "a1"}}}, {{0, 1}});
  std::vector<Cpt> cpts{Cpt(0, 2, {}, {}, {0.5, 0.5}, true), Cpt(1, 2, {0}, {2}, {1, 0, 0, 1}, true)};
  EvalConfig config;
  config.positive_state = "pos";
  config.keep_supplied_cpts = true;
  const LearnerResult r = cross_validate(LearnerSpec::original(Network(s, std::move(cpts), 0)), data,
                                         make_folds(data, 5, 0), config);
  CHECK(r.macro_cci == 1.0);
  for (const PrPoint& p : r.pr) {
    if (p.threshold < 1.0) {
      CHECK(*p.precision == 1.0);
      CHECK(p.recall == 1.0);
    }
  }
}

TEST_CASE("labelling every case positive gives the baseline precision") {
  // 37 positive of 100.
  std::string csv = "C\n";
  for (int i = 0; i < 100; ++i) csv += i < 37 ? "pos\n" : "neg\n";
  const Dataset data = io::load_dataset(csv, "C");
  CHECK(baseline_precision(data, "pos") == Approx(0.37));
  const NetworkStructure s({{"C", {"pos", "neg"}}}, {});
  const Network net = fit_parameters(Network::with_uniform_cpts(s, 0), data, 1.0);
  const std::vector<double> grid{0.0};
  const auto pr = pr_curve(net, data, "pos", grid);
  CHECK(*pr[0].precision == Approx(0.37));
  CHECK(pr[0].recall == 1.0);
}

TEST_CASE("cross-validation bookkeeping on prostate") {
  const Dataset data = prostate();
  const Network expert = io::load_network_file(kData + "/prostate/network.json");
  const FoldPlan plan = make_folds(data, 5, 1);
  EvalConfig config;
  config.positive_state = "survived";
  RefinementConfig rc;
  rc.iterations = 20;
  rc.seed = 1;
  const EvaluationReport report =
      evaluate({LearnerSpec::original(expert), LearnerSpec::expert_bayes(expert, rc),
                LearnerSpec::k2_learner(), LearnerSpec::tan_learner()},
               data, plan, config);
  REQUIRE(report.learners.size() == 4);
  CHECK(report.significance.size() == 6);
  CHECK(report.baseline_precision == Approx(144.0 / 496.0));
  for (const LearnerResult& l : report.learners) {
    REQUIRE(l.folds.size() == 5);
    double sum = 0.0;
    for (const FoldOutcome& f : l.folds) sum += f.cci;
    CHECK(l.macro_cci == Approx(sum / 5.0));
    CHECK(l.pr.size() == 12);
    for (std::size_t i = 1; i < l.pr.size(); ++i) CHECK(l.pr[i].recall <= l.pr[i - 1].recall);

    // Pooled counts at 0.5 agree with per-row correctness.
    const PrPoint& half = *std::find_if(l.pr.begin(), l.pr.end(), [](const PrPoint& p) { return p.threshold == 0.5; });
    const std::size_t correct = static_cast<std::size_t>(std::count(l.correct_by_row.begin(), l.correct_by_row.end(), 1));
    CHECK(half.counts.tp + half.counts.tn == correct);
    CHECK(half.counts.tp + half.counts.fp + half.counts.fn + half.counts.tn == data.row_count());

    // Each fold's CCI is recomputed from its model on its own test rows.
    for (const FoldOutcome& f : l.folds) {
      const auto rows = plan.test_rows(f.fold);
      CHECK(f.test_rows == rows.size());
      const auto& states = f.model.class_info().states;
      const auto positive = static_cast<std::size_t>(std::find(states.begin(), states.end(), "survived") - states.begin());
      CHECK(f.cci == Approx(oracle::brute_cci(f.model, data.subset(rows), 0.5, positive)).epsilon(1e-12));
    }
  }
  CHECK(report.learners[1].folds[0].refinement.has_value());
}

TEST_CASE("test rows never influence training") {
  const Dataset data = prostate();
  const Network expert = io::load_network_file(kData + "/prostate/network.json");
  const FoldPlan plan = make_folds(data, 5, 2);
  EvalConfig config;
  config.positive_state = "survived";
  RefinementConfig rc;
  rc.iterations = 15;
  rc.seed = 2;
  const LearnerSpec spec = LearnerSpec::expert_bayes(expert, rc);
  const LearnerResult before = cross_validate(spec, data, plan, config);

  // Flip every class label in fold 0's test rows.
  Dataset altered = data;
  for (std::size_t r : plan.test_rows(0)) {
    altered = altered.with_cell(r, data.class_column(), 1 - data.cell(r, data.class_column()));
  }
  const LearnerResult after = cross_validate(spec, altered, plan, config);
  CHECK(after.folds[0].model == before.folds[0].model);
  CHECK(after.folds[0].refinement->best_edit_index == before.folds[0].refinement->best_edit_index);
}

TEST_CASE("paired significance") {
  const std::vector<double> a{0.6, 0.62, 0.58, 0.61, 0.59};
  const std::vector<double> b{0.5, 0.52, 0.49, 0.51, 0.50};
  // Reference values from scipy.stats.ttest_rel.
  CHECK(paired_significance(a, b) == Approx(2.5321312228770012e-06).epsilon(1e-9));
  const std::vector<double> c{0.7, 0.75, 0.72, 0.71, 0.69};
  const std::vector<double> d{0.68, 0.74, 0.73, 0.66, 0.70};
  CHECK(paired_significance(c, d) == Approx(0.3418509619774567).epsilon(1e-9));

  CHECK(paired_significance(a, a) == 1.0);
  std::vector<double> shifted = b;
  for (double& x : shifted) x += 0.1;
  CHECK(paired_significance(shifted, b) == kSignificanceFloor);
  const std::vector<double> short_one{0.5};
  CHECK_THROWS_AS(paired_significance(a, short_one), Error);
}

TEST_CASE("mcnemar significance") {
  // Reference values from scipy.stats.chi2.sf on the corrected statistic.
  const auto pairs = [](int only_first, int only_second, int both) {
    std::vector<int> x, y;
    for (int i = 0; i < only_first; ++i) x.push_back(1), y.push_back(0);
    for (int i = 0; i < only_second; ++i) x.push_back(0), y.push_back(1);
    for (int i = 0; i < both; ++i) x.push_back(1), y.push_back(1);
    x.push_back(-1);
    y.push_back(0);
    return std::pair{x, y};
  };
  auto [x1, y1] = pairs(10, 3, 20);
  CHECK(mcnemar_significance(x1, y1) == Approx(0.0960923294556734).epsilon(1e-9));
  auto [x2, y2] = pairs(25, 12, 5);
  CHECK(mcnemar_significance(x2, y2) == Approx(0.04851973828025081).epsilon(1e-9));
  auto [x3, y3] = pairs(1, 0, 5);
  CHECK(mcnemar_significance(x3, y3) == Approx(1.0));
  auto [x4, y4] = pairs(0, 0, 5);
  CHECK(mcnemar_significance(x4, y4) == 1.0);
}

TEST_CASE("correlation screening") {
  // B duplicates the class; X is independent noise.
  Rng rng(51);
  std::string csv = "C,B,X\n";
  for (int i = 0; i < 50000; ++i) {
    const bool c = rng.unit() < 0.4;
    csv += std::string(c ? "p,b1," : "n,b0,") + (rng.unit() < 0.5 ? "x0" : "x1") + "\n";
  }
  const Dataset data = io::load_dataset(csv, "C");
  const auto warnings = screen_correlations(data, 0.9);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].first_name == "C");
  CHECK(warnings[0].second_name == "B");
  CHECK(warnings[0].nmi == Approx(1.0));
  CHECK(warnings[0].involves_class);
  const auto all = screen_correlations(data, 0.0);
  CHECK(all.size() == 3);
  for (const auto& w : all) {
    if (w.first_name == "X" || w.second_name == "X") CHECK(w.nmi < 0.01);
  }
}
