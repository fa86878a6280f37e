#include "expertbayes/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "expertbayes/cpt_learning.hpp"
#include "expertbayes/inference.hpp"
#include "expertbayes/parallel.hpp"
#include "expertbayes/random.hpp"

namespace expertbayes {

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    if (assignment[r] == fold) rows.push_back(r);
  }
  return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    if (assignment[r] != fold) rows.push_back(r);
  }
  return rows;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t f : assignment) ++sizes[f];
  return sizes;
}

FoldPlan make_folds(const Dataset& data, std::size_t k, std::uint64_t seed, bool stratified) {
  if (k < 2) throw Error(ErrorCode::TooFewRows, "cross-validation needs k >= 2");
  const std::size_t cls = data.class_column();
  std::vector<std::vector<std::size_t>> strata;
  if (stratified) {
    const std::size_t states = data.class_info().states.size();
    strata.assign(states + 1, {});
    for (std::size_t r = 0; r < data.row_count(); ++r) {
      const int c = data.cell(r, cls);
      strata[c == kMissing ? states : static_cast<std::size_t>(c)].push_back(r);
    }
    for (std::size_t s = 0; s < states; ++s) {
      if (strata[s].size() < k) {
        throw Error(ErrorCode::TooFewRows, "class '" + data.class_info().states[s] + "' has " +
                                               std::to_string(strata[s].size()) +
                                               " rows, fewer than k = " + std::to_string(k));
      }
    }
  } else {
    if (data.row_count() < k) {
      throw Error(ErrorCode::TooFewRows, "dataset has fewer rows than folds");
    }
    strata.emplace_back(data.row_count());
    std::iota(strata[0].begin(), strata[0].end(), std::size_t{0});
  }

  FoldPlan plan{k, seed, stratified, std::vector<std::size_t>(data.row_count(), 0)};
  Rng rng(seed);
  std::size_t next = 0;
  for (auto& stratum : strata) {
    rng.shuffle(std::span<std::size_t>(stratum));
    for (std::size_t r : stratum) {
      plan.assignment[r] = next;
      next = (next + 1) % k;
    }
  }
  return plan;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid{0.0, 0.02, 0.1};
  for (int tenth = 2; tenth <= 10; ++tenth) grid.push_back(tenth / 10.0);
  return grid;
}

PrPoint make_pr_point(double threshold, const Confusion& counts) {
  PrPoint p;
  p.threshold = threshold;
  p.counts = counts;
  if (counts.tp + counts.fp > 0) {
    p.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
  }
  if (counts.tp + counts.fn > 0) {
    p.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
  }
  return p;
}

std::vector<PrPoint> pr_curve(const Network& network, const Dataset& data,
                              std::string_view positive_state, std::span<const double> thresholds) {
  const auto positive = network.class_info().state_index(positive_state);
  if (!positive) {
    throw Error(ErrorCode::InvalidArgument, "'" + std::string(positive_state) + "' is not a class state");
  }
  const BoundData bound(network.structure(), data);
  const std::size_t cls = network.class_variable();
  std::vector<Confusion> counts(thresholds.size());
  for (std::size_t r = 0; r < bound.row_count(); ++r) {
    const auto row = bound.row(r);
    if (row[cls] == kMissing) continue;
    const double p = class_posterior(network, row)[*positive];
    const bool is_positive = static_cast<std::size_t>(row[cls]) == *positive;
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      const bool predicted = p > thresholds[t];
      if (predicted && is_positive) ++counts[t].tp;
      else if (predicted) ++counts[t].fp;
      else if (is_positive) ++counts[t].fn;
      else ++counts[t].tn;
    }
  }
  std::vector<PrPoint> out;
  for (std::size_t t = 0; t < thresholds.size(); ++t) out.push_back(make_pr_point(thresholds[t], counts[t]));
  return out;
}

LearnerSpec LearnerSpec::original(Network network) {
  LearnerSpec s;
  s.kind = Kind::Original;
  s.name = "original";
  s.network = std::move(network);
  return s;
}

LearnerSpec LearnerSpec::expert_bayes(Network network, RefinementConfig config) {
  LearnerSpec s;
  s.kind = Kind::ExpertBayes;
  s.name = "expertbayes";
  s.network = std::move(network);
  s.refine = std::move(config);
  return s;
}

LearnerSpec LearnerSpec::k2_learner(K2Config config) {
  LearnerSpec s;
  s.kind = Kind::K2;
  s.name = "k2";
  s.k2 = std::move(config);
  return s;
}

LearnerSpec LearnerSpec::tan_learner(TanConfig config) {
  LearnerSpec s;
  s.kind = Kind::Tan;
  s.name = "tan";
  s.tan = config;
  return s;
}

const char* to_string(LearnerSpec::Kind kind) noexcept {
  switch (kind) {
    case LearnerSpec::Kind::Original: return "original";
    case LearnerSpec::Kind::ExpertBayes: return "expertbayes";
    case LearnerSpec::Kind::K2: return "k2";
    case LearnerSpec::Kind::Tan: return "tan";
  }
  return "unknown";
}

std::vector<double> LearnerResult::fold_cci() const {
  std::vector<double> out;
  for (const auto& f : folds) out.push_back(f.cci);
  return out;
}

namespace {

const Network& require_network(const LearnerSpec& spec) {
  if (!spec.network) {
    throw Error(ErrorCode::InvalidArgument, "learner '" + spec.name + "' needs a network");
  }
  return *spec.network;
}

void check_cancel(const EvalHooks& hooks) {
  if (hooks.cancel && hooks.cancel->load()) throw Error(ErrorCode::Cancelled, "evaluation cancelled");
}

}  // namespace

FittedLearner fit_learner(const LearnerSpec& spec, const Dataset& train, const Dataset& test,
                          const EvalConfig& config, unsigned workers, const EvalHooks& hooks) {
  switch (spec.kind) {
    case LearnerSpec::Kind::Original: {
      const Network& net = require_network(spec);
      const BoundData bound(net.structure(), train);
      return {config.keep_supplied_cpts ? fill_unestimated(net, bound, config.pseudocount)
                                        : fit_parameters(net, bound, config.pseudocount),
              std::nullopt};
    }
    case LearnerSpec::Kind::ExpertBayes: {
      RefinementConfig rc = spec.refine;
      rc.threshold = config.threshold;
      rc.pseudocount = config.pseudocount;
      rc.positive_state = config.positive_state;
      rc.keep_supplied_cpts = config.keep_supplied_cpts;
      rc.workers = workers;
      RefineHooks rh;
      rh.cancel = hooks.cancel;
      RefinementRun run = refine(require_network(spec), train, test, rc, rh);
      Network best = run.best;
      return {std::move(best), std::move(run)};
    }
    case LearnerSpec::Kind::K2: {
      K2Config kc = spec.k2;
      kc.pseudocount = config.pseudocount;
      return {learn_k2(train, kc), std::nullopt};
    }
    case LearnerSpec::Kind::Tan: {
      TanConfig tc = spec.tan;
      tc.pseudocount = config.pseudocount;
      return {learn_tan(train, tc), std::nullopt};
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown learner kind");
}

LearnerResult cross_validate(const LearnerSpec& spec, const Dataset& data, const FoldPlan& plan,
                             const EvalConfig& config, const EvalHooks& hooks) {
  if (plan.assignment.size() != data.row_count()) {
    throw Error(ErrorCode::InvalidArgument, "fold plan does not match the dataset");
  }
  for (double t : config.thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "thresholds must lie in [0, 1]");
  }
  const unsigned total_workers = resolve_workers(config.workers);
  const unsigned outer = static_cast<unsigned>(std::min<std::size_t>(plan.k, total_workers));
  const unsigned inner = std::max(1u, total_workers / std::max(1u, outer));

  std::vector<std::optional<FoldOutcome>> outcomes(plan.k);
  std::vector<std::vector<Confusion>> confusion(plan.k,
                                                std::vector<Confusion>(config.thresholds.size()));
  std::vector<int> correct(data.row_count(), -1);
  std::atomic<std::size_t> done{0};

  parallel_for(plan.k, outer, [&](std::size_t fold) {
    check_cancel(hooks);
    const auto test_idx = plan.test_rows(fold);
    const Dataset train = data.subset(plan.train_rows(fold));
    const Dataset test = data.subset(test_idx);
    FittedLearner fitted = fit_learner(spec, train, test, config, inner, hooks);
    const Network& model = fitted.model;
    const auto positive = model.class_info().state_index(config.positive_state);
    if (!positive) {
      throw Error(ErrorCode::InvalidArgument,
                  "'" + config.positive_state + "' is not a class state");
    }
    const BoundData bound(model.structure(), test);
    const std::size_t cls = model.class_variable();
    std::size_t hits = 0, scored = 0;
    for (std::size_t r = 0; r < bound.row_count(); ++r) {
      const auto row = bound.row(r);
      if (row[cls] == kMissing) continue;
      const auto post = class_posterior(model, row);
      const bool is_positive = static_cast<std::size_t>(row[cls]) == *positive;
      const bool hit = decide(post, config.threshold, *positive) == static_cast<std::size_t>(row[cls]);
      ++scored;
      hits += hit ? 1 : 0;
      correct[test_idx[r]] = hit ? 1 : 0;
      for (std::size_t t = 0; t < config.thresholds.size(); ++t) {
        const bool predicted = post[*positive] > config.thresholds[t];
        Confusion& c = confusion[fold][t];
        if (predicted && is_positive) ++c.tp;
        else if (predicted) ++c.fp;
        else if (is_positive) ++c.fn;
        else ++c.tn;
      }
    }
    if (scored == 0) throw Error(ErrorCode::EmptyDataset, "a test fold has no labelled rows");
    const double cci = static_cast<double>(hits) / static_cast<double>(scored);
    outcomes[fold].emplace(FoldOutcome{fold, train.row_count(), test.row_count(), cci,
                                       std::move(fitted.model), std::move(fitted.refinement)});
    const std::size_t finished = ++done;
    if (hooks.on_progress) hooks.on_progress(finished, plan.k);
  });

  LearnerResult result;
  result.name = spec.name;
  result.kind = spec.kind;
  for (auto& o : outcomes) result.folds.push_back(std::move(*o));
  result.correct_by_row = std::move(correct);
  double sum = 0.0;
  for (const auto& f : result.folds) sum += f.cci;
  result.macro_cci = sum / static_cast<double>(plan.k);
  for (std::size_t t = 0; t < config.thresholds.size(); ++t) {
    Confusion pooled;
    for (std::size_t f = 0; f < plan.k; ++f) {
      pooled.tp += confusion[f][t].tp;
      pooled.fp += confusion[f][t].fp;
      pooled.fn += confusion[f][t].fn;
      pooled.tn += confusion[f][t].tn;
    }
    result.pr.push_back(make_pr_point(config.thresholds[t], pooled));
  }
  return result;
}

EvaluationReport evaluate(const std::vector<LearnerSpec>& learners, const Dataset& data,
                          const FoldPlan& plan, const EvalConfig& config, const EvalHooks& hooks) {
  EvaluationReport report;
  report.plan = plan;
  report.config = config;
  report.baseline_precision = baseline_precision(data, config.positive_state);
  const std::size_t total = learners.size() * plan.k;
  for (std::size_t i = 0; i < learners.size(); ++i) {
    EvalHooks inner;
    inner.cancel = hooks.cancel;
    if (hooks.on_progress) {
      inner.on_progress = [&, i](std::size_t done, std::size_t) {
        hooks.on_progress(i * plan.k + done, total);
      };
    }
    report.learners.push_back(cross_validate(learners[i], data, plan, config, inner));
  }
  for (std::size_t i = 0; i < report.learners.size(); ++i) {
    for (std::size_t j = i + 1; j < report.learners.size(); ++j) {
      const auto& a = report.learners[i];
      const auto& b = report.learners[j];
      const auto ca = a.fold_cci(), cb = b.fold_cci();
      report.significance.push_back({a.name, b.name, paired_significance(ca, cb),
                                     mcnemar_significance(a.correct_by_row, b.correct_by_row)});
    }
  }
  return report;
}

double baseline_precision(const Dataset& data, std::string_view positive_state) {
  const auto positive = data.class_info().state_index(positive_state);
  if (!positive) {
    throw Error(ErrorCode::InvalidArgument, "'" + std::string(positive_state) + "' is not a class state");
  }
  std::size_t pos = 0, labelled = 0;
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    const int c = data.cell(r, data.class_column());
    if (c == kMissing) continue;
    ++labelled;
    if (static_cast<std::size_t>(c) == *positive) ++pos;
  }
  if (labelled == 0) throw Error(ErrorCode::EmptyDataset, "no rows carry a class label");
  return static_cast<double>(pos) / static_cast<double>(labelled);
}

double paired_significance(std::span<const double> first, std::span<const double> second) {
  if (first.size() != second.size()) {
    throw Error(ErrorCode::LengthMismatch, "score vectors differ in length");
  }
  const std::size_t n = first.size();
  if (n < 2) throw Error(ErrorCode::LengthMismatch, "need at least two paired scores");
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = first[i] - second[i];
  if (std::all_of(diff.begin(), diff.end(), [](double d) { return d == 0.0; })) return 1.0;
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) return kSignificanceFloor;
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return std::clamp(p, kSignificanceFloor, 1.0);
}

double mcnemar_significance(std::span<const int> first, std::span<const int> second) {
  if (first.size() != second.size()) {
    throw Error(ErrorCode::LengthMismatch, "prediction vectors differ in length");
  }
  double only_first = 0.0, only_second = 0.0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i] < 0 || second[i] < 0) continue;
    if (first[i] == 1 && second[i] == 0) only_first += 1.0;
    if (first[i] == 0 && second[i] == 1) only_second += 1.0;
  }
  const double discordant = only_first + only_second;
  if (discordant == 0.0) return 1.0;
  const double corrected = std::max(0.0, std::abs(only_first - only_second) - 1.0);
  const double statistic = corrected * corrected / discordant;
  const boost::math::chi_squared dist(1.0);
  return std::clamp(boost::math::cdf(boost::math::complement(dist, statistic)), 0.0, 1.0);
}

std::vector<CorrelationWarning> screen_correlations(const Dataset& data, double warn_threshold) {
  if (!(warn_threshold >= 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be >= 0");
  std::vector<CorrelationWarning> out;
  const std::size_t cols = data.column_count();
  for (std::size_t a = 0; a < cols; ++a) {
    for (std::size_t b = a + 1; b < cols; ++b) {
      const std::size_t ra = data.column(a).states.size(), rb = data.column(b).states.size();
      std::vector<double> joint(ra * rb, 0.0), pa(ra, 0.0), pb(rb, 0.0);
      double total = 0.0;
      for (std::size_t r = 0; r < data.row_count(); ++r) {
        const int x = data.cell(r, a), y = data.cell(r, b);
        if (x == kMissing || y == kMissing) continue;
        joint[static_cast<std::size_t>(x) * rb + static_cast<std::size_t>(y)] += 1.0;
        pa[static_cast<std::size_t>(x)] += 1.0;
        pb[static_cast<std::size_t>(y)] += 1.0;
        total += 1.0;
      }
      if (total == 0.0) continue;
      auto entropy = [total](const std::vector<double>& counts) {
        double h = 0.0;
        for (double c : counts) {
          if (c > 0.0) h -= c / total * std::log(c / total);
        }
        return h;
      };
      double info = 0.0;
      for (std::size_t x = 0; x < ra; ++x) {
        for (std::size_t y = 0; y < rb; ++y) {
          const double j = joint[x * rb + y];
          if (j > 0.0) info += j / total * std::log(j * total / (pa[x] * pb[y]));
        }
      }
      const double h = std::min(entropy(pa), entropy(pb));
      const double nmi = h > 0.0 ? std::clamp(info / h, 0.0, 1.0) : 0.0;
      if (nmi > warn_threshold) {
        out.push_back({a, b, data.column(a).name, data.column(b).name, nmi,
                       a == data.class_column() || b == data.class_column()});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const CorrelationWarning& l, const CorrelationWarning& r) {
    return l.nmi > r.nmi;
  });
  return out;
}

}  // namespace expertbayes
