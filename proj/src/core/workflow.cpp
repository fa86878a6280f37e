#include "expertbayes/workflow.hpp"

#include "expertbayes/baselines.hpp"
#include "expertbayes/error.hpp"
#include "expertbayes/io.hpp"

namespace expertbayes::workflow {

using nlohmann::json;

namespace {

io::ReportContext context(const std::map<std::string, std::string>& digests) {
  return io::ReportContext{digests, io::utc_timestamp()};
}

LearnerSpec learner_from_name(const std::string& name, const std::optional<Network>& network,
                              const EvalParams& params) {
  if (name == "original" || name == "expertbayes") {
    if (!network) {
      throw Error(ErrorCode::InvalidArgument, "learner '" + name + "' needs a network");
    }
    if (name == "original") return LearnerSpec::original(*network);
    RefinementConfig rc;
    rc.iterations = params.iterations;
    rc.seed = params.seed;
    rc.reject_policy = params.reject_policy;
    return LearnerSpec::expert_bayes(*network, rc);
  }
  if (name == "k2") {
    K2Config kc;
    kc.max_parents = params.max_parents;
    return LearnerSpec::k2_learner(kc);
  }
  if (name == "tan") return LearnerSpec::tan_learner();
  throw Error(ErrorCode::InvalidArgument, "unknown learner '" + name + "'");
}

}  // namespace

std::string network_digest(const Network& network) {
  return io::sha256_hex(io::save_network(network));
}

std::string positive_or_default(const Dataset& data, const std::string& positive) {
  const Column& cls = data.class_info();
  if (positive.empty()) return cls.states.front();
  if (!cls.state_index(positive)) {
    throw Error(ErrorCode::InvalidArgument,
                "'" + positive + "' is not a state of class '" + cls.name + "'");
  }
  return positive;
}

Outcome run_refine(const Network& network, const Source& train, const std::optional<Source>& test,
                   const RefineParams& params, const Progress& progress) {
  if (params.folds) {
    EvalParams ep;
    ep.learners = {"expertbayes"};
    ep.folds = *params.folds;
    ep.seed = params.config.seed;
    ep.stratified = params.stratified;
    ep.threshold = params.config.threshold;
    ep.pseudocount = params.config.pseudocount;
    ep.positive_state = params.config.positive_state;
    ep.iterations = params.config.iterations;
    ep.reject_policy = params.config.reject_policy;
    ep.keep_supplied_cpts = params.config.keep_supplied_cpts;
    ep.workers = params.config.workers;
    return run_evaluate(network, train, ep, progress);
  }
  if (!test) throw Error(ErrorCode::InvalidArgument, "refine needs a test dataset or a fold count");

  RefinementConfig config = params.config;
  config.positive_state = positive_or_default(train.data, config.positive_state);
  RefineHooks hooks;
  hooks.on_progress = progress.on_progress;
  hooks.cancel = progress.cancel;
  const RefinementRun run = refine(network, train.data, test->data, config, hooks);

  Outcome out;
  out.report = io::refinement_report(
      run, test->data,
      context({{"network", network_digest(network)}, {"train", train.digest}, {"test", test->digest}}));
  out.macro_cci = run.best_test_score;
  return out;
}

Outcome run_evaluate(const std::optional<Network>& network, const Source& data,
                     const EvalParams& params, const Progress& progress) {
  if (params.learners.empty()) throw Error(ErrorCode::InvalidArgument, "no learners given");
  std::vector<LearnerSpec> specs;
  for (const std::string& name : params.learners) {
    specs.push_back(learner_from_name(name, network, params));
  }
  EvalConfig config;
  config.positive_state = positive_or_default(data.data, params.positive_state);
  config.threshold = params.threshold;
  config.pseudocount = params.pseudocount;
  config.keep_supplied_cpts = params.keep_supplied_cpts;
  config.workers = params.workers;

  const FoldPlan plan = make_folds(data.data, params.folds, params.seed, params.stratified);
  EvalHooks hooks;
  hooks.on_progress = progress.on_progress;
  hooks.cancel = progress.cancel;
  const EvaluationReport report = evaluate(specs, data.data, plan, config, hooks);

  std::map<std::string, std::string> digests{{"data", data.digest}};
  if (network) digests["network"] = network_digest(*network);
  Outcome out;
  out.report = io::evaluation_report(report, context(digests));
  out.macro_cci = report.learners.front().macro_cci;
  out.pr_table = io::pr_table(report);
  out.cci_table = "learner\tmacro_cci\n";
  for (const LearnerResult& l : report.learners) {
    out.cci_table += l.name + "\t" + json(l.macro_cci).dump() + "\n";
  }
  return out;
}

Outcome run_learn(const Source& data, const LearnParams& params) {
  K2Config k2;
  k2.max_parents = params.max_parents;
  k2.pseudocount = params.pseudocount;
  Network learned = [&] {
    if (params.algorithm == "k2") return learn_k2(data.data, k2);
    if (params.algorithm == "tan") {
      TanConfig tc;
      tc.pseudocount = params.pseudocount;
      return learn_tan(data.data, tc);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + params.algorithm + "'");
  }();
  Outcome out;
  out.report = io::learn_report(learned, params.algorithm, k2, params.pseudocount,
                                context({{"data", data.digest}}));
  out.network = std::move(learned);
  return out;
}

json screen_report(const Dataset& data, double threshold) {
  if (!(threshold >= 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be >= 0");
  json warnings = json::array();
  for (const CorrelationWarning& w : screen_correlations(data, threshold)) {
    warnings.push_back({{"first", w.first_name},
                        {"second", w.second_name},
                        {"nmi", w.nmi},
                        {"involves_class", w.involves_class}});
  }
  return {{"threshold", threshold}, {"warnings", std::move(warnings)}};
}

}  // namespace expertbayes::workflow
