// expertbayes command line: refine, learn and eval over the C API.
//
// Exit codes: 0 success, 2 usage error, 3 data or format error, 1 otherwise.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "expertbayes/expertbayes.h"

namespace {

constexpr int kUsage = 2;
constexpr int kData = 3;

struct Failure {
  int exit_code;
  std::string message;
};

struct NetworkFree {
  void operator()(eb_network* p) const { eb_network_free(p); }
};
struct DatasetFree {
  void operator()(eb_dataset* p) const { eb_dataset_free(p); }
};
struct ReportFree {
  void operator()(eb_report* p) const { eb_report_free(p); }
};
struct StringFree {
  void operator()(char* p) const { eb_string_free(p); }
};
using NetworkPtr = std::unique_ptr<eb_network, NetworkFree>;
using DatasetPtr = std::unique_ptr<eb_dataset, DatasetFree>;
using ReportPtr = std::unique_ptr<eb_report, ReportFree>;
using StringPtr = std::unique_ptr<char, StringFree>;

void check(eb_status status) {
  if (status == EB_OK) return;
  const int code = status == EB_ERR_INVALID_ARGUMENT ? kUsage
                   : status == EB_ERR_INTERNAL      ? 1
                                                    : kData;
  throw Failure{code, std::string(eb_status_name(status)) + ": " + eb_last_error()};
}

NetworkPtr load_network(const std::string& path) {
  eb_network* raw = nullptr;
  check(eb_network_load_file(path.c_str(), &raw));
  return NetworkPtr(raw);
}

DatasetPtr load_dataset(const std::string& path, const std::string& class_column,
                        const std::string& missing) {
  eb_dataset* raw = nullptr;
  check(eb_dataset_load_file(path.c_str(), class_column.c_str(), missing.c_str(), &raw));
  return DatasetPtr(raw);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{kData, "cannot write '" + path + "'"};
}

void save_report(const eb_report* report, const std::string& path) {
  if (!path.empty()) check(eb_report_save_file(report, path.c_str()));
}

std::string pr_table(const eb_report* report) {
  char* raw = nullptr;
  check(eb_report_pr_table(report, &raw));
  return StringPtr(raw).get();
}

std::string cci_table(const eb_report* report) {
  char* raw = nullptr;
  check(eb_report_cci_table(report, &raw));
  return StringPtr(raw).get();
}

std::vector<std::string> split(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Common {
  std::string data;
  std::string class_column;
  std::string missing = "?";
  std::string positive;
  double pseudocount = 1.0;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--data", c.data, "Training (or full) dataset CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--class", c.class_column, "Class column name")->required();
  cmd->add_option("--missing", c.missing, "Token marking a missing cell")->capture_default_str();
  cmd->add_option("--pseudocount", c.pseudocount, "CPT smoothing pseudocount")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Refine expert-built Bayesian network classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(eb_version()));

  Common refine_common;
  std::string refine_network, refine_test, refine_policy = "count";
  std::size_t refine_folds = 0, iterations = 100;
  std::uint64_t refine_seed = 0;
  double refine_threshold = 0.5;
  bool keep_cpts = false;
  CLI::App* refine = app.add_subcommand("refine", "Single-edit refinement of an expert network");
  add_common(refine, refine_common);
  refine->add_option("--network", refine_network, "Expert network document")->required()->check(CLI::ExistingFile);
  refine->add_option("--positive", refine_common.positive, "Positive class state");
  auto* test_opt = refine->add_option("--test", refine_test, "Held-out test CSV")->check(CLI::ExistingFile);
  auto* folds_opt = refine->add_option("--folds", refine_folds, "Cross-validate with K folds")
                        ->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
  test_opt->excludes(folds_opt);
  refine->add_option("--iterations", iterations, "Candidates drawn")->check(CLI::PositiveNumber)->capture_default_str();
  refine->add_option("--seed", refine_seed, "Random seed")->capture_default_str();
  refine->add_option("--threshold", refine_threshold, "Decision threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  refine->add_option("--reject-policy", refine_policy, "count | redraw")
      ->check(CLI::IsMember({"count", "redraw"}))
      ->capture_default_str();
  refine->add_flag("--keep-supplied-cpts", keep_cpts, "Keep tables given in the network document");
  refine->add_option("--out", refine_common.out, "Report path");

  Common learn_common;
  std::string algorithm;
  std::size_t max_parents = 1;
  CLI::App* learn = app.add_subcommand("learn", "Learn a K2 or TAN baseline network");
  add_common(learn, learn_common);
  learn->add_option("--algorithm", algorithm, "k2 | tan")->required()->check(CLI::IsMember({"k2", "tan"}));
  learn->add_option("--max-parents", max_parents, "K2 parent limit (class edge included)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  learn->add_option("--out", learn_common.out, "Network document path")->required();
  std::string learn_report;
  learn->add_option("--report", learn_report, "Optional learn report path");

  Common eval_common;
  std::string learners, eval_network, pr_path, eval_policy = "count";
  std::size_t eval_folds = 5, eval_iterations = 100, eval_max_parents = 1;
  std::uint64_t eval_seed = 0;
  double eval_threshold = 0.5;
  bool eval_keep = false;
  CLI::App* eval = app.add_subcommand("eval", "Cross-validated comparison of learners");
  add_common(eval, eval_common);
  eval->add_option("--learners", learners, "Comma list of original,expertbayes,k2,tan")->required();
  eval->add_option("--network", eval_network, "Expert network document")->check(CLI::ExistingFile);
  eval->add_option("--positive", eval_common.positive, "Positive class state");
  eval->add_option("--folds", eval_folds, "Number of folds")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000}))
      ->capture_default_str();
  eval->add_option("--seed", eval_seed, "Fold and refinement seed")->capture_default_str();
  eval->add_option("--iterations", eval_iterations, "ExpertBayes candidates per fold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval->add_option("--threshold", eval_threshold, "CCI decision threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  eval->add_option("--max-parents", eval_max_parents, "K2 parent limit")->check(CLI::PositiveNumber)->capture_default_str();
  eval->add_option("--reject-policy", eval_policy, "count | redraw")
      ->check(CLI::IsMember({"count", "redraw"}))
      ->capture_default_str();
  eval->add_flag("--keep-supplied-cpts", eval_keep, "Keep tables given in the network document");
  eval->add_option("--out", eval_common.out, "Report path");
  eval->add_option("--pr-table", pr_path, "Tab-separated PR table path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*refine) {
      if (refine_test.empty() && refine_folds == 0) {
        throw Failure{kUsage, "refine needs --test or --folds"};
      }
      NetworkPtr network = load_network(refine_network);
      DatasetPtr train = load_dataset(refine_common.data, refine_common.class_column, refine_common.missing);
      DatasetPtr test;
      if (!refine_test.empty()) {
        test = load_dataset(refine_test, refine_common.class_column, refine_common.missing);
      }
      eb_refine_options options;
      eb_refine_options_init(&options);
      options.iterations = iterations;
      options.seed = refine_seed;
      options.threshold = refine_threshold;
      options.pseudocount = refine_common.pseudocount;
      options.positive_state = refine_common.positive.c_str();
      options.reject_policy = refine_policy == "redraw" ? EB_REJECT_REDRAW : EB_REJECT_COUNT;
      options.keep_supplied_cpts = keep_cpts ? 1 : 0;
      options.folds = refine_folds;
      eb_report* raw = nullptr;
      check(eb_refine(network.get(), train.get(), test.get(), &options, &raw));
      ReportPtr report(raw);
      save_report(report.get(), refine_common.out);
      double cci = 0.0;
      check(eb_report_macro_cci(report.get(), &cci));
      std::printf("macro_cci\t%.17g\n", cci);
      return 0;
    }

    if (*learn) {
      DatasetPtr data = load_dataset(learn_common.data, learn_common.class_column, learn_common.missing);
      eb_network* raw_net = nullptr;
      eb_report* raw_report = nullptr;
      check(eb_learn(data.get(), algorithm.c_str(), max_parents, learn_common.pseudocount, &raw_net,
                     &raw_report));
      NetworkPtr network(raw_net);
      ReportPtr report(raw_report);
      check(eb_network_save_file(network.get(), learn_common.out.c_str()));
      save_report(report.get(), learn_report);
      std::size_t edges = 0;
      check(eb_network_edge_count(network.get(), &edges));
      std::printf("edges\t%zu\n", edges);
      return 0;
    }

    if (*eval) {
      for (const std::string& name : split(learners)) {
        if (name != "original" && name != "expertbayes" && name != "k2" && name != "tan") {
          throw Failure{kUsage, "unknown learner '" + name + "'"};
        }
        if ((name == "original" || name == "expertbayes") && eval_network.empty()) {
          throw Failure{kUsage, "learner '" + name + "' needs --network"};
        }
      }
      NetworkPtr network;
      if (!eval_network.empty()) network = load_network(eval_network);
      DatasetPtr data = load_dataset(eval_common.data, eval_common.class_column, eval_common.missing);
      eb_eval_options options;
      eb_eval_options_init(&options);
      options.folds = eval_folds;
      options.seed = eval_seed;
      options.threshold = eval_threshold;
      options.pseudocount = eval_common.pseudocount;
      options.positive_state = eval_common.positive.c_str();
      options.iterations = eval_iterations;
      options.reject_policy = eval_policy == "redraw" ? EB_REJECT_REDRAW : EB_REJECT_COUNT;
      options.max_parents = eval_max_parents;
      options.keep_supplied_cpts = eval_keep ? 1 : 0;
      eb_report* raw = nullptr;
      check(eb_evaluate(learners.c_str(), network.get(), data.get(), &options, &raw));
      ReportPtr report(raw);
      save_report(report.get(), eval_common.out);
      if (pr_path == "-") {
        std::fputs(pr_table(report.get()).c_str(), stdout);
      } else if (!pr_path.empty()) {
        write_text(pr_path, pr_table(report.get()));
      }
      std::fputs(cci_table(report.get()).c_str(), stdout);
      return 0;
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "expertbayes: %s\n", f.message.c_str());
    return f.exit_code;
  }
  return kUsage;
}
