#include "expertbayes/expertbayes.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "expertbayes/error.hpp"
#include "expertbayes/io.hpp"
#include "expertbayes/workflow.hpp"

using namespace expertbayes;

struct eb_network {
  Network value;
};

struct eb_dataset {
  workflow::Source value;
};

struct eb_report {
  workflow::Outcome value;
};

namespace {

thread_local std::string last_error;

eb_status to_status(ErrorCode code) { return static_cast<eb_status>(static_cast<int>(code) + 1); }

template <typename F>
eb_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return EB_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return EB_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return EB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return EB_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return EB_ERR_INTERNAL;
  }
}

template <typename T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

std::string_view or_default(const char* s, std::string_view fallback) {
  return s == nullptr ? fallback : std::string_view(s);
}

workflow::Source make_source(std::string_view bytes, const char* class_column, const char* missing) {
  require(class_column, "class_column");
  return {io::load_dataset(bytes, class_column, or_default(missing, "?")), io::sha256_hex(bytes)};
}

std::vector<std::string> split_names(std::string_view list) {
  std::vector<std::string> out;
  std::stringstream in{std::string(list)};
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) continue;
    out.push_back(item.substr(first, last - first + 1));
  }
  return out;
}

RejectPolicy policy(eb_reject_policy p) {
  switch (p) {
    case EB_REJECT_COUNT: return RejectPolicy::Count;
    case EB_REJECT_REDRAW: return RejectPolicy::Redraw;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown reject policy");
}

}  // namespace

extern "C" {

EB_API const char* eb_version(void) { return "1.0.0"; }

EB_API const char* eb_last_error(void) { return last_error.c_str(); }

EB_API const char* eb_status_name(eb_status status) {
  if (status == EB_OK) return "Ok";
  if (status == EB_ERR_INTERNAL) return "Internal";
  if (status > EB_OK && status <= EB_ERR_CANCELLED) {
    return to_string(static_cast<ErrorCode>(static_cast<int>(status) - 1));
  }
  return "Unknown";
}

EB_API void eb_string_free(char* text) { std::free(text); }

EB_API eb_status eb_network_load_file(const char* path, eb_network** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new eb_network{io::load_network_file(path)};
  });
}

EB_API eb_status eb_network_load_buffer(const char* bytes, size_t length, eb_network** out) {
  return guarded([&] {
    require(bytes, "bytes");
    require(out, "out");
    *out = new eb_network{io::load_network(std::string_view(bytes, length))};
  });
}

EB_API eb_status eb_network_save_file(const eb_network* network, const char* path) {
  return guarded([&] {
    require(network, "network");
    require(path, "path");
    io::save_network_file(network->value, path);
  });
}

EB_API eb_status eb_network_to_json(const eb_network* network, char** out) {
  return guarded([&] {
    require(network, "network");
    require(out, "out");
    *out = copy_string(io::save_network(network->value));
  });
}

EB_API eb_status eb_network_variable_count(const eb_network* network, size_t* out) {
  return guarded([&] {
    require(network, "network");
    require(out, "out");
    *out = network->value.structure().size();
  });
}

EB_API eb_status eb_network_edge_count(const eb_network* network, size_t* out) {
  return guarded([&] {
    require(network, "network");
    require(out, "out");
    *out = network->value.structure().edges().size();
  });
}

EB_API eb_status eb_network_apply_edit(const eb_network* network, const char* edit_json,
                                       eb_network** out) {
  return guarded([&] {
    require(network, "network");
    require(edit_json, "edit_json");
    require(out, "out");
    const auto doc = nlohmann::json::parse(edit_json);
    const CandidateEdit edit = io::edit_from_json(network->value.structure(), doc);
    *out = new eb_network{apply_edit(network->value, edit)};
  });
}

EB_API void eb_network_free(eb_network* network) { delete network; }

EB_API eb_status eb_dataset_load_file(const char* path, const char* class_column,
                                      const char* missing_token, eb_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new eb_dataset{make_source(io::read_file(path), class_column, missing_token)};
  });
}

EB_API eb_status eb_dataset_load_buffer(const char* bytes, size_t length, const char* class_column,
                                        const char* missing_token, eb_dataset** out) {
  return guarded([&] {
    require(bytes, "bytes");
    require(out, "out");
    *out = new eb_dataset{make_source(std::string_view(bytes, length), class_column, missing_token)};
  });
}

EB_API eb_status eb_dataset_row_count(const eb_dataset* data, size_t* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = data->value.data.row_count();
  });
}

EB_API eb_status eb_dataset_column_count(const eb_dataset* data, size_t* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = data->value.data.column_count();
  });
}

EB_API eb_status eb_dataset_screen(const eb_dataset* data, double threshold, char** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = copy_string(io::dump(workflow::screen_report(data->value.data, threshold)));
  });
}

EB_API void eb_dataset_free(eb_dataset* data) { delete data; }

EB_API void eb_refine_options_init(eb_refine_options* options) {
  if (options == nullptr) return;
  *options = eb_refine_options{};
  options->iterations = 100;
  options->threshold = 0.5;
  options->pseudocount = 1.0;
  options->reject_policy = EB_REJECT_COUNT;
  options->stratified = 1;
}

EB_API eb_status eb_refine(const eb_network* network, const eb_dataset* train,
                           const eb_dataset* test, const eb_refine_options* options,
                           eb_report** out) {
  return guarded([&] {
    require(network, "network");
    require(train, "train");
    require(options, "options");
    require(out, "out");
    workflow::RefineParams params;
    RefinementConfig& c = params.config;
    c.iterations = options->iterations;
    c.seed = options->seed;
    c.threshold = options->threshold;
    c.pseudocount = options->pseudocount;
    c.positive_state = or_default(options->positive_state, "");
    c.reject_policy = policy(options->reject_policy);
    c.keep_supplied_cpts = options->keep_supplied_cpts != 0;
    c.workers = options->workers;
    params.stratified = options->stratified != 0;
    std::optional<workflow::Source> test_source;
    if (options->folds != 0) {
      params.folds = options->folds;
    } else {
      require(test, "test");
      test_source = test->value;
    }
    *out = new eb_report{workflow::run_refine(network->value, train->value, test_source, params)};
  });
}

EB_API void eb_eval_options_init(eb_eval_options* options) {
  if (options == nullptr) return;
  *options = eb_eval_options{};
  options->folds = 5;
  options->stratified = 1;
  options->threshold = 0.5;
  options->pseudocount = 1.0;
  options->iterations = 100;
  options->reject_policy = EB_REJECT_COUNT;
  options->max_parents = 1;
}

EB_API eb_status eb_evaluate(const char* learners, const eb_network* network,
                             const eb_dataset* data, const eb_eval_options* options,
                             eb_report** out) {
  return guarded([&] {
    require(learners, "learners");
    require(data, "data");
    require(options, "options");
    require(out, "out");
    workflow::EvalParams params;
    params.learners = split_names(learners);
    params.folds = options->folds;
    params.seed = options->seed;
    params.stratified = options->stratified != 0;
    params.threshold = options->threshold;
    params.pseudocount = options->pseudocount;
    params.positive_state = or_default(options->positive_state, "");
    params.iterations = options->iterations;
    params.reject_policy = policy(options->reject_policy);
    params.max_parents = options->max_parents;
    params.keep_supplied_cpts = options->keep_supplied_cpts != 0;
    params.workers = options->workers;
    std::optional<Network> net;
    if (network != nullptr) net = network->value;
    *out = new eb_report{workflow::run_evaluate(net, data->value, params)};
  });
}

EB_API eb_status eb_learn(const eb_dataset* data, const char* algorithm, size_t max_parents,
                          double pseudocount, eb_network** network_out, eb_report** report_out) {
  return guarded([&] {
    require(data, "data");
    require(algorithm, "algorithm");
    workflow::LearnParams params{algorithm, max_parents, pseudocount};
    workflow::Outcome outcome = workflow::run_learn(data->value, params);
    if (network_out != nullptr) *network_out = new eb_network{*outcome.network};
    if (report_out != nullptr) *report_out = new eb_report{std::move(outcome)};
  });
}

EB_API eb_status eb_report_to_json(const eb_report* report, int stable, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = copy_string(stable != 0 ? io::stable_dump(report->value.report)
                                   : io::dump(report->value.report));
  });
}

EB_API eb_status eb_report_save_file(const eb_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    io::write_file(path, io::dump(report->value.report));
  });
}

EB_API eb_status eb_report_macro_cci(const eb_report* report, double* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = report->value.macro_cci;
  });
}

EB_API eb_status eb_report_pr_table(const eb_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = copy_string(report->value.pr_table);
  });
}

EB_API eb_status eb_report_cci_table(const eb_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = copy_string(report->value.cci_table);
  });
}

EB_API void eb_report_free(eb_report* report) { delete report; }

}  // extern "C"
