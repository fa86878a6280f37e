#include <doctest.h>

#include <dlfcn.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "expertbayes/expertbayes.h"

namespace {

const std::string kData = EB_DATA_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string take(char* text) {
  std::string out = text ? text : "";
  eb_string_free(text);
  return out;
}

eb_network* load_net(const std::string& rel) {
  eb_network* net = nullptr;
  REQUIRE(eb_network_load_file((kData + rel).c_str(), &net) == EB_OK);
  return net;
}

eb_dataset* load_data(const std::string& rel, const char* cls) {
  eb_dataset* d = nullptr;
  REQUIRE(eb_dataset_load_file((kData + rel).c_str(), cls, nullptr, &d) == EB_OK);
  return d;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(eb_status_name(EB_OK)) == "Ok");
  CHECK(std::string(eb_status_name(EB_ERR_CYCLE_WOULD_FORM)) == "CycleWouldForm");
  CHECK(std::string(eb_status_name(EB_ERR_CANCELLED)) == "Cancelled");
  CHECK(std::string(eb_version()).size() > 0);
}

TEST_CASE("network handles") {
  eb_network* net = load_net("/prostate/network.json");
  size_t n = 0;
  CHECK(eb_network_variable_count(net, &n) == EB_OK);
  CHECK(n == 11);
  CHECK(eb_network_edge_count(net, &n) == EB_OK);
  CHECK(n == 10);

  char* text = nullptr;
  REQUIRE(eb_network_to_json(net, &text) == EB_OK);
  const std::string doc = take(text);
  eb_network* again = nullptr;
  REQUIRE(eb_network_load_buffer(doc.data(), doc.size(), &again) == EB_OK);
  REQUIRE(eb_network_to_json(again, &text) == EB_OK);
  CHECK(take(text) == doc);
  eb_network_free(again);

  eb_network* edited = nullptr;
  CHECK(eb_network_apply_edit(net, R"({"kind": "reverse", "node_a": "status", "node_b": "age"})", &edited) == EB_OK);
  CHECK(eb_network_edge_count(edited, &n) == EB_OK);
  CHECK(n == 10);
  eb_network_free(edited);

  // age -> sbp -> dbp: dbp -> age closes a cycle.
  edited = nullptr;
  CHECK(eb_network_apply_edit(net, R"({"kind": "add", "node_a": "dbp", "node_b": "age", "direction": "a_to_b"})",
                              &edited) == EB_ERR_CYCLE_WOULD_FORM);
  CHECK(edited == nullptr);
  CHECK(std::string(eb_last_error()).size() > 0);
  CHECK(eb_network_apply_edit(net, R"({"kind": "remove", "node_a": "wt", "node_b": "pf"})", &edited) ==
        EB_ERR_EDIT_INAPPLICABLE);
  CHECK(eb_network_apply_edit(net, "{broken", &edited) == EB_ERR_PARSE);
  eb_network_free(net);

  eb_network* bad = nullptr;
  CHECK(eb_network_load_file("/nonexistent.json", &bad) == EB_ERR_IO);
  CHECK(eb_network_load_file(nullptr, &bad) == EB_ERR_INVALID_ARGUMENT);
  const std::string cyclic = R"({"class_variable": "A", "format_version": 1,
    "variables": [{"name": "A", "states": ["0", "1"]}, {"name": "B", "states": ["0", "1"]}],
    "edges": [{"parent": "A", "child": "B"}, {"parent": "B", "child": "A"}]})";
  CHECK(eb_network_load_buffer(cyclic.data(), cyclic.size(), &bad) == EB_ERR_CYCLIC_STRUCTURE);
}

TEST_CASE("dataset handles") {
  eb_dataset* d = load_data("/prostate/prostate.csv", "status");
  size_t n = 0;
  CHECK(eb_dataset_row_count(d, &n) == EB_OK);
  CHECK(n == 496);
  CHECK(eb_dataset_column_count(d, &n) == EB_OK);
  CHECK(n == 11);
  char* text = nullptr;
  CHECK(eb_dataset_screen(d, 0.9, &text) == EB_OK);
  CHECK(take(text).find("\"warnings\"") != std::string::npos);
  eb_dataset_free(d);

  eb_dataset* bad = nullptr;
  const std::string csv = "C,A\npos,a\n";
  CHECK(eb_dataset_load_buffer(csv.data(), csv.size(), "C", nullptr, &bad) == EB_ERR_SINGLE_STATE_CLASS);
  CHECK(eb_dataset_load_buffer(csv.data(), csv.size(), "Z", nullptr, &bad) == EB_ERR_MISSING_CLASS_COLUMN);
  const std::string ragged = "C,A\npos\n";
  CHECK(eb_dataset_load_buffer(ragged.data(), ragged.size(), "C", "?", &bad) == EB_ERR_RAGGED_ROW);
}

TEST_CASE("refine through the C API matches the golden report") {
  eb_network* net = load_net("/synthetic3/network.json");
  eb_dataset* train = load_data("/synthetic3/train.csv", "C");
  eb_dataset* test = load_data("/synthetic3/test.csv", "C");
  eb_refine_options opts;
  eb_refine_options_init(&opts);
  CHECK(opts.iterations == 100);
  CHECK(opts.threshold == 0.5);
  opts.seed = 7;
  opts.positive_state = "pos";
  eb_report* report = nullptr;
  REQUIRE(eb_refine(net, train, test, &opts, &report) == EB_OK);
  char* text = nullptr;
  REQUIRE(eb_report_to_json(report, 1, &text) == EB_OK);
  CHECK(take(text) == slurp(kData + "/synthetic3/refine_seed7.json"));
  double cci = 0.0;
  CHECK(eb_report_macro_cci(report, &cci) == EB_OK);
  CHECK(cci > 0.8);
  CHECK(eb_report_pr_table(report, &text) == EB_OK);
  CHECK(take(text).empty());
  eb_report_free(report);

  opts.positive_state = "nope";
  CHECK(eb_refine(net, train, test, &opts, &report) == EB_ERR_INVALID_ARGUMENT);
  opts.positive_state = nullptr;
  CHECK(eb_refine(net, train, nullptr, &opts, &report) == EB_ERR_INVALID_ARGUMENT);
  eb_network_free(net);
  eb_dataset_free(train);
  eb_dataset_free(test);
}

TEST_CASE("evaluate and learn through the C API") {
  eb_network* net = load_net("/prostate/network.json");
  eb_dataset* data = load_data("/prostate/prostate.csv", "status");
  eb_eval_options opts;
  eb_eval_options_init(&opts);
  CHECK(opts.folds == 5);
  opts.iterations = 5;
  eb_report* report = nullptr;
  REQUIRE(eb_evaluate("original,k2", net, data, &opts, &report) == EB_OK);
  char* text = nullptr;
  REQUIRE(eb_report_cci_table(report, &text) == EB_OK);
  const std::string table = take(text);
  CHECK(table.find("original\t") != std::string::npos);
  CHECK(table.find("k2\t") != std::string::npos);
  eb_report_free(report);
  CHECK(eb_evaluate("original", nullptr, data, &opts, &report) == EB_ERR_INVALID_ARGUMENT);
  opts.folds = 1;
  CHECK(eb_evaluate("k2", nullptr, data, &opts, &report) == EB_ERR_TOO_FEW_ROWS);

  eb_network* learned = nullptr;
  REQUIRE(eb_learn(data, "k2", 1, 1.0, &learned, nullptr) == EB_OK);
  size_t edges = 0;
  CHECK(eb_network_edge_count(learned, &edges) == EB_OK);
  CHECK(edges == 10);
  eb_network_free(learned);
  CHECK(eb_learn(data, "greedy", 1, 1.0, &learned, nullptr) == EB_ERR_INVALID_ARGUMENT);
  eb_network_free(net);
  eb_dataset_free(data);
}

TEST_CASE("only the C entry points are exported") {
  void* lib = dlopen(EB_LIBRARY_PATH, RTLD_NOW | RTLD_LOCAL);
  REQUIRE(lib != nullptr);
  for (const char* name : {"eb_version", "eb_refine", "eb_evaluate", "eb_learn", "eb_network_apply_edit",
                           "eb_report_to_json", "eb_string_free"}) {
    CHECK_MESSAGE(dlsym(lib, name) != nullptr, name);
  }
  // Engine internals stay hidden.
  CHECK(dlsym(lib, "_ZN11expertbayes6refineERKNS_7NetworkERKNS_7DatasetES5_RKNS_16RefinementConfigERKNS_11RefineHooksE") ==
        nullptr);
  dlclose(lib);
}
