#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "json.hpp"

#include "expertbayes/baselines.hpp"
#include "expertbayes/dataset.hpp"
#include "expertbayes/evaluation.hpp"
#include "expertbayes/network.hpp"
#include "expertbayes/refiner.hpp"

namespace expertbayes::io {

inline constexpr int kNetworkFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

// Network document (JSON):
//   {
//     "class_variable": "C",
//     "cpts": [{"variable": "A", "parents": ["C"], "rows": [[0.6, 0.4], ...]}],
//     "edges": [{"parent": "C", "child": "A"}],
//     "format_version": 1,
//     "variables": [{"name": "C", "states": ["pos", "neg"]}, ...]
//   }
// "cpts" is optional and may cover any subset of variables; rows follow the
// listed parent order (last parent fastest) and must sum to 1 within 1e-6.
// Variables without a table load as unestimated.
nlohmann::json network_to_json(const Network& network);
Network network_from_json(const nlohmann::json& doc);

// Canonical text: sorted keys, two-space indent, trailing newline. Only
// estimated tables are written.
std::string save_network(const Network& network);

// Throws Error(ParseError) naming the line or field, Error(CyclicStructure),
// or Error(SchemaVersionUnsupported).
Network load_network(std::string_view text);

Network load_network_file(const std::filesystem::path& path);
void save_network_file(const Network& network, const std::filesystem::path& path);

// Comma-separated with a header row; fields may be double-quoted with ""
// as an escaped quote. State sets follow first appearance per column.
// Throws Error(RaggedRow), Error(MissingClassColumn), Error(SingleStateClass)
// or Error(ParseError).
Dataset load_dataset(std::string_view csv, std::string_view class_column,
                     std::string_view missing_token = "?");
Dataset load_dataset_file(const std::filesystem::path& path, std::string_view class_column,
                          std::string_view missing_token = "?");

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// {"kind": "add", "node_a": "A", "node_b": "B", "direction": "a_to_b"}
nlohmann::json edit_to_json(const NetworkStructure& structure, const CandidateEdit& edit);
CandidateEdit edit_from_json(const NetworkStructure& structure, const nlohmann::json& doc);

struct ReportContext {
  std::map<std::string, std::string> input_digests;  // e.g. "network" -> sha256 hex
  std::string created_at;                             // excluded from stable bytes
};

nlohmann::json pr_points_to_json(const std::vector<PrPoint>& points);

nlohmann::json refinement_report(const RefinementRun& run, const Dataset& test,
                                 const ReportContext& context);
nlohmann::json evaluation_report(const EvaluationReport& report, const ReportContext& context);
nlohmann::json learn_report(const Network& network, std::string_view algorithm,
                            const K2Config& k2, double pseudocount, const ReportContext& context);

// Canonical serialization used for every document.
std::string dump(const nlohmann::json& doc);
// Canonical serialization without "created_at".
std::string stable_dump(nlohmann::json doc);

// Tab-separated PR rows for external plotting; "NA" marks undefined precision.
std::string pr_table(const EvaluationReport& report);

std::string sha256_hex(std::string_view bytes);
std::string utc_timestamp();

}  // namespace expertbayes::io
