#include "expertbayes/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "expertbayes/error.hpp"
#include "expertbayes/random.hpp"

namespace expertbayes::io {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ParseError, "field '" + field + "': " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) schema_error(path.empty() ? key : path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::size_t require_variable(const NetworkStructure& s, const std::string& name,
                             const std::string& field) {
  const auto idx = s.index_of(name);
  if (!idx) schema_error(field, "unknown variable '" + name + "'");
  return *idx;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
  return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

// Table as written in a document, permuted into the canonical ascending
// parent layout.
Cpt cpt_from_json(const NetworkStructure& s, const json& doc, const std::string& path) {
  const std::string name = require_string(doc, "variable", path);
  const std::size_t owner = require_variable(s, name, path + ".variable");
  const json& parents_doc = require(doc, "parents", path);
  if (!parents_doc.is_array()) schema_error(path + ".parents", "expected an array");
  std::vector<std::size_t> listed;
  for (std::size_t i = 0; i < parents_doc.size(); ++i) {
    const std::string field = path + ".parents[" + std::to_string(i) + "]";
    if (!parents_doc[i].is_string()) schema_error(field, "expected a string");
    listed.push_back(require_variable(s, parents_doc[i].get<std::string>(), field));
  }
  auto sorted = listed;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != s.parents(owner)) {
    schema_error(path + ".parents", "does not match the parents of '" + name + "' in the edge list");
  }
  const std::size_t card = s.variable(owner).cardinality();
  std::size_t configs = 1;
  for (std::size_t p : listed) configs *= s.variable(p).cardinality();
  const json& rows = require(doc, "rows", path);
  if (!rows.is_array() || rows.size() != configs) {
    schema_error(path + ".rows", "expected " + std::to_string(configs) + " rows");
  }
  std::vector<std::vector<double>> doc_rows(configs);
  for (std::size_t r = 0; r < configs; ++r) {
    const std::string field = path + ".rows[" + std::to_string(r) + "]";
    if (!rows[r].is_array() || rows[r].size() != card) {
      schema_error(field, "expected " + std::to_string(card) + " probabilities");
    }
    double sum = 0.0;
    for (const json& p : rows[r]) {
      if (!p.is_number()) schema_error(field, "expected numbers");
      const double v = p.get<double>();
      if (!(v >= 0.0 && v <= 1.0)) schema_error(field, "probability outside [0, 1]");
      doc_rows[r].push_back(v);
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) schema_error(field, "row does not sum to 1");
    if (std::abs(sum - 1.0) > Cpt::kRowTolerance) {
      for (double& v : doc_rows[r]) v /= sum;
    }
  }

  std::vector<std::size_t> cards;
  for (std::size_t p : sorted) cards.push_back(s.variable(p).cardinality());
  // position of each canonical parent inside the listed order
  std::vector<std::size_t> listed_pos(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    listed_pos[i] = static_cast<std::size_t>(std::find(listed.begin(), listed.end(), sorted[i]) - listed.begin());
  }
  std::vector<double> values;
  values.reserve(configs * card);
  std::vector<std::size_t> digits(sorted.size(), 0);
  for (std::size_t config = 0; config < configs; ++config) {
    std::vector<std::size_t> listed_digits(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) listed_digits[listed_pos[i]] = digits[i];
    std::size_t doc_index = 0;
    for (std::size_t i = 0; i < listed.size(); ++i) {
      doc_index = doc_index * s.variable(listed[i]).cardinality() + listed_digits[i];
    }
    values.insert(values.end(), doc_rows[doc_index].begin(), doc_rows[doc_index].end());
    for (std::size_t i = digits.size(); i-- > 0;) {
      if (++digits[i] < cards[i]) break;
      digits[i] = 0;
    }
  }
  return Cpt(owner, card, std::move(sorted), std::move(cards), std::move(values), true);
}

}  // namespace

json network_to_json(const Network& network) {
  const NetworkStructure& s = network.structure();
  json doc = json::object();
  doc["format_version"] = kNetworkFormatVersion;
  doc["class_variable"] = s.variable(network.class_variable()).name;
  json vars = json::array();
  for (const Variable& v : s.variables()) vars.push_back({{"name", v.name}, {"states", v.states}});
  doc["variables"] = std::move(vars);
  json edges = json::array();
  for (const Edge& e : s.edges()) {
    edges.push_back({{"parent", s.variable(e.parent).name}, {"child", s.variable(e.child).name}});
  }
  doc["edges"] = std::move(edges);
  json cpts = json::array();
  for (const Cpt& c : network.cpts()) {
    if (!c.estimated()) continue;
    json parents = json::array();
    for (std::size_t p : c.parents()) parents.push_back(s.variable(p).name);
    json rows = json::array();
    for (std::size_t r = 0; r < c.row_count(); ++r) {
      const auto row = c.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    cpts.push_back({{"variable", s.variable(c.owner()).name},
                    {"parents", std::move(parents)},
                    {"rows", std::move(rows)}});
  }
  if (!cpts.empty()) doc["cpts"] = std::move(cpts);
  return doc;
}

Network network_from_json(const json& doc) {
  if (!doc.is_object()) schema_error("<root>", "expected an object");
  const json& version = require(doc, "format_version", "");
  if (!version.is_number_integer()) schema_error("format_version", "expected an integer");
  if (version.get<long long>() != kNetworkFormatVersion) {
    throw Error(ErrorCode::SchemaVersionUnsupported,
                "network format_version " + version.dump() + " is not supported (expected " +
                    std::to_string(kNetworkFormatVersion) + ")");
  }
  const json& vars_doc = require(doc, "variables", "");
  if (!vars_doc.is_array()) schema_error("variables", "expected an array");
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < vars_doc.size(); ++i) {
    const std::string path = "variables[" + std::to_string(i) + "]";
    Variable v;
    v.name = require_string(vars_doc[i], "name", path);
    const json& states = require(vars_doc[i], "states", path);
    if (!states.is_array()) schema_error(path + ".states", "expected an array");
    for (const json& st : states) {
      if (!st.is_string()) schema_error(path + ".states", "expected strings");
      v.states.push_back(st.get<std::string>());
    }
    vars.push_back(std::move(v));
  }
  const auto find_var = [&](const std::string& name, const std::string& field) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].name == name) return i;
    }
    schema_error(field, "unknown variable '" + name + "'");
  };
  const json& edges_doc = require(doc, "edges", "");
  if (!edges_doc.is_array()) schema_error("edges", "expected an array");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < edges_doc.size(); ++i) {
    const std::string path = "edges[" + std::to_string(i) + "]";
    const std::size_t parent = find_var(require_string(edges_doc[i], "parent", path), path + ".parent");
    const std::size_t child = find_var(require_string(edges_doc[i], "child", path), path + ".child");
    edges.push_back({parent, child});
  }
  const std::string class_name = require_string(doc, "class_variable", "");
  const std::size_t cls = find_var(class_name, "class_variable");

  NetworkStructure structure = [&] {
    try {
      return NetworkStructure(std::move(vars), std::move(edges));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidStructure) throw Error(ErrorCode::ParseError, e.what());
      throw;
    }
  }();

  std::vector<Cpt> cpts;
  for (std::size_t v = 0; v < structure.size(); ++v) cpts.push_back(Cpt::uniform(structure, v));
  if (const auto it = doc.find("cpts"); it != doc.end()) {
    if (!it->is_array()) schema_error("cpts", "expected an array");
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "cpts[" + std::to_string(i) + "]";
      Cpt c = cpt_from_json(structure, (*it)[i], path);
      if (!seen.insert(c.owner()).second) schema_error(path, "duplicate table");
      cpts[c.owner()] = std::move(c);
    }
  }
  return Network(std::move(structure), std::move(cpts), cls);
}

std::string save_network(const Network& network) { return dump(network_to_json(network)); }

Network load_network(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) +
                    ": malformed JSON");
  }
  return network_from_json(doc);
}

Network load_network_file(const std::filesystem::path& path) { return load_network(read_file(path)); }

void save_network_file(const Network& network, const std::filesystem::path& path) {
  write_file(path, save_network(network));
}

namespace {

// One CSV record per call; returns false at end of input.
class CsvReader {
 public:
  explicit CsvReader(std::string_view text) : text_(text) {}

  bool next(std::vector<std::string>& fields) {
    fields.clear();
    if (pos_ >= text_.size()) return false;
    ++line_;
    record_line_ = line_;
    std::string field;
    bool quoted = false;
    for (;;) {
      if (pos_ >= text_.size()) {
        if (quoted) throw Error(ErrorCode::ParseError, "line " + std::to_string(record_line_) + ": unterminated quote");
        fields.push_back(std::move(field));
        return true;
      }
      const char ch = text_[pos_++];
      if (quoted) {
        if (ch == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            field.push_back('"');
            ++pos_;
          } else {
            quoted = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
      } else if (ch == '"' && field.empty()) {
        quoted = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (ch == '\n' || ch == '\r') {
        if (ch == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
        fields.push_back(std::move(field));
        return true;
      } else {
        field.push_back(ch);
      }
    }
  }

  std::size_t line() const noexcept { return record_line_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

bool blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields[0].empty();
}

}  // namespace

Dataset load_dataset(std::string_view csv, std::string_view class_column, std::string_view missing_token) {
  CsvReader reader(csv);
  std::vector<std::string> fields;
  while (reader.next(fields) && blank(fields)) {}
  if (fields.empty() || blank(fields)) throw Error(ErrorCode::ParseError, "dataset has no header row");
  std::vector<Column> columns;
  std::set<std::string> names;
  for (const auto& name : fields) {
    if (name.empty()) throw Error(ErrorCode::ParseError, "line " + std::to_string(reader.line()) + ": empty column name");
    if (!names.insert(name).second) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(reader.line()) +
                                             ": duplicate column '" + name + "'");
    }
    columns.push_back(Column{name, {}});
  }
  std::size_t cls = columns.size();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == class_column) cls = i;
  }
  if (cls == columns.size()) {
    throw Error(ErrorCode::MissingClassColumn, "no column named '" + std::string(class_column) + "'");
  }
  std::vector<int> cells;
  while (reader.next(fields)) {
    if (blank(fields)) continue;
    if (fields.size() != columns.size()) {
      throw Error(ErrorCode::RaggedRow, "line " + std::to_string(reader.line()) + " has " +
                                            std::to_string(fields.size()) + " fields, expected " +
                                            std::to_string(columns.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (fields[c] == missing_token) {
        cells.push_back(kMissing);
        continue;
      }
      auto idx = columns[c].state_index(fields[c]);
      if (!idx) {
        columns[c].states.push_back(fields[c]);
        idx = columns[c].states.size() - 1;
      }
      cells.push_back(static_cast<int>(*idx));
    }
  }
  return Dataset(std::move(columns), std::move(cells), cls);
}

Dataset load_dataset_file(const std::filesystem::path& path, std::string_view class_column,
                          std::string_view missing_token) {
  return load_dataset(read_file(path), class_column, missing_token);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

json edit_to_json(const NetworkStructure& structure, const CandidateEdit& edit) {
  json doc = {{"kind", to_string(edit.kind)},
              {"node_a", structure.variable(edit.node_a).name},
              {"node_b", structure.variable(edit.node_b).name}};
  if (edit.direction) doc["direction"] = *edit.direction == Direction::AtoB ? "a_to_b" : "b_to_a";
  return doc;
}

CandidateEdit edit_from_json(const NetworkStructure& structure, const json& doc) {
  CandidateEdit edit;
  const std::string kind = require_string(doc, "kind", "");
  if (kind == "add") edit.kind = EditKind::Add;
  else if (kind == "remove") edit.kind = EditKind::Remove;
  else if (kind == "reverse") edit.kind = EditKind::Reverse;
  else schema_error("kind", "expected add, remove or reverse");
  edit.node_a = require_variable(structure, require_string(doc, "node_a", ""), "node_a");
  edit.node_b = require_variable(structure, require_string(doc, "node_b", ""), "node_b");
  if (edit.node_a == edit.node_b) schema_error("node_b", "must differ from node_a");
  if (const auto it = doc.find("direction"); it != doc.end() && !it->is_null()) {
    if (*it == "a_to_b") edit.direction = Direction::AtoB;
    else if (*it == "b_to_a") edit.direction = Direction::BtoA;
    else schema_error("direction", "expected a_to_b or b_to_a");
  }
  if (edit.kind == EditKind::Add && !edit.direction) schema_error("direction", "required for add");
  if (edit.kind != EditKind::Add) edit.direction.reset();
  if (edit.node_a > edit.node_b) {
    std::swap(edit.node_a, edit.node_b);
    if (edit.direction) {
      edit.direction = *edit.direction == Direction::AtoB ? Direction::BtoA : Direction::AtoB;
    }
  }
  return edit;
}

json pr_points_to_json(const std::vector<PrPoint>& points) {
  json out = json::array();
  for (const PrPoint& p : points) {
    out.push_back({{"threshold", p.threshold},
                   {"precision", p.precision ? json(*p.precision) : json(nullptr)},
                   {"recall", p.recall},
                   {"tp", p.counts.tp},
                   {"fp", p.counts.fp},
                   {"fn", p.counts.fn},
                   {"tn", p.counts.tn}});
  }
  return out;
}

namespace {

json header(const char* kind, const ReportContext& context) {
  json doc = json::object();
  doc["format_version"] = kReportFormatVersion;
  doc["kind"] = kind;
  doc["rng"] = std::string(Rng::kAlgorithm);
  doc["created_at"] = context.created_at;
  doc["inputs"] = context.input_digests;
  return doc;
}

const char* policy_name(RejectPolicy p) { return p == RejectPolicy::Count ? "count" : "redraw"; }

json refine_config_json(const RefinementConfig& c) {
  return {{"iterations", c.iterations},       {"seed", c.seed},
          {"threshold", c.threshold},         {"pseudocount", c.pseudocount},
          {"positive_state", c.positive_state}, {"reject_policy", policy_name(c.reject_policy)},
          {"keep_supplied_cpts", c.keep_supplied_cpts}};
}

json candidate_json(const NetworkStructure& s, const CandidateResult& r) {
  json doc = edit_to_json(s, r.edit);
  doc["index"] = r.edit.sequence_index;
  if (r.train_score) {
    doc["status"] = "scored";
    doc["train_cci"] = *r.train_score;
  } else {
    doc["status"] = "rejected";
    doc["reason"] = r.rejection ? to_string(*r.rejection) : "unknown";
  }
  return doc;
}

json best_edit_json(const RefinementRun& run) {
  if (!run.best_edit_index) return nullptr;
  return candidate_json(run.original.structure(), run.candidates[*run.best_edit_index]);
}

}  // namespace

json refinement_report(const RefinementRun& run, const Dataset& test, const ReportContext& context) {
  json doc = header("refine", context);
  doc["config"] = refine_config_json(run.config);
  doc["original"] = {{"train_cci", run.original_train_score},
                     {"test_cci", run.original_test_score},
                     {"network", network_to_json(run.original)}};
  doc["best"] = {{"train_cci", run.best_train_score},
                 {"test_cci", run.best_test_score},
                 {"edit_index", run.best_edit_index ? json(*run.best_edit_index) : json(nullptr)},
                 {"edit", best_edit_json(run)},
                 {"edit_distance", edit_distance(run.original.structure(), run.best.structure())},
                 {"network", network_to_json(run.best)}};
  json candidates = json::array();
  for (const auto& c : run.candidates) candidates.push_back(candidate_json(run.original.structure(), c));
  doc["candidates"] = std::move(candidates);
  const auto grid = default_threshold_grid();
  doc["pr"] = {
      {"original", pr_points_to_json(pr_curve(run.original, test, run.config.positive_state, grid))},
      {"best", pr_points_to_json(pr_curve(run.best, test, run.config.positive_state, grid))}};
  return doc;
}

json evaluation_report(const EvaluationReport& report, const ReportContext& context) {
  json doc = header("evaluate", context);
  const EvalConfig& c = report.config;
  json config = {{"folds", report.plan.k},
                 {"seed", report.plan.seed},
                 {"stratified", report.plan.stratified},
                 {"threshold", c.threshold},
                 {"pseudocount", c.pseudocount},
                 {"positive_state", c.positive_state},
                 {"thresholds", c.thresholds},
                 {"keep_supplied_cpts", c.keep_supplied_cpts}};
  json names = json::array();
  doc["fold_sizes"] = report.plan.fold_sizes();
  doc["baseline_precision"] = report.baseline_precision;
  json learners = json::array();
  json table = json::array();
  for (const LearnerResult& l : report.learners) {
    names.push_back(l.name);
    json folds = json::array();
    for (const FoldOutcome& f : l.folds) {
      json fold = {{"fold", f.fold},
                   {"train_rows", f.train_rows},
                   {"test_rows", f.test_rows},
                   {"cci", f.cci},
                   {"edge_count", f.model.structure().edges().size()}};
      if (f.refinement) {
        const RefinementRun& run = *f.refinement;
        fold["original_train_cci"] = run.original_train_score;
        fold["best_train_cci"] = run.best_train_score;
        fold["best_edit"] = best_edit_json(run);
        fold["rejected_candidates"] = std::count_if(run.candidates.begin(), run.candidates.end(),
                                                    [](const CandidateResult& r) { return !r.train_score; });
      }
      folds.push_back(std::move(fold));
    }
    learners.push_back({{"name", l.name},
                        {"kind", to_string(l.kind)},
                        {"folds", std::move(folds)},
                        {"macro_cci", l.macro_cci},
                        {"pr", pr_points_to_json(l.pr)}});
    table.push_back({{"learner", l.name}, {"macro_cci", l.macro_cci}});
  }
  config["learners"] = std::move(names);
  for (const LearnerResult& l : report.learners) {
    if (l.kind == LearnerSpec::Kind::ExpertBayes && !l.folds.empty() && l.folds[0].refinement) {
      const RefinementConfig& rc = l.folds[0].refinement->config;
      config["iterations"] = rc.iterations;
      config["refine_seed"] = rc.seed;
      config["reject_policy"] = policy_name(rc.reject_policy);
    }
  }
  doc["config"] = std::move(config);
  doc["learners"] = std::move(learners);
  doc["cci_table"] = std::move(table);
  json sig = json::array();
  for (const auto& s : report.significance) {
    sig.push_back({{"first", s.first}, {"second", s.second}, {"paired_t_p", s.paired_t_p},
                   {"mcnemar_p", s.mcnemar_p}});
  }
  doc["significance"] = std::move(sig);
  return doc;
}

json learn_report(const Network& network, std::string_view algorithm, const K2Config& k2,
                  double pseudocount, const ReportContext& context) {
  json doc = header("learn", context);
  json config = {{"algorithm", algorithm}, {"pseudocount", pseudocount}};
  if (algorithm == "k2") {
    config["max_parents"] = k2.max_parents;
    config["start_naive"] = k2.start_naive;
    config["ordering"] = k2.ordering;
  }
  doc["config"] = std::move(config);
  doc["edge_count"] = network.structure().edges().size();
  doc["network"] = network_to_json(network);
  return doc;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string stable_dump(json doc) {
  doc.erase("created_at");
  return dump(doc);
}

std::string pr_table(const EvaluationReport& report) {
  std::string out = "learner\tthreshold\tprecision\trecall\ttp\tfp\tfn\ttn\n";
  for (const LearnerResult& l : report.learners) {
    for (const PrPoint& p : l.pr) {
      out += l.name + "\t" + json(p.threshold).dump() + "\t" +
             (p.precision ? json(*p.precision).dump() : std::string("NA")) + "\t" +
             json(p.recall).dump() + "\t" + std::to_string(p.counts.tp) + "\t" +
             std::to_string(p.counts.fp) + "\t" + std::to_string(p.counts.fn) + "\t" +
             std::to_string(p.counts.tn) + "\n";
    }
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace expertbayes::io
