#include <doctest.h>

#include <string>

#include "expertbayes/cpt_learning.hpp"
#include "expertbayes/error.hpp"
#include "expertbayes/io.hpp"
#include "oracles.hpp"

using namespace expertbayes;
using doctest::Approx;
using nlohmann::json;

namespace {

const std::string kData = EB_DATA_DIR;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

json two_nodes() {
  return json::parse(R"({
    "class_variable": "C",
    "edges": [{"parent": "C", "child": "A"}],
    "format_version": 1,
    "variables": [{"name": "C", "states": ["pos", "neg"]}, {"name": "A", "states": ["a0", "a1"]}]
  })");
}

}  // namespace

TEST_CASE("minimal document round-trips byte for byte") {
  const std::string text = io::dump(two_nodes());
  const Network net = io::load_network(text);
  CHECK(net.structure().size() == 2);
  CHECK(net.structure().has_edge(0, 1));
  CHECK_FALSE(net.fully_estimated());
  CHECK(io::save_network(net) == text);
}

TEST_CASE("tables survive a round trip") {
  const Network net = io::load_network_file(kData + "/prostate/network.json");
  const Dataset data = io::load_dataset_file(kData + "/prostate/prostate.csv", "status");
  const Network fitted = fit_parameters(net, data, 1.0);
  const std::string text = io::save_network(fitted);
  const Network back = io::load_network(text);
  CHECK(back == fitted);
  CHECK(io::save_network(back) == text);
}

TEST_CASE("listed parent order is mapped onto the internal layout") {
  // B has parents listed (C, A); internally they are ascending (A, C).
  json doc = json::parse(R"({
    "class_variable": "C", "format_version": 1,
    "variables": [{"name": "A", "states": ["a0", "a1"]}, {"name": "B", "states": ["b0", "b1"]},
                  {"name": "C", "states": ["c0", "c1"]}],
    "edges": [{"parent": "A", "child": "B"}, {"parent": "C", "child": "B"}],
    "cpts": [{"variable": "B", "parents": ["C", "A"],
              "rows": [[0.1, 0.9], [0.2, 0.8], [0.3, 0.7], [0.4, 0.6]]}]
  })");
  const Network net = io::network_from_json(doc);
  const Cpt& b = net.cpt(1);
  CHECK(b.parents() == std::vector<std::size_t>{0, 2});
  CHECK(b.estimated());
  // Listed row (C=c1, A=a0) is index 2; internal (A=a0, C=c1) is index 1.
  CHECK(b.probability(1, 0) == Approx(0.3));
  CHECK(b.probability(2, 0) == Approx(0.2));
}

TEST_CASE("network document errors") {
  json unknown = two_nodes();
  unknown["edges"][0]["child"] = "Ghost";
  CHECK(code_of([&] { io::network_from_json(unknown); }) == ErrorCode::ParseError);
  CHECK(message_of([&] { io::network_from_json(unknown); }).find("Ghost") != std::string::npos);

  json cyclic = json::parse(R"({
    "class_variable": "A", "format_version": 1,
    "variables": [{"name": "A", "states": ["0", "1"]}, {"name": "B", "states": ["0", "1"]},
                  {"name": "C", "states": ["0", "1"]}],
    "edges": [{"parent": "A", "child": "B"}, {"parent": "B", "child": "C"}, {"parent": "C", "child": "A"}]
  })");
  CHECK(code_of([&] { io::network_from_json(cyclic); }) == ErrorCode::CyclicStructure);

  json future = two_nodes();
  future["format_version"] = 99;
  CHECK(code_of([&] { io::network_from_json(future); }) == ErrorCode::SchemaVersionUnsupported);

  json bad_row = two_nodes();
  bad_row["cpts"] = json::parse(R"([{"variable": "C", "parents": [], "rows": [[0.5, 0.6]]}])");
  CHECK(code_of([&] { io::network_from_json(bad_row); }) == ErrorCode::ParseError);

  CHECK(code_of([] { io::load_network("{not json"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { io::load_network_file("/nonexistent/net.json"); }) == ErrorCode::Io);
}

TEST_CASE("dataset loading") {
  const Dataset d = io::load_dataset("C,A\npos,a0\npos,a0\npos,a1\nneg,a1\n", "C");
  CHECK(d.row_count() == 4);
  CHECK(d.column_count() == 2);
  CHECK(d.column(0).states == std::vector<std::string>{"pos", "neg"});
  CHECK(d.column(1).states == std::vector<std::string>{"a0", "a1"});

  const Dataset m = io::load_dataset("C,A\npos,?\nneg,a1\n", "C", "?");
  CHECK(m.cell(0, 1) == kMissing);
  CHECK(m.column(1).states == std::vector<std::string>{"a1"});

  const Dataset q = io::load_dataset("C,\"A,x\"\n\"p\"\"q\",1\nn,2\n", "C");
  CHECK(q.column(1).name == "A,x");
  CHECK(q.column(0).states[0] == "p\"q");

  const Dataset crlf = io::load_dataset("C,A\r\npos,a0\r\nneg,a1\r\n", "C");
  CHECK(crlf.column(1).states == std::vector<std::string>{"a0", "a1"});

  CHECK(code_of([] { io::load_dataset("C,A\npos\n", "C"); }) == ErrorCode::RaggedRow);
  CHECK(code_of([] { io::load_dataset("C,A\npos,a\nneg,b\n", "Z"); }) == ErrorCode::MissingClassColumn);
  CHECK(code_of([] { io::load_dataset("C,A\npos,a\npos,b\n", "C"); }) == ErrorCode::SingleStateClass);
  CHECK(code_of([] { io::load_dataset("C,A\n\"pos,a\n", "C"); }) == ErrorCode::ParseError);
}

TEST_CASE("prostate fixture shape") {
  const Dataset d = io::load_dataset_file(kData + "/prostate/prostate.csv", "status");
  CHECK(d.row_count() == 496);
  CHECK(d.column_count() == 11);
  std::size_t survived = 0;
  const auto idx = d.class_info().state_index("survived");
  REQUIRE(idx.has_value());
  for (std::size_t r = 0; r < d.row_count(); ++r) survived += d.cell(r, d.class_column()) == static_cast<int>(*idx);
  CHECK(survived == 144);
}

TEST_CASE("edit documents") {
  const NetworkStructure s({{"A", {"0", "1"}}, {"B", {"0", "1"}}}, {});
  const CandidateEdit add{EditKind::Add, 0, 1, Direction::BtoA, 0};
  const json doc = io::edit_to_json(s, add);
  CHECK(doc["kind"] == "add");
  CHECK(doc["direction"] == "b_to_a");
  const CandidateEdit back = io::edit_from_json(s, doc);
  CHECK(back.kind == add.kind);
  CHECK(back.direction == add.direction);
  // Names given in reverse order are normalised.
  const CandidateEdit swapped =
      io::edit_from_json(s, json::parse(R"({"kind": "add", "node_a": "B", "node_b": "A", "direction": "a_to_b"})"));
  CHECK(swapped.node_a == 0);
  CHECK(swapped.direction == Direction::BtoA);
  CHECK(code_of([&] { io::edit_from_json(s, json::parse(R"({"kind": "twist"})")); }) == ErrorCode::ParseError);
}

TEST_CASE("canonical dumps") {
  json doc = {{"b", 1}, {"a", {{"z", 0.1}, {"created_at", "kept"}}}, {"created_at", "x"}};
  const std::string text = io::dump(doc);
  CHECK(text.back() == '\n');
  CHECK(text.find("\"a\"") < text.find("\"b\""));
  const std::string stable = io::stable_dump(doc);
  CHECK(stable.find("\"x\"") == std::string::npos);
  CHECK(stable.find("kept") != std::string::npos);
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("golden refine report agrees with exhaustive scoring") {
  const json golden = json::parse(io::read_file(kData + "/synthetic3/refine_seed7.json"));
  const Network net = io::load_network_file(kData + "/synthetic3/network.json");
  const Dataset train = io::load_dataset_file(kData + "/synthetic3/train.csv", "C");
  const auto exhaustive = oracle::exhaustive_single_edit(net, train, 0.5, 0, 1.0);
  CHECK(golden["best"]["train_cci"].get<double>() == Approx(exhaustive.best_score).epsilon(1e-12));
  CHECK(golden["original"]["train_cci"].get<double>() == Approx(exhaustive.original_score).epsilon(1e-12));
  CHECK(golden["best"]["edit_distance"] == 1);
  CHECK_FALSE(golden.contains("created_at"));
  CHECK(golden["rng"] == "mt19937_64");
  CHECK(golden["candidates"].size() == 100);
}
