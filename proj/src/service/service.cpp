#include "expertbayes/service.hpp"

#include <atomic>
#include <algorithm>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "expertbayes/error.hpp"
#include "expertbayes/io.hpp"
#include "expertbayes/workflow.hpp"

namespace expertbayes::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Request-level failure that maps straight onto an HTTP status.
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

[[noreturn]] void not_found(const std::string& what) { throw HttpError{404, "NotFound", what}; }
[[noreturn]] void bad_request(const std::string& what) { throw HttpError{400, "BadRequest", what}; }

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleWouldForm:
    case ErrorCode::EditInapplicable:
    case ErrorCode::CyclicStructure:
      return 409;
    case ErrorCode::ColumnMismatch:
      return 422;
    default:
      return 400;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(io::dump(body), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const HttpError& e) {
    send_error(res, e.status, e.code, e.message);
  } catch (const Error& e) {
    send_error(res, status_for(e.code()), to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, "ParseError", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "Internal", e.what());
  }
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw HttpError{400, "ParseError", e.what()};
  }
}

void write_atomically(const fs::path& path, std::string_view bytes) {
  static std::atomic<unsigned long> counter{0};
  const fs::path tmp = path.string() + ".tmp" + std::to_string(counter++);
  io::write_file(tmp, bytes);
  fs::rename(tmp, path);
}

bool valid_id(const std::string& id) {
  return id.size() == 64 && id.find_first_not_of("0123456789abcdef") == std::string::npos;
}

// Content-addressed datasets and networks. Files are written once under
// their digest and never modified; parsed objects are cached.
class Store {
 public:
  explicit Store(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_ / "datasets");
    fs::create_directories(root_ / "networks");
    fs::create_directories(root_ / "jobs");
  }

  const fs::path& root() const { return root_; }

  std::string put_dataset(const std::string& body, const std::string& class_column,
                          const std::string& missing) {
    auto source = std::make_shared<workflow::Source>(
        workflow::Source{io::load_dataset(body, class_column, missing), io::sha256_hex(body)});
    const std::string id = io::sha256_hex(class_column + '\0' + missing + '\0' + body);
    std::lock_guard lock(mutex_);
    const fs::path csv = root_ / "datasets" / (id + ".csv");
    if (!fs::exists(csv)) {
      write_atomically(root_ / "datasets" / (id + ".meta.json"),
                       io::dump({{"class", class_column}, {"missing", missing}, {"digest", source->digest}}));
      write_atomically(csv, body);
    }
    datasets_.emplace(id, std::move(source));
    return id;
  }

  std::shared_ptr<const workflow::Source> dataset(const std::string& id) {
    if (!valid_id(id)) return nullptr;
    std::lock_guard lock(mutex_);
    if (auto it = datasets_.find(id); it != datasets_.end()) return it->second;
    const fs::path csv = root_ / "datasets" / (id + ".csv");
    if (!fs::exists(csv)) return nullptr;
    const json meta = json::parse(io::read_file(root_ / "datasets" / (id + ".meta.json")));
    const std::string body = io::read_file(csv);
    auto source = std::make_shared<workflow::Source>(workflow::Source{
        io::load_dataset(body, meta.at("class").get<std::string>(), meta.at("missing").get<std::string>()),
        io::sha256_hex(body)});
    datasets_.emplace(id, source);
    return source;
  }

  json dataset_meta(const std::string& id) {
    return json::parse(io::read_file(root_ / "datasets" / (id + ".meta.json")));
  }

  // `lineage` is {"parent": id|null, "edit": edit|null}; kept from the first
  // write when the same document is stored again.
  std::string put_network(const Network& network, const json& lineage) {
    const std::string text = io::save_network(network);
    const std::string id = io::sha256_hex(text);
    std::lock_guard lock(mutex_);
    const fs::path doc = root_ / "networks" / (id + ".json");
    if (!fs::exists(doc)) {
      write_atomically(root_ / "networks" / (id + ".meta.json"), io::dump(lineage));
      write_atomically(doc, text);
    }
    networks_.emplace(id, std::make_shared<const Network>(io::load_network(text)));
    return id;
  }

  std::shared_ptr<const Network> network(const std::string& id) {
    if (!valid_id(id)) return nullptr;
    std::lock_guard lock(mutex_);
    if (auto it = networks_.find(id); it != networks_.end()) return it->second;
    const fs::path doc = root_ / "networks" / (id + ".json");
    if (!fs::exists(doc)) return nullptr;
    auto net = std::make_shared<const Network>(io::load_network_file(doc));
    networks_.emplace(id, net);
    return net;
  }

  json network_meta(const std::string& id) {
    return json::parse(io::read_file(root_ / "networks" / (id + ".meta.json")));
  }

  std::vector<std::string> list(const char* kind, const char* suffix) {
    std::set<std::string> ids;
    std::lock_guard lock(mutex_);
    for (const auto& entry : fs::directory_iterator(root_ / kind)) {
      const std::string name = entry.path().filename().string();
      if (name.size() == 64 + std::strlen(suffix) && name.ends_with(suffix)) ids.insert(name.substr(0, 64));
    }
    return {ids.begin(), ids.end()};
  }

 private:
  fs::path root_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const workflow::Source>> datasets_;
  std::map<std::string, std::shared_ptr<const Network>> networks_;
};

enum class JobState { Queued, Running, Done, Failed };

const char* state_name(JobState s) {
  switch (s) {
    case JobState::Queued: return "queued";
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
  }
  return "unknown";
}

struct Job {
  std::string id;
  std::string kind;
  std::atomic<bool> cancel{false};
  // Inputs, resolved at submission.
  std::shared_ptr<const Network> network;
  std::shared_ptr<const workflow::Source> data;
  std::shared_ptr<const workflow::Source> test;
  workflow::RefineParams refine;
  workflow::EvalParams evaluate;
  workflow::LearnParams learn;
  // Guarded by the job table mutex.
  JobState state = JobState::Queued;
  std::size_t done = 0, total = 0;
  std::optional<json> result;
  std::optional<json> error;
  std::optional<std::string> network_id;  // learn jobs
};

template <typename T>
T config_value(const json& config, const char* key, T fallback) {
  if (!config.contains(key)) return fallback;
  try {
    return config.at(key).get<T>();
  } catch (const json::exception&) {
    bad_request(std::string("config field '") + key + "' has the wrong type");
  }
}

void check_keys(const json& config, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : config.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      bad_request("unknown config field '" + key + "'");
    }
  }
}

RejectPolicy policy_from(const std::string& name) {
  if (name == "count") return RejectPolicy::Count;
  if (name == "redraw") return RejectPolicy::Redraw;
  bad_request("reject_policy must be 'count' or 'redraw'");
}

void require_fit(const Network& network, const workflow::Source& source) {
  BoundData(network.structure(), source.data);  // throws ColumnMismatch -> 422
}

}  // namespace

struct Server::Impl {
  Options options;
  Store store;
  httplib::Server http;
  std::thread http_thread;

  std::mutex jobs_mutex;
  std::condition_variable jobs_ready;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::deque<std::shared_ptr<Job>> queue;
  std::vector<std::thread> workers;
  std::size_t next_job = 1;
  bool stopping = false;

  explicit Impl(Options opts) : options(std::move(opts)), store(options.storage_dir) {
    if (options.static_dir && !http.set_mount_point("/", options.static_dir->string())) {
      throw Error(ErrorCode::Io, "static directory '" + options.static_dir->string() + "' not found");
    }
    routes();
    for (unsigned i = 0; i < std::max(1u, options.job_workers); ++i) {
      workers.emplace_back([this] { work(); });
    }
  }

  ~Impl() {
    http.stop();
    if (http_thread.joinable()) http_thread.join();
    {
      std::lock_guard lock(jobs_mutex);
      stopping = true;
      for (auto& [id, job] : jobs) job->cancel = true;
    }
    jobs_ready.notify_all();
    for (auto& t : workers) t.join();
  }

  // --- jobs ---------------------------------------------------------------

  void work() {
    for (;;) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(jobs_mutex);
        jobs_ready.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        job = queue.front();
        queue.pop_front();
        if (job->cancel) {
          job->state = JobState::Failed;
          job->error = json{{"code", "Cancelled"}, {"message", "cancelled before start"}};
          persist(*job);
          continue;
        }
        job->state = JobState::Running;
      }
      execute(*job);
    }
  }

  void execute(Job& job) {
    workflow::Progress progress;
    progress.cancel = &job.cancel;
    progress.on_progress = [&](std::size_t done, std::size_t total) {
      std::lock_guard lock(jobs_mutex);
      job.done = std::max(job.done, done);
      job.total = total;
    };
    std::optional<json> result, error;
    std::optional<std::string> network_id;
    try {
      if (job.kind == "refine") {
        std::optional<workflow::Source> test;
        if (job.test) test = *job.test;
        result = workflow::run_refine(*job.network, *job.data, test, job.refine, progress).report;
      } else if (job.kind == "evaluate") {
        std::optional<Network> net;
        if (job.network) net = *job.network;
        result = workflow::run_evaluate(net, *job.data, job.evaluate, progress).report;
      } else {
        workflow::Outcome out = workflow::run_learn(*job.data, job.learn);
        network_id = store.put_network(*out.network, {{"parent", nullptr}, {"edit", nullptr}});
        result = std::move(out.report);
      }
    } catch (const Error& e) {
      error = json{{"code", to_string(e.code())}, {"message", e.what()}};
    } catch (const std::exception& e) {
      error = json{{"code", "Internal"}, {"message", e.what()}};
    }
    std::lock_guard lock(jobs_mutex);
    if (result) {
      job.result = std::move(result);
      job.network_id = std::move(network_id);
      job.state = JobState::Done;
      job.done = job.total;
    } else {
      job.error = std::move(error);
      job.state = JobState::Failed;
    }
    persist(job);
  }

  // Caller holds jobs_mutex.
  json record(const Job& job) const {
    json doc = {{"id", job.id},
                {"kind", job.kind},
                {"state", state_name(job.state)},
                {"progress", {{"done", job.done}, {"total", job.total}}}};
    if (job.result) doc["result"] = *job.result;
    if (job.error) doc["error"] = *job.error;
    if (job.network_id) doc["network_id"] = *job.network_id;
    return doc;
  }

  void persist(const Job& job) {
    try {
      write_atomically(store.root() / "jobs" / (job.id + ".json"), io::dump(record(job)));
    } catch (const std::exception&) {
      // the in-memory record stays authoritative
    }
  }

  std::shared_ptr<Job> find_job(const std::string& id) {
    std::lock_guard lock(jobs_mutex);
    auto it = jobs.find(id);
    if (it == jobs.end()) not_found("unknown job '" + id + "'");
    return it->second;
  }

  std::shared_ptr<const Network> network_ref(const json& body, const char* key, bool required) {
    if (!body.contains(key) || body.at(key).is_null()) {
      if (required) bad_request(std::string("'") + key + "' is required");
      return nullptr;
    }
    const std::string id = body.at(key).get<std::string>();
    auto net = store.network(id);
    if (!net) not_found("unknown network '" + id + "'");
    return net;
  }

  std::shared_ptr<const workflow::Source> dataset_ref(const json& body, const char* key, bool required) {
    if (!body.contains(key) || body.at(key).is_null()) {
      if (required) bad_request(std::string("'") + key + "' is required");
      return nullptr;
    }
    const std::string id = body.at(key).get<std::string>();
    auto data = store.dataset(id);
    if (!data) not_found("unknown dataset '" + id + "'");
    return data;
  }

  std::shared_ptr<Job> make_job(const json& body) {
    if (!body.is_object()) bad_request("job request must be an object");
    auto job = std::make_shared<Job>();
    job->kind = body.value("kind", "");
    const json config = body.value("config", json::object());
    if (!config.is_object()) bad_request("'config' must be an object");
    job->data = dataset_ref(body, "dataset", true);

    if (job->kind == "refine") {
      check_keys(config, {"iterations", "seed", "threshold", "pseudocount", "positive_state",
                          "reject_policy", "keep_supplied_cpts", "folds", "stratified"});
      job->network = network_ref(body, "network", true);
      RefinementConfig& c = job->refine.config;
      c.iterations = config_value<std::size_t>(config, "iterations", 100);
      c.seed = config_value<std::uint64_t>(config, "seed", 0);
      c.threshold = config_value<double>(config, "threshold", 0.5);
      c.pseudocount = config_value<double>(config, "pseudocount", 1.0);
      c.positive_state =
          workflow::positive_or_default(job->data->data, config_value<std::string>(config, "positive_state", ""));
      c.reject_policy = policy_from(config_value<std::string>(config, "reject_policy", "count"));
      c.keep_supplied_cpts = config_value<bool>(config, "keep_supplied_cpts", false);
      c.validate();
      job->refine.stratified = config_value<bool>(config, "stratified", true);
      if (config.contains("folds")) {
        job->refine.folds = config_value<std::size_t>(config, "folds", 5);
        if (*job->refine.folds < 2) bad_request("folds must be >= 2");
      } else {
        job->test = dataset_ref(body, "test_dataset", true);
        require_fit(*job->network, *job->test);
      }
      require_fit(*job->network, *job->data);
    } else if (job->kind == "evaluate") {
      check_keys(config, {"learners", "folds", "seed", "stratified", "threshold", "pseudocount",
                          "positive_state", "iterations", "reject_policy", "max_parents",
                          "keep_supplied_cpts"});
      job->network = network_ref(body, "network", false);
      workflow::EvalParams& p = job->evaluate;
      p.learners = config_value<std::vector<std::string>>(config, "learners", {"original", "expertbayes", "k2", "tan"});
      p.folds = config_value<std::size_t>(config, "folds", 5);
      if (p.folds < 2) bad_request("folds must be >= 2");
      p.seed = config_value<std::uint64_t>(config, "seed", 0);
      p.stratified = config_value<bool>(config, "stratified", true);
      p.threshold = config_value<double>(config, "threshold", 0.5);
      p.pseudocount = config_value<double>(config, "pseudocount", 1.0);
      p.positive_state =
          workflow::positive_or_default(job->data->data, config_value<std::string>(config, "positive_state", ""));
      p.iterations = config_value<std::size_t>(config, "iterations", 100);
      p.reject_policy = policy_from(config_value<std::string>(config, "reject_policy", "count"));
      p.max_parents = config_value<std::size_t>(config, "max_parents", 1);
      p.keep_supplied_cpts = config_value<bool>(config, "keep_supplied_cpts", false);
      for (const std::string& name : p.learners) {
        if (name != "original" && name != "expertbayes" && name != "k2" && name != "tan") {
          bad_request("unknown learner '" + name + "'");
        }
        if ((name == "original" || name == "expertbayes") && !job->network) {
          bad_request("learner '" + name + "' needs 'network'");
        }
      }
      if (p.learners.empty()) bad_request("no learners given");
      if (job->network) require_fit(*job->network, *job->data);
    } else if (job->kind == "learn") {
      check_keys(config, {"algorithm", "max_parents", "pseudocount"});
      job->learn.algorithm = config_value<std::string>(config, "algorithm", "");
      if (job->learn.algorithm != "k2" && job->learn.algorithm != "tan") {
        bad_request("algorithm must be 'k2' or 'tan'");
      }
      job->learn.max_parents = config_value<std::size_t>(config, "max_parents", 1);
      job->learn.pseudocount = config_value<double>(config, "pseudocount", 1.0);
    } else {
      bad_request("kind must be 'refine', 'evaluate' or 'learn'");
    }
    return job;
  }

  // --- routes ---------------------------------------------------------------

  void routes() {
    http.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
    http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        send_error(res, res.status, res.status == 404 ? "NotFound" : "HttpError",
                   "status " + std::to_string(res.status));
      }
    });

    http.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}, {"rng", Rng::kAlgorithm}});
    });

    http.Post("/v1/datasets", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        if (!req.has_param("class")) bad_request("query parameter 'class' is required");
        const std::string missing = req.has_param("missing") ? req.get_param_value("missing") : "?";
        const std::string id = store.put_dataset(req.body, req.get_param_value("class"), missing);
        send_json(res, 201, dataset_summary(id));
      });
    });
    http.Get("/v1/datasets", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, {{"datasets", store.list("datasets", ".csv")}}); });
    });
    http.Get(R"(/v1/datasets/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        if (!store.dataset(id)) not_found("unknown dataset '" + id + "'");
        send_json(res, 200, dataset_summary(id));
      });
    });

    http.Post("/v1/networks", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const Network network = io::load_network(req.body);
        const std::string id = store.put_network(network, {{"parent", nullptr}, {"edit", nullptr}});
        send_json(res, 201, {{"id", id}, {"network", io::network_to_json(network)}});
      });
    });
    http.Get("/v1/networks", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, {{"networks", store.list("networks", ".json")}}); });
    });
    http.Get(R"(/v1/networks/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        auto net = store.network(id);
        if (!net) not_found("unknown network '" + id + "'");
        res.status = 200;
        res.set_content(io::save_network(*net), "application/json");
      });
    });
    http.Post(R"(/v1/networks/([^/]+)/edits)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        auto net = store.network(id);
        if (!net) not_found("unknown network '" + id + "'");
        const json body = parse_body(req);
        const CandidateEdit edit = io::edit_from_json(net->structure(), body);
        const Network edited = apply_edit(*net, edit);
        const std::string child =
            store.put_network(edited, {{"parent", id}, {"edit", io::edit_to_json(net->structure(), edit)}});
        send_json(res, 200, {{"id", child}, {"parent", id}, {"network", io::network_to_json(edited)}});
      });
    });
    http.Get(R"(/v1/networks/([^/]+)/versions)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::string id = req.matches[1];
        if (!store.network(id)) not_found("unknown network '" + id + "'");
        json chain = json::array();
        std::set<std::string> seen;
        while (seen.insert(id).second) {
          const json meta = store.network_meta(id);
          chain.push_back({{"id", id}, {"parent", meta.at("parent")}, {"edit", meta.at("edit")}});
          if (meta.at("parent").is_null()) break;
          id = meta.at("parent").get<std::string>();
        }
        std::reverse(chain.begin(), chain.end());
        send_json(res, 200, {{"versions", std::move(chain)}});
      });
    });
    http.Get(R"(/v1/networks/([^/]+)/screen)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        auto net = store.network(id);
        if (!net) not_found("unknown network '" + id + "'");
        if (!req.has_param("dataset")) bad_request("query parameter 'dataset' is required");
        auto data = store.dataset(req.get_param_value("dataset"));
        if (!data) not_found("unknown dataset '" + req.get_param_value("dataset") + "'");
        require_fit(*net, *data);
        double threshold = 0.9;
        if (req.has_param("threshold")) {
          try {
            threshold = std::stod(req.get_param_value("threshold"));
          } catch (const std::exception&) {
            bad_request("threshold must be a number");
          }
        }
        json report = workflow::screen_report(data->data, threshold);
        // Only pairs of variables the network models.
        json kept = json::array();
        for (const json& w : report["warnings"]) {
          if (net->structure().index_of(w["first"].get<std::string>()) &&
              net->structure().index_of(w["second"].get<std::string>())) {
            kept.push_back(w);
          }
        }
        report["warnings"] = std::move(kept);
        report["network"] = id;
        report["dataset"] = req.get_param_value("dataset");
        send_json(res, 200, report);
      });
    });

    http.Post("/v1/jobs", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto job = make_job(parse_body(req));
        json doc;
        {
          std::lock_guard lock(jobs_mutex);
          job->id = "job-" + std::to_string(next_job++);
          jobs.emplace(job->id, job);
          queue.push_back(job);
          doc = record(*job);
        }
        jobs_ready.notify_one();
        res.set_header("Location", "/v1/jobs/" + job->id);
        send_json(res, 202, doc);
      });
    });
    http.Get("/v1/jobs", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        json list = json::array();
        std::lock_guard lock(jobs_mutex);
        for (const auto& [id, job] : jobs) {
          list.push_back({{"id", id}, {"kind", job->kind}, {"state", state_name(job->state)}});
        }
        send_json(res, 200, {{"jobs", std::move(list)}});
      });
    });
    http.Get(R"(/v1/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto job = find_job(req.matches[1]);
        std::lock_guard lock(jobs_mutex);
        send_json(res, 200, record(*job));
      });
    });
    http.Get(R"(/v1/jobs/([^/]+)/result)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto job = find_job(req.matches[1]);
        std::lock_guard lock(jobs_mutex);
        if (!job->result) not_found("job '" + job->id + "' is " + state_name(job->state));
        send_json(res, 200, *job->result);
      });
    });
    http.Get(R"(/v1/jobs/([^/]+)/pr)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto job = find_job(req.matches[1]);
        std::lock_guard lock(jobs_mutex);
        if (!job->result) not_found("job '" + job->id + "' is " + state_name(job->state));
        json series = json::object();
        if (job->kind == "refine" && job->result->contains("pr")) {
          series = job->result->at("pr");
        } else if (job->result->contains("learners")) {
          for (const json& l : job->result->at("learners")) series[l.at("name").get<std::string>()] = l.at("pr");
        } else {
          not_found("job '" + job->id + "' has no PR series");
        }
        send_json(res, 200, {{"job", job->id}, {"series", std::move(series)}});
      });
    });
    http.Delete(R"(/v1/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto job = find_job(req.matches[1]);
        job->cancel = true;
        std::lock_guard lock(jobs_mutex);
        send_json(res, 202, record(*job));
      });
    });
  }

  json dataset_summary(const std::string& id) {
    auto source = store.dataset(id);
    const json meta = store.dataset_meta(id);
    json columns = json::array();
    for (const Column& c : source->data.columns()) columns.push_back({{"name", c.name}, {"states", c.states}});
    return {{"id", id},
            {"class", meta.at("class")},
            {"missing", meta.at("missing")},
            {"digest", meta.at("digest")},
            {"rows", source->data.row_count()},
            {"columns", std::move(columns)}};
  }
};

Server::Server(Options options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() = default;

int Server::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->http.bind_to_any_port(host);
  } else if (!impl_->http.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  impl_->http_thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return bound;
}

void Server::run(const std::string& host, int port) {
  if (!impl_->http.listen(host, port)) {
    throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void Server::stop() { impl_->http.stop(); }

}  // namespace expertbayes::service
