#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace expertbayes::service {

struct Options {
  std::filesystem::path storage_dir;
  std::optional<std::filesystem::path> static_dir;  // mounted at "/" when set
  std::string cors_origin = "*";
  unsigned job_workers = 1;  // jobs run FIFO on this many threads
};

// HTTP/JSON facade over the workflow layer.
//
//   POST /v1/datasets?class=C[&missing=?]   CSV body            -> {"id", ...}
//   GET  /v1/datasets[/{id}]
//   POST /v1/networks                       network document    -> {"id", "network"}
//   GET  /v1/networks[/{id}]
//   POST /v1/networks/{id}/edits            edit document       -> {"id", "parent", "network"}
//   GET  /v1/networks/{id}/versions                             -> root..id chain
//   GET  /v1/networks/{id}/screen?dataset=D[&threshold=0.9]
//   POST /v1/jobs                           {"kind", "network", "dataset", "test_dataset", "config"} -> 202
//   GET  /v1/jobs[/{id}]
//   GET  /v1/jobs/{id}/result | /pr         404 until done
//   DELETE /v1/jobs/{id}                    cancel
//
// Errors are {"error": {"code", "message"}} with 400 for malformed input,
// 404 for unknown ids, 409 for structural conflicts and 422 when a dataset
// does not fit a network. Stored datasets and networks are content addressed
// (sha256) files under storage_dir and never change once written.
class Server {
 public:
  explicit Server(Options options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and serves on a background thread. Port 0 picks a free port.
  // Returns the bound port; throws Error(Io) when binding fails.
  int start(const std::string& host, int port);
  // Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace expertbayes::service
