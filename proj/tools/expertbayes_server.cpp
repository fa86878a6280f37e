// HTTP job server for datasets, networks and refinement runs.

#include <pthread.h>
#include <signal.h>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "expertbayes/error.hpp"
#include "expertbayes/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"expertbayes HTTP service"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string storage_dir;
  std::string static_dir;
  unsigned job_workers = 1;
  std::string cors_origin = "*";
  app.add_option("--host", host, "Listen address")->capture_default_str();
  app.add_option("--port", port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535))->capture_default_str();
  app.add_option("--storage-dir", storage_dir, "Directory for stored datasets, networks and jobs")->required();
  app.add_option("--static-dir", static_dir, "Serve a built UI from this directory")->check(CLI::ExistingDirectory);
  app.add_option("--job-workers", job_workers, "Jobs run concurrently")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--cors-origin", cors_origin, "Access-Control-Allow-Origin value")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // Blocked before any thread starts so only sigwait below sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  try {
    expertbayes::service::Options options;
    options.storage_dir = storage_dir;
    if (!static_dir.empty()) options.static_dir = static_dir;
    options.job_workers = job_workers;
    options.cors_origin = cors_origin;
    expertbayes::service::Server server(options);
    const int bound = server.start(host, port);
    std::printf("listening on %s:%d\n", host.c_str(), bound);
    std::fflush(stdout);
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  } catch (const expertbayes::Error& e) {
    std::fprintf(stderr, "expertbayes-server: %s\n", e.what());
    return 3;
  }
  return 0;
}
