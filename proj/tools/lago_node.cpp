// lago-node: repository node service.
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "lago/common/error.hpp"
#include "lago/federation/node.hpp"

using namespace lago;

namespace {

int serve(const federation::NodeConfig& config) {
  // Signals are taken synchronously by one thread so shutdown runs outside a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  http::HttpTransport transport;
  federation::Node node(config, SystemClock::instance(), transport);
  http::Server server([&node](const http::Request& r) { return node.handle(r); });
  try {
    server.bind(config.bind_host(), config.bind_port());
  } catch (const Error& e) {
    std::cerr << "lago-node: cannot listen on port " << config.bind_port() << ": " << e.what() << "\n";
    return 1;
  }
  std::cerr << "lago-node: " << config.node_name << " listening on " << config.http_bind << "\n";

  std::jthread scheduler([&node](std::stop_token stop) { node.scheduler().run(stop); });
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    std::cerr << "lago-node: shutting down\n";
    scheduler.request_stop();
    server.stop();
  });
  server.listen();
  scheduler.request_stop();
  scheduler.join();
  // listen() also returns on failure; make sure the waiter can exit.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

int sync(const federation::NodeConfig& config, const std::string& only) {
  http::HttpTransport transport;
  federation::Node node(config, SystemClock::instance(), transport);
  int status = 0;
  bool matched = false;
  for (const auto& peer : config.peers) {
    if (!only.empty() && peer.name != only) continue;
    matched = true;
    const auto report = node.sync_peer(peer);
    std::cout << federation::report_to_json(report) << "\n";
    if (!report.ok) status = 1;
  }
  if (!only.empty() && !matched) {
    std::cerr << "lago-node: no peer named '" << only << "'\n";
    return 2;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LAGO repository node"};
  app.require_subcommand(1);
  std::string config_flag;
  app.add_option("--config", config_flag, "node config file (default: $LAGO_NODE_CONFIG)");

  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service and the peer-sync scheduler");
  auto* sync_cmd = app.add_subcommand("sync", "sync from peers once and print the reports");
  std::string peer;
  sync_cmd->add_option("--peer", peer, "only this peer");
  auto* health_cmd = app.add_subcommand("status", "print the health document without serving");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  federation::NodeConfig config;
  try {
    config = federation::load_config(
        federation::config_path(config_flag.empty() ? std::nullopt : std::optional<std::string>(config_flag)));
  } catch (const Error& e) {
    std::cerr << "lago-node: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*serve_cmd) return serve(config);
    if (*sync_cmd) return sync(config, peer);
    if (*health_cmd) {
      http::HttpTransport transport;
      federation::Node node(config, SystemClock::instance(), transport);
      std::cout << node.healthz_json() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "lago-node: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
