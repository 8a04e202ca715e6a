// SPDX-License-Identifier: Apache-2.0
//
// TCP front end for the line protocol: one thread and one Session per
// connection.
#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "netsim/rl/environment.hpp"

namespace netsim::service {

struct ServerConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  rl::EnvConfig env;
  std::size_t max_line_bytes = 1 << 20;
};

class Server {
 public:
  // Binds and listens; Io on failure.
  Server(std::shared_ptr<const Scenario> scenario, ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const { return port_; }

  // Accepts until stop(); joins the connection threads before returning.
  void run();
  // Safe from any thread. Open connections are shut down.
  void stop();

 private:
  struct Connection {
    int fd = -1;
    std::thread thread;
    std::atomic<bool> finished{false};
  };

  void serve_connection(Connection& conn);
  void reap(bool all);

  std::shared_ptr<const Scenario> scenario_;
  ServerConfig config_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex mutex_;
  std::list<Connection> connections_;
};

// Writes all of `data`, retrying short writes; false once the peer is gone.
bool send_all(int fd, std::string_view data);

}  // namespace netsim::service
