// SPDX-License-Identifier: Apache-2.0
#include "netsim/service/server.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <fmt/format.h>

#include "netsim/error.hpp"
#include "netsim/service/protocol.hpp"

namespace netsim::service {

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

Server::Server(std::shared_ptr<const Scenario> scenario, ServerConfig config)
    : scenario_(std::move(scenario)), config_(std::move(config)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (listen_fd_ < 0) fail(ErrorCode::Io, fmt::format("socket: {}", std::strerror(errno)));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(config_.port);
  if (::inet_pton(AF_INET, config_.host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    fail(ErrorCode::InvalidArgument, fmt::format("'{}' is not an IPv4 address", config_.host));
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 16) != 0) {
    int err = errno;
    ::close(listen_fd_);
    fail(ErrorCode::Io, fmt::format("cannot listen on {}:{}: {}", config_.host, config_.port, std::strerror(err)));
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Server::~Server() {
  stop();
  reap(true);
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void Server::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  std::lock_guard lock(mutex_);
  for (auto& c : connections_) ::shutdown(c.fd, SHUT_RDWR);
}

void Server::reap(bool all) {
  std::list<Connection> done;
  {
    std::lock_guard lock(mutex_);
    for (auto it = connections_.begin(); it != connections_.end();) {
      auto next = std::next(it);
      if (all || it->finished) done.splice(done.end(), connections_, it);
      it = next;
    }
  }
  for (auto& c : done) {
    if (c.thread.joinable()) c.thread.join();
    ::close(c.fd);
  }
}

void Server::run() {
  while (!stopping_) {
    int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      break;  // listening socket shut down
    }
    reap(false);
    std::lock_guard lock(mutex_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    auto& conn = connections_.emplace_back();
    conn.fd = fd;
    conn.thread = std::thread([this, &conn] { serve_connection(conn); });
  }
  reap(true);
}

void Server::serve_connection(Connection& conn) {
  Session session(scenario_, config_.env);
  std::string buffer;
  char chunk[4096];
  bool open = true;
  while (open) {
    ssize_t n = ::recv(conn.fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (std::size_t nl; open && (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
      std::string reply = session.handle(std::string_view(buffer).substr(start, nl - start));
      reply.push_back('\n');
      open = send_all(conn.fd, reply) && !session.closed();
    }
    buffer.erase(0, start);
    if (open && buffer.size() > config_.max_line_bytes) {
      std::string reply =
          encode(ErrorMessage{codes::kMalformed, fmt::format("line exceeds {} bytes", config_.max_line_bytes)});
      reply.push_back('\n');
      send_all(conn.fd, reply);
      open = false;
    }
  }
  ::shutdown(conn.fd, SHUT_RDWR);
  conn.finished = true;
}

}  // namespace netsim::service
