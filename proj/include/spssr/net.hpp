#pragma once

// Loopback TCP transport: a replicated-database answer server and the
// concurrent client used by the simulator. One retrieval round per
// connection; the server keeps no per-demand state (it cannot, queries are
// uniform) and answers malformed input with in-band ERROR frames.

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "spssr/core.hpp"
#include "spssr/errors.hpp"
#include "spssr/scheme.hpp"
#include "spssr/wire.hpp"

namespace spssr {

struct Endpoint {
  std::string host;
  std::uint16_t port;
};

/// Parses "host:port,host:port,...". A bare "port" means 127.0.0.1.
inline std::vector<Endpoint> parse_endpoints(const std::string& spec) {
  std::vector<Endpoint> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string item =
        spec.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!item.empty()) {
      const std::size_t colon = item.rfind(':');
      if (colon == std::string::npos) {
        out.push_back({"127.0.0.1",
                       static_cast<std::uint16_t>(std::stoul(item))});
      } else {
        out.push_back({item.substr(0, colon),
                       static_cast<std::uint16_t>(
                           std::stoul(item.substr(colon + 1)))});
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

namespace net_detail {

inline bool read_full(int fd, std::uint8_t* buf, std::size_t len) {
  std::size_t done = 0;
  while (done < len) {
    const ssize_t r = ::recv(fd, buf + done, len - done, 0);
    if (r <= 0) return false;
    done += static_cast<std::size_t>(r);
  }
  return true;
}

inline bool write_full(int fd, const std::uint8_t* buf, std::size_t len) {
  std::size_t done = 0;
  while (done < len) {
    const ssize_t r = ::send(fd, buf + done, len - done, MSG_NOSIGNAL);
    if (r <= 0) return false;
    done += static_cast<std::size_t>(r);
  }
  return true;
}

inline void set_io_timeout(int fd, int seconds) {
  timeval tv{};
  tv.tv_sec = seconds;
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

/// Reads one whole frame; returns false on clean EOF before any byte.
inline bool read_frame(int fd, wire::Frame& out) {
  std::array<std::uint8_t, wire::kHeaderSize> header;
  if (!read_full(fd, header.data(), header.size())) return false;
  auto [type, len] = wire::decode_header(header);
  wire::Bytes payload(len);
  if (len > 0 && !read_full(fd, payload.data(), len)) {
    throw WireError(wire::kErrBadFrame, "connection closed mid-payload");
  }
  out = wire::Frame{type, std::move(payload)};
  return true;
}

inline void write_frame(int fd, wire::MsgType type, const wire::Bytes& payload) {
  const wire::Bytes framed = wire::encode_frame(type, payload);
  write_full(fd, framed.data(), framed.size());
}

/// Owns a socket fd; closes exactly once.
class ScopedFd {
 public:
  explicit ScopedFd(int fd) : fd_(fd) {}
  ScopedFd(const ScopedFd&) = delete;
  ScopedFd& operator=(const ScopedFd&) = delete;
  ~ScopedFd() {
    if (fd_ >= 0) ::close(fd_);
  }
  int get() const { return fd_; }

 private:
  int fd_;
};

}  // namespace net_detail

/// One replicated server: accepts connections, answers exactly one QUERY
/// frame per connection. The database (messages and keys) is immutable for
/// the server's lifetime, so connections are served concurrently with no
/// locking on the data path.
class Server {
 public:
  Server(std::uint16_t port, Database db)
      : db_(std::move(db)), requested_port_(port) {}

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  ~Server() { stop(); }

  void start() {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw BindError("socket() failed");
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(requested_port_);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      ::close(fd);
      throw BindError("cannot bind port " + std::to_string(requested_port_));
    }
    if (::listen(fd, 16) != 0) {
      ::close(fd);
      throw BindError("listen() failed");
    }

    socklen_t len = sizeof(addr);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    bound_port_ = ntohs(addr.sin_port);

    listen_fd_.store(fd);
    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
  }

  void stop() {
    if (!running_.exchange(false)) return;
    // Wake the blocked accept, join the acceptor, then close. Closing only
    // after the join keeps the fd valid for the whole accept_loop lifetime.
    const int fd = listen_fd_.load();
    if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
    if (acceptor_.joinable()) acceptor_.join();
    if (listen_fd_.exchange(-1) >= 0) ::close(fd);
    // Handlers are detached but bounded by the 10s I/O timeout; the server
    // object must outlive them.
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::seconds(15);
    while (active_handlers_ > 0 &&
           std::chrono::steady_clock::now() < deadline) {
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
  }

  std::uint16_t port() const { return bound_port_; }

 private:
  void accept_loop() {
    while (running_) {
      const int lfd = listen_fd_.load();
      if (lfd < 0) break;
      const int fd = ::accept(lfd, nullptr, nullptr);
      if (fd < 0) {
        if (!running_) break;
        continue;
      }
      ++active_handlers_;
      std::thread([this, fd] {
        handle(fd);
        ::close(fd);
        --active_handlers_;
      }).detach();
    }
  }

  void handle(int fd) {
    using namespace net_detail;
    set_io_timeout(fd, 10);
    try {
      wire::Frame frame;
      if (!read_frame(fd, frame)) return;
      if (frame.type != wire::MsgType::query) {
        write_frame(fd, wire::MsgType::error,
                    wire::encode_error_payload(wire::kErrBadFrame,
                                               "expected QUERY frame"));
        return;
      }
      const wire::DecodedQuery decoded = wire::decode_query_payload(frame.payload);
      const QueryMatrix& q = decoded.matrix;
      if (decoded.field_order != db_.field.value() ||
          q.messages() != db_.messages || q.subpackets() != db_.subpackets ||
          q.rows() != static_cast<int>(db_.keys.size())) {
        write_frame(fd, wire::MsgType::error,
                    wire::encode_error_payload(wire::kErrShapeMismatch,
                                               "shape mismatch"));
        return;
      }
      const AnswerVector answer = compute_answer(q, db_);
      write_frame(fd, wire::MsgType::answer, wire::encode_answer_payload(answer));
    } catch (const WireError& e) {
      write_frame(fd, wire::MsgType::error,
                  wire::encode_error_payload(e.code, e.what()));
    } catch (const std::exception& e) {
      write_frame(fd, wire::MsgType::error,
                  wire::encode_error_payload(wire::kErrInternal, e.what()));
    }
  }

  Database db_;
  std::uint16_t requested_port_;
  std::uint16_t bound_port_ = 0;
  std::atomic<int> listen_fd_{-1};
  std::atomic<bool> running_{false};
  std::atomic<int> active_handlers_{0};
  std::thread acceptor_;
};

/// Sends one query to one server and returns the decoded answer.
inline AnswerVector fetch_answer(const Endpoint& endpoint,
                                 const QueryMatrix& query, FieldOrder field,
                                 int server_index) {
  using namespace net_detail;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* info = nullptr;
  if (::getaddrinfo(endpoint.host.c_str(), std::to_string(endpoint.port).c_str(),
                    &hints, &info) != 0 ||
      info == nullptr) {
    throw TransportError(server_index,
                         "server " + std::to_string(server_index) +
                             ": cannot resolve " + endpoint.host);
  }
  const int raw_fd =
      ::socket(info->ai_family, info->ai_socktype, info->ai_protocol);
  if (raw_fd < 0) {
    ::freeaddrinfo(info);
    throw TransportError(server_index, "socket() failed");
  }
  ScopedFd fd(raw_fd);
  const int rc = ::connect(fd.get(), info->ai_addr, info->ai_addrlen);
  ::freeaddrinfo(info);
  if (rc != 0) {
    throw TransportError(server_index,
                         "server " + std::to_string(server_index) +
                             ": connection to " + endpoint.host + ":" +
                             std::to_string(endpoint.port) + " failed");
  }
  set_io_timeout(fd.get(), 10);

  try {
    write_frame(fd.get(), wire::MsgType::query,
                wire::encode_query_payload(query, field.value()));
    wire::Frame reply;
    if (!read_frame(fd.get(), reply)) {
      throw TransportError(server_index,
                           "server " + std::to_string(server_index) +
                               ": connection closed before answer");
    }

    if (reply.type == wire::MsgType::error) {
      auto [code, message] = wire::decode_error_payload(reply.payload);
      throw TransportError(server_index,
                           "server " + std::to_string(server_index) +
                               " returned error 0x" + std::to_string(code) +
                               ": " + message);
    }
    if (reply.type != wire::MsgType::answer) {
      throw TransportError(server_index, "unexpected reply frame type");
    }
    const auto values = wire::decode_answer_payload(reply.payload, field.value());
    if (static_cast<int>(values.size()) != query.rows()) {
      throw TransportError(server_index, "answer has wrong length");
    }
    AnswerVector answer;
    answer.reserve(values.size());
    for (std::uint32_t v : values) answer.emplace_back(v, field);
    return answer;
  } catch (const WireError& e) {
    throw TransportError(server_index,
                         "server " + std::to_string(server_index) +
                             ": malformed reply: " + e.what());
  }
}

/// Issues the N queries concurrently and joins all answers.
inline std::vector<AnswerVector> fetch_answers(
    const std::vector<Endpoint>& endpoints,
    const std::vector<QueryMatrix>& queries, FieldOrder field) {
  if (endpoints.size() != queries.size()) {
    throw TransportError(0, "need one endpoint per server, got " +
                                std::to_string(endpoints.size()) + " for " +
                                std::to_string(queries.size()) + " queries");
  }
  const int n = static_cast<int>(queries.size());
  std::vector<AnswerVector> answers(n);
  std::vector<std::exception_ptr> failures(n);
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (int i = 0; i < n; ++i) {
    threads.emplace_back([&, i] {
      try {
        answers[i] = fetch_answer(endpoints[i], queries[i], field, i + 1);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (int i = 0; i < n; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
  }
  return answers;
}

}  // namespace spssr
