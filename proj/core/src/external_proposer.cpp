#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "counterplan/proposers.hpp"
#include "httplib.h"

namespace counterplan {

namespace {

using Clock = std::chrono::steady_clock;

// Child process speaking one JSON object per line on stdin/stdout. The
// session persists across requests and is restarted after a failure.
class ProcessTransport : public Transport {
 public:
  explicit ProcessTransport(std::string command) : command_(std::move(command)) {}
  ~ProcessTransport() override { stop(); }

  std::string exchange(const std::string& request, std::chrono::milliseconds timeout) override {
    if (pid_ <= 0) start();
    const auto deadline = Clock::now() + timeout;
    try {
      send_all(request + "\n", deadline);
      return read_line(deadline);
    } catch (...) {
      stop();
      throw;
    }
  }

 private:
  void start() {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
      throw TransportError(std::string("socketpair failed: ") + std::strerror(errno));
    pid_t pid = ::fork();
    if (pid < 0) {
      ::close(fds[0]);
      ::close(fds[1]);
      throw TransportError(std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
      // Own process group, so stop() also reaches anything the shell spawns.
      ::setpgid(0, 0);
      ::dup2(fds[1], STDIN_FILENO);
      ::dup2(fds[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(fds[1]);
    fd_ = fds[0];
    pid_ = pid;
    buffer_.clear();
  }

  void stop() {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
    if (pid_ > 0) {
      ::kill(-pid_, SIGTERM);
      int status = 0;
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, &status, WNOHANG) != 0) {
          pid_ = -1;
          break;
        }
        ::usleep(2000);
      }
      if (pid_ > 0) {
        ::kill(-pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
      }
      pid_ = -1;
    }
  }

  int remaining_ms(Clock::time_point deadline) const {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    return left < 0 ? 0 : static_cast<int>(left);
  }

  void send_all(const std::string& data, Clock::time_point deadline) {
    std::size_t sent = 0;
    while (sent < data.size()) {
      pollfd p{fd_, POLLOUT, 0};
      int r = ::poll(&p, 1, remaining_ms(deadline));
      if (r == 0) throw TransportError("timed out writing the request", true);
      if (r < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("poll failed: ") + std::strerror(errno));
      }
      ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw TransportError(std::string("proposer process closed its input: ") + std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(Clock::time_point deadline) {
    for (;;) {
      auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      pollfd p{fd_, POLLIN, 0};
      int r = ::poll(&p, 1, remaining_ms(deadline));
      if (r == 0) throw TransportError("timed out waiting for the proposer response", true);
      if (r < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("poll failed: ") + std::strerror(errno));
      }
      char chunk[4096];
      ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw TransportError(std::string("read failed: ") + std::strerror(errno));
      }
      if (n == 0) throw TransportError("proposer process exited before responding");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  std::string command_;
  pid_t pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
};

class HttpTransport : public Transport {
 public:
  HttpTransport(std::string host, int port, std::string path)
      : host_(std::move(host)), port_(port), path_(std::move(path)) {}

  std::string exchange(const std::string& request, std::chrono::milliseconds timeout) override {
    httplib::Client client(host_, port_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path_, request, "application/json");
    if (!res) {
      const auto err = res.error();
      const bool timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
      throw TransportError("HTTP request failed: " + httplib::to_string(err), timed_out);
    }
    if (res->status != 200)
      throw TransportError("HTTP status " + std::to_string(res->status) + " from proposer endpoint");
    std::string body = res->body;
    while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
    return body;
  }

 private:
  std::string host_;
  int port_;
  std::string path_;
};

}  // namespace

ExternalEndpoint ExternalEndpoint::parse(std::string_view spec) {
  ExternalEndpoint e;
  auto trimmed = spec;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.remove_suffix(1);
  if (trimmed.empty()) throw ParseError("empty proposer endpoint");
  if (trimmed.substr(0, 7) == "http://") {
    e.kind = Kind::http;
    auto rest = trimmed.substr(7);
    auto slash = rest.find('/');
    auto hostport = rest.substr(0, slash);
    e.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    auto colon = hostport.rfind(':');
    if (colon != std::string_view::npos) {
      e.host = std::string(hostport.substr(0, colon));
      auto port_text = std::string(hostport.substr(colon + 1));
      try {
        std::size_t used = 0;
        e.port = std::stoi(port_text, &used);
        if (used != port_text.size() || e.port <= 0 || e.port > 65535) throw std::invalid_argument("port");
      } catch (const std::exception&) {
        throw ParseError("invalid port in endpoint '" + std::string(spec) + "'");
      }
    } else {
      e.host = std::string(hostport);
    }
    if (e.host.empty()) throw ParseError("missing host in endpoint '" + std::string(spec) + "'");
    return e;
  }
  if (trimmed.substr(0, 8) == "https://")
    throw ParseError("https endpoints are not supported; use http:// or exec:");
  e.kind = Kind::process;
  e.command = std::string(trimmed.substr(0, 5) == "exec:" ? trimmed.substr(5) : trimmed);
  if (e.command.empty()) throw ParseError("empty command in endpoint '" + std::string(spec) + "'");
  return e;
}

std::string ExternalEndpoint::str() const {
  if (kind == Kind::http) return "http://" + host + ":" + std::to_string(port) + path;
  return "exec:" + command;
}

std::unique_ptr<Transport> make_transport(const ExternalEndpoint& endpoint) {
  if (endpoint.kind == ExternalEndpoint::Kind::http)
    return std::make_unique<HttpTransport>(endpoint.host, endpoint.port, endpoint.path);
  return std::make_unique<ProcessTransport>(endpoint.command);
}

ExternalProposer::ExternalProposer(ExternalEndpoint endpoint, std::chrono::milliseconds timeout)
    : transport_(make_transport(endpoint)), timeout_(timeout) {}

ExternalProposer::ExternalProposer(std::unique_ptr<Transport> transport, std::chrono::milliseconds timeout)
    : transport_(std::move(transport)), timeout_(timeout) {}

ExternalProposer::~ExternalProposer() = default;

ProposerResponse ExternalProposer::propose(const ProposerContext& ctx) {
  std::lock_guard lock(mutex_);
  std::string line;
  try {
    line = transport_->exchange(encode_request(ctx), timeout_);
  } catch (const TransportError& e) {
    ++transport_failures_;
    return ProposerResponse::fail(e.timeout() ? ProposerFailure::Kind::timeout : ProposerFailure::Kind::transport,
                                  e.what());
  }
  RawResponse raw;
  try {
    raw = decode_response(line);
  } catch (const ParseError& e) {
    return ProposerResponse::fail(ProposerFailure::Kind::malformed, e.what(), line);
  }
  return interpret_response(raw, ctx);
}

}  // namespace counterplan
