#include "promptevo/transport.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <chrono>

#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "promptevo/errors.hpp"

namespace promptevo {

namespace {

void write_all(int fd, const std::string& data, const char* what) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw WorkerError(std::string("cannot write to worker ") + what + ": " + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

// Reads until a newline; nullopt on EOF/error with nothing buffered.
std::optional<std::string> read_line(int fd, std::string& buffer) {
  for (;;) {
    if (auto pos = buffer.find('\n'); pos != std::string::npos) {
      std::string line = buffer.substr(0, pos);
      buffer.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    char chunk[4096];
    const ssize_t n = ::read(fd, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      return std::nullopt;
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

} // namespace

PipeTransport::PipeTransport(const std::string& command) {
  std::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0) {
    throw WorkerError(std::string("cannot create pipes: ") + std::strerror(errno));
  }
  pid_ = ::fork();
  if (pid_ < 0) {
    throw WorkerError(std::string("cannot fork worker: ") + std::strerror(errno));
  }
  if (pid_ == 0) {
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid_, pid_);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

PipeTransport::~PipeTransport() {
  close();
  if (from_child_ >= 0) ::close(from_child_);
}

void PipeTransport::send_line(const std::string& line) { write_all(to_child_, line + "\n", "stdin"); }

std::optional<std::string> PipeTransport::receive_line() { return read_line(from_child_, buffer_); }

void PipeTransport::close() {
  std::call_once(closed_, [this] {
    if (to_child_ >= 0) {
      ::close(to_child_);
      to_child_ = -1;
    }
    if (pid_ <= 0) return;
    // Give the worker a moment to exit on EOF, then take down its group so
    // no grandchild keeps our read end open.
    using namespace std::chrono;
    const auto deadline = steady_clock::now() + milliseconds(500);
    int status = 0;
    while (::waitpid(pid_, &status, WNOHANG) == 0) {
      if (steady_clock::now() > deadline) {
        ::kill(-pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        break;
      }
      std::this_thread::sleep_for(milliseconds(5));
    }
    ::kill(-pid_, SIGKILL);
    pid_ = -1;
  });
}

TcpTransport::TcpTransport(const std::string& host, std::uint16_t port) {
  std::signal(SIGPIPE, SIG_IGN);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const auto port_text = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), port_text.c_str(), &hints, &res); rc != 0) {
    throw WorkerError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd_ = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd_ < 0) continue;
    if (::connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) {
    throw WorkerError("cannot connect to worker at " + host + ":" + port_text);
  }
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpTransport::~TcpTransport() {
  close();
  if (fd_ >= 0) ::close(fd_);
}

void TcpTransport::send_line(const std::string& line) { write_all(fd_, line + "\n", "socket"); }

std::optional<std::string> TcpTransport::receive_line() { return read_line(fd_, buffer_); }

void TcpTransport::close() {
  std::call_once(closed_, [this] {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  });
}

LoopbackTransport::LoopbackTransport(Handler handler)
    : handler_(std::move(handler)), thread_([this] { serve(); }) {}

LoopbackTransport::~LoopbackTransport() {
  close();
  if (thread_.joinable()) thread_.join();
}

void LoopbackTransport::send_line(const std::string& line) {
  {
    std::lock_guard lock(mutex_);
    if (closed_) throw WorkerError("loopback worker closed");
    inbox_.push_back(line);
  }
  cv_.notify_all();
}

std::optional<std::string> LoopbackTransport::receive_line() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return !outbox_.empty() || closed_; });
  if (outbox_.empty()) return std::nullopt;
  auto line = std::move(outbox_.front());
  outbox_.pop_front();
  return line;
}

void LoopbackTransport::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  cv_.notify_all();
}

void LoopbackTransport::serve() {
  for (;;) {
    std::string request;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [&] { return !inbox_.empty() || closed_; });
      if (inbox_.empty()) return;
      request = std::move(inbox_.front());
      inbox_.pop_front();
    }
    auto replies = handler_(request);
    {
      std::lock_guard lock(mutex_);
      for (auto& r : replies) outbox_.push_back(std::move(r));
    }
    cv_.notify_all();
  }
}

} // namespace promptevo
