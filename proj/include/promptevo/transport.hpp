#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

namespace promptevo {

// Line-oriented duplex channel to a worker. send_line() may be called from
// several threads under the caller's lock; receive_line() from one reader
// thread. close() must unblock a pending receive_line().
class Transport {
public:
  virtual ~Transport() = default;

  virtual void send_line(const std::string& line) = 0;
  // Blocks for the next line (without the newline); nullopt at end of stream.
  virtual std::optional<std::string> receive_line() = 0;
  virtual void close() = 0;
};

// Worker launched as `/bin/sh -c <command>` in its own process group, speaking
// on its stdin/stdout. stderr is inherited.
class PipeTransport final : public Transport {
public:
  explicit PipeTransport(const std::string& command);
  ~PipeTransport() override;

  PipeTransport(const PipeTransport&) = delete;
  PipeTransport& operator=(const PipeTransport&) = delete;

  void send_line(const std::string& line) override;
  std::optional<std::string> receive_line() override;
  void close() override;

private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::once_flag closed_;
};

class TcpTransport final : public Transport {
public:
  TcpTransport(const std::string& host, std::uint16_t port);
  ~TcpTransport() override;

  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  void send_line(const std::string& line) override;
  std::optional<std::string> receive_line() override;
  void close() override;

private:
  int fd_ = -1;
  std::string buffer_;
  std::once_flag closed_;
};

// In-process worker: each sent line is handed to `handler` on a private
// thread and the returned lines are queued for receive_line(). Used for
// loopback tests of the protocol without a child process.
class LoopbackTransport final : public Transport {
public:
  // Returns reply lines for one request line; an empty vector means no reply.
  using Handler = std::function<std::vector<std::string>(const std::string&)>;

  explicit LoopbackTransport(Handler handler);
  ~LoopbackTransport() override;

  void send_line(const std::string& line) override;
  std::optional<std::string> receive_line() override;
  void close() override;

private:
  void serve();

  Handler handler_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::string> inbox_;
  std::deque<std::string> outbox_;
  bool closed_ = false;
  std::thread thread_;
};

} // namespace promptevo
