/*
 * Copyright 2026 The atebench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "atebench/transport.h"

#include <fcntl.h>
#include <fmt/format.h>
#include <netdb.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>

#include "atebench/errors.h"

namespace atebench {
namespace {

void IgnoreSigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::string ErrnoText() { return std::strerror(errno); }

class FdTransport : public LineTransport {
 public:
  FdTransport(int read_fd, int write_fd, std::string description)
      : read_fd_(read_fd), write_fd_(write_fd), description_(std::move(description)) {}

  void WriteLine(std::string_view line) override {
    std::string buf(line);
    buf.push_back('\n');
    std::size_t done = 0;
    while (done < buf.size()) {
      const ssize_t k = Write(buf.data() + done, buf.size() - done);
      if (k < 0) {
        if (errno == EINTR) continue;
        throw ConnectionError(fmt::format("write to {} failed: {}", description_,
                                          ErrnoText()));
      }
      done += static_cast<std::size_t>(k);
    }
  }

  std::string ReadLine() override {
    for (;;) {
      const auto nl = buffer_.find('\n', scanned_);
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        scanned_ = 0;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      scanned_ = buffer_.size();
      char chunk[65536];
      const ssize_t k = ::read(read_fd_, chunk, sizeof chunk);
      if (k < 0) {
        if (errno == EINTR) continue;
        throw ConnectionError(fmt::format("read from {} failed: {}", description_,
                                          ErrnoText()));
      }
      if (k == 0) {
        throw ConnectionError(fmt::format("{} closed the connection", description_));
      }
      buffer_.append(chunk, static_cast<std::size_t>(k));
    }
  }

  std::string Describe() const override { return description_; }

 protected:
  virtual ssize_t Write(const char* data, std::size_t size) {
    return ::write(write_fd_, data, size);
  }

  int read_fd_;
  int write_fd_;
  std::string description_;

 private:
  std::string buffer_;
  std::size_t scanned_ = 0;
};

class SubprocessTransport final : public FdTransport {
 public:
  static std::unique_ptr<SubprocessTransport> Spawn(const std::string& command) {
    IgnoreSigpipe();
    int to_child[2], from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) {
      throw ConnectionError("pipe() failed: " + ErrnoText());
    }
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ConnectionError("pipe() failed: " + ErrnoText());
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw ConnectionError("fork() failed: " + ErrnoText());
    }
    if (pid == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    return std::unique_ptr<SubprocessTransport>(
        new SubprocessTransport(from_child[0], to_child[1], pid, command));
  }

  ~SubprocessTransport() override {
    ::close(write_fd_);  // EOF tells the server to exit
    ::close(read_fd_);
    int status = 0;
    for (int i = 0; i < 200; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) != 0) return;
      ::usleep(10000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }

 private:
  SubprocessTransport(int read_fd, int write_fd, pid_t pid, const std::string& command)
      : FdTransport(read_fd, write_fd, "stdio:" + command), pid_(pid) {}

  pid_t pid_;
};

class TcpTransport final : public FdTransport {
 public:
  static std::unique_ptr<TcpTransport> Connect(const std::string& host,
                                               const std::string& port) {
    IgnoreSigpipe();
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &found);
        rc != 0) {
      throw ConnectionError(
          fmt::format("cannot resolve {}:{}: {}", host, port, ::gai_strerror(rc)));
    }
    int fd = -1;
    std::string last_error = "no addresses";
    for (addrinfo* a = found; a != nullptr; a = a->ai_next) {
      fd = ::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
      last_error = ErrnoText();
      ::close(fd);
      fd = -1;
    }
    ::freeaddrinfo(found);
    if (fd < 0) {
      throw ConnectionError(
          fmt::format("cannot connect to {}:{}: {}", host, port, last_error));
    }
    return std::unique_ptr<TcpTransport>(
        new TcpTransport(fd, fmt::format("tcp:{}:{}", host, port)));
  }

  ~TcpTransport() override { ::close(read_fd_); }

 private:
  TcpTransport(int fd, std::string description)
      : FdTransport(fd, fd, std::move(description)) {}

  ssize_t Write(const char* data, std::size_t size) override {
    return ::send(write_fd_, data, size, MSG_NOSIGNAL);
  }
};

}  // namespace

std::unique_ptr<LineTransport> OpenTransport(const std::string& endpoint) {
  if (endpoint.rfind("stdio:", 0) == 0) {
    const std::string command = endpoint.substr(6);
    if (command.empty()) throw ConnectionError("stdio endpoint needs a command");
    return SubprocessTransport::Spawn(command);
  }
  if (endpoint.rfind("tcp:", 0) == 0) {
    const std::string rest = endpoint.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size()) {
      throw ConnectionError(fmt::format("malformed tcp endpoint '{}'", endpoint));
    }
    std::string host = rest.substr(0, colon);
    if (host.size() > 2 && host.front() == '[' && host.back() == ']') {
      host = host.substr(1, host.size() - 2);
    }
    return TcpTransport::Connect(host, rest.substr(colon + 1));
  }
  throw ConnectionError(fmt::format(
      "unknown endpoint '{}' (expected stdio:<command> or tcp:<host>:<port>)",
      endpoint));
}

}  // namespace atebench
