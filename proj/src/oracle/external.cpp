//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <fcntl.h>
#include <poll.h>
#include <pthread.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include <httplib.h>

#include "molopt/oracle.hpp"
#include "molopt/text.hpp"

extern char** environ;

namespace molopt {

namespace {

using Clock = std::chrono::steady_clock;

double checked(double score, ScoreRange range, const std::string& who) {
  if (!std::isfinite(score) || !range.contains(score)) {
    throw OracleError(OracleError::Kind::kRangeViolation, who + " returned " + format_double(score) + " outside [" +
                                                              format_double(range.min) + ", " + format_double(range.max) + "]");
  }
  return score;
}

double parse_reply(std::string_view text, const std::string& who) {
  const auto line = trim(text.substr(0, text.find('\n')));
  const auto v = parse_double(line);
  if (!v) throw OracleError(OracleError::Kind::kMalformedReply, who + " replied '" + std::string(line) + "', not a number");
  return *v;
}

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) { }
  ~Fd() { reset(); }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

class CommandOracle final : public OracleSpec {
 public:
  CommandOracle(std::vector<std::string> argv, ScoreRange range, double timeout)
      : argv_(std::move(argv)), range_(range), timeout_(timeout) { }

  ScoreRange range() const override { return range_; }
  std::string name() const override { return "command(" + argv_.front() + ")"; }

  double evaluate(const Molecule& m) const override {
    int in_pipe[2], out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw OracleError(OracleError::Kind::kTransport, "pipe failed");
    Fd in_read(in_pipe[0]), in_write(in_pipe[1]);
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw OracleError(OracleError::Kind::kTransport, "pipe failed");
    Fd out_read(out_pipe[0]), out_write(out_pipe[1]);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_read.get(), STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_write.get(), STDOUT_FILENO);
    std::vector<char*> args;
    for (const auto& a : argv_) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    pid_t pid = 0;
    const int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) throw OracleError(OracleError::Kind::kTransport, name() + ": spawn failed: " + std::strerror(rc));
    in_read.reset();
    out_write.reset();

    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_));
    auto kill_and_throw = [&](const std::string& why) {
      ::kill(pid, SIGKILL);
      int status = 0;
      ::waitpid(pid, &status, 0);
      throw OracleError(OracleError::Kind::kTimeout, name() + ": " + why);
    };

    const std::string request = m.smiles.text + "\n";
    {
      // A child that never reads stdin is fine: block SIGPIPE for this thread
      // and drop a pending one afterwards.
      sigset_t pipe_set, previous;
      sigemptyset(&pipe_set);
      sigaddset(&pipe_set, SIGPIPE);
      pthread_sigmask(SIG_BLOCK, &pipe_set, &previous);
      const auto w = ::write(in_write.get(), request.data(), request.size());
      if (w < 0 && errno == EPIPE) {
        const timespec zero{0, 0};
        sigtimedwait(&pipe_set, nullptr, &zero);
      }
      pthread_sigmask(SIG_SETMASK, &previous, nullptr);
      in_write.reset();
    }

    std::string output;
    char buffer[4096];
    while (true) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      if (left <= 0) kill_and_throw("timed out after " + format_double(timeout_) + " s");
      pollfd p{out_read.get(), POLLIN, 0};
      const int r = ::poll(&p, 1, static_cast<int>(left));
      if (r < 0 && errno == EINTR) continue;
      if (r == 0) continue;
      const auto n = ::read(out_read.get(), buffer, sizeof buffer);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      output.append(buffer, static_cast<std::size_t>(n));
    }
    int status = 0;
    while (true) {
      const auto w = ::waitpid(pid, &status, WNOHANG);
      if (w == pid) break;
      if (w < 0 && errno != EINTR) throw OracleError(OracleError::Kind::kTransport, name() + ": waitpid failed");
      if (Clock::now() >= deadline) kill_and_throw("timed out after " + format_double(timeout_) + " s");
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
      throw OracleError(OracleError::Kind::kNonzeroExit, name() + " exited with status " + std::to_string(code));
    }
    return checked(parse_reply(output, name()), range_, name());
  }

 private:
  std::vector<std::string> argv_;
  ScoreRange range_;
  double timeout_;
};

class HttpOracle final : public OracleSpec {
 public:
  HttpOracle(std::string url, ScoreRange range, double timeout) : url_(std::move(url)), range_(range), timeout_(timeout) { }

  ScoreRange range() const override { return range_; }
  std::string name() const override { return "http(" + url_ + ")"; }

  double evaluate(const Molecule& m) const override {
    httplib::Client client(url_);
    const auto whole = static_cast<time_t>(timeout_);
    const auto micros = static_cast<time_t>((timeout_ - static_cast<double>(whole)) * 1e6);
    client.set_connection_timeout(whole, micros);
    client.set_read_timeout(whole, micros);
    client.set_write_timeout(whole, micros);
    const auto body = nlohmann::json{{"smiles", m.smiles.text}}.dump();
    auto res = client.Post("/score", body, "application/json");
    if (!res) {
      const auto err = res.error();
      const auto kind = err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout
                            ? OracleError::Kind::kTimeout
                            : OracleError::Kind::kTransport;
      throw OracleError(kind, name() + ": " + httplib::to_string(err));
    }
    if (res->status != 200) {
      throw OracleError(OracleError::Kind::kMalformedReply, name() + ": HTTP " + std::to_string(res->status));
    }
    double score = 0.0;
    try {
      score = nlohmann::json::parse(res->body).at("score").get<double>();
    } catch (const std::exception&) {
      throw OracleError(OracleError::Kind::kMalformedReply, name() + ": malformed reply '" + res->body + "'");
    }
    return checked(score, range_, name());
  }

 private:
  std::string url_;
  ScoreRange range_;
  double timeout_;
};

}  // namespace

OraclePtr command_oracle(std::vector<std::string> argv, ScoreRange range, double timeout_seconds) {
  if (argv.empty()) throw std::invalid_argument("command oracle needs a program");
  if (!(timeout_seconds > 0.0)) throw std::invalid_argument("timeout must be positive");
  return std::make_shared<CommandOracle>(std::move(argv), range, timeout_seconds);
}

OraclePtr http_oracle(std::string url, ScoreRange range, double timeout_seconds) {
  if (url.empty()) throw std::invalid_argument("http oracle needs a URL");
  if (!(timeout_seconds > 0.0)) throw std::invalid_argument("timeout must be positive");
  return std::make_shared<HttpOracle>(std::move(url), range, timeout_seconds);
}

}  // namespace molopt
