//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/mock_lm_server.hpp"

#include <cmath>
#include <map>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "molopt/corpus.hpp"

namespace molopt {

using nlohmann::json;

struct MockLmServer::Impl {
  httplib::Server server;
  std::thread thread;
  int port = -1;
  mutable std::mutex mutex;
  std::vector<std::string> script;
  std::size_t next = 0;
  std::vector<Request> requests;
  ReferenceTokenizer tokenizer;

  void record(const httplib::Request& req) {
    std::lock_guard lock(mutex);
    requests.push_back({req.path, req.body});
  }

  std::string next_completion() {
    std::lock_guard lock(mutex);
    if (script.empty()) return "";
    const auto& text = script[std::min(next, script.size() - 1)];
    ++next;
    return text;
  }

  json generate(const json& body) {
    const auto prompt = body.at("prompt").get<std::string>();
    const double penalty = body.at("repetition_penalty").get<double>();
    const auto suppress = body.at("suppress").get<std::vector<std::string>>();
    const auto stop = body.at("stop").get<std::vector<std::string>>();
    const auto max_new = body.at("max_new_tokens").get<int>();
    const auto n = body.value("n", 1);
    json completions = json::array();
    for (int k = 0; k < n; ++k) {
      auto text = next_completion();
      const std::string start(tags::kStartSmiles);
      if (!suppress.empty()) {
        // Suppressed tokens cannot appear before the SMILES has started, and
        // the SMILES start is forced when the prompt did not open it.
        auto cut = text.find(start);
        std::string head = text.substr(0, cut == std::string::npos ? text.size() : cut);
        for (const auto& s : suppress) {
          for (auto pos = head.find(s); !s.empty() && pos != std::string::npos; pos = head.find(s)) head.erase(pos, s.size());
        }
        std::string tail = cut == std::string::npos ? "" : text.substr(cut);
        if (cut == std::string::npos && !prompt.ends_with(start)) {
          tail = start + head;
          head.clear();
        }
        text = head + tail;
      }
      std::size_t stop_at = std::string::npos;
      for (const auto& s : stop) {
        const auto pos = text.find(s);
        if (pos != std::string::npos) stop_at = std::min(stop_at, pos + s.size());
      }
      if (stop_at != std::string::npos) text.resize(stop_at);
      auto ids = tokenizer.encode(text);
      if (static_cast<int>(ids.size()) > max_new) {
        ids.resize(static_cast<std::size_t>(max_new));
        text = tokenizer.decode(ids);
      }
      std::map<std::int32_t, int> seen;
      for (auto id : tokenizer.encode(prompt)) ++seen[id];
      json logprobs = json::array();
      const double base = -std::log(static_cast<double>(tokenizer.vocab_size()));
      for (auto id : ids) {
        logprobs.push_back(base - seen[id] * std::log(penalty));
        ++seen[id];
      }
      completions.push_back({{"text", text}, {"token_logprobs", logprobs}});
    }
    return {{"completions", completions}};
  }

  json score(const json& body) {
    const auto text = body.at("text").get<std::string>();
    const auto ids = tokenizer.encode(text);
    const double each = -std::log(static_cast<double>(tokenizer.vocab_size()));
    json logprobs = json::array();
    double total = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      logprobs.push_back(each);
      total += each;
    }
    return {{"token_logprobs", logprobs}, {"total", total}};
  }

  json tune(const json& body) {
    if (!body.at("samples").is_array() || body.at("samples").empty()) throw std::invalid_argument("no samples");
    for (const char* k : {"peak_lr", "warmup_steps", "epochs", "validation_fraction"}) body.at(k);
    return {{"status", "ok"}};
  }

  template <class Fn>
  void route(const char* path, Fn fn) {
    server.Post(path, [this, fn](const httplib::Request& req, httplib::Response& res) {
      record(req);
      try {
        const auto reply = (this->*fn)(json::parse(req.body));
        res.set_content(reply.dump(), "application/json");
      } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    });
  }
};

MockLmServer::MockLmServer() : impl_(std::make_unique<Impl>()) {
  impl_->route("/generate", &Impl::generate);
  impl_->route("/score", &Impl::score);
  impl_->route("/tune", &Impl::tune);
}

MockLmServer::~MockLmServer() { stop(); }

void MockLmServer::start() {
  if (impl_->thread.joinable()) return;
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  if (impl_->port <= 0) throw std::runtime_error("mock server could not bind a port");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void MockLmServer::stop() {
  if (!impl_->thread.joinable()) return;
  impl_->server.stop();
  impl_->thread.join();
}

int MockLmServer::port() const { return impl_->port; }
std::string MockLmServer::url() const { return "http://127.0.0.1:" + std::to_string(impl_->port); }

void MockLmServer::script(std::vector<std::string> completions) {
  std::lock_guard lock(impl_->mutex);
  impl_->script = std::move(completions);
  impl_->next = 0;
}

std::vector<MockLmServer::Request> MockLmServer::requests() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->requests;
}

void MockLmServer::clear_requests() {
  std::lock_guard lock(impl_->mutex);
  impl_->requests.clear();
}

}  // namespace molopt
