//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "molopt/generator.hpp"

namespace molopt {

using nlohmann::json;

RemoteGenerator::RemoteGenerator(std::string url, double timeout_seconds) : url_(std::move(url)), timeout_(timeout_seconds) {
  if (url_.empty()) throw GeneratorError(GeneratorError::Kind::kInvalidArgument, "remote generator needs a URL");
}

RemoteGenerator::~RemoteGenerator() = default;

std::string RemoteGenerator::post(const std::string& path, const std::string& body) {
  httplib::Client client(url_);
  const auto whole = static_cast<time_t>(timeout_);
  const auto micros = static_cast<time_t>((timeout_ - static_cast<double>(whole)) * 1e6);
  client.set_connection_timeout(whole, micros);
  client.set_read_timeout(whole, micros);
  client.set_write_timeout(whole, micros);
  auto res = client.Post(path, body, "application/json");
  if (!res) {
    throw GeneratorError(GeneratorError::Kind::kUnavailable,
                         "POST " + url_ + path + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw GeneratorError(GeneratorError::Kind::kProtocol,
                         "POST " + url_ + path + " returned HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  return res->body;
}

std::string RemoteGenerator::generate_body(const std::string& prompt, const SamplingParams& params) {
  json j;
  j["prompt"] = prompt;
  j["temperature"] = params.temperature;
  j["repetition_penalty"] = params.repetition_penalty;
  j["suppress"] = params.suppress_until_smiles ? params.suppress_tokens : std::vector<std::string>{};
  j["stop"] = std::vector<std::string>{params.stop_tag};
  j["max_new_tokens"] = params.max_new_tokens;
  j["n"] = 1;
  return j.dump();
}

std::string RemoteGenerator::score_body(std::string_view text) {
  json j;
  j["text"] = std::string(text);
  return j.dump();
}

std::string RemoteGenerator::tune_body(const std::vector<TrainingSample>& samples, const TuneConfig& cfg) {
  json j;
  j["samples"] = json::array();
  for (const auto& s : samples) j["samples"].push_back({{"prompt", s.prompt}, {"completion", s.completion}});
  j["peak_lr"] = cfg.peak_lr;
  j["warmup_steps"] = cfg.warmup_steps;
  j["epochs"] = cfg.epochs;
  j["validation_fraction"] = cfg.validation_fraction;
  return j.dump();
}

std::string RemoteGenerator::generate(const std::string& prompt, const SamplingParams& params, Rng&) {
  if (prompt.empty()) throw GeneratorError(GeneratorError::Kind::kInvalidArgument, "prompt must not be empty");
  params.validate();
  const auto reply = post("/generate", generate_body(prompt, params));
  try {
    const auto j = json::parse(reply);
    const auto& completions = j.at("completions");
    if (!completions.is_array() || completions.empty()) {
      throw GeneratorError(GeneratorError::Kind::kProtocol, "/generate returned no completions");
    }
    return completions.at(0).at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw GeneratorError(GeneratorError::Kind::kProtocol, std::string("malformed /generate reply: ") + e.what());
  }
}

ScoreResult RemoteGenerator::score(std::string_view text) {
  const auto reply = post("/score", score_body(text));
  try {
    const auto j = json::parse(reply);
    ScoreResult out;
    out.token_logprobs = j.at("token_logprobs").get<std::vector<double>>();
    out.total = j.at("total").get<double>();
    return out;
  } catch (const json::exception& e) {
    throw GeneratorError(GeneratorError::Kind::kProtocol, std::string("malformed /score reply: ") + e.what());
  }
}

void RemoteGenerator::tune(const std::vector<TrainingSample>& samples, const TuneConfig& cfg) {
  if (samples.empty()) throw GeneratorError(GeneratorError::Kind::kInvalidArgument, "tune needs at least one sample");
  cfg.validate();
  const auto reply = post("/tune", tune_body(samples, cfg));
  try {
    const auto j = json::parse(reply);
    const auto status = j.at("status").get<std::string>();
    if (status != "ok") throw GeneratorError(GeneratorError::Kind::kProtocol, "/tune reported status " + status);
  } catch (const json::exception& e) {
    throw GeneratorError(GeneratorError::Kind::kProtocol, std::string("malformed /tune reply: ") + e.what());
  }
}

}  // namespace molopt
