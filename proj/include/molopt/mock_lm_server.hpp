//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace molopt {

/// Scriptable in-process server speaking the remote generation protocol.
/// /generate pops scripted completions (repeating the last one when the
/// script runs out) and reports per-token log-probabilities in which every
/// repeat of a token is divided by repetition_penalty. With a non-empty
/// suppress list, suppressed tokens are dropped before [START_SMILES] and the
/// tag is forced when neither prompt nor completion opens it. Completions
/// keep the stop tag, are cut right after it, and are capped at
/// max_new_tokens reference-tokenizer tokens. /score assigns every token
/// -log(vocabulary size). Request bodies are recorded verbatim.
class MockLmServer {
 public:
  struct Request {
    std::string path;
    std::string body;
  };

  MockLmServer();
  ~MockLmServer();
  MockLmServer(const MockLmServer&) = delete;
  MockLmServer& operator=(const MockLmServer&) = delete;

  /// Binds 127.0.0.1 on a free port and serves on a background thread.
  void start();
  void stop();
  int port() const;
  std::string url() const;

  void script(std::vector<std::string> completions);
  std::vector<Request> requests() const;
  void clear_requests();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace molopt
