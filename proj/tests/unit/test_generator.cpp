//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <numeric>

#include <doctest.h>
#include <json.hpp>

#include "molopt/chem/smiles.hpp"
#include "molopt/corpus.hpp"
#include "molopt/fingerprint.hpp"
#include "molopt/generator.hpp"
#include "molopt/mock_lm_server.hpp"

using namespace molopt;

namespace {

const std::string kParentA = "CC(=O)Oc1ccccc1C(=O)O";
const std::string kParentB = "O=C(O)c1ccccc1Nc1cccc(C(F)(F)F)c1";

std::string two_parent_prompt() {
  return "<bos>" + wrap_tag("SIMILAR", kParentA + " 0.70") + wrap_tag("SIMILAR", kParentB + " 0.55");
}

}  // namespace

TEST_CASE("sampling defaults and validation") {
  SamplingParams p;
  CHECK(p.cot);
  CHECK(p.repetition_penalty == 1.010);
  CHECK(p.suppress_until_smiles);
  CHECK(p.suppress_tokens == std::vector<std::string>{"</s>"});
  CHECK_NOTHROW(p.validate());
  p.temperature = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.temperature = 1.0;
  p.repetition_penalty = 0.9;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  TuneConfig t;
  t.validation_fraction = 1.0;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("extract_smiles") {
  CHECK(extract_smiles("<bos>", "[START_SMILES]CCO[END_SMILES]") == "CCO");
  CHECK(extract_smiles("<bos>[START_SMILES]", "CCO[END_SMILES]</s>") == "CCO");
  CHECK_FALSE(extract_smiles("<bos>", "CCO[END_SMILES]").has_value());
  CHECK_FALSE(extract_smiles("<bos>", "[START_SMILES]CCO").has_value());
  CHECK_FALSE(extract_smiles("<bos>", "[START_SMILES][END_SMILES]").has_value());
}

TEST_CASE("parse_prompt reads parents and the property target") {
  const auto c = parse_prompt(two_parent_prompt() + "[PROPERTY]0.87[/PROPERTY]");
  REQUIRE(c.similars.size() == 2);
  CHECK(c.similars[0].first == kParentA);
  CHECK(c.similars[0].second == 0.70);
  CHECK(c.property == 0.87);
  CHECK_FALSE(parse_prompt("<bos>").property.has_value());
}

TEST_CASE("surrogate: deterministic per rng seed") {
  SurrogateGenerator a, b;
  SamplingParams p;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng ra(s), rb(s);
    CHECK(a.generate(two_parent_prompt(), p, ra) == b.generate(two_parent_prompt(), p, rb));
  }
}

TEST_CASE("surrogate: generations are valid, novel and near a parent") {
  SurrogateGenerator gen;
  SamplingParams p;
  const auto prompt = two_parent_prompt();
  const auto fa = ecfc(chem::parse_smiles(kParentA));
  const auto fb = ecfc(chem::parse_smiles(kParentB));
  const auto ca = chem::canonicalize(kParentA).text;
  const auto cb = chem::canonicalize(kParentB).text;
  int valid = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    Rng rng(s);
    const auto completion = gen.generate(prompt, p, rng);
    const auto smi = extract_smiles(prompt, completion);
    if (!smi) continue;
    const auto g = chem::parse_smiles(*smi);
    CHECK(g.num_components() == 1);
    const auto canon = chem::canonical(g).text;
    CHECK(canon != ca);
    CHECK(canon != cb);
    const auto f = ecfc(g);
    CHECK(std::max(tanimoto(f, fa), tanimoto(f, fb)) >= 0.2);
    ++valid;
  }
  CHECK(valid >= 950);
}

TEST_CASE("surrogate: parentless prompts assemble fragments") {
  SurrogateGenerator gen;
  SamplingParams p;
  p.cot = false;
  int valid = 0;
  for (std::uint64_t s = 0; s < 300; ++s) {
    Rng rng(s);
    const std::string prompt = "<bos>[START_SMILES]";
    const auto completion = gen.generate(prompt, p, rng);
    CHECK_FALSE(completion.starts_with(tags::kStartSmiles));
    if (auto smi = extract_smiles(prompt, completion)) {
      CHECK_NOTHROW(chem::parse_smiles(*smi));
      ++valid;
    }
  }
  CHECK(valid >= 290);
}

TEST_CASE("surrogate: a repeated parent still terminates") {
  SurrogateGenerator gen;
  SamplingParams p;
  const std::string prompt = "<bos>[SIMILAR]CCOc1ccccc1 0.70[/SIMILAR][SIMILAR]CCOc1ccccc1 0.60[/SIMILAR]";
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(s);
    CHECK(extract_smiles(prompt, gen.generate(prompt, p, rng)).has_value());
  }
}

TEST_CASE("surrogate: tuning shifts fragment weights toward the samples") {
  SurrogateGenerator gen;
  const double before = gen.fragment_weight("c1ccncc1");
  std::vector<TrainingSample> samples;
  for (const auto* smi : {"c1ccncc1CCN", "Oc1ccncc1", "c1ccncc1C(=O)O", "Nc1ccncc1", "c1ccncc1Cl", "CCc1ccncc1",
                          "c1ccncc1OC", "Fc1ccncc1", "c1ccncc1C#N", "Brc1ccncc1", "c1ccncc1CO"}) {
    samples.push_back({"<bos>[START_SMILES]", std::string(smi) + "[END_SMILES]</s>"});
  }
  CHECK(gen.tune_rounds() == 0);
  gen.tune(samples, TuneConfig{});
  CHECK(gen.tune_rounds() == 1);
  CHECK(gen.fragment_weight("c1ccncc1") > before);
  CHECK_THROWS_AS(gen.tune({}, TuneConfig{}), GeneratorError);
}

TEST_CASE("surrogate: scorer is a normalized bigram model") {
  SurrogateGenerator gen;
  ReferenceTokenizer tok;
  for (const std::int32_t prev : {0, 1, 2, 60, 200}) {
    const auto p = gen.next_token_probabilities(prev);
    CHECK(p.size() == tok.vocab_size());
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
  }
  const auto s = gen.score("[START_SMILES]CCO[END_SMILES]");
  CHECK(s.token_logprobs.size() == tok.encode("[START_SMILES]CCO[END_SMILES]").size());
  CHECK(s.total == doctest::Approx(std::accumulate(s.token_logprobs.begin(), s.token_logprobs.end(), 0.0)));
  for (const double lp : s.token_logprobs) CHECK(lp < 0.0);

  const std::string text = "[START_SMILES]c1ccncc1[END_SMILES]";
  const double before = gen.score(text).total;
  gen.tune(std::vector<TrainingSample>(20, {"<bos>[START_SMILES]", "c1ccncc1[END_SMILES]</s>"}), TuneConfig{});
  CHECK(gen.score(text).total > before);
}

TEST_CASE("remote: request bodies are byte-stable") {
  SamplingParams p;
  CHECK(RemoteGenerator::generate_body("<bos>", p) ==
        R"({"max_new_tokens":256,"n":1,"prompt":"<bos>","repetition_penalty":1.01,"stop":["[END_SMILES]"],)"
        R"("suppress":["</s>"],"temperature":1.0})");
  p.suppress_until_smiles = false;
  CHECK(nlohmann::json::parse(RemoteGenerator::generate_body("<bos>", p))["suppress"].empty());
  CHECK(RemoteGenerator::score_body("abc") == R"({"text":"abc"})");
  CHECK(RemoteGenerator::tune_body({{"p", "c"}}, TuneConfig{}) ==
        R"({"epochs":3,"peak_lr":0.0001,"samples":[{"completion":"c","prompt":"p"}],"validation_fraction":0.1,)"
        R"("warmup_steps":0})");
}

TEST_CASE("remote: round trip against the mock server") {
  MockLmServer server;
  server.start();
  RemoteGenerator remote(server.url(), 5.0);
  SamplingParams p;
  Rng rng(0);

  server.script({"</s>[START_SMILES]CCO[END_SMILES]trailing"});
  CHECK(remote.generate("<bos>", p, rng) == "[START_SMILES]CCO[END_SMILES]");
  auto reqs = server.requests();
  REQUIRE(reqs.size() == 1);
  CHECK(reqs[0].path == "/generate");
  CHECK(reqs[0].body == RemoteGenerator::generate_body("<bos>", p));

  // Suppression forces the opening tag.
  server.script({"CCN[END_SMILES]"});
  CHECK(remote.generate("<bos>", p, rng) == "[START_SMILES]CCN[END_SMILES]");
  p.suppress_until_smiles = false;
  server.script({"</s>"});
  CHECK(remote.generate("<bos>", p, rng) == "</s>");

  const auto s = remote.score("[START_SMILES]C");
  CHECK(s.token_logprobs.size() == 2);
  CHECK(s.total == doctest::Approx(-2.0 * std::log(static_cast<double>(ReferenceTokenizer().vocab_size()))));

  server.clear_requests();
  remote.tune({{"<bos>", "CCO[END_SMILES]</s>"}}, TuneConfig{});
  reqs = server.requests();
  REQUIRE(reqs.size() == 1);
  CHECK(reqs[0].path == "/tune");
  CHECK(reqs[0].body == RemoteGenerator::tune_body({{"<bos>", "CCO[END_SMILES]</s>"}}, TuneConfig{}));
  server.stop();
}

TEST_CASE("remote: unreachable server maps to kUnavailable") {
  MockLmServer server;
  server.start();
  const auto url = server.url();
  server.stop();
  RemoteGenerator remote(url, 0.5);
  Rng rng(0);
  try {
    remote.generate("<bos>", SamplingParams{}, rng);
    FAIL("expected GeneratorError");
  } catch (const GeneratorError& e) {
    CHECK(e.kind() == GeneratorError::Kind::kUnavailable);
  }
}
