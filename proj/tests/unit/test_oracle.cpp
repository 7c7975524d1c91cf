//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <atomic>
#include <chrono>
#include <cmath>
#include <set>
#include <thread>

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include "molopt/oracle.hpp"
#include "support.hpp"

using namespace molopt;

namespace {

/// Counts invocations; optionally fails for one molecule.
class CountingOracle final : public OracleSpec {
 public:
  explicit CountingOracle(std::string fail_on = {}) : fail_on_(std::move(fail_on)) { }
  ScoreRange range() const override { return {0.0, 1.0}; }
  double evaluate(const Molecule& m) const override {
    ++calls;
    if (m.smiles.text == fail_on_) throw OracleError(OracleError::Kind::kTransport, "boom");
    return static_cast<double>(m.smiles.text.size() % 10) / 10.0;
  }
  std::string name() const override { return "counting"; }
  mutable std::atomic<int> calls{0};

 private:
  std::string fail_on_;
};

std::string script(const char* name) { return std::string(MOLOPT_TEST_SCRIPT_DIR) + "/" + name; }

OracleError::Kind error_kind(const OracleSpec& o, const std::string& smi) {
  try {
    o.evaluate(Molecule::parse(smi));
  } catch (const OracleError& e) {
    return e.kind();
  }
  throw std::runtime_error("expected OracleError");
}

}  // namespace

TEST_CASE("molecule parsing canonicalizes") {
  CHECK(Molecule::parse("OCC").smiles == Molecule::parse("CCO").smiles);
  CHECK_THROWS(Molecule::parse("C1CC"));
}

TEST_CASE("rediscovery: 1 at the target, symmetric similarity elsewhere") {
  const auto o = rediscovery_oracle("CC(=O)Oc1ccccc1C(=O)O");
  CHECK(o->evaluate(Molecule::parse("OC(=O)c1ccccc1OC(C)=O")) == 1.0);
  CHECK(o->evaluate(Molecule::parse("O=C(Oc1ccccc1C(=O)O)c1ccccc1O")) == doctest::Approx(0.5));
  CHECK(o->oracle_max() == 1.0);
}

TEST_CASE("lead optimization: success needs both similarity and drug-likeness") {
  LeadOptimizationOracle o("CC(=O)Oc1ccccc1C(=O)O");
  const auto self = o.assess(Molecule::parse("CC(=O)Oc1ccccc1C(=O)O"));
  CHECK(self.similarity == 1.0);
  CHECK_FALSE(self.success);  // QED 0.55
  CHECK(self.score == doctest::Approx(0.5 + 0.5 * self.qed / 0.9));
  const auto far = o.assess(Molecule::parse("CCCCCCCCCC"));
  CHECK(far.similarity < 0.4);
  CHECK_FALSE(far.success);
}

TEST_CASE("mpo: identity, geometric zero, and a two-gaussian hand value") {
  auto qed = descriptor_oracle("qed");
  const auto m = Molecule::parse("CC(=O)Oc1ccccc1C(=O)O");
  auto single = mpo_oracle({{qed, 1.0, {}}}, MpoAggregation::kArithmetic);
  CHECK(single->evaluate(m) == doctest::Approx(qed->evaluate(m)).epsilon(1e-12));

  auto zero = mpo_oracle({{qed, 1.0, {}}, {constant_oracle(0.0), 1.0, {}}}, MpoAggregation::kGeometric);
  CHECK(zero->evaluate(m) == 0.0);

  Modifier g1{Modifier::Kind::kGaussian, 200.0, 50.0};
  Modifier g2{Modifier::Kind::kGaussian, 70.0, 20.0};
  auto two = mpo_oracle({{descriptor_oracle("mw"), 1.0, g1}, {descriptor_oracle("tpsa"), 3.0, g2}},
                        MpoAggregation::kArithmetic);
  // Aspirin: MW 180.159, TPSA 63.60.
  const double expected = (std::exp(-0.5 * std::pow((180.159 - 200.0) / 50.0, 2)) +
                           3.0 * std::exp(-0.5 * std::pow((63.60 - 70.0) / 20.0, 2))) /
                          4.0;
  CHECK(two->evaluate(m) == doctest::Approx(expected).epsilon(1e-4));
  CHECK(two->range().min == 0.0);
  CHECK(two->range().max == 1.0);

  Modifier clip{Modifier::Kind::kThresholdClip};
  clip.low = 2.0;
  clip.high = 4.0;
  CHECK(clip.apply(1.0) == 0.0);
  CHECK(clip.apply(3.0) == 0.5);
  CHECK(clip.apply(9.0) == 1.0);
  CHECK_THROWS_AS(mpo_oracle({}, MpoAggregation::kArithmetic), std::invalid_argument);
}

TEST_CASE("make_oracle: builds each type and rejects unknown keys") {
  CHECK(make_oracle(nlohmann::json::parse(R"({"type":"rediscovery","target":"CCO"})"))->name() == "rediscovery(CCO)");
  CHECK(make_oracle(nlohmann::json::parse(R"({"type":"constant","value":0.25,"range":[0,1]})"))
            ->evaluate(Molecule::parse("C")) == 0.25);
  const auto mpo = make_oracle(nlohmann::json::parse(R"({"type":"mpo","aggregation":"geometric","components":[
      {"oracle":{"type":"descriptor","name":"qed"},"weight":1,"modifier":{"type":"identity"}},
      {"oracle":{"type":"descriptor","name":"tpsa"},"weight":1,
       "modifier":{"type":"gaussian","center":60,"sigma":20}}]})"));
  CHECK(mpo->evaluate(Molecule::parse("CC(=O)Oc1ccccc1C(=O)O")) > 0.0);
  CHECK_THROWS_AS(make_oracle(nlohmann::json::parse(R"({"type":"rediscovery","target":"CCO","x":1})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_oracle(nlohmann::json::parse(R"({"type":"nope"})")), std::invalid_argument);
  CHECK_THROWS_AS(make_oracle(nlohmann::json::parse(R"({"type":"rediscovery","target":"C1CC"})")),
                  std::invalid_argument);
}

TEST_CASE("ledger: caching, budget and trace") {
  CountingOracle o;
  BudgetLedger ledger(3);
  const auto a = Molecule::parse("CCO");
  CHECK(ledger.evaluate(o, a) == ledger.evaluate(o, Molecule::parse("OCC")));
  CHECK(ledger.used() == 1);
  CHECK(ledger.cache_hits() == 1);
  ledger.evaluate(o, Molecule::parse("CCC"));
  ledger.evaluate(o, Molecule::parse("CCN"));
  CHECK(ledger.exhausted());
  CHECK_THROWS_AS(ledger.evaluate(o, Molecule::parse("CCCC")), BudgetExhausted);
  CHECK_NOTHROW(ledger.evaluate(o, a));  // cache hits stay free
  const auto t = ledger.trace();
  REQUIRE(t.entries.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(t.entries[i].call_index == i + 1);
  CHECK(o.calls == 3);
}

TEST_CASE("ledger: raw-call mode charges repeats but evaluates once") {
  CountingOracle o;
  BudgetLedger ledger(5, true);
  const auto a = Molecule::parse("CCO");
  for (int i = 0; i < 3; ++i) ledger.evaluate(o, a);
  CHECK(ledger.used() == 3);
  CHECK(ledger.trace().entries.size() == 3);
  CHECK(o.calls == 1);
}

TEST_CASE("ledger: failures release their reservation") {
  CountingOracle o("CCN");
  BudgetLedger ledger(2);
  CHECK_THROWS_AS(ledger.evaluate(o, Molecule::parse("CCN")), OracleError);
  CHECK(ledger.used() == 0);
  ledger.evaluate(o, Molecule::parse("CCO"));
  ledger.evaluate(o, Molecule::parse("CCC"));
  CHECK(ledger.used() == 2);
  CHECK(ledger.trace().entries.size() == 2);
}

TEST_CASE("ledger: range violations are errors") {
  BudgetLedger ledger(2);
  const auto bad = constant_oracle(2.0, {0.0, 5.0});
  class Liar final : public OracleSpec {
   public:
    ScoreRange range() const override { return {0.0, 1.0}; }
    double evaluate(const Molecule&) const override { return 1.5; }
    std::string name() const override { return "liar"; }
  } liar;
  try {
    ledger.evaluate(liar, Molecule::parse("C"));
    FAIL("expected a range violation");
  } catch (const OracleError& e) {
    CHECK(e.kind() == OracleError::Kind::kRangeViolation);
  }
  CHECK(ledger.used() == 0);
  CHECK(ledger.evaluate(*bad, Molecule::parse("C")) == 2.0);
}

TEST_CASE("ledger: concurrent evaluators never exceed the budget") {
  const auto& all = test::golden_smiles();
  std::vector<Molecule> mols;
  for (std::size_t i = 0; i < 150; ++i) mols.push_back(Molecule::parse(all[i]));
  for (std::uint64_t round = 0; round < 5; ++round) {
    CountingOracle o;
    BudgetLedger ledger(100);
    std::vector<std::thread> threads;
    for (int t = 0; t < 16; ++t) {
      threads.emplace_back([&, t] {
        Rng rng(mix_seed(round, static_cast<std::uint64_t>(t)));
        for (int k = 0; k < 40; ++k) {
          try {
            ledger.evaluate(o, mols[rng.index(mols.size())]);
          } catch (const BudgetExhausted&) {
          }
        }
      });
    }
    for (auto& th : threads) th.join();
    const auto trace = ledger.trace();
    CHECK(ledger.used() <= 100);
    CHECK(trace.entries.size() == ledger.used());
    CHECK(static_cast<std::size_t>(o.calls.load()) == ledger.used());
    std::set<std::string> unique;
    for (const auto& e : trace.entries) unique.insert(e.smiles);
    CHECK(unique.size() == trace.entries.size());
  }
}

TEST_CASE("trace csv round-trips") {
  RunTrace t{{{1, "CCO", 0.1}, {2, "c1ccccc1", 1.0 / 3.0}, {3, "CC(=O)O", 0.0}}, 10};
  CHECK(trace_from_csv(trace_to_csv(t), 10) == t);
  CHECK(trace_to_csv(RunTrace{}) == "call_index,smiles,score\n");
  CHECK_THROWS(trace_from_csv("call_index,smiles,score\n2,C,0.1\n1,CC,0.2\n", 10));
  CHECK_THROWS(trace_from_csv("call_index,smiles,score\n1,C,x\n", 10));
}

TEST_CASE("command oracle: scores, errors and timeout") {
  const auto o = command_oracle({script("length_oracle.sh")}, {0.0, 1.0}, 5.0);
  CHECK(o->evaluate(Molecule::parse("CCO")) == doctest::Approx(0.03));
  CHECK(error_kind(*command_oracle({script("garbage_oracle.sh")}, {0, 1}, 5.0), "C") ==
        OracleError::Kind::kMalformedReply);
  CHECK(error_kind(*command_oracle({script("failing_oracle.sh")}, {0, 1}, 5.0), "C") ==
        OracleError::Kind::kNonzeroExit);
  CHECK(error_kind(*command_oracle({script("out_of_range_oracle.sh")}, {0, 1}, 5.0), "C") ==
        OracleError::Kind::kRangeViolation);
  const auto start = std::chrono::steady_clock::now();
  CHECK(error_kind(*command_oracle({script("slow_oracle.sh")}, {0, 1}, 0.3), "C") == OracleError::Kind::kTimeout);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
  CHECK(error_kind(*command_oracle({"/nonexistent/oracle"}, {0, 1}, 1.0), "C") == OracleError::Kind::kTransport);
}

TEST_CASE("command oracle: concurrent calls") {
  const auto o = command_oracle({script("length_oracle.sh")}, {0.0, 1.0}, 10.0);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int k = 0; k < 5; ++k) ok += o->evaluate(Molecule::parse("CCCCO")) == 0.05;
    });
  }
  for (auto& th : threads) th.join();
  CHECK(ok == 40);
}

TEST_CASE("http oracle") {
  httplib::Server server;
  server.Post("/score", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const auto smiles = body.at("smiles").get<std::string>();
    if (smiles == "CCN") {
      res.set_content("{\"oops\": 1}", "application/json");
      return;
    }
    res.set_content(nlohmann::json{{"score", static_cast<double>(smiles.size()) / 10.0}}.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const auto url = "http://127.0.0.1:" + std::to_string(port);
  const auto o = http_oracle(url, {0.0, 1.0}, 2.0);
  CHECK(o->evaluate(Molecule::parse("CCO")) == doctest::Approx(0.3));
  CHECK(error_kind(*o, "CCN") == OracleError::Kind::kMalformedReply);
  server.stop();
  th.join();
  const auto kind = error_kind(*o, "CCO");
  CHECK((kind == OracleError::Kind::kTransport || kind == OracleError::Kind::kTimeout));
}
