//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <functional>

#include "molopt/descriptors.hpp"
#include "molopt/oracle.hpp"
#include "molopt/text.hpp"

namespace molopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class RediscoveryOracle final : public OracleSpec {
 public:
  explicit RediscoveryOracle(const std::string& target) : target_(Molecule::parse(target)), fp_(ecfc(*target_.graph, 2)) { }
  ScoreRange range() const override { return {0.0, 1.0}; }
  double evaluate(const Molecule& m) const override { return tanimoto(ecfc(*m.graph, 2), fp_); }
  std::string name() const override { return "rediscovery(" + target_.smiles.text + ")"; }

 private:
  Molecule target_;
  Fingerprint fp_;
};

class DescriptorOracle final : public OracleSpec {
 public:
  DescriptorOracle(std::string name, ScoreRange range, std::function<double(const chem::MolGraph&)> fn)
      : name_(std::move(name)), range_(range), fn_(std::move(fn)) { }
  ScoreRange range() const override { return range_; }
  double evaluate(const Molecule& m) const override { return fn_(*m.graph); }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  ScoreRange range_;
  std::function<double(const chem::MolGraph&)> fn_;
};

class ConstantOracle final : public OracleSpec {
 public:
  ConstantOracle(double value, ScoreRange range) : value_(value), range_(range) { }
  ScoreRange range() const override { return range_; }
  double evaluate(const Molecule&) const override { return value_; }
  std::string name() const override { return "constant(" + format_double(value_) + ")"; }

 private:
  double value_;
  ScoreRange range_;
};

class MpoOracle final : public OracleSpec {
 public:
  MpoOracle(std::vector<MpoComponent> components, MpoAggregation aggregation)
      : components_(std::move(components)), aggregation_(aggregation) {
    if (components_.empty()) throw std::invalid_argument("mpo oracle needs at least one component");
    for (const auto& c : components_) {
      if (!c.oracle) throw std::invalid_argument("mpo component without oracle");
      if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) throw std::invalid_argument("mpo weights must be non-negative");
      total_ += c.weight;
    }
    if (!(total_ > 0.0)) throw std::invalid_argument("mpo weights must have a positive sum");
    double lo = aggregation_ == MpoAggregation::kArithmetic ? 0.0 : 1.0;
    double hi = lo;
    for (const auto& c : components_) {
      const auto r = c.modifier.output_range(c.oracle->range());
      const double w = c.weight / total_;
      if (aggregation_ == MpoAggregation::kArithmetic) {
        lo += w * r.min;
        hi += w * r.max;
      } else {
        if (r.min < 0.0) throw std::invalid_argument("geometric mpo needs non-negative component outputs");
        lo *= std::pow(r.min, w);
        hi *= std::pow(r.max, w);
      }
    }
    range_ = {lo, hi};
  }

  ScoreRange range() const override { return range_; }

  double evaluate(const Molecule& m) const override {
    if (aggregation_ == MpoAggregation::kArithmetic) {
      double sum = 0.0;
      for (const auto& c : components_) sum += c.weight * c.modifier.apply(c.oracle->evaluate(m));
      return std::clamp(sum / total_, range_.min, range_.max);
    }
    double log_sum = 0.0;
    for (const auto& c : components_) {
      if (c.weight == 0.0) continue;
      const double v = c.modifier.apply(c.oracle->evaluate(m));
      if (v <= 0.0) return 0.0;
      log_sum += c.weight * std::log(v);
    }
    return std::clamp(std::exp(log_sum / total_), range_.min, range_.max);
  }

  std::string name() const override { return "mpo"; }

 private:
  std::vector<MpoComponent> components_;
  MpoAggregation aggregation_;
  double total_ = 0.0;
  ScoreRange range_;
};

}  // namespace

double Modifier::apply(double x) const {
  switch (kind) {
    case Kind::kIdentity: return x;
    case Kind::kGaussian: {
      const double z = (x - center) / sigma;
      return std::exp(-0.5 * z * z);
    }
    case Kind::kThresholdClip: return (std::clamp(x, low, high) - low) / (high - low);
  }
  return x;
}

ScoreRange Modifier::output_range(ScoreRange input) const {
  if (kind == Kind::kIdentity) return input;
  return {0.0, 1.0};
}

OraclePtr rediscovery_oracle(const std::string& target_smiles) { return std::make_shared<RediscoveryOracle>(target_smiles); }

LeadOptimizationOracle::LeadOptimizationOracle(const std::string& lead_smiles) {
  const auto m = Molecule::parse(lead_smiles);
  lead_ = m.smiles.text;
  lead_fp_ = ecfc(*m.graph, 2);
}

LeadAssessment LeadOptimizationOracle::assess(const Molecule& m) const {
  LeadAssessment a;
  a.similarity = tanimoto(ecfc(*m.graph, 2), lead_fp_);
  a.qed = qed(*m.graph);
  a.success = a.similarity >= 0.4 && a.qed >= 0.9;
  a.score = 0.5 * std::clamp(a.similarity / 0.4, 0.0, 1.0) + 0.5 * std::clamp(a.qed / 0.9, 0.0, 1.0);
  return a;
}

OraclePtr descriptor_oracle(const std::string& descriptor) {
  using G = const chem::MolGraph&;
  auto count = [](int v) { return static_cast<double>(v); };
  if (descriptor == "qed") return std::make_shared<DescriptorOracle>("qed", ScoreRange{0.0, 1.0}, [](G g) { return qed(g); });
  if (descriptor == "mw") return std::make_shared<DescriptorOracle>("mw", ScoreRange{0.0, kInf}, [](G g) { return molecular_weight(g); });
  if (descriptor == "tpsa") return std::make_shared<DescriptorOracle>("tpsa", ScoreRange{0.0, kInf}, [](G g) { return tpsa(g); });
  if (descriptor == "clogp") return std::make_shared<DescriptorOracle>("clogp", ScoreRange{-kInf, kInf}, [](G g) { return clogp(g); });
  if (descriptor == "hbd") return std::make_shared<DescriptorOracle>("hbd", ScoreRange{0.0, kInf}, [=](G g) { return count(hbd_hba(g).hbd); });
  if (descriptor == "hba") return std::make_shared<DescriptorOracle>("hba", ScoreRange{0.0, kInf}, [=](G g) { return count(hbd_hba(g).hba); });
  if (descriptor == "rotatable_bonds") {
    return std::make_shared<DescriptorOracle>("rotatable_bonds", ScoreRange{0.0, kInf}, [=](G g) { return count(rotatable_bonds(g)); });
  }
  if (descriptor == "rings") return std::make_shared<DescriptorOracle>("rings", ScoreRange{0.0, kInf}, [=](G g) { return count(ring_count(g)); });
  if (descriptor == "aromatic_rings") {
    return std::make_shared<DescriptorOracle>("aromatic_rings", ScoreRange{0.0, kInf}, [=](G g) { return count(aromatic_ring_count(g)); });
  }
  throw std::invalid_argument("unknown descriptor '" + descriptor + "'");
}

OraclePtr constant_oracle(double value, ScoreRange range) {
  if (!range.contains(value)) throw std::invalid_argument("constant oracle value outside its range");
  return std::make_shared<ConstantOracle>(value, range);
}

OraclePtr mpo_oracle(std::vector<MpoComponent> components, MpoAggregation aggregation) {
  return std::make_shared<MpoOracle>(std::move(components), aggregation);
}

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw std::invalid_argument(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw std::invalid_argument(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(where + ": key '" + key + "' has the wrong type");
  }
}

ScoreRange parse_range(const json& j, const std::string& where) {
  const auto v = required<std::vector<double>>(j, "range", where);
  if (v.size() != 2 || !(v[0] < v[1]) || !std::isfinite(v[0]) || !std::isfinite(v[1])) {
    throw std::invalid_argument(where + ": range must be [min, max] with finite min < max");
  }
  return {v[0], v[1]};
}

Modifier parse_modifier(const json& j, const std::string& where) {
  Modifier m;
  const auto type = required<std::string>(j, "type", where);
  if (type == "identity") {
    check_keys(j, {"type"}, where);
  } else if (type == "gaussian") {
    check_keys(j, {"type", "center", "sigma"}, where);
    m.kind = Modifier::Kind::kGaussian;
    m.center = required<double>(j, "center", where);
    m.sigma = required<double>(j, "sigma", where);
    if (!(m.sigma > 0.0)) throw std::invalid_argument(where + ": sigma must be positive");
  } else if (type == "threshold_clip") {
    check_keys(j, {"type", "low", "high"}, where);
    m.kind = Modifier::Kind::kThresholdClip;
    m.low = required<double>(j, "low", where);
    m.high = required<double>(j, "high", where);
    if (!(m.low < m.high)) throw std::invalid_argument(where + ": low must be below high");
  } else {
    throw std::invalid_argument(where + ": unknown modifier type '" + type + "'");
  }
  return m;
}

OraclePtr make_oracle_at(const json& j, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  const auto type = required<std::string>(j, "type", where);
  auto smiles_arg = [&](const char* key) {
    const auto s = required<std::string>(j, key, where);
    try {
      Molecule::parse(s);
    } catch (const std::exception& e) {
      throw std::invalid_argument(where + ": invalid SMILES in '" + key + "': " + e.what());
    }
    return s;
  };
  if (type == "rediscovery") {
    check_keys(j, {"type", "target"}, where);
    return rediscovery_oracle(smiles_arg("target"));
  }
  if (type == "lead_optimization") {
    check_keys(j, {"type", "lead"}, where);
    return std::make_shared<LeadOptimizationOracle>(smiles_arg("lead"));
  }
  if (type == "descriptor") {
    check_keys(j, {"type", "name"}, where);
    return descriptor_oracle(required<std::string>(j, "name", where));
  }
  if (type == "constant") {
    check_keys(j, {"type", "value", "range"}, where);
    return constant_oracle(required<double>(j, "value", where), j.contains("range") ? parse_range(j, where) : ScoreRange{});
  }
  if (type == "mpo") {
    check_keys(j, {"type", "aggregation", "components"}, where);
    const auto agg = j.value("aggregation", std::string("arithmetic"));
    MpoAggregation aggregation;
    if (agg == "arithmetic") {
      aggregation = MpoAggregation::kArithmetic;
    } else if (agg == "geometric") {
      aggregation = MpoAggregation::kGeometric;
    } else {
      throw std::invalid_argument(where + ": aggregation must be arithmetic or geometric");
    }
    if (!j.contains("components") || !j["components"].is_array()) throw std::invalid_argument(where + ": components must be an array");
    std::vector<MpoComponent> components;
    std::size_t i = 0;
    for (const auto& c : j["components"]) {
      const auto cw = where + ".components[" + std::to_string(i++) + "]";
      check_keys(c, {"oracle", "weight", "modifier"}, cw);
      MpoComponent comp;
      if (!c.contains("oracle")) throw std::invalid_argument(cw + ": missing key 'oracle'");
      comp.oracle = make_oracle_at(c["oracle"], cw + ".oracle");
      comp.weight = c.contains("weight") ? required<double>(c, "weight", cw) : 1.0;
      if (c.contains("modifier")) comp.modifier = parse_modifier(c["modifier"], cw + ".modifier");
      components.push_back(std::move(comp));
    }
    return mpo_oracle(std::move(components), aggregation);
  }
  if (type == "command") {
    check_keys(j, {"type", "argv", "range", "timeout_seconds"}, where);
    auto argv = required<std::vector<std::string>>(j, "argv", where);
    if (argv.empty()) throw std::invalid_argument(where + ": argv must not be empty");
    return command_oracle(std::move(argv), parse_range(j, where), j.value("timeout_seconds", 30.0));
  }
  if (type == "http") {
    check_keys(j, {"type", "url", "range", "timeout_seconds"}, where);
    return http_oracle(required<std::string>(j, "url", where), parse_range(j, where), j.value("timeout_seconds", 30.0));
  }
  throw std::invalid_argument(where + ": unknown oracle type '" + type + "'");
}

}  // namespace

OraclePtr make_oracle(const nlohmann::json& config) { return make_oracle_at(config, "oracle"); }

}  // namespace molopt
