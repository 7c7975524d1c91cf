//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "fields.hpp"
#include "molopt/calibration.hpp"
#include "molopt/cli.hpp"
#include "molopt/corpus.hpp"
#include "molopt/io.hpp"
#include "molopt/oracle.hpp"
#include "molopt/rng.hpp"
#include "molopt/text.hpp"

namespace molopt::cli {

namespace fs = std::filesystem;

namespace {

/// Runs fn(0..n-1) on up to `workers` threads; rethrows the first failure.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  io::write_file_atomic(path, j.dump(2) + "\n");
}

/// Settings shared by run and grid.
struct RunSetup {
  OraclePtr oracle;
  GeneratorSpec generator;
  OptimizerConfig optimizer;
  MetricOptions metrics;
  std::vector<std::uint64_t> seeds = {0};
  fs::path out = "out";
  std::size_t workers = 1;
  bool ablation = false;
  std::optional<GridAxes> grid;
};

RunSetup run_setup(const fs::path& config_path, const Overrides& ov, bool grid) {
  const auto j = load_config(config_path, grid ? "molopt.grid/1" : "molopt.run/1");
  const auto base = config_path.parent_path();
  RunSetup s;
  Fields f(j, "");
  f.raw("schema");
  const auto* task = f.raw("task");
  if (!task) throw ConfigError("task: required");
  try {
    s.oracle = make_oracle(*task);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("task: ") + e.what());
  }
  if (const auto* g = f.raw("generator")) s.generator = generator_spec(*g);
  if (const auto* o = f.raw("optimizer")) s.optimizer = optimizer_config(*o);
  if (const auto* m = f.raw("metrics")) s.metrics = metric_options(*m);
  f.opt("seeds", s.seeds);
  std::string out;
  if (f.opt("output", out)) s.out = resolve(base, out);
  f.opt("workers", s.workers);
  if (grid) {
    if (const auto* g = f.raw("grid")) {
      s.grid = grid_axes(*g);
    } else {
      s.grid = GridAxes{};
    }
  } else {
    f.opt("ablation", s.ablation);
  }
  f.done();
  if (ov.out) s.out = *ov.out;
  if (ov.seeds) s.seeds = *ov.seeds;
  if (ov.backend) s.generator.backend = *ov.backend;
  if (ov.remote_url) s.generator.url = *ov.remote_url;
  if (s.seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  if (s.generator.backend != "surrogate" && s.generator.backend != "remote") {
    throw ConfigError("backend: expected surrogate or remote");
  }
  if (s.generator.backend == "remote" && s.generator.url.empty()) throw ConfigError("remote backend needs a URL");
  return s;
}

struct SeedOutcome {
  RunResult result;
  MetricReport report;
};

SeedOutcome run_seed(const RunSetup& s, OptimizerConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  auto generator = make_generator(s.generator);
  SeedOutcome o;
  o.result = run(*s.oracle, *generator, cfg);
  o.report = make_report(o.result.trace, cfg.budget, s.metrics);
  if (const auto* lead = dynamic_cast<const LeadOptimizationOracle*>(s.oracle.get())) {
    bool success = false;
    for (const auto& e : o.result.trace.entries) {
      if (lead->assess(Molecule::parse(e.smiles)).success) {
        success = true;
        break;
      }
    }
    o.report.success_rate = success ? 1.0 : 0.0;
  }
  spdlog::info("seed {}: {} calls, auc_top10 {:.4f}, stop {}", seed, o.result.trace.entries.size(), o.report.auc_top10,
               o.result.stop_reason);
  return o;
}

nlohmann::json aggregate_with_success(const std::vector<MetricReport>& reports) {
  auto j = aggregate_reports(reports);
  std::vector<double> rates;
  for (const auto& r : reports) {
    if (r.success_rate) rates.push_back(*r.success_rate);
  }
  if (!rates.empty()) {
    const auto a = aggregate(rates);
    j["success_rate"] = {{"mean", a.mean}, {"std", a.stddev}, {"samples", a.count}};
  }
  return j;
}

/// Config errors exit 2, anything else that escapes exits 1.
int guarded(const char* command, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    spdlog::error("{}: invalid configuration: {}", command, e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", command, e.what());
    return kExitFailure;
  }
}

std::vector<MoleculeRecord> read_records(const fs::path& path, bool compute_missing) {
  const auto text = io::read_file(path);
  std::vector<MoleculeRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      auto rec = from_jsonl(line);
      if (compute_missing && rec.computed == ComputedProperties{}) rec.computed = make_record(rec.smiles).computed;
      out.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

int cmd_run(const fs::path& config, const Overrides& overrides) {
  return guarded("run", [&] {
    const auto s = run_setup(config, overrides, false);
    fs::create_directories(s.out);
    const auto n = s.seeds.size();
    std::vector<SeedOutcome> tuned(n), plain(s.ablation ? n : 0);
    parallel_for(s.ablation ? 2 * n : n, s.workers, [&](std::size_t i) {
      if (i < n) {
        tuned[i] = run_seed(s, s.optimizer, s.seeds[i]);
      } else {
        auto cfg = s.optimizer;
        cfg.tune_enabled = false;
        plain[i - n] = run_seed(s, cfg, s.seeds[i - n]);
      }
    });
    std::vector<MetricReport> reports;
    for (std::size_t i = 0; i < n; ++i) {
      const auto seed = std::to_string(s.seeds[i]);
      io::write_file_atomic(s.out / ("trace_seed" + seed + ".csv"), trace_to_csv(tuned[i].result.trace));
      auto summary = run_summary(tuned[i].result, [&] {
        auto c = s.optimizer;
        c.seed = s.seeds[i];
        return c;
      }());
      summary["metrics"] = report_to_json(tuned[i].report);
      write_json(s.out / ("summary_seed" + seed + ".json"), summary);
      reports.push_back(tuned[i].report);
    }
    auto agg = aggregate_with_success(reports);
    agg["task"] = s.oracle->name();
    if (s.ablation) {
      std::vector<MetricReport> no_tune;
      for (std::size_t i = 0; i < n; ++i) {
        io::write_file_atomic(s.out / ("trace_seed" + std::to_string(s.seeds[i]) + "_no_tune.csv"),
                          trace_to_csv(plain[i].result.trace));
        no_tune.push_back(plain[i].report);
      }
      agg["ablation"] = {{"auc_top10_tuned", agg["auc_top10"]},
                         {"auc_top10_no_tune", aggregate_reports(no_tune)["auc_top10"]}};
    }
    write_json(s.out / "aggregate.json", agg);
    spdlog::info("run: wrote {} traces to {}", n, s.out.string());
    return kExitOk;
  });
}

int cmd_grid(const fs::path& config, const Overrides& overrides) {
  return guarded("grid", [&] {
    const auto s = run_setup(config, overrides, true);
    fs::create_directories(s.out);
    const auto cells = grid_cells(*s.grid);
    const auto n = s.seeds.size();
    std::vector<MetricReport> reports(cells.size() * n);
    parallel_for(reports.size(), s.workers, [&](std::size_t i) {
      const auto& cell = cells[i / n];
      auto cfg = s.optimizer;
      cfg.P = cell.P;
      cfg.S = cell.S;
      cfg.K = cell.K;
      cfg.tune.peak_lr = cell.lr;
      cfg.max_tune_rounds = s.optimizer.max_tune_rounds;
      reports[i] = run_seed(s, cfg, s.seeds[i % n]).report;
    });
    std::string csv = "P,S,K,lr,auc_mean,auc_std,seeds\n";
    nlohmann::json cells_json = nlohmann::json::array();
    std::vector<double> means;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::vector<MetricReport> cell_reports(reports.begin() + static_cast<std::ptrdiff_t>(c * n),
                                                   reports.begin() + static_cast<std::ptrdiff_t>((c + 1) * n));
      auto agg = aggregate_with_success(cell_reports);
      const double mean = agg["auc_top10"]["mean"].get<double>();
      const double sd = agg["auc_top10"]["std"].get<double>();
      means.push_back(mean);
      const auto& cell = cells[c];
      csv += std::to_string(cell.P) + ',' + std::to_string(cell.S) + ',' + std::to_string(cell.K) + ',' +
             format_double(cell.lr) + ',' + format_double(mean) + ',' + format_double(sd) + ',' + std::to_string(n) +
             '\n';
      agg["P"] = cell.P;
      agg["S"] = cell.S;
      agg["K"] = cell.K;
      agg["lr"] = cell.lr;
      cells_json.push_back(agg);
    }
    const auto best = best_cell(means);
    io::write_file_atomic(s.out / "grid.csv", csv);
    write_json(s.out / "grid.json", {{"task", s.oracle->name()}, {"cells", cells_json}, {"best", cells_json[best]}});
    spdlog::info("grid: {} cells, best P={} S={} K={} lr={} auc {:.4f}", cells.size(), cells[best].P, cells[best].S,
                 cells[best].K, cells[best].lr, means[best]);
    return kExitOk;
  });
}

int cmd_corpus(const fs::path& config, const Overrides& overrides) {
  return guarded("corpus", [&] {
    const auto j = load_config(config, "molopt.corpus/1");
    Fields f(j, "");
    f.raw("schema");
    const auto input = resolve(config.parent_path(), f.req<std::string>("input"));
    std::uint64_t seed = 0;
    std::size_t block_size = 2048;
    bool compute_missing = true, shuffle = true;
    fs::path out = "out";
    std::string out_s;
    f.opt("seed", seed);
    f.opt("block_size", block_size);
    f.opt("compute_missing", compute_missing);
    f.opt("shuffle_properties", shuffle);
    if (f.opt("output", out_s)) out = resolve(config.parent_path(), out_s);
    f.done();
    if (block_size == 0) throw ConfigError("block_size must be positive");
    if (overrides.out) out = *overrides.out;
    if (overrides.seeds && !overrides.seeds->empty()) seed = overrides.seeds->front();

    const auto records = read_records(input, compute_missing);
    ReferenceTokenizer tok;
    BlockPacker packer(tok, *tok.special_token(tags::kEos), block_size);
    std::string documents, blocks;
    std::size_t block_count = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      RenderPolicy policy;
      policy.rng_seed = mix_seed(seed, i);
      policy.shuffle_properties = shuffle;
      const auto doc = render(records[i], policy);
      documents += doc;
      documents += '\n';
      for (const auto& b : packer.push(doc)) {
        for (std::size_t t = 0; t < b.size(); ++t) {
          if (t) blocks += ' ';
          blocks += std::to_string(b[t]);
        }
        blocks += '\n';
        ++block_count;
      }
    }
    fs::create_directories(out);
    io::write_file_atomic(out / "documents.txt", documents);
    io::write_file_atomic(out / "blocks.txt", blocks);
    write_json(out / "corpus_summary.json", {{"documents", records.size()},
                                             {"blocks", block_count},
                                             {"block_size", block_size},
                                             {"dropped_tail_tokens", packer.pending()},
                                             {"seed", seed}});
    spdlog::info("corpus: {} documents, {} blocks", records.size(), block_count);
    return kExitOk;
  });
}

int cmd_calibrate(const fs::path& config, const Overrides& overrides) {
  return guarded("calibrate", [&] {
    const auto j = load_config(config, "molopt.calibrate/1");
    Fields f(j, "");
    f.raw("schema");
    const auto records_path = resolve(config.parent_path(), f.req<std::string>("records"));
    std::vector<std::string> properties = {"WEIGHT", "TPSA", "CLOGP", "SAS", "QED", "NUMHDONORS", "NUMHACCEPTORS",
                                           "RINGCOUNT", "NUMAROMATICRINGS", "NUMROTATABLEBONDS"};
    std::size_t count = 2000, workers = 1;
    std::uint64_t seed = 0;
    std::string norm = "length_normalized", out_s;
    bool compute_missing = true;
    fs::path out = "out";
    GeneratorSpec gen;
    f.opt("properties", properties);
    f.opt("count", count);
    f.opt("seed", seed);
    f.opt("normalization", norm);
    f.opt("workers", workers);
    f.opt("compute_missing", compute_missing);
    if (const auto* g = f.raw("generator")) gen = generator_spec(*g);
    if (f.opt("output", out_s)) out = resolve(config.parent_path(), out_s);
    f.done();
    Normalization mode;
    if (norm == "length_normalized") {
      mode = Normalization::kLengthNormalized;
    } else if (norm == "raw") {
      mode = Normalization::kRaw;
    } else {
      throw ConfigError("normalization: expected \"length_normalized\" or \"raw\"");
    }
    for (const auto& p : properties) {
      try {
        (void)rendered_property(ComputedProperties{}, p);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("properties: ") + e.what());
      }
    }
    if (overrides.out) out = *overrides.out;
    if (overrides.seeds && !overrides.seeds->empty()) seed = overrides.seeds->front();
    if (overrides.backend) gen.backend = *overrides.backend;
    if (overrides.remote_url) gen.url = *overrides.remote_url;

    const auto records = read_records(records_path, compute_missing);
    auto backend = make_generator(gen);
    BackendChoiceScorer scorer(*backend);
    fs::create_directories(out);
    nlohmann::json summary = nlohmann::json::object();
    for (std::size_t k = 0; k < properties.size(); ++k) {
      const auto& tag = properties[k];
      Rng rng(mix_seed(seed, k));
      const auto items = build_mcq(records, tag, count, rng);
      const auto result = calibration_table(items, scorer, mode, workers);
      io::write_file_atomic(out / ("calibration_" + tag + ".csv"), calibration_to_csv(result));
      std::size_t correct = 0;
      for (const auto& r : result.items) correct += r.correct ? 1 : 0;
      summary[tag] = {{"items", items.size()},
                      {"accuracy", items.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(items.size())}};
      spdlog::info("calibrate: {} items for {}", items.size(), tag);
    }
    write_json(out / "calibration.json", summary);
    return kExitOk;
  });
}

int cmd_metrics(const fs::path& config, const Overrides& overrides) {
  return guarded("metrics", [&] {
    const auto j = load_config(config, "molopt.metrics/1");
    Fields f(j, "");
    f.raw("schema");
    const auto trace_path = resolve(config.parent_path(), f.req<std::string>("trace"));
    const auto budget = f.req<std::size_t>("budget");
    std::optional<std::vector<double>> range;
    f.opt("oracle_range", range);
    MetricOptions options;
    if (const auto* m = f.raw("metrics")) options = metric_options(*m);
    fs::path out = "out";
    std::string out_s;
    if (f.opt("output", out_s)) out = resolve(config.parent_path(), out_s);
    f.done();
    if (range && (range->size() != 2 || (*range)[0] > (*range)[1])) {
      throw ConfigError("oracle_range: expected [low, high]");
    }
    if (overrides.out) out = *overrides.out;

    const auto trace = trace_from_csv(io::read_file(trace_path), budget);
    if (range) {
      for (const auto& e : trace.entries) {
        if (e.score < (*range)[0] || e.score > (*range)[1]) {
          throw std::runtime_error("call " + std::to_string(e.call_index) + " score " + format_double(e.score) +
                                   " is outside the oracle range");
        }
      }
    }
    const auto report = make_report(trace, budget, options);
    fs::create_directories(out);
    write_json(out / "metrics.json", report_to_json(report));
    io::write_file_atomic(out / "metrics.csv", report_to_csv(report));
    spdlog::info("metrics: {} calls, auc_top10 {:.4f}", report.calls, report.auc_top10);
    return kExitOk;
  });
}

}  // namespace molopt::cli
