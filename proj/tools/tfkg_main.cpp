#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tfkg/errors.hpp"
#include "tfkg/pipeline.hpp"

namespace fs = std::filesystem;
using namespace tfkg;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "Seed (overrides the config)");
  cmd->add_option("--out", opts.out, "Output directory (overrides the config)");
}

PipelineConfig resolve(const CommonOptions& opts) {
  PipelineConfig config = opts.config_path.empty() ? PipelineConfig{} : load_config(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  if (!opts.out.empty()) config.out_dir = opts.out;
  validate(config);
  return config;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_timing(const fs::path& dir, double seconds) {
  std::ofstream out(dir / "timing.json");
  out << dump_json({{"wall_clock_seconds", seconds}});
}

int cmd_generate(const CommonOptions& opts) {
  const PipelineConfig config = resolve(opts);
  const auto records = generate_synthetic(config.synthetic.n_per_class, config.synthetic.separation,
                                          stage_seed(config, Stage::records));
  fs::create_directories(config.out_dir);
  save_records(config.out_dir / "records.csv", records);
  std::cout << "wrote " << records.size() << " records to " << (config.out_dir / "records.csv").string() << '\n';
  return 0;
}

int cmd_run(const CommonOptions& opts) {
  const PipelineConfig config = resolve(opts);
  const auto start = std::chrono::steady_clock::now();
  const RunArtifacts run = run_pipeline(config);
  write_run(run, config.out_dir);
  write_timing(config.out_dir, seconds_since(start));

  const auto& a = run.accuracy;
  std::cout << std::fixed << std::setprecision(4) << "relation accuracy  gbdt+kg " << a.gbdt_kg << "  kg-only "
            << a.kg_only << "  lr " << a.lr << "  ann " << a.ann << '\n';
  std::size_t correct = 0;
  for (std::size_t i = 0; i < run.tfr.rows.size(); ++i) {
    if (run.tfr.rows[i].verdict == run.records.test[i].label) ++correct;
  }
  std::cout << "tfr verdicts correct " << correct << '/' << run.tfr.rows.size() << '\n';
  std::cout << "outputs in " << config.out_dir.string() << '\n';
  return 0;
}

int cmd_meta(const CommonOptions& opts) {
  const PipelineConfig config = resolve(opts);
  const auto start = std::chrono::steady_clock::now();
  const MetaArtifacts meta = run_meta(config);
  write_meta(meta, config.out_dir);
  write_timing(config.out_dir, seconds_since(start));
  std::cout << std::fixed << std::setprecision(4) << "hits@1 " << meta.overall.hits1 << "  hits@5 "
            << meta.overall.hits5 << "  mrr " << meta.overall.mrr << "  (" << meta.overall.ranks.size()
            << " queries)\n";
  return 0;
}

int cmd_predict(const fs::path& models, const fs::path& records_path, double threshold, const std::string& out) {
  const GbdtModel gbdt = gbdt_from_json(load_json(models / "gbdt.json"));
  const KgParams kg = kg_params_from_json(load_json(models / "kg.json"));
  const auto historical = load_records(models / "historical.csv");
  const auto records = load_records(records_path);
  const TfrReport report = score_records(kg, gbdt, records, historical, threshold);
  if (out.empty()) {
    write_tfr_csv(std::cout, report);
  } else {
    fs::create_directories(out);
    save_tfr_csv(fs::path(out) / "predictions.csv", report);
  }
  return 0;
}

int cmd_report(const fs::path& dir) {
  const nlohmann::json report = load_json(dir / "report.json");
  try {
    const auto& acc = report.at("accuracy");
    std::printf("seed %llu\n", static_cast<unsigned long long>(report.at("seed").get<std::uint64_t>()));
    std::printf("%-10s %8s\n", "model", "accuracy");
    for (const char* m : {"gbdt_kg", "kg_only", "lr", "ann"}) std::printf("%-10s %8.4f\n", m, acc.at(m).get<double>());
    const auto& tfr = report.at("tfr");
    std::printf("\nTFR (threshold %.2f, NS = %zu)\n", tfr.at("threshold").get<double>(),
                tfr.at("historical_count").get<std::size_t>());
    std::printf("%-8s %5s %5s %5s %5s %8s  %s\n", "id", "Ls", "Ld", "Ss", "Sd", "tfr", "verdict");
    for (const auto& r : tfr.at("rows")) {
      std::printf("%-8s %5zu %5zu %5zu %5zu %8.4f  %s\n", r.at("id").get<std::string>().c_str(),
                  r.at("Ls").get<std::size_t>(), r.at("Ld").get<std::size_t>(), r.at("Ss").get<std::size_t>(),
                  r.at("Sd").get<std::size_t>(), r.at("tfr").get<double>(), r.at("verdict").get<std::string>().c_str());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed report '" + (dir / "report.json").string() + "': " + e.what());
  }
  return 0;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::argument:
    case ErrorKind::config:
      return kExitConfig;
    case ErrorKind::data:
      return kExitData;
    case ErrorKind::numeric:
      return kExitNumeric;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transformer fault risk from knowledge-graph embeddings"};
  app.require_subcommand(1);

  CommonOptions generate_opts, run_opts, meta_opts;
  auto* generate = app.add_subcommand("generate", "Write a synthetic records CSV");
  add_common(generate, generate_opts);
  auto* run = app.add_subcommand("run", "Train all models, evaluate and score held-out records");
  add_common(run, run_opts);
  auto* meta = app.add_subcommand("meta", "Few-shot meta-training and link prediction");
  add_common(meta, meta_opts);

  std::string models_dir, records_path, predict_out;
  double threshold = kDefaultTfrThreshold;
  auto* predict = app.add_subcommand("predict", "Score records against a stored run");
  predict->add_option("--models", models_dir, "Directory written by `run`")->required();
  predict->add_option("--records", records_path, "Records CSV to score")->required();
  predict->add_option("--threshold", threshold, "Fault threshold on TFR")->check(CLI::Range(0.0, 1.0));
  predict->add_option("--out", predict_out, "Write predictions.csv here instead of stdout");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Summarize a run's report.json");
  report->add_option("--out", report_dir, "Directory written by `run`")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*generate) return cmd_generate(generate_opts);
    if (*run) return cmd_run(run_opts);
    if (*meta) return cmd_meta(meta_opts);
    if (*predict) return cmd_predict(models_dir, records_path, threshold, predict_out);
    if (*report) return cmd_report(report_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
