#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "tfkg/baselines.hpp"
#include "tfkg/fewshot.hpp"
#include "tfkg/gbdt.hpp"
#include "tfkg/kgmodel.hpp"
#include "tfkg/records.hpp"
#include "tfkg/tfr.hpp"
#include "tfkg/triples.hpp"

namespace tfkg {

struct SyntheticConfig {
  std::size_t n_per_class = 131;
  double separation = 1.5;
};

struct TripleConfig {
  std::size_t n_similar = 3000;
  std::size_t n_nonsimilar = 3000;
  double train_fraction = 0.7;
  TripleSplitMode split = TripleSplitMode::triple_level;
};

struct FewshotConfig {
  std::size_t support_size = 5;
  MetaHyper hyper;
};

/// Everything a run depends on. Per-stage seeds are derived from `seed`.
struct PipelineConfig {
  std::uint64_t seed = 7;
  std::optional<std::filesystem::path> records;  // synthetic data when unset
  SyntheticConfig synthetic;
  std::size_t n_test_per_class = 10;
  GbdtParams gbdt;
  TripleConfig triples;
  KgHyper kg;
  BaselineHyper baselines;
  FewshotConfig fewshot;
  double tfr_threshold = kDefaultTfrThreshold;
  std::filesystem::path out_dir = "out";
};

/// Reads a config object; absent keys keep their defaults. Throws ConfigError
/// on unknown keys, wrong types and out-of-range values.
PipelineConfig config_from_json(const nlohmann::json& doc);
PipelineConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError describing the first invalid field.
void validate(const PipelineConfig& config);

/// Config echo. `out_dir` is left out so that reports do not depend on where
/// they are written.
nlohmann::json to_json(const PipelineConfig& config);

/// Stage seeds.
enum class Stage : std::uint64_t {
  records = 10,
  record_split = 11,
  triples = 12,
  triple_split = 13,
  kg = 14,
  kg_raw = 15,
  baselines = 16,
  tasks = 20,
  meta = 21,
};

std::uint64_t stage_seed(const PipelineConfig& config, Stage stage);

/// Loaded or generated records, split into historical (train) and held-out
/// (test) sets.
RecordSplit prepare_records(const PipelineConfig& config);

struct RelationAccuracies {
  double gbdt_kg = 0.0;
  double kg_only = 0.0;
  double lr = 0.0;
  double ann = 0.0;
};

struct RunArtifacts {
  PipelineConfig config;
  RecordSplit records;
  GbdtModel gbdt;
  TripleDataset triples;
  KgTrainResult kg;
  KgTrainResult kg_raw;
  LrTrainResult lr;
  AnnTrainResult ann;
  RelationAccuracies accuracy;
  TfrReport tfr;
};

/// split, gbdt, crosses, triples, kg with crosses, kg on raw features,
/// baselines, evaluation and TFR scoring of the held-out records. Errors are
/// rethrown with the failing stage's name prepended.
RunArtifacts run_pipeline(const PipelineConfig& config);

/// Deterministic summary of a run (no timings).
nlohmann::json run_report(const RunArtifacts& run);

/// Writes report.json and the model, triple, loss and TFR files into `dir`.
void write_run(const RunArtifacts& run, const std::filesystem::path& dir);

struct MetaArtifacts {
  std::vector<Task> tasks;
  MetaTrainResult trained;
  LinkPredictResult overall;
  std::vector<std::pair<Relation, LinkPredictResult>> per_relation;
};

/// Few-shot meta-training on the run's train triples; link prediction of the
/// test triples using each relation's training support set.
MetaArtifacts run_meta(const PipelineConfig& config);

nlohmann::json meta_metrics(const MetaArtifacts& meta);

void write_meta(const MetaArtifacts& meta, const std::filesystem::path& dir);

/// Serialized text of `doc` as written to disk.
std::string dump_json(const nlohmann::json& doc);

nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace tfkg
