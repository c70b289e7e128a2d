#include "tfkg/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "tfkg/errors.hpp"
#include "tfkg/rng.hpp"

namespace tfkg {

namespace {

using nlohmann::json;

// Reads the keys of one config object and rejects any it did not consume.
class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(where() + " must be an object");
  }

  const json* take(const std::string& key) {
    seen_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  void count(const std::string& key, std::size_t& dst) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
        throw ConfigError(where(key) + " must be a non-negative integer");
      }
      dst = v->get<std::size_t>();
    }
  }

  void seed(const std::string& key, std::uint64_t& dst) {
    if (const json* v = take(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(where(key) + " must be a non-negative integer");
      dst = v->get<std::uint64_t>();
    }
  }

  void real(const std::string& key, double& dst) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + " must be a number");
      dst = v->get<double>();
    }
  }

  void text(const std::string& key, const std::function<void(const std::string&)>& apply) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + " must be a string");
      apply(v->get<std::string>());
    }
  }

  void child(const std::string& key, const std::function<void(Section&)>& read) {
    if (const json* v = take(key)) {
      Section s(*v, where(key));
      read(s);
      s.finish();
    }
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + where(key) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string_view split_mode_name(TripleSplitMode mode) {
  return mode == TripleSplitMode::triple_level ? "triple_level" : "entity_disjoint";
}

TripleSplitMode parse_split_mode(const std::string& text) {
  if (text == "triple_level") return TripleSplitMode::triple_level;
  if (text == "entity_disjoint") return TripleSplitMode::entity_disjoint;
  throw ConfigError("triples.split must be 'triple_level' or 'entity_disjoint', got '" + text + "'");
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

template <typename F>
auto in_stage(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  }
}

EntityVectors cross_vectors(const GbdtModel& gbdt, std::span<const TransformerRecord> records) {
  EntityVectors out;
  for (const auto& r : records) out.emplace(r.id, feature_cross(gbdt, r.features));
  return out;
}

EntityVectors raw_vectors(std::span<const TransformerRecord> records) {
  EntityVectors out;
  for (const auto& r : records) out.emplace(r.id, std::vector<double>(r.features.begin(), r.features.end()));
  return out;
}

KgHyper seeded(KgHyper hyper, std::uint64_t seed) {
  hyper.seed = seed;
  return hyper;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

void save_loss_csv(const std::filesystem::path& path, std::span<const double> trace,
                   const char* column = "mean_loss") {
  std::ostringstream out;
  out << "epoch," << column << '\n';
  for (std::size_t e = 0; e < trace.size(); ++e) out << e << ',' << format_real(trace[e]) << '\n';
  write_text(path, out.str());
}

json metrics_json(const LinkPredictResult& r) {
  return {{"hits1", r.hits1}, {"hits5", r.hits5}, {"mrr", r.mrr}, {"query_count", r.ranks.size()}};
}

}  // namespace

PipelineConfig config_from_json(const json& doc) {
  PipelineConfig c;
  Section root(doc, "");
  root.seed("seed", c.seed);
  if (const json* v = root.take("records")) {
    if (v->is_string()) {
      c.records = v->get<std::string>();
    } else if (!v->is_null()) {
      throw ConfigError("records must be a path string or null");
    }
  }
  root.child("synthetic", [&](Section& s) {
    s.count("n_per_class", c.synthetic.n_per_class);
    s.real("separation", c.synthetic.separation);
  });
  root.count("n_test_per_class", c.n_test_per_class);
  root.child("gbdt", [&](Section& s) {
    s.count("n_trees", c.gbdt.n_trees);
    s.count("max_depth", c.gbdt.max_depth);
    s.real("shrinkage", c.gbdt.shrinkage);
    s.count("min_samples_leaf", c.gbdt.min_samples_leaf);
  });
  root.child("triples", [&](Section& s) {
    s.count("n_similar", c.triples.n_similar);
    s.count("n_nonsimilar", c.triples.n_nonsimilar);
    s.real("train_fraction", c.triples.train_fraction);
    s.text("split", [&](const std::string& v) { c.triples.split = parse_split_mode(v); });
  });
  root.child("kg", [&](Section& s) {
    s.real("learning_rate", c.kg.learning_rate);
    s.count("epochs", c.kg.epochs);
    s.count("batch_size", c.kg.batch_size);
    s.text("norm", [&](const std::string& v) { c.kg.norm = parse_norm(v); });
    s.real("beta1", c.kg.beta1);
    s.real("beta2", c.kg.beta2);
    s.real("epsilon", c.kg.epsilon);
  });
  root.child("baselines", [&](Section& s) {
    s.real("learning_rate", c.baselines.learning_rate);
    s.count("epochs", c.baselines.epochs);
    s.count("hidden", c.baselines.hidden);
    s.real("negative_slope", c.baselines.negative_slope);
  });
  root.child("fewshot", [&](Section& s) {
    MetaHyper& h = c.fewshot.hyper;
    s.count("support_size", c.fewshot.support_size);
    s.real("beta", h.beta);
    s.real("gamma", h.gamma);
    s.real("learning_rate", h.learning_rate);
    s.count("epochs", h.epochs);
    s.count("dim", h.dim);
    s.count("layers", h.layers);
    s.count("hidden", h.hidden);
    s.real("negative_slope", h.negative_slope);
  });
  root.child("tfr", [&](Section& s) { s.real("threshold", c.tfr_threshold); });
  root.text("out_dir", [&](const std::string& v) { c.out_dir = v; });
  root.finish();
  validate(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

void validate(const PipelineConfig& c) {
  require(c.synthetic.n_per_class > 0, "synthetic.n_per_class must be positive");
  require(std::isfinite(c.synthetic.separation) && c.synthetic.separation >= 0.0,
          "synthetic.separation must be a non-negative number");
  require(c.n_test_per_class > 0, "n_test_per_class must be positive");
  require(c.records || c.synthetic.n_per_class > c.n_test_per_class,
          "synthetic.n_per_class must exceed n_test_per_class");
  require(c.gbdt.n_trees > 0, "gbdt.n_trees must be positive");
  require(c.gbdt.max_depth > 0, "gbdt.max_depth must be positive");
  require(c.gbdt.shrinkage > 0.0 && c.gbdt.shrinkage <= 1.0, "gbdt.shrinkage must lie in (0, 1]");
  require(c.gbdt.min_samples_leaf > 0, "gbdt.min_samples_leaf must be positive");
  require(c.triples.n_similar > 0, "triples.n_similar must be positive");
  require(c.triples.n_nonsimilar > 0, "triples.n_nonsimilar must be positive");
  require(c.triples.train_fraction > 0.0 && c.triples.train_fraction < 1.0,
          "triples.train_fraction must lie in (0, 1)");
  require(c.kg.learning_rate > 0.0, "kg.learning_rate must be positive");
  require(c.kg.epochs > 0, "kg.epochs must be positive");
  require(c.kg.batch_size > 0, "kg.batch_size must be positive");
  require(c.kg.beta1 >= 0.0 && c.kg.beta1 < 1.0, "kg.beta1 must lie in [0, 1)");
  require(c.kg.beta2 >= 0.0 && c.kg.beta2 < 1.0, "kg.beta2 must lie in [0, 1)");
  require(c.kg.epsilon > 0.0, "kg.epsilon must be positive");
  require(c.baselines.learning_rate > 0.0, "baselines.learning_rate must be positive");
  require(c.baselines.epochs > 0, "baselines.epochs must be positive");
  require(c.baselines.hidden > 0, "baselines.hidden must be positive");
  require(std::isfinite(c.baselines.negative_slope), "baselines.negative_slope must be finite");
  const MetaHyper& h = c.fewshot.hyper;
  require(c.fewshot.support_size > 0, "fewshot.support_size must be positive");
  require(h.beta >= 0.0, "fewshot.beta must be non-negative");
  require(h.gamma >= 0.0, "fewshot.gamma must be non-negative");
  require(h.learning_rate > 0.0, "fewshot.learning_rate must be positive");
  require(h.epochs > 0, "fewshot.epochs must be positive");
  require(h.dim > 0, "fewshot.dim must be positive");
  require(h.layers > 0, "fewshot.layers must be positive");
  require(std::isfinite(h.negative_slope), "fewshot.negative_slope must be finite");
  require(c.tfr_threshold >= 0.0 && c.tfr_threshold <= 1.0, "tfr.threshold must lie in [0, 1]");
  require(!c.out_dir.empty(), "out_dir must not be empty");
}

json to_json(const PipelineConfig& c) {
  const MetaHyper& h = c.fewshot.hyper;
  return {
      {"seed", c.seed},
      {"records", c.records ? json(c.records->string()) : json(nullptr)},
      {"synthetic", {{"n_per_class", c.synthetic.n_per_class}, {"separation", c.synthetic.separation}}},
      {"n_test_per_class", c.n_test_per_class},
      {"gbdt",
       {{"n_trees", c.gbdt.n_trees},
        {"max_depth", c.gbdt.max_depth},
        {"shrinkage", c.gbdt.shrinkage},
        {"min_samples_leaf", c.gbdt.min_samples_leaf}}},
      {"triples",
       {{"n_similar", c.triples.n_similar},
        {"n_nonsimilar", c.triples.n_nonsimilar},
        {"train_fraction", c.triples.train_fraction},
        {"split", std::string(split_mode_name(c.triples.split))}}},
      {"kg",
       {{"learning_rate", c.kg.learning_rate},
        {"epochs", c.kg.epochs},
        {"batch_size", c.kg.batch_size},
        {"norm", std::string(to_string(c.kg.norm))},
        {"beta1", c.kg.beta1},
        {"beta2", c.kg.beta2},
        {"epsilon", c.kg.epsilon}}},
      {"baselines",
       {{"learning_rate", c.baselines.learning_rate},
        {"epochs", c.baselines.epochs},
        {"hidden", c.baselines.hidden},
        {"negative_slope", c.baselines.negative_slope}}},
      {"fewshot",
       {{"support_size", c.fewshot.support_size},
        {"beta", h.beta},
        {"gamma", h.gamma},
        {"learning_rate", h.learning_rate},
        {"epochs", h.epochs},
        {"dim", h.dim},
        {"layers", h.layers},
        {"hidden", h.hidden},
        {"negative_slope", h.negative_slope}}},
      {"tfr", {{"threshold", c.tfr_threshold}}},
  };
}

std::uint64_t stage_seed(const PipelineConfig& config, Stage stage) {
  return mix_seed(config.seed, static_cast<std::uint64_t>(stage));
}

RecordSplit prepare_records(const PipelineConfig& config) {
  const std::vector<TransformerRecord> records = in_stage("records", [&] {
    return config.records ? load_records(*config.records)
                          : generate_synthetic(config.synthetic.n_per_class, config.synthetic.separation,
                                               stage_seed(config, Stage::records));
  });
  return in_stage("split", [&] {
    return split_records(records, config.n_test_per_class, stage_seed(config, Stage::record_split));
  });
}

RunArtifacts run_pipeline(const PipelineConfig& config) {
  validate(config);
  RunArtifacts run;
  run.config = config;
  run.records = prepare_records(config);
  const auto& train = run.records.train;

  run.gbdt = in_stage("gbdt", [&] { return train_gbdt(train, config.gbdt); });
  const EntityVectors crosses = in_stage("crosses", [&] { return cross_vectors(run.gbdt, train); });
  const EntityVectors raw = raw_vectors(train);

  run.triples = in_stage("triples", [&] {
    const auto all = build_triples(train, config.triples.n_similar, config.triples.n_nonsimilar,
                                   stage_seed(config, Stage::triples));
    return split_triples(all, config.triples.train_fraction, stage_seed(config, Stage::triple_split),
                         config.triples.split);
  });

  run.kg = in_stage("kg", [&] {
    return train_kg(run.triples.train, crosses, seeded(config.kg, stage_seed(config, Stage::kg)));
  });
  run.kg_raw = in_stage("kg_raw", [&] {
    return train_kg(run.triples.train, raw, seeded(config.kg, stage_seed(config, Stage::kg_raw)));
  });

  BaselineHyper bh = config.baselines;
  bh.seed = stage_seed(config, Stage::baselines);
  const auto pairs_train = in_stage("baselines", [&] { return pairize(run.triples.train, train); });
  const auto pairs_test = in_stage("baselines", [&] { return pairize(run.triples.test, train); });
  run.lr = in_stage("lr", [&] { return train_lr(pairs_train, bh); });
  run.ann = in_stage("ann", [&] { return train_ann(pairs_train, bh); });

  run.accuracy = in_stage("evaluate", [&] {
    return RelationAccuracies{evaluate_accuracy(run.kg.params, run.triples.test, crosses),
                              evaluate_accuracy(run.kg_raw.params, run.triples.test, raw),
                              accuracy(run.lr.model, pairs_test), accuracy(run.ann.model, pairs_test)};
  });

  run.tfr = in_stage("tfr", [&] {
    return score_records(run.kg.params, run.gbdt, run.records.test, train, config.tfr_threshold);
  });
  return run;
}

json run_report(const RunArtifacts& run) {
  const ClassCounts train = run.records.train_counts();
  const ClassCounts test = run.records.test_counts();
  const RelationCounts tr = count_relations(run.triples.train);
  const RelationCounts te = count_relations(run.triples.test);
  return {
      {"config", to_json(run.config)},
      {"seed", run.config.seed},
      {"data",
       {{"historical", {{"fault", train.fault}, {"stable", train.stable}}},
        {"held_out", {{"fault", test.fault}, {"stable", test.stable}}},
        {"triples_train", {{"similar", tr.similar}, {"non_similar", tr.non_similar}}},
        {"triples_test", {{"similar", te.similar}, {"non_similar", te.non_similar}}},
        {"cross_dim", run.gbdt.total_leaves()}}},
      {"accuracy",
       {{"gbdt_kg", run.accuracy.gbdt_kg},
        {"kg_only", run.accuracy.kg_only},
        {"lr", run.accuracy.lr},
        {"ann", run.accuracy.ann}}},
      {"loss",
       {{"gbdt_kg", run.kg.loss_trace},
        {"kg_only", run.kg_raw.loss_trace},
        {"lr", run.lr.loss_trace},
        {"ann", run.ann.loss_trace}}},
      {"tfr", to_json(run.tfr)},
  };
}

void write_run(const RunArtifacts& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", dump_json(run_report(run)));
  write_text(dir / "gbdt.json", dump_json(to_json(run.gbdt)));
  write_text(dir / "kg.json", dump_json(to_json(run.kg.params)));
  write_text(dir / "kg_raw.json", dump_json(to_json(run.kg_raw.params)));
  write_text(dir / "lr.json", dump_json(to_json(run.lr.model)));
  write_text(dir / "ann.json", dump_json(to_json(run.ann.model)));
  save_records(dir / "historical.csv", run.records.train);
  save_records(dir / "held_out.csv", run.records.test);
  save_triples(dir / "triples_train.csv", run.triples.train);
  save_triples(dir / "triples_test.csv", run.triples.test);
  save_loss_csv(dir / "loss_kg.csv", run.kg.loss_trace);
  save_loss_csv(dir / "loss_kg_raw.csv", run.kg_raw.loss_trace);
  save_loss_csv(dir / "loss_lr.csv", run.lr.loss_trace);
  save_loss_csv(dir / "loss_ann.csv", run.ann.loss_trace);
  save_tfr_csv(dir / "tfr.csv", run.tfr);
}

MetaArtifacts run_meta(const PipelineConfig& config) {
  validate(config);
  const RecordSplit records = prepare_records(config);
  const TripleDataset triples = in_stage("triples", [&] {
    const auto all = build_triples(records.train, config.triples.n_similar, config.triples.n_nonsimilar,
                                   stage_seed(config, Stage::triples));
    return split_triples(all, config.triples.train_fraction, stage_seed(config, Stage::triple_split),
                         config.triples.split);
  });

  MetaArtifacts meta;
  meta.tasks = in_stage("tasks", [&] {
    return sample_tasks(triples.train, config.fewshot.support_size, stage_seed(config, Stage::tasks));
  });
  MetaHyper hyper = config.fewshot.hyper;
  hyper.seed = stage_seed(config, Stage::meta);
  meta.trained = in_stage("meta", [&] { return train_meta(meta.tasks, hyper); });

  in_stage("link_predict", [&] {
    const EmbeddingTable& emb = meta.trained.embeddings;
    auto embedded = [&](const std::string& id) {
      return std::binary_search(emb.ids.begin(), emb.ids.end(), id);
    };
    std::vector<std::size_t> all_ranks;
    for (const Task& trained : meta.tasks) {
      Task eval{trained.relation, trained.support, {}};
      for (const auto& t : triples.test) {
        if (t.relation == trained.relation && embedded(t.head) && embedded(t.tail)) eval.query.push_back({t, {}});
      }
      if (eval.query.empty()) continue;
      auto result = link_predict(emb, meta.trained.net, eval, emb.ids, hyper.beta, hyper.gamma);
      all_ranks.insert(all_ranks.end(), result.ranks.begin(), result.ranks.end());
      meta.per_relation.emplace_back(trained.relation, std::move(result));
    }
    if (all_ranks.empty()) throw DataError("no test triple has both entities embedded");
    LinkPredictResult& o = meta.overall;
    o.ranks = all_ranks;
    for (std::size_t r : all_ranks) {
      o.hits1 += r <= 1 ? 1.0 : 0.0;
      o.hits5 += r <= 5 ? 1.0 : 0.0;
      o.mrr += 1.0 / static_cast<double>(r);
    }
    const double n = static_cast<double>(all_ranks.size());
    o.hits1 /= n;
    o.hits5 /= n;
    o.mrr /= n;
  });
  return meta;
}

json meta_metrics(const MetaArtifacts& meta) {
  json per = json::object();
  for (const auto& [relation, result] : meta.per_relation) per[std::string(to_string(relation))] = metrics_json(result);
  json doc = metrics_json(meta.overall);
  doc["per_relation"] = std::move(per);
  doc["loss_trace"] = meta.trained.loss_trace;
  return doc;
}

void write_meta(const MetaArtifacts& meta, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "metrics.json", dump_json(meta_metrics(meta)));
  json tasks = json::array();
  for (const auto& t : meta.tasks) tasks.push_back(to_json(t));
  write_text(dir / "tasks.json", dump_json(tasks));
  write_text(dir / "meta_net.json", dump_json(to_json(meta.trained.net)));
  write_text(dir / "embeddings.json", dump_json(to_json(meta.trained.embeddings)));
  save_loss_csv(dir / "loss_meta.csv", meta.trained.loss_trace, "summed_query_loss");
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace tfkg
