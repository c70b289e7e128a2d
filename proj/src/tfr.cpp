#include "tfkg/tfr.hpp"

#include <fstream>
#include <ostream>

#include "tfkg/errors.hpp"

namespace tfkg {

namespace {

void tally(MatchCounts& c, Label historical, Relation predicted) {
  const bool similar = predicted == Relation::similar;
  if (historical == Label::fault) {
    (similar ? c.ls : c.ld) += 1;
  } else {
    (similar ? c.ss : c.sd) += 1;
  }
}

void check_models(const KgParams& kg, const GbdtModel& gbdt) {
  if (gbdt.trees.empty()) throw ArgumentError("gbdt model is untrained (no trees)");
  if (kg.dim() == 0) throw ArgumentError("kg model is untrained (dimension 0)");
  if (kg.dim() != gbdt.total_leaves()) {
    throw DimensionError("kg model has n = " + std::to_string(kg.dim()) + " but the gbdt crosses have " +
                         std::to_string(gbdt.total_leaves()) + " leaves");
  }
}

MatchCounts count_with_crosses(const KgParams& kg, std::span<const double> cross,
                               std::span<const TransformerRecord> historical,
                               std::span<const std::vector<double>> historical_crosses) {
  MatchCounts c;
  for (std::size_t i = 0; i < historical.size(); ++i) {
    tally(c, historical[i].label, predict_relation(kg, cross, historical_crosses[i]).relation);
    tally(c, historical[i].label, predict_relation(kg, historical_crosses[i], cross).relation);
  }
  return c;
}

}  // namespace

MatchCounts count_matches(const KgParams& kg, const GbdtModel& gbdt, const TransformerRecord& record,
                          std::span<const TransformerRecord> historical) {
  check_models(kg, gbdt);
  if (historical.empty()) throw ArgumentError("historical record set is empty");
  std::vector<std::vector<double>> crosses;
  crosses.reserve(historical.size());
  for (const auto& h : historical) crosses.push_back(feature_cross(gbdt, h.features));
  return count_with_crosses(kg, feature_cross(gbdt, record.features), historical, crosses);
}

double tfr(std::size_t ls, std::size_t sd, std::size_t ns) {
  if (ns == 0) throw ArgumentError("tfr needs at least one historical record (NS = 0)");
  if (ls + sd > 2 * ns) throw ArgumentError("fault votes exceed 2 * NS");
  return static_cast<double>(ls + sd) / static_cast<double>(2 * ns);
}

double tfr(const MatchCounts& counts, std::size_t ns) {
  if (ns == 0) throw ArgumentError("tfr needs at least one historical record (NS = 0)");
  if (counts.total() != 2 * ns) {
    throw ArgumentError("match counts sum to " + std::to_string(counts.total()) + ", expected 2 * NS = " +
                        std::to_string(2 * ns));
  }
  return tfr(counts.ls, counts.sd, ns);
}

Label classify(double tfr_value, double threshold) {
  return tfr_value > threshold ? Label::fault : Label::stable;
}

TfrReport score_records(const KgParams& kg, const GbdtModel& gbdt, std::span<const TransformerRecord> records,
                        std::span<const TransformerRecord> historical, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ArgumentError("tfr threshold must lie in [0, 1]");
  check_models(kg, gbdt);
  if (historical.empty()) throw ArgumentError("historical record set is empty");

  std::vector<std::vector<double>> crosses;
  crosses.reserve(historical.size());
  for (const auto& h : historical) crosses.push_back(feature_cross(gbdt, h.features));

  TfrReport report;
  report.threshold = threshold;
  report.historical_count = historical.size();
  report.rows.reserve(records.size());
  for (const auto& r : records) {
    TfrRow row;
    row.id = r.id;
    row.counts = count_with_crosses(kg, feature_cross(gbdt, r.features), historical, crosses);
    row.tfr = tfr(row.counts, historical.size());
    row.verdict = classify(row.tfr, threshold);
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_tfr_csv(std::ostream& out, const TfrReport& report) {
  out << "id,Ls,Ld,Ss,Sd,tfr,verdict\n";
  for (const auto& r : report.rows) {
    out << r.id << ',' << r.counts.ls << ',' << r.counts.ld << ',' << r.counts.ss << ',' << r.counts.sd << ','
        << format_real(r.tfr) << ',' << to_string(r.verdict) << '\n';
  }
}

void save_tfr_csv(const std::filesystem::path& path, const TfrReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write tfr report '" + path.string() + "'");
  write_tfr_csv(out, report);
}

nlohmann::json to_json(const TfrReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"id", r.id},
                    {"Ls", r.counts.ls},
                    {"Ld", r.counts.ld},
                    {"Ss", r.counts.ss},
                    {"Sd", r.counts.sd},
                    {"tfr", r.tfr},
                    {"verdict", std::string(to_string(r.verdict))}});
  }
  return {{"threshold", report.threshold}, {"historical_count", report.historical_count}, {"rows", std::move(rows)}};
}

}  // namespace tfkg
