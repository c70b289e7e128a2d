#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfkg/gbdt.hpp"
#include "tfkg/kgmodel.hpp"
#include "tfkg/records.hpp"

namespace tfkg {

/// Directed-comparison votes of one new record against the historical set.
///   ls: similar to a fault record      ld: non-similar to a fault record
///   ss: similar to a stable record     sd: non-similar to a stable record
struct MatchCounts {
  std::size_t ls = 0;
  std::size_t ld = 0;
  std::size_t ss = 0;
  std::size_t sd = 0;

  std::size_t total() const noexcept { return ls + ld + ss + sd; }
  bool operator==(const MatchCounts&) const = default;
};

inline constexpr double kDefaultTfrThreshold = 0.5;
inline constexpr double kStrictTfrThreshold = 0.85;

/// Scores `record` against every historical record twice (as head and as
/// tail), using GBDT feature crosses as entity representations.
MatchCounts count_matches(const KgParams& kg, const GbdtModel& gbdt, const TransformerRecord& record,
                          std::span<const TransformerRecord> historical);

/// (ls + sd) / (2 ns). Throws ArgumentError if ns is 0 or ls + sd > 2 ns.
double tfr(std::size_t ls, std::size_t sd, std::size_t ns);

/// As above, additionally requiring counts.total() == 2 ns.
double tfr(const MatchCounts& counts, std::size_t ns);

/// Fault iff value > threshold.
Label classify(double tfr_value, double threshold = kDefaultTfrThreshold);

struct TfrRow {
  std::string id;
  MatchCounts counts;
  double tfr = 0.0;
  Label verdict = Label::stable;
};

struct TfrReport {
  double threshold = kDefaultTfrThreshold;
  std::size_t historical_count = 0;
  std::vector<TfrRow> rows;
};

TfrReport score_records(const KgParams& kg, const GbdtModel& gbdt, std::span<const TransformerRecord> records,
                        std::span<const TransformerRecord> historical, double threshold = kDefaultTfrThreshold);

/// CSV with header `id,Ls,Ld,Ss,Sd,tfr,verdict`.
void write_tfr_csv(std::ostream& out, const TfrReport& report);
void save_tfr_csv(const std::filesystem::path& path, const TfrReport& report);

nlohmann::json to_json(const TfrReport& report);

}  // namespace tfkg
