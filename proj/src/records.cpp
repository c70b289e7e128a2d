#include "tfkg/records.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "tfkg/errors.hpp"
#include "tfkg/rng.hpp"

namespace tfkg {

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

// Per-feature location and spread of the stable class, plus the direction in
// which faults drift. Values are unitless and roughly within [0, 1].
struct FeatureProfile {
  double stable_mean;
  double spread;
  double fault_direction;
};

constexpr std::array<FeatureProfile, kFeatureCount> kProfiles{{
    {0.45, 0.08, +1.0},  // load_current
    {0.40, 0.07, +1.0},  // oil_temperature
    {0.60, 0.06, -1.0},  // oil_level
    {0.20, 0.05, +1.0},  // gas
    {0.30, 0.08, +1.0},  // oil_color
    {0.75, 0.07, -1.0},  // sound
    {0.70, 0.08, -1.0},  // appearance
    {0.25, 0.06, +1.0},  // silicone
}};

std::string make_id(char prefix, std::size_t ordinal) {
  std::string digits = std::to_string(ordinal);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return std::string(1, prefix) + digits;
}

}  // namespace

std::string_view to_string(Label label) noexcept {
  return label == Label::fault ? "fault" : "stable";
}

Label parse_label(std::string_view text) {
  std::string lowered(trim(text));
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "fault") return Label::fault;
  if (lowered == "stable") return Label::stable;
  throw ParseError("unknown label '" + std::string(text) + "'");
}

ClassCounts count_classes(std::span<const TransformerRecord> records) noexcept {
  ClassCounts counts;
  for (const auto& r : records) {
    (r.label == Label::fault ? counts.fault : counts.stable) += 1;
  }
  return counts;
}

void check_finite(std::span<const double> features) {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!std::isfinite(features[i])) {
      throw ArgumentError("feature " + std::to_string(i) + " is not finite");
    }
  }
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::vector<TransformerRecord> parse_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};

  const auto header = split_csv_line(line);
  std::vector<std::string> columns;
  columns.reserve(header.size());
  for (const auto& h : header) columns.emplace_back(trim(h));

  auto position_of = [&](std::string_view name) -> std::size_t {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw SchemaError("missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - columns.begin());
  };
  const std::size_t id_col = position_of("id");
  const std::size_t label_col = position_of("label");
  std::array<std::size_t, kFeatureCount> feature_cols{};
  for (std::size_t f = 0; f < kFeatureCount; ++f) feature_cols[f] = position_of(kFeatureNames[f]);

  {
    std::unordered_set<std::string> seen;
    for (const auto& c : columns) {
      const bool known = c == "id" || c == "label" ||
                         std::find(kFeatureNames.begin(), kFeatureNames.end(), c) != kFeatureNames.end();
      if (!known) throw SchemaError("unexpected column '" + c + "'");
      if (!seen.insert(c).second) throw SchemaError("duplicate column '" + c + "'");
    }
  }

  std::vector<TransformerRecord> records;
  std::unordered_set<std::string> ids;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = "row " + std::to_string(row);
    if (fields.size() != columns.size()) {
      throw ParseError(where + ": expected " + std::to_string(columns.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    TransformerRecord record;
    record.id = std::string(trim(fields[id_col]));
    if (record.id.empty()) throw ParseError(where + ": empty id");
    try {
      record.label = parse_label(fields[label_col]);
    } catch (const ParseError&) {
      throw ParseError(where + ": unknown label '" + fields[label_col] + "'");
    }
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      double value = 0.0;
      if (!parse_double(fields[feature_cols[f]], value) || !std::isfinite(value)) {
        throw ParseError(where + ": column '" + std::string(kFeatureNames[f]) +
                         "' is not a finite number: '" + fields[feature_cols[f]] + "'");
      }
      record.features[f] = value;
    }
    if (!ids.insert(record.id).second) {
      throw UniquenessError(where + ": duplicate id '" + record.id + "'");
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<TransformerRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open records file '" + path.string() + "'");
  return parse_records(in);
}

void write_records(std::ostream& out, std::span<const TransformerRecord> records) {
  out << "id,label";
  for (auto name : kFeatureNames) out << ',' << name;
  out << '\n';
  for (const auto& r : records) {
    out << r.id << ',' << to_string(r.label);
    for (double v : r.features) out << ',' << format_real(v);
    out << '\n';
  }
}

void save_records(const std::filesystem::path& path, std::span<const TransformerRecord> records) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write records file '" + path.string() + "'");
  write_records(out, records);
}

std::vector<TransformerRecord> generate_synthetic(std::size_t n_per_class, double separation,
                                                  std::uint64_t seed) {
  if (n_per_class == 0) throw ArgumentError("n_per_class must be at least 1");
  if (!(separation >= 0.0) || !std::isfinite(separation)) {
    throw ArgumentError("separation must be a finite non-negative number");
  }
  Rng rng(seed);
  std::vector<TransformerRecord> records;
  records.reserve(2 * n_per_class);
  for (std::size_t i = 1; i <= n_per_class; ++i) {
    for (Label label : {Label::fault, Label::stable}) {
      TransformerRecord r;
      r.label = label;
      r.id = make_id(label == Label::fault ? 'F' : 'S', i);
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const auto& p = kProfiles[f];
        const double shift = label == Label::fault ? p.fault_direction * separation * p.spread : 0.0;
        r.features[f] = p.stable_mean + shift + p.spread * rng.normal();
      }
      records.push_back(std::move(r));
    }
  }
  return records;
}

RecordSplit split_records(std::span<const TransformerRecord> records, std::size_t n_test_per_class,
                          std::uint64_t seed) {
  std::vector<std::size_t> fault_idx;
  std::vector<std::size_t> stable_idx;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (records[i].label == Label::fault ? fault_idx : stable_idx).push_back(i);
  }
  if (fault_idx.size() <= n_test_per_class) {
    throw ArgumentError("class 'fault' has " + std::to_string(fault_idx.size()) +
                        " records; need more than " + std::to_string(n_test_per_class));
  }
  if (stable_idx.size() <= n_test_per_class) {
    throw ArgumentError("class 'stable' has " + std::to_string(stable_idx.size()) +
                        " records; need more than " + std::to_string(n_test_per_class));
  }

  Rng rng(seed);
  std::vector<bool> in_test(records.size(), false);
  for (auto* idx : {&fault_idx, &stable_idx}) {
    rng.partial_shuffle(std::span<std::size_t>(*idx), n_test_per_class);
    for (std::size_t k = 0; k < n_test_per_class; ++k) in_test[(*idx)[k]] = true;
  }

  RecordSplit split;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (in_test[i] ? split.test : split.train).push_back(records[i]);
  }
  return split;
}

}  // namespace tfkg
