#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tfkg {

inline constexpr std::size_t kFeatureCount = 8;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "load_current", "oil_temperature", "oil_level",  "gas",
    "oil_color",    "sound",           "appearance", "silicone"};

enum class Label { fault, stable };

std::string_view to_string(Label label) noexcept;

/// Case-insensitive parse of "fault" / "stable"; throws ParseError otherwise.
Label parse_label(std::string_view text);

using Features = std::array<double, kFeatureCount>;

/// One equipment observation. Features are normalized readings in the order of
/// kFeatureNames.
struct TransformerRecord {
  std::string id;
  Label label = Label::stable;
  Features features{};

  bool operator==(const TransformerRecord&) const = default;
};

struct ClassCounts {
  std::size_t fault = 0;
  std::size_t stable = 0;

  std::size_t total() const noexcept { return fault + stable; }
  bool operator==(const ClassCounts&) const = default;
};

ClassCounts count_classes(std::span<const TransformerRecord> records) noexcept;

struct RecordSplit {
  std::vector<TransformerRecord> train;
  std::vector<TransformerRecord> test;

  ClassCounts train_counts() const noexcept { return count_classes(train); }
  ClassCounts test_counts() const noexcept { return count_classes(test); }
};

/// Parses the records CSV. Columns are matched by name, so their order may
/// differ from the canonical header. Blank lines are ignored.
std::vector<TransformerRecord> parse_records(std::istream& in);
std::vector<TransformerRecord> load_records(const std::filesystem::path& path);

/// Writes the canonical header followed by one row per record. Reals use the
/// shortest representation that round-trips exactly.
void write_records(std::ostream& out, std::span<const TransformerRecord> records);
void save_records(const std::filesystem::path& path, std::span<const TransformerRecord> records);

/// Per-class Gaussian features. Class means differ by `separation` times the
/// within-class spread of each feature. Returns fault and stable records
/// interleaved (F0001, S0001, F0002, ...).
std::vector<TransformerRecord> generate_synthetic(std::size_t n_per_class, double separation,
                                                  std::uint64_t seed);

/// Holds out exactly n_test_per_class records of each class, sampled uniformly.
/// Both sides keep the input order.
RecordSplit split_records(std::span<const TransformerRecord> records, std::size_t n_test_per_class,
                          std::uint64_t seed);

/// Throws ArgumentError if a feature is not finite.
void check_finite(std::span<const double> features);

std::string format_real(double value);

}  // namespace tfkg
