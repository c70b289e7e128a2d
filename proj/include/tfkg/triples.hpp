#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tfkg/records.hpp"

namespace tfkg {

enum class Relation { similar, non_similar };

/// "similar" / "non_similar", as used in the triples CSV.
std::string_view to_string(Relation relation) noexcept;
Relation parse_relation(std::string_view text);

inline Relation other(Relation r) noexcept {
  return r == Relation::similar ? Relation::non_similar : Relation::similar;
}

/// Relation implied by two class labels.
inline Relation relation_between(Label a, Label b) noexcept {
  return a == b ? Relation::similar : Relation::non_similar;
}

struct Triple {
  std::string head;
  Relation relation = Relation::similar;
  std::string tail;

  auto operator<=>(const Triple&) const = default;
  bool operator==(const Triple&) const = default;
};

using TripleSet = std::set<Triple>;

struct RelationCounts {
  std::size_t similar = 0;
  std::size_t non_similar = 0;
};

RelationCounts count_relations(std::span<const Triple> triples) noexcept;

enum class TripleSplitMode {
  triple_level,     // shuffle triples per relation; entities may appear on both sides
  entity_disjoint,  // partition entities first; drops cross-partition triples
};

struct TripleDataset {
  std::vector<Triple> train;
  std::vector<Triple> test;
  /// Sorted ids of every entity referenced by train or test.
  std::vector<std::string> entities;
};

/// Samples ordered record pairs without replacement. Similar triples join
/// same-class records and NonSimilar triples join cross-class records; the
/// result is shuffled. Throws CapacityError when a count exceeds the number of
/// available ordered pairs.
std::vector<Triple> build_triples(std::span<const TransformerRecord> records, std::size_t n_similar,
                                  std::size_t n_nonsimilar, std::uint64_t seed);

/// Splits each relation independently. The train side gets round(f * N)
/// triples in total; when that count is odd the extra train triple is Similar.
TripleDataset split_triples(std::span<const Triple> triples, double train_fraction, std::uint64_t seed,
                            TripleSplitMode mode = TripleSplitMode::triple_level);

/// Replaces the tail by a uniformly drawn entity t' with t' != tail,
/// t' != head and (head, relation, t') not in `known`.
Triple corrupt_tail(const Triple& triple, std::span<const std::string> entities, const TripleSet& known,
                    std::uint64_t seed);

std::vector<std::string> entity_ids(std::span<const Triple> triples);

void write_triples(std::ostream& out, std::span<const Triple> triples);
void save_triples(const std::filesystem::path& path, std::span<const Triple> triples);
std::vector<Triple> parse_triples(std::istream& in);
std::vector<Triple> load_triples(const std::filesystem::path& path);

}  // namespace tfkg
