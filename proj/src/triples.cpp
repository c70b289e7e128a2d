#include "tfkg/triples.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "tfkg/errors.hpp"
#include "tfkg/rng.hpp"

namespace tfkg {

namespace {

struct PairIndex {
  std::uint32_t head;
  std::uint32_t tail;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<Triple> sample_pairs(std::span<const TransformerRecord> records, std::vector<PairIndex>& pool,
                                 std::size_t count, Relation relation, Rng& rng) {
  rng.partial_shuffle(std::span<PairIndex>(pool), count);
  std::vector<Triple> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back({records[pool[k].head].id, relation, records[pool[k].tail].id});
  }
  return out;
}

}  // namespace

std::string_view to_string(Relation relation) noexcept {
  return relation == Relation::similar ? "similar" : "non_similar";
}

Relation parse_relation(std::string_view text) {
  std::string lowered(trim(text));
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "similar") return Relation::similar;
  if (lowered == "non_similar") return Relation::non_similar;
  throw ParseError("unknown relation '" + std::string(text) + "'");
}

RelationCounts count_relations(std::span<const Triple> triples) noexcept {
  RelationCounts c;
  for (const auto& t : triples) (t.relation == Relation::similar ? c.similar : c.non_similar) += 1;
  return c;
}

std::vector<Triple> build_triples(std::span<const TransformerRecord> records, std::size_t n_similar,
                                  std::size_t n_nonsimilar, std::uint64_t seed) {
  std::vector<PairIndex> same;
  std::vector<PairIndex> cross;
  for (std::uint32_t i = 0; i < records.size(); ++i) {
    for (std::uint32_t j = 0; j < records.size(); ++j) {
      if (i == j) continue;
      if (records[i].id == records[j].id) throw UniquenessError("duplicate record id '" + records[i].id + "'");
      (records[i].label == records[j].label ? same : cross).push_back({i, j});
    }
  }
  if (n_similar > same.size()) {
    throw CapacityError("requested " + std::to_string(n_similar) + " similar triples; at most " +
                        std::to_string(same.size()) + " ordered same-class pairs exist");
  }
  if (n_nonsimilar > cross.size()) {
    throw CapacityError("requested " + std::to_string(n_nonsimilar) + " non-similar triples; at most " +
                        std::to_string(cross.size()) + " ordered cross-class pairs exist");
  }

  Rng rng(seed);
  std::vector<Triple> triples = sample_pairs(records, same, n_similar, Relation::similar, rng);
  auto non_similar = sample_pairs(records, cross, n_nonsimilar, Relation::non_similar, rng);
  triples.insert(triples.end(), std::make_move_iterator(non_similar.begin()),
                 std::make_move_iterator(non_similar.end()));
  rng.shuffle(std::span<Triple>(triples));
  return triples;
}

TripleDataset split_triples(std::span<const Triple> triples, double train_fraction, std::uint64_t seed,
                            TripleSplitMode mode) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ArgumentError("train_fraction must lie strictly between 0 and 1");
  }
  const RelationCounts counts = count_relations(triples);
  if (counts.similar != counts.non_similar) {
    throw ArgumentError("unbalanced triples: " + std::to_string(counts.similar) + " similar vs " +
                        std::to_string(counts.non_similar) + " non-similar");
  }

  Rng rng(seed);
  TripleDataset ds;
  std::vector<Triple> by_relation[2];
  for (const auto& t : triples) by_relation[t.relation == Relation::similar ? 0 : 1].push_back(t);

  if (mode == TripleSplitMode::triple_level) {
    const auto total_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(triples.size())));
    const std::size_t per_relation[2] = {total_train - total_train / 2, total_train / 2};
    for (int r = 0; r < 2; ++r) {
      auto& group = by_relation[r];
      rng.shuffle(std::span<Triple>(group));
      for (std::size_t k = 0; k < group.size(); ++k) {
        (k < per_relation[r] ? ds.train : ds.test).push_back(group[k]);
      }
    }
  } else {
    std::vector<std::string> entities = entity_ids(triples);
    rng.shuffle(std::span<std::string>(entities));
    const auto n_train_entities = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(entities.size())));
    std::unordered_map<std::string, bool> is_train;
    for (std::size_t k = 0; k < entities.size(); ++k) is_train[entities[k]] = k < n_train_entities;

    std::vector<Triple> side[2][2];  // [train/test][relation]
    for (int r = 0; r < 2; ++r) {
      for (const auto& t : by_relation[r]) {
        const bool h = is_train.at(t.head);
        if (h != is_train.at(t.tail)) continue;
        side[h ? 0 : 1][r].push_back(t);
      }
    }
    for (int s = 0; s < 2; ++s) {
      const std::size_t keep = std::min(side[s][0].size(), side[s][1].size());
      auto& dest = s == 0 ? ds.train : ds.test;
      for (int r = 0; r < 2; ++r) {
        rng.shuffle(std::span<Triple>(side[s][r]));
        dest.insert(dest.end(), side[s][r].begin(), side[s][r].begin() + static_cast<std::ptrdiff_t>(keep));
      }
    }
  }

  rng.shuffle(std::span<Triple>(ds.train));
  rng.shuffle(std::span<Triple>(ds.test));
  std::vector<Triple> all(ds.train);
  all.insert(all.end(), ds.test.begin(), ds.test.end());
  ds.entities = entity_ids(all);
  return ds;
}

Triple corrupt_tail(const Triple& triple, std::span<const std::string> entities, const TripleSet& known,
                    std::uint64_t seed) {
  std::vector<const std::string*> candidates;
  Triple probe{triple.head, triple.relation, {}};
  for (const auto& e : entities) {
    if (e == triple.tail || e == triple.head) continue;
    probe.tail = e;
    if (known.contains(probe)) continue;
    candidates.push_back(&e);
  }
  if (candidates.empty()) {
    throw ExhaustionError("no valid tail corruption for (" + triple.head + ", " +
                          std::string(to_string(triple.relation)) + ", " + triple.tail + ")");
  }
  Rng rng(seed);
  return {triple.head, triple.relation, *candidates[rng.index(candidates.size())]};
}

std::vector<std::string> entity_ids(std::span<const Triple> triples) {
  std::vector<std::string> ids;
  ids.reserve(triples.size() * 2);
  for (const auto& t : triples) {
    ids.push_back(t.head);
    ids.push_back(t.tail);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

void write_triples(std::ostream& out, std::span<const Triple> triples) {
  out << "head,relation,tail\n";
  for (const auto& t : triples) out << t.head << ',' << to_string(t.relation) << ',' << t.tail << '\n';
}

void save_triples(const std::filesystem::path& path, std::span<const Triple> triples) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write triples file '" + path.string() + "'");
  write_triples(out, triples);
}

std::vector<Triple> parse_triples(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  if (trim(line) != "head,relation,tail") {
    throw SchemaError("triples header must be 'head,relation,tail'");
  }
  std::vector<Triple> triples;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw ParseError("row " + std::to_string(row) + ": expected 3 fields");
    }
    Triple t;
    t.head = std::string(trim(std::string_view(line).substr(0, c1)));
    t.tail = std::string(trim(std::string_view(line).substr(c2 + 1)));
    try {
      t.relation = parse_relation(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
    } catch (const ParseError& e) {
      throw ParseError("row " + std::to_string(row) + ": " + e.what());
    }
    if (t.head.empty() || t.tail.empty() || t.head == t.tail) {
      throw ParseError("row " + std::to_string(row) + ": head and tail must be distinct non-empty ids");
    }
    triples.push_back(std::move(t));
  }
  return triples;
}

std::vector<Triple> load_triples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open triples file '" + path.string() + "'");
  return parse_triples(in);
}

}  // namespace tfkg
