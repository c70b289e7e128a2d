#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "tfkg/errors.hpp"
#include "tfkg/triples.hpp"

using namespace tfkg;

namespace {

std::vector<TransformerRecord> make_records(std::size_t faults, std::size_t stables) {
  std::vector<TransformerRecord> out;
  for (std::size_t i = 0; i < faults; ++i) out.push_back({"F" + std::to_string(i), Label::fault, {}});
  for (std::size_t i = 0; i < stables; ++i) out.push_back({"S" + std::to_string(i), Label::stable, {}});
  return out;
}

std::map<std::string, Label> labels_of(const std::vector<TransformerRecord>& recs) {
  std::map<std::string, Label> m;
  for (const auto& r : recs) m[r.id] = r.label;
  return m;
}

}  // namespace

TEST_CASE("relation names") {
  CHECK(to_string(Relation::similar) == "similar");
  CHECK(parse_relation("non_similar") == Relation::non_similar);
  CHECK_THROWS_AS(parse_relation("close"), ParseError);
  CHECK(relation_between(Label::fault, Label::fault) == Relation::similar);
  CHECK(relation_between(Label::fault, Label::stable) == Relation::non_similar);
}

TEST_CASE("build 6000 triples from 121 + 121 records") {
  const auto recs = make_records(121, 121);
  const auto triples = build_triples(recs, 3000, 3000, 1);
  REQUIRE(triples.size() == 6000);
  const TripleSet unique(triples.begin(), triples.end());
  CHECK(unique.size() == 6000);
  const RelationCounts c = count_relations(triples);
  CHECK(c.similar == 3000);
  CHECK(c.non_similar == 3000);
  const auto labels = labels_of(recs);
  for (const auto& t : triples) {
    CHECK(t.head != t.tail);
    CHECK(t.relation == relation_between(labels.at(t.head), labels.at(t.tail)));
  }
  CHECK(build_triples(recs, 3000, 3000, 1) == triples);
  CHECK(build_triples(recs, 3000, 3000, 2) != triples);
}

TEST_CASE("relabeling classes leaves relations unchanged") {
  auto recs = make_records(10, 12);
  const auto before = build_triples(recs, 50, 50, 4);
  for (auto& r : recs) r.label = r.label == Label::fault ? Label::stable : Label::fault;
  const auto labels = labels_of(recs);
  for (const auto& t : before) CHECK(t.relation == relation_between(labels.at(t.head), labels.at(t.tail)));
}

TEST_CASE("two records give the two cross-class ordered pairs") {
  const auto recs = make_records(1, 1);
  const auto triples = build_triples(recs, 0, 2, 3);
  const TripleSet got(triples.begin(), triples.end());
  const TripleSet expected{{"F0", Relation::non_similar, "S0"}, {"S0", Relation::non_similar, "F0"}};
  CHECK(got == expected);
}

TEST_CASE("capacity errors report the maximum") {
  CHECK_THROWS_AS(build_triples(make_records(1, 0), 1, 0, 1), CapacityError);
  try {
    build_triples(make_records(3, 3), 13, 0, 1);
    FAIL("expected CapacityError");
  } catch (const CapacityError& e) {
    CHECK(std::string(e.what()).find("12") != std::string::npos);
  }
  CHECK_NOTHROW(build_triples(make_records(3, 3), 12, 18, 1));
  CHECK_THROWS_AS(build_triples(make_records(3, 3), 0, 19, 1), CapacityError);
}

TEST_CASE("7:3 split of 6000 triples") {
  const auto triples = build_triples(make_records(121, 121), 3000, 3000, 5);
  const TripleDataset ds = split_triples(triples, 0.7, 6);
  REQUIRE(ds.train.size() == 4200);
  REQUIRE(ds.test.size() == 1800);
  CHECK(count_relations(ds.train).similar == 2100);
  CHECK(count_relations(ds.train).non_similar == 2100);
  CHECK(count_relations(ds.test).similar == 900);
  CHECK(count_relations(ds.test).non_similar == 900);
  TripleSet all(ds.train.begin(), ds.train.end());
  all.insert(ds.test.begin(), ds.test.end());
  CHECK(all == TripleSet(triples.begin(), triples.end()));
  CHECK(ds.entities.size() == 242);
  CHECK(std::is_sorted(ds.entities.begin(), ds.entities.end()));
}

TEST_CASE("smallest balanced split") {
  const std::vector<Triple> two{{"a", Relation::similar, "b"}, {"a", Relation::non_similar, "c"}};
  const TripleDataset ds = split_triples(two, 0.5, 1);
  REQUIRE(ds.train.size() == 1);
  REQUIRE(ds.test.size() == 1);
  CHECK(ds.train[0].relation != ds.test[0].relation);
}

TEST_CASE("split argument errors") {
  const std::vector<Triple> two{{"a", Relation::similar, "b"}, {"a", Relation::non_similar, "c"}};
  CHECK_THROWS_AS(split_triples(two, 1.5, 1), ArgumentError);
  CHECK_THROWS_AS(split_triples(two, 0.0, 1), ArgumentError);
  const std::vector<Triple> lopsided{{"a", Relation::similar, "b"}, {"b", Relation::similar, "a"}};
  CHECK_THROWS_AS(split_triples(lopsided, 0.5, 1), ArgumentError);
}

TEST_CASE("entity-disjoint split keeps entity sets apart and balanced") {
  const auto triples = build_triples(make_records(30, 30), 600, 600, 2);
  const TripleDataset ds = split_triples(triples, 0.7, 3, TripleSplitMode::entity_disjoint);
  std::set<std::string> train_entities, test_entities;
  for (const auto& t : ds.train) train_entities.insert({t.head, t.tail});
  for (const auto& t : ds.test) test_entities.insert({t.head, t.tail});
  for (const auto& e : test_entities) CHECK(train_entities.count(e) == 0);
  CHECK(count_relations(ds.train).similar == count_relations(ds.train).non_similar);
  CHECK(count_relations(ds.test).similar == count_relations(ds.test).non_similar);
  CHECK(!ds.train.empty());
  CHECK(!ds.test.empty());
}

TEST_CASE("corrupt_tail") {
  const Triple t{"a", Relation::similar, "b"};
  const std::vector<std::string> abc{"a", "b", "c"};
  const TripleSet known{t};
  CHECK(corrupt_tail(t, abc, known, 1) == Triple{"a", Relation::similar, "c"});

  const std::vector<std::string> ab{"a", "b"};
  CHECK_THROWS_AS(corrupt_tail(t, ab, known, 1), ExhaustionError);

  std::vector<std::string> many;
  for (int i = 0; i < 20; ++i) many.push_back("e" + std::to_string(i));
  const Triple u{"e0", Relation::non_similar, "e1"};
  const TripleSet k2{u, {"e0", Relation::non_similar, "e2"}};
  CHECK(corrupt_tail(u, many, k2, 9) == corrupt_tail(u, many, k2, 9));
  std::set<std::string> seen;
  for (std::uint64_t s = 0; s < 400; ++s) {
    const Triple c = corrupt_tail(u, many, k2, s);
    CHECK(c.head == "e0");
    CHECK(c.relation == u.relation);
    CHECK(k2.count(c) == 0);
    CHECK(c.tail != "e0");
    seen.insert(c.tail);
  }
  CHECK(seen.size() == 17);
}

TEST_CASE("triples csv round trip") {
  const auto triples = build_triples(make_records(4, 4), 10, 10, 1);
  std::ostringstream out;
  write_triples(out, triples);
  std::istringstream in(out.str());
  CHECK(parse_triples(in) == triples);

  std::istringstream bad_header("h,r,t\n");
  CHECK_THROWS_AS(parse_triples(bad_header), SchemaError);
  std::istringstream bad_row("head,relation,tail\na,similar\n");
  CHECK_THROWS_AS(parse_triples(bad_row), ParseError);
  std::istringstream bad_rel("head,relation,tail\na,near,b\n");
  CHECK_THROWS_AS(parse_triples(bad_rel), ParseError);
}
