#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "tfkg/errors.hpp"
#include "tfkg/records.hpp"

using namespace tfkg;

namespace {

const char* kHeader = "id,label,load_current,oil_temperature,oil_level,gas,oil_color,sound,appearance,silicone\n";

std::vector<TransformerRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_records(in);
}

}  // namespace

TEST_CASE("labels parse case-insensitively") {
  CHECK(parse_label("Fault") == Label::fault);
  CHECK(parse_label("STABLE") == Label::stable);
  CHECK(to_string(Label::fault) == "fault");
  CHECK_THROWS_AS(parse_label("broken"), ParseError);
}

TEST_CASE("parse canonical csv") {
  const auto recs = parse(std::string(kHeader) + "T1,fault,1,2,3,4,5,6,7,8\nT2,stable,0.5,0,0,0,0,0,0,-1e-3\n");
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].id == "T1");
  CHECK(recs[0].label == Label::fault);
  CHECK(recs[0].features[7] == 8.0);
  CHECK(recs[1].features[0] == 0.5);
  CHECK(recs[1].features[7] == -0.001);
}

TEST_CASE("columns are matched by name") {
  const auto recs = parse(
      "silicone,appearance,sound,oil_color,gas,oil_level,oil_temperature,load_current,label,id\n"
      "8,7,6,5,4,3,2,1,stable,X\n");
  REQUIRE(recs.size() == 1);
  for (std::size_t f = 0; f < kFeatureCount; ++f) CHECK(recs[0].features[f] == static_cast<double>(f + 1));
  CHECK(recs[0].id == "X");
}

TEST_CASE("blank lines and CRLF are tolerated") {
  const auto recs = parse(std::string(kHeader) + "\nT1,fault,1,2,3,4,5,6,7,8\r\n\n");
  CHECK(recs.size() == 1);
}

TEST_CASE("empty input yields no records") { CHECK(parse("").empty()); }

TEST_CASE("schema errors") {
  CHECK_THROWS_AS(parse("id,label,load_current\nT1,fault,1\n"), SchemaError);
  CHECK_THROWS_AS(parse(std::string("extra,") + kHeader), SchemaError);
  CHECK_THROWS_AS(parse("id,id,label,load_current,oil_temperature,oil_level,gas,oil_color,sound,appearance,silicone\n"),
                  SchemaError);
}

TEST_CASE("row errors name the row") {
  try {
    parse(std::string(kHeader) + "T1,fault,1,2,3,4,5,6,7,8\nT2,meh,1,2,3,4,5,6,7,8\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse(std::string(kHeader) + "T1,fault,1,2,3\n"), ParseError);
  CHECK_THROWS_AS(parse(std::string(kHeader) + "T1,fault,1,2,x,4,5,6,7,8\n"), ParseError);
  CHECK_THROWS_AS(parse(std::string(kHeader) + "T1,fault,1,2,nan,4,5,6,7,8\n"), ParseError);
  CHECK_THROWS_AS(parse(std::string(kHeader) + "T1,fault,1,2,3,4,5,6,7,8\nT1,stable,1,2,3,4,5,6,7,8\n"),
                  UniquenessError);
}

TEST_CASE("write then parse round-trips exactly") {
  const auto recs = generate_synthetic(20, 1.5, 99);
  std::ostringstream out;
  write_records(out, recs);
  CHECK(parse(out.str()) == recs);
}

TEST_CASE("synthetic generation") {
  const auto recs = generate_synthetic(131, 1.5, 5);
  REQUIRE(recs.size() == 262);
  CHECK(count_classes(recs) == ClassCounts{131, 131});
  CHECK(recs[0].id == "F0001");
  CHECK(recs[1].id == "S0001");
  CHECK(recs[0].label == Label::fault);
  CHECK(generate_synthetic(131, 1.5, 5) == recs);
  CHECK(generate_synthetic(131, 1.5, 6) != recs);
  std::set<std::string> ids;
  for (const auto& r : recs) {
    ids.insert(r.id);
    for (double v : r.features) CHECK(std::isfinite(v));
  }
  CHECK(ids.size() == 262);
}

TEST_CASE("synthetic separation moves class means") {
  const auto near = generate_synthetic(400, 0.0, 1);
  const auto far = generate_synthetic(400, 3.0, 1);
  auto gap = [](const std::vector<TransformerRecord>& rs) {
    double f = 0.0, s = 0.0;
    for (const auto& r : rs) (r.label == Label::fault ? f : s) += r.features[0];
    return (f - s) / 400.0;
  };
  CHECK(std::abs(gap(near)) < 0.02);
  CHECK(gap(far) > 0.15);
}

TEST_CASE("split holds out a fixed number per class") {
  const auto recs = generate_synthetic(131, 1.5, 2);
  const RecordSplit split = split_records(recs, 10, 3);
  CHECK(split.train_counts() == ClassCounts{121, 121});
  CHECK(split.test_counts() == ClassCounts{10, 10});
  std::set<std::string> train_ids, test_ids;
  for (const auto& r : split.train) train_ids.insert(r.id);
  for (const auto& r : split.test) test_ids.insert(r.id);
  for (const auto& id : test_ids) CHECK(train_ids.count(id) == 0);
  CHECK(split_records(recs, 10, 3).test == split.test);

  // Input order is kept on both sides.
  auto position = [&](const std::string& id) {
    return std::find_if(recs.begin(), recs.end(), [&](const auto& r) { return r.id == id; }) - recs.begin();
  };
  for (std::size_t i = 1; i < split.test.size(); ++i) CHECK(position(split.test[i - 1].id) < position(split.test[i].id));
}

TEST_CASE("split rejects classes that are too small") {
  const auto recs = generate_synthetic(5, 1.5, 2);
  try {
    split_records(recs, 5, 1);
    FAIL("expected ArgumentError");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("fault") != std::string::npos);
  }
}

TEST_CASE("format_real is shortest round-trip") {
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(1.0) == "1");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_real(x)) == x);
}
