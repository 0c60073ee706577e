#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "recount/instance_io.hpp"

using namespace recount;
using testing_support::fixture;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<Violation> violations_of(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const ValidationError& e) {
    return e.violations();
  }
  FAIL("expected a validation error");
  return {};
}

const char* kSmall = R"({
  "rule": "PV",
  "candidates": ["a", "b", "p"],
  "tiebreak": ["p", "a", "b"],
  "preferred": "p",
  "budget_attacker": 1,
  "budget_defender": 0,
  "districts": [
    {"votes": {"a": 2, "b": 1, "p": 0}},
    {"weight": 3, "gamma": 1, "votes": {"a": 0, "b": 2}}
  ],
  "manipulation": [{"index": 0, "votes": {"a": 1, "b": 1, "p": 1}}]
})";

}  // namespace

TEST_CASE("five-district fixture parses with its weights") {
  const Instance in = load_instance(fixture("five_districts_pd.json"));
  CHECK(in.election.rule() == Rule::kPluralityOverDistricts);
  CHECK(in.election.num_districts() == 5);
  CHECK(in.election.district(0).weight == 49);
  CHECK(in.election.district(4).weight == 9);
  CHECK(in.election.tiebreak() == std::vector<CandidateId>{2, 0, 1});
  CHECK(in.election.preferred() == CandidateId{2});
  CHECK_FALSE(in.manipulation.has_value());
  const Instance attack = load_instance(fixture("five_districts_pd_attack.json"));
  CHECK(attack.manipulation->districts() == std::vector<DistrictIndex>{0, 1});
}

TEST_CASE("defaults: weight 1, gamma the district size, missing votes zero") {
  const Instance in = parse_instance(kSmall);
  CHECK(in.election.district(0).weight == 1);
  CHECK(in.election.district(0).gamma == 3);
  CHECK(in.election.district(1).votes == VoteVector{0, 2, 0});
  CHECK(in.manipulation->distorted(0) == VoteVector{1, 1, 1});
}

TEST_CASE("a distorted vector with the wrong total names the district") {
  std::string text = kSmall;
  text.replace(text.find(R"("a": 1, "b": 1, "p": 1)"), 22, R"("a": 1, "b": 1, "p": 2)");
  const auto vs = violations_of(text);
  REQUIRE(vs.size() >= 1);
  CHECK(vs[0].to_string().find("districts[0]") != std::string::npos);
  CHECK(vs[0].to_string().find("manipulation.size") != std::string::npos);
}

TEST_CASE("field errors carry JSON paths") {
  std::string text = kSmall;
  text.replace(text.find(R"("b": 2})"), 7, R"("b": -2})");
  const auto vs = violations_of(text);
  REQUIRE(!vs.empty());
  CHECK(vs[0].to_string().find("districts[1]") != std::string::npos);

  std::string unknown = kSmall;
  unknown.replace(unknown.find(R"("b": 2})"), 7, R"("c": 2})");
  CHECK(violations_of(unknown)[0].to_string().find("$.districts[1].votes") != std::string::npos);

  std::string missing = kSmall;
  missing.replace(missing.find(R"("rule": "PV",)"), 13, "");
  CHECK(violations_of(missing)[0].to_string().find("$.rule") != std::string::npos);
}

TEST_CASE("syntax errors report line and column") {
  const auto vs = violations_of("{\n  \"rule\": \"PV\",\n  oops\n}");
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].constraint == "syntax");
  CHECK(vs[0].detail.find("line 3") != std::string::npos);
  CHECK(vs[0].detail.find("column") != std::string::npos);
}

TEST_CASE("missing files are validation errors") {
  CHECK_THROWS_AS(load_instance(fixture("no_such_file.json")), ValidationError);
}

TEST_CASE("serialization is canonical and round-trips") {
  for (const char* name :
       {"five_districts_pv.json", "five_districts_pd.json", "five_districts_pv_attack.json",
        "five_districts_pd_attack.json", "twelve_districts_pv.json", "twelve_districts_pd.json",
        "twelve_districts_pv_attack.json"}) {
    const std::string text = slurp(fixture(name));
    const Instance in = parse_instance(text);
    CHECK(serialize(in.election, in.manipulation) == text);
  }
  const Instance small = parse_instance(kSmall);
  const std::string canonical = serialize(small.election, small.manipulation);
  const Instance again = parse_instance(canonical);
  CHECK(serialize(again.election, again.manipulation) == canonical);
  CHECK(again.manipulation == small.manipulation);
}
