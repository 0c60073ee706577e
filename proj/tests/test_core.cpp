#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "recount/core.hpp"
#include "recount/reductions.hpp"

using namespace recount;
using testing_support::abp;
using testing_support::fixture;

namespace {

const std::vector<VoteVector> kFive = {{7, 0, 0}, {7, 0, 0}, {0, 3, 0}, {0, 3, 0}, {0, 3, 0}};
const std::vector<Count> kFiveWeights = {49, 49, 9, 9, 9};

std::vector<VoteVector> twelve() {
  std::vector<VoteVector> v = {{0, 0, 6}, {3, 0, 0}};
  for (int j = 0; j < 6; ++j) v.push_back({1, 0, 0});
  for (int j = 0; j < 4; ++j) v.push_back({0, 1, 0});
  return v;
}

bool has_constraint(const std::vector<Violation>& vs, const std::string& name,
                    std::optional<std::size_t> district = std::nullopt) {
  for (const auto& v : vs) {
    if (v.constraint == name && (!district || v.district == district)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("election validation reports every broken invariant") {
  District bad;
  bad.votes = {2, -1, 0};
  bad.weight = 0;
  bad.gamma = 5;
  try {
    Election(Rule::kPluralityOverVoters, {"a", "b", "b"}, {0, 0, 1}, {bad}, CandidateId{7}, 0, 3);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.violations().size() >= 5);
  }
  CHECK_THROWS_AS(Election(Rule::kPluralityOverVoters, {"a"}, {0}, {}, std::nullopt, 1, 0),
                  ValidationError);
}

TEST_CASE("budgets outside their ranges are rejected") {
  CHECK_THROWS_AS(abp(Rule::kPluralityOverVoters, kFive, {}, 0, 0), ValidationError);
  CHECK_THROWS_AS(abp(Rule::kPluralityOverVoters, kFive, {}, 6, 0), ValidationError);
  CHECK_THROWS_AS(abp(Rule::kPluralityOverVoters, kFive, {}, 2, 6), ValidationError);
  CHECK_NOTHROW(abp(Rule::kPluralityOverVoters, kFive, {}, 5, 5));
}

TEST_CASE("totals beyond 2^62 are rejected") {
  District huge;
  huge.votes = {Count{1} << 61, Count{1} << 61};
  huge.gamma = 0;
  CHECK_THROWS_AS(Election(Rule::kPluralityOverVoters, {"a", "b"}, {0, 1}, {huge, huge},
                           std::nullopt, 1, 0),
                  ValidationError);
}

TEST_CASE("five-district election: plain tallies") {
  const Election pv = abp(Rule::kPluralityOverVoters, kFive);
  const Tally t = tally(pv);
  CHECK(t.scores == VoteVector{14, 9, 0});
  CHECK(t.winner == 0);

  const Election pd = abp(Rule::kPluralityOverDistricts, kFive, kFiveWeights);
  const Tally u = tally(pd);
  CHECK(u.scores == VoteVector{98, 27, 0});
  CHECK(u.winner == 0);
  CHECK(u.district_winners == std::vector<CandidateId>{0, 0, 1, 1, 1});
}

TEST_CASE("social welfare is read from the true profile") {
  const Election pv = abp(Rule::kPluralityOverVoters, kFive);
  CHECK(social_welfare(pv, 1) == 9);
  CHECK(social_welfare(pv, 2) == 0);
  const Election t = abp(Rule::kPluralityOverVoters, twelve());
  CHECK(social_welfare(t, 2) == 6);
  CHECK(social_welfare(t, 1) == 4);
  CHECK_THROWS_AS(social_welfare(t, 3), ValidationError);

  Election one(Rule::kPluralityOverVoters, {"a", "b"}, {0, 1}, {District{1, 4, {4, 0}}},
               std::nullopt, 1, 0);
  CHECK(social_welfare(one, 0) == 4);
  CHECK(social_welfare(one, 1) == 0);
}

TEST_CASE("defender preference: welfare first, then priority") {
  const Election pv = abp(Rule::kPluralityOverVoters, kFive);
  CHECK(defender_prefers(pv, 1, 2) == std::strong_ordering::greater);
  CHECK(defender_prefers(pv, 2, 1) == std::strong_ordering::less);
  CHECK(defender_prefers(pv, 1, 1) == std::strong_ordering::equal);
  // Equal welfare: p is ahead of a in the priority order.
  const Election tie = abp(Rule::kPluralityOverVoters, {{2, 0, 2}}, {}, 1, 0);
  CHECK(defender_prefers(tie, 2, 0) == std::strong_ordering::greater);
  CHECK(defender_ranking(tie) == std::vector<CandidateId>{2, 0, 1});
}

TEST_CASE("manipulation validation") {
  const Election pd = abp(Rule::kPluralityOverDistricts, kFive, kFiveWeights);
  const Manipulation all_to_p({{0, {0, 0, 7}}, {1, {0, 0, 7}}});
  CHECK(validate(pd, all_to_p, true).empty());

  const Election t = abp(Rule::kPluralityOverVoters, twelve());
  const Manipulation swap({{0, {0, 6, 0}}, {1, {0, 0, 3}}});
  CHECK(validate(t, swap, false).empty());
  const auto vs = validate(t, swap, true);
  CHECK(has_constraint(vs, "regular.pv", 0));
  CHECK_FALSE(has_constraint(vs, "regular.pv", 1));

  District d{1, 2, {3, 1, 0}};
  Election capped(Rule::kPluralityOverVoters, {"a", "b", "p"}, {2, 0, 1}, {d}, CandidateId{2},
                  1, 0);
  CHECK(validate(capped, Manipulation({{0, {1, 1, 2}}}), false).empty());
  CHECK(has_constraint(validate(capped, Manipulation({{0, {0, 1, 3}}}), false),
                       "manipulation.gamma", 0));
  CHECK(has_constraint(validate(capped, Manipulation({{0, {3, 0, 0}}}), false),
                       "manipulation.size", 0));
  CHECK(has_constraint(validate(capped, Manipulation({{0, {5, -1, 0}}}), false),
                       "manipulation.nonnegative", 0));
  CHECK(has_constraint(validate(capped, Manipulation({{3, {3, 1, 0}}}), false),
                       "manipulation.district", 3));
  CHECK(has_constraint(
      validate(pd, Manipulation({{0, {7, 0, 0}}, {1, {7, 0, 0}}, {2, {0, 3, 0}}}), false),
      "manipulation.budget"));
}

TEST_CASE("recount sets must lie inside M and respect the budget") {
  const Election pv = abp(Rule::kPluralityOverVoters, kFive);
  const Manipulation m({{0, {0, 0, 7}}, {1, {0, 0, 7}}});
  CHECK_THROWS_AS(tally(pv, m, RecountSet({2})), ValidationError);
  CHECK_THROWS_AS(check_recount(m, RecountSet({0, 1}), 1), ValidationError);
  CHECK_NOTHROW(check_recount(m, RecountSet({0}), 1));
}

TEST_CASE("manipulated-but-unchanged districts are accepted") {
  const Election pv = abp(Rule::kPluralityOverVoters, kFive);
  const Manipulation same({{2, {0, 3, 0}}});
  CHECK(validate(pv, same, false).empty());
  CHECK(tally(pv, same).scores == tally(pv).scores);
  CHECK(Manipulation::from_profile(pv, oracle::true_profile(pv)).empty());
}

TEST_CASE("tally properties on random instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    RandomParams params;
    params.rule = trial % 2 ? Rule::kPluralityOverDistricts : Rule::kPluralityOverVoters;
    params.districts = 1 + trial % 6;
    params.candidates = 2 + trial % 3;
    params.max_voters = 5;
    params.max_weight = 9;
    params.budget_attacker = static_cast<Count>(params.districts);
    params.budget_defender = 0;
    const Election e = gen_random(params, rng());
    const bool regular = trial % 3 == 0;
    const Manipulation m = random_manipulation(e, params.districts, regular, rng());
    const auto ids = m.districts();
    const Count expected_total =
        e.rule() == Rule::kPluralityOverVoters ? e.total_votes() : e.total_weight();

    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ids.size()); ++mask) {
      std::vector<DistrictIndex> r;
      for (std::size_t j = 0; j < ids.size(); ++j) {
        if ((mask >> j) & 1u) r.push_back(ids[j]);
      }
      const Tally t = tally(e, m, RecountSet(r));
      // Conservation and winner agreement with the oracle.
      Count total = 0;
      for (Count s : t.scores) total += s;
      CHECK(total == expected_total);
      CHECK(t.winner == oracle::winner_after(e, m, mask));
      // Unique lexicographic maximum.
      for (CandidateId c = 0; c < e.num_candidates(); ++c) {
        if (c == t.winner) continue;
        CHECK((t.scores[t.winner] > t.scores[c] ||
               (t.scores[t.winner] == t.scores[c] && e.favors(t.winner, c))));
      }
      if (regular && e.rule() == Rule::kPluralityOverVoters) {
        const CandidateId p = *e.preferred();
        for (CandidateId c = 0; c < e.num_candidates(); ++c) {
          if (c == p) {
            CHECK(t.scores[c] >= social_welfare(e, c));
          } else {
            CHECK(t.scores[c] <= social_welfare(e, c));
          }
        }
      }
    }
    // Recounting all of M restores the true tally.
    CHECK(tally(e, m, RecountSet(ids)).scores == tally(e).scores);
    // Recount composition: R then R' is R union R'.
    if (ids.size() >= 2) {
      const Tally both = tally(e, m, RecountSet({ids[0], ids[1]}));
      std::map<DistrictIndex, VoteVector> rest(m.entries());
      rest.erase(ids[0]);
      const Tally staged = tally(e, Manipulation(rest), RecountSet({ids[1]}));
      CHECK(both.scores == staged.scores);
    }
    // Welfare ignores the manipulation.
    for (CandidateId c = 0; c < e.num_candidates(); ++c) {
      CHECK(social_welfare(e, c) == oracle::welfare(e, c));
    }
    CHECK(is_regular(e, m) == (validate(e, m, true).empty()));
    if (regular) CHECK(is_regular(e, m));
  }
}

TEST_CASE("fixtures load as the five- and twelve-district elections") {
  const Instance pd = load_instance(fixture("five_districts_pd.json"));
  CHECK(pd.election.num_districts() == 5);
  std::vector<Count> w;
  for (const auto& d : pd.election.districts()) w.push_back(d.weight);
  CHECK(w == kFiveWeights);
  const Instance t = load_instance(fixture("twelve_districts_pv.json"));
  CHECK(tally(t.election).scores == VoteVector{9, 4, 6});
}
