#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "recount/core.hpp"
#include "recount/defender.hpp"
#include "recount/reductions.hpp"

using namespace recount;
using testing_support::abp;
using testing_support::fixture;

namespace {

std::vector<std::size_t> indices(const std::optional<RecountSet>& r) {
  REQUIRE(r.has_value());
  return r->indices();
}

// Random election plus a random manipulation; regular when asked.
struct Case {
  Election election;
  Manipulation manipulation;
};

Case random_case(std::mt19937_64& rng, Rule rule, bool regular, Count max_weight) {
  RandomParams params;
  params.rule = rule;
  params.districts = 1 + rng() % 6;
  params.candidates = 2 + rng() % 3;
  params.max_voters = 5;
  params.max_weight = max_weight;
  params.budget_attacker = static_cast<Count>(params.districts);
  params.budget_defender = static_cast<Count>(rng() % (params.districts + 1));
  Election e = gen_random(params, rng());
  Manipulation m = random_manipulation(e, 1 + rng() % params.districts, regular, rng());
  return {std::move(e), std::move(m)};
}

}  // namespace

TEST_CASE("all-to-p attack on five PV districts: a cannot be restored") {
  const Instance in = load_instance(fixture("five_districts_pv_attack.json"));
  const Election& e = in.election;
  for (auto report : {rec_decide_brute(e, *in.manipulation, 1, 0),
                      rec_decide_dp(e, *in.manipulation, 1, 0)}) {
    CHECK_FALSE(report.decision);
    CHECK_FALSE(report.recount.has_value());
  }
  const auto best = rec_optimize(e, *in.manipulation, 1, RecountAlgorithm::kBrute);
  CHECK(best.winner == e.find("b"));
  CHECK(rec_optimize(e, *in.manipulation, 1, RecountAlgorithm::kDp).winner == e.find("b"));
}

TEST_CASE("unmanipulated election: the true winner with no recount") {
  const Instance in = load_instance(fixture("five_districts_pv.json"));
  const Manipulation none;
  for (auto report : {rec_decide_brute(in.election, none, 1, 0),
                      rec_decide_dp(in.election, none, 1, 0),
                      rec_optimize(in.election, none, 1, RecountAlgorithm::kDp),
                      rec_optimize(in.election, none, 1, RecountAlgorithm::kBrute)}) {
    CHECK(report.decision);
    CHECK(report.winner == 0);
    CHECK(indices(report.recount).empty());
  }
  CHECK(greedy_recount(in.election, none, 1).winner == 0);
}

TEST_CASE("a budget covering M always restores the true winner") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Case c = random_case(rng, trial % 2 ? Rule::kPluralityOverDistricts : Rule::kPluralityOverVoters,
                         false, 10);
    const auto budget = static_cast<Count>(c.manipulation.size());
    const CandidateId truth = tally(c.election).winner;
    for (auto report : {rec_decide_brute(c.election, c.manipulation, budget, truth),
                        rec_decide_dp(c.election, c.manipulation, budget, truth)}) {
      REQUIRE(report.decision);
      CHECK(tally(c.election, c.manipulation, *report.recount).winner == truth);
    }
  }
}

TEST_CASE("swap attack on twelve districts: the defender recounts the first district") {
  const Instance in = load_instance(fixture("twelve_districts_pv_attack.json"));
  for (auto algorithm : {RecountAlgorithm::kDp, RecountAlgorithm::kBrute}) {
    const auto r = rec_optimize(in.election, *in.manipulation, 1, algorithm);
    CHECK(r.winner == in.election.find("p"));
    CHECK(indices(r.recount) == std::vector<std::size_t>{0});
  }
}

TEST_CASE("subset-sum construction decides restoration of a") {
  const std::vector<Count> yes = {-1, -2, 3, 1};
  const std::vector<Count> no = {1};
  for (bool weighted : {false, true}) {
    const auto g = gen_subsetsum_pv_rec(yes, weighted);
    const Count budget = g.election.budget_defender();
    CHECK(rec_decide_dp(g.election, *g.manipulation, budget, g.target).decision);
    CHECK(rec_decide_brute(g.election, *g.manipulation, budget, g.target).decision);
    const auto h = gen_subsetsum_pv_rec(no, weighted);
    CHECK_FALSE(rec_decide_dp(h.election, *h.manipulation, h.election.budget_defender(), h.target)
                    .decision);
  }
}

TEST_CASE("dp, brute force and the oracle agree on every target") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 400; ++trial) {
    Case c = random_case(rng, trial % 2 ? Rule::kPluralityOverDistricts : Rule::kPluralityOverVoters,
                         trial % 5 == 0, 10);
    const Count budget = c.election.budget_defender();
    const oracle::RecResult expected = oracle::rec_all(c.election, c.manipulation, budget);
    const RecountTable table(c.election, c.manipulation, budget);
    const auto all = table.witnesses();
    for (CandidateId t = 0; t < c.election.num_candidates(); ++t) {
      const bool reachable = expected.witness[t].has_value();
      const auto brute = rec_decide_brute(c.election, c.manipulation, budget, t);
      const auto dp = rec_decide_dp(c.election, c.manipulation, budget, t);
      CHECK(brute.decision == reachable);
      CHECK(dp.decision == reachable);
      CHECK(all[t].has_value() == reachable);
      if (!reachable) continue;
      // Brute force returns the lexicographically smallest witness.
      CHECK(brute.recount->indices() == *expected.witness[t]);
      // The DP witness is sound, within budget, and no larger than any other.
      CHECK(tally(c.election, c.manipulation, *dp.recount).winner == t);
      CHECK(static_cast<Count>(dp.recount->size()) <= budget);
      CHECK(dp.recount->size() <= expected.witness[t]->size());
    }
    const CandidateId best = oracle::rec_best(c.election, c.manipulation, budget);
    CHECK(rec_optimize(c.election, c.manipulation, budget, RecountAlgorithm::kDp).winner == best);
    CHECK(rec_optimize(c.election, c.manipulation, budget, RecountAlgorithm::kBrute).winner ==
          best);
  }
}

TEST_CASE("resource caps raise ResourceLimitError") {
  const auto g = gen_subsetsum_pv_rec(std::vector<Count>{-1, -2, 3, 1}, false);
  RecountOptions tight;
  tight.state_cap = 2;
  tight.subset_cap = 2;
  CHECK_THROWS_AS(rec_decide_dp(g.election, *g.manipulation, 3, g.target, tight),
                  ResourceLimitError);
  CHECK_THROWS_AS(rec_decide_brute(g.election, *g.manipulation, 3, g.target, tight),
                  ResourceLimitError);
}

TEST_CASE("unit-weight PD: restoring a by recounting one b district") {
  const Election e = abp(Rule::kPluralityOverDistricts, {{1, 0, 0}, {1, 0, 0}, {1, 0, 0}}, {}, 2, 1);
  const Manipulation m({{0, {0, 1, 0}}, {1, {0, 1, 0}}});
  const auto one = rec_pd_unweighted(e, m, 1, 0);
  CHECK(one.decision);
  CHECK(tally(e, m, *one.recount).winner == 0);
  CHECK(one.recount->size() == 1);
  CHECK_FALSE(rec_pd_unweighted(e, m, 0, 0).decision);
  CHECK(rec_pd_unweighted(e, m, 0, 1).decision);

  const Election weighted = abp(Rule::kPluralityOverDistricts, {{1, 0, 0}, {1, 0, 0}}, {1, 2}, 2, 1);
  CHECK_THROWS_AS(rec_pd_unweighted(weighted, Manipulation(), 1, 0), PreconditionError);
  const Election pv = abp(Rule::kPluralityOverVoters, {{1, 0, 0}}, {}, 1, 0);
  CHECK_THROWS_AS(rec_pd_unweighted(pv, Manipulation(), 0, 0), PreconditionError);
}

TEST_CASE("unit-weight PD flow agrees with the oracle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 400; ++trial) {
    RandomParams params;
    params.rule = Rule::kPluralityOverDistricts;
    params.districts = 1 + rng() % 7;
    params.candidates = 2 + rng() % 3;
    params.max_voters = 5;
    params.max_weight = 1;
    params.budget_attacker = static_cast<Count>(params.districts);
    params.budget_defender = static_cast<Count>(rng() % (params.districts + 1));
    const Election e = gen_random(params, rng());
    const Manipulation m = random_manipulation(e, 1 + rng() % params.districts, false, rng());
    const Count budget = e.budget_defender();
    const auto expected = oracle::rec_all(e, m, budget);
    for (CandidateId t = 0; t < e.num_candidates(); ++t) {
      const auto r = rec_pd_unweighted(e, m, budget, t);
      REQUIRE(r.decision == expected.witness[t].has_value());
      if (r.decision) {
        CHECK(tally(e, m, *r.recount).winner == t);
        CHECK(static_cast<Count>(r.recount->size()) <= budget);
      }
    }
  }
}

TEST_CASE("greedy recounting on the five-district attacks") {
  const Instance pv = load_instance(fixture("five_districts_pv_attack.json"));
  const auto g = greedy_recount(pv.election, *pv.manipulation, 1);
  CHECK(g.winner == pv.election.find("b"));
  CHECK(g.decision);
  CHECK(tally(pv.election, *pv.manipulation, *g.recount).winner == *g.winner);

  const Instance pd = load_instance(fixture("five_districts_pd_attack.json"));
  const auto h = greedy_recount(pd.election, *pd.manipulation, 1);
  CHECK(h.winner == pd.election.find("p"));
  CHECK_FALSE(h.decision);
}

TEST_CASE("greedy against regular manipulations: exact test for p, half the welfare") {
  std::mt19937_64 rng(29);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Case c = random_case(rng, trial % 2 ? Rule::kPluralityOverDistricts : Rule::kPluralityOverVoters,
                         true, 10);
    if (!is_regular(c.election, c.manipulation)) continue;
    ++checked;
    const Count budget = c.election.budget_defender();
    const CandidateId p = *c.election.preferred();
    const auto greedy = greedy_recount(c.election, c.manipulation, budget);
    const CandidateId best = oracle::rec_best(c.election, c.manipulation, budget);
    CHECK((*greedy.winner == p) == (best == p));
    CHECK(2 * oracle::welfare(c.election, *greedy.winner) >= oracle::welfare(c.election, best));
    // The reported winner is actually produced by the reported recount.
    CHECK(tally(c.election, c.manipulation, *greedy.recount).winner == *greedy.winner);
    // A regular attack that survives the optimal defender survives every recount.
    if (best == p) {
      for (CandidateId w : oracle::rec_all(c.election, c.manipulation, budget).winners_seen) {
        CHECK(w == p);
      }
    }
  }
  CHECK(checked >= 300);
}

TEST_CASE("greedy can settle for a less preferred winner") {
  // Recounting the two districts with the largest swing toward b leaves a
  // and b tied, and a wins the tie.
  std::vector<District> ds = {District{1, 2, {1, 1, 0}}, District{1, 4, {1, 3, 0}},
                              District{1, 5, {2, 1, 2}}};
  const Election e(Rule::kPluralityOverVoters, {"a", "b", "p"}, {0, 1, 2}, ds, CandidateId{2}, 3,
                   2);
  const Manipulation m({{0, {0, 0, 2}}, {1, {1, 2, 1}}, {2, {0, 0, 5}}});
  REQUIRE(is_regular(e, m));
  const auto g = greedy_recount(e, m, 2);
  const auto best = rec_optimize(e, m, 2, RecountAlgorithm::kBrute);
  CHECK(g.winner == CandidateId{0});
  CHECK(g.recount->indices() == std::vector<std::size_t>{0, 2});
  CHECK(best.winner == CandidateId{1});
  CHECK(best.recount->indices() == std::vector<std::size_t>{1, 2});
  CHECK(social_welfare(e, 0) == 4);
  CHECK(social_welfare(e, 1) == 5);
}
