#include "recount/core.hpp"

#include <algorithm>
#include <numeric>

namespace recount {

CandidateId score_winner(const Election& election, std::span<const Count> scores) {
  CandidateId best = election.tiebreak().front();
  for (CandidateId c : election.tiebreak()) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

CandidateId district_winner(const Election& election, std::span<const Count> votes) {
  return score_winner(election, votes);
}

void add_contribution(const Election& election, DistrictIndex i,
                      std::span<const Count> votes, std::span<Count> scores) {
  if (election.rule() == Rule::kPluralityOverVoters) {
    for (std::size_t a = 0; a < votes.size(); ++a) scores[a] += votes[a];
  } else {
    scores[district_winner(election, votes)] += election.district(i).weight;
  }
}

namespace {

Tally tally_profile(const Election& election, const Manipulation* manipulation,
                    const RecountSet* recount) {
  Tally t;
  t.scores.assign(election.num_candidates(), 0);
  const bool pd = election.rule() == Rule::kPluralityOverDistricts;
  if (pd) t.district_winners.reserve(election.num_districts());
  for (std::size_t i = 0; i < election.num_districts(); ++i) {
    const bool distorted = manipulation != nullptr && manipulation->contains(i) &&
                           (recount == nullptr || !recount->contains(i));
    const VoteVector& votes =
        distorted ? manipulation->distorted(i) : election.district(i).votes;
    add_contribution(election, i, votes, t.scores);
    if (pd) t.district_winners.push_back(district_winner(election, votes));
  }
  t.winner = score_winner(election, t.scores);
  return t;
}

}  // namespace

Tally tally(const Election& election) { return tally_profile(election, nullptr, nullptr); }

Tally tally(const Election& election, const Manipulation& manipulation) {
  check_manipulation(election, manipulation);
  return tally_profile(election, &manipulation, nullptr);
}

Tally tally(const Election& election, const Manipulation& manipulation,
            const RecountSet& recount) {
  check_manipulation(election, manipulation);
  check_recount(manipulation, recount, static_cast<Count>(election.num_districts()));
  return tally_profile(election, &manipulation, &recount);
}

Count social_welfare(const Election& election, CandidateId candidate) {
  if (candidate >= election.num_candidates()) {
    throw ValidationError("candidate.known", "id " + std::to_string(candidate));
  }
  return election.welfare()[candidate];
}

std::strong_ordering defender_prefers(const Election& election, CandidateId c1,
                                      CandidateId c2) {
  const Count sw1 = social_welfare(election, c1);
  const Count sw2 = social_welfare(election, c2);
  if (sw1 != sw2) return sw1 <=> sw2;
  // Lower priority position is better.
  return election.priority(c2) <=> election.priority(c1);
}

std::vector<CandidateId> defender_ranking(const Election& election) {
  std::vector<CandidateId> order(election.num_candidates());
  std::iota(order.begin(), order.end(), CandidateId{0});
  std::sort(order.begin(), order.end(), [&](CandidateId a, CandidateId b) {
    return defender_prefers(election, a, b) == std::strong_ordering::greater;
  });
  return order;
}

std::vector<Violation> validate(const Election& election, const Manipulation& manipulation,
                                bool require_regular) {
  std::vector<Violation> out;
  const std::size_t m = election.num_candidates();
  if (static_cast<Count>(manipulation.size()) > election.budget_attacker()) {
    out.push_back({std::nullopt, "manipulation.budget",
                   std::to_string(manipulation.size()) + " districts > B_A = " +
                       std::to_string(election.budget_attacker())});
  }
  std::optional<CandidateId> p = election.preferred();
  if (require_regular && !p) {
    out.push_back({std::nullopt, "regular.preferred", "regularity needs a preferred candidate"});
  }
  for (const auto& [i, distorted] : manipulation.entries()) {
    if (i >= election.num_districts()) {
      out.push_back({i, "manipulation.district", "no such district"});
      continue;
    }
    if (distorted.size() != m) {
      out.push_back({i, "manipulation.length", "expected " + std::to_string(m)});
      continue;
    }
    const District& d = election.district(i);
    Count total = 0;
    Count added = 0;
    bool negative = false;
    for (std::size_t a = 0; a < m; ++a) {
      if (distorted[a] < 0) negative = true;
      total += distorted[a];
      added += std::max<Count>(0, distorted[a] - d.votes[a]);
    }
    if (negative) out.push_back({i, "manipulation.nonnegative", ""});
    if (total != d.size()) {
      out.push_back({i, "manipulation.size",
                     "distorted votes sum to " + std::to_string(total) + ", n_i = " +
                         std::to_string(d.size())});
    }
    if (added > d.gamma) {
      out.push_back({i, "manipulation.gamma",
                     std::to_string(added) + " added votes > gamma = " +
                         std::to_string(d.gamma)});
    }
    if (!require_regular || !p || negative) continue;
    if (election.rule() == Rule::kPluralityOverVoters) {
      for (std::size_t a = 0; a < m; ++a) {
        if (a != *p && distorted[a] > d.votes[a]) {
          out.push_back({i, "regular.pv",
                         "votes added to " + election.name(a) + " != preferred"});
          break;
        }
      }
    } else if (district_winner(election, distorted) != *p) {
      out.push_back({i, "regular.pd", "preferred candidate does not win the district"});
    }
  }
  return out;
}

void check_manipulation(const Election& election, const Manipulation& manipulation,
                        bool require_regular) {
  auto violations = validate(election, manipulation, require_regular);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

void check_recount(const Manipulation& manipulation, const RecountSet& recount,
                   Count budget) {
  std::vector<Violation> out;
  if (static_cast<Count>(recount.size()) > budget) {
    out.push_back({std::nullopt, "recount.budget",
                   std::to_string(recount.size()) + " districts > " + std::to_string(budget)});
  }
  for (DistrictIndex i : recount.indices()) {
    if (!manipulation.contains(i)) out.push_back({i, "recount.subset", "not manipulated"});
  }
  if (!out.empty()) throw ValidationError(std::move(out));
}

bool is_regular(const Election& election, const Manipulation& manipulation) {
  return election.preferred().has_value() && validate(election, manipulation, true).empty();
}

}  // namespace recount
