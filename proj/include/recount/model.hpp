#pragma once

// Data model of the two-stage recount game: an election split into districts,
// an attacker's manipulation, a defender's recount set, and the tally of an
// effective profile.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recount/errors.hpp"

namespace recount {

using CandidateId = std::size_t;
using DistrictIndex = std::size_t;
using Count = std::int64_t;
using VoteVector = std::vector<Count>;

// Totals above this bound are rejected at construction time so that every
// score computation stays inside signed 64-bit arithmetic.
inline constexpr Count kMaxTotal = Count{1} << 62;

enum class Rule { kPluralityOverVoters, kPluralityOverDistricts };

std::string_view rule_name(Rule rule);  // "PV" / "PD"
std::optional<Rule> parse_rule(std::string_view name);

struct District {
  Count weight = 1;
  Count gamma = 0;  // cap on votes the attacker may add in this district
  VoteVector votes;

  Count size() const;
};

// Immutable once constructed. The constructor checks every invariant and
// throws ValidationError listing all violations found.
class Election {
 public:
  Election(Rule rule, std::vector<std::string> candidates,
           std::vector<CandidateId> tiebreak, std::vector<District> districts,
           std::optional<CandidateId> preferred, Count budget_attacker,
           Count budget_defender);

  Rule rule() const { return rule_; }
  std::size_t num_candidates() const { return candidates_.size(); }
  std::size_t num_districts() const { return districts_.size(); }
  const std::vector<std::string>& candidates() const { return candidates_; }
  const std::string& name(CandidateId c) const { return candidates_.at(c); }
  std::optional<CandidateId> find(std::string_view name) const;

  // Priority order, highest priority first.
  const std::vector<CandidateId>& tiebreak() const { return tiebreak_; }
  // Position of `c` in the priority order; lower wins ties.
  std::size_t priority(CandidateId c) const { return priority_[c]; }
  bool favors(CandidateId a, CandidateId b) const {
    return priority_[a] < priority_[b];
  }

  const std::vector<District>& districts() const { return districts_; }
  const District& district(DistrictIndex i) const { return districts_.at(i); }

  std::optional<CandidateId> preferred() const { return preferred_; }
  // Throws PreconditionError when no preferred candidate is set.
  CandidateId require_preferred() const;

  Count budget_attacker() const { return budget_attacker_; }
  Count budget_defender() const { return budget_defender_; }

  bool unweighted() const;
  Count total_votes() const { return total_votes_; }
  Count total_weight() const { return total_weight_; }

  // True per-district plurality winners (ties by priority).
  CandidateId true_district_winner(DistrictIndex i) const {
    return true_district_winners_[i];
  }
  // Social welfare per candidate on the true profile.
  const VoteVector& welfare() const { return welfare_; }

  Election with_budgets(Count budget_attacker, Count budget_defender) const;

 private:
  Rule rule_;
  std::vector<std::string> candidates_;
  std::vector<CandidateId> tiebreak_;
  std::vector<std::size_t> priority_;
  std::vector<District> districts_;
  std::optional<CandidateId> preferred_;
  Count budget_attacker_;
  Count budget_defender_;
  Count total_votes_ = 0;
  Count total_weight_ = 0;
  std::vector<CandidateId> true_district_winners_;
  VoteVector welfare_;
};

// The attacked districts M together with their distorted vote vectors. A
// district may be listed with an unchanged vector; it still counts toward M.
class Manipulation {
 public:
  Manipulation() = default;
  explicit Manipulation(std::map<DistrictIndex, VoteVector> entries)
      : entries_(std::move(entries)) {}

  // Infers M as the districts whose vectors differ from the true profile.
  static Manipulation from_profile(const Election& election,
                                   std::span<const VoteVector> distorted);

  const std::map<DistrictIndex, VoteVector>& entries() const { return entries_; }
  std::vector<DistrictIndex> districts() const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(DistrictIndex i) const { return entries_.contains(i); }
  const VoteVector& distorted(DistrictIndex i) const { return entries_.at(i); }

  friend bool operator==(const Manipulation&, const Manipulation&) = default;

 private:
  std::map<DistrictIndex, VoteVector> entries_;
};

// Districts the defender recounts; kept sorted and duplicate-free.
class RecountSet {
 public:
  RecountSet() = default;
  explicit RecountSet(std::vector<DistrictIndex> indices);

  const std::vector<DistrictIndex>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(DistrictIndex i) const;

  friend bool operator==(const RecountSet&, const RecountSet&) = default;
  friend auto operator<=>(const RecountSet& a, const RecountSet& b) {
    return a.indices_ <=> b.indices_;
  }

 private:
  std::vector<DistrictIndex> indices_;
};

struct Tally {
  VoteVector scores;  // PV: votes, PD: weight of districts won
  CandidateId winner = 0;
  std::vector<CandidateId> district_winners;  // PD only
};

struct SolveStats {
  std::uint64_t states_explored = 0;
  double wall_ms = 0.0;
};

struct SolveReport {
  bool decision = false;
  std::optional<CandidateId> winner;
  std::optional<Manipulation> manipulation;
  std::optional<RecountSet> recount;
  std::string algorithm;
  SolveStats stats;
};

}  // namespace recount
