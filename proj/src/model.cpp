#include "recount/model.hpp"

#include <algorithm>
#include <sstream>

#include "recount/core.hpp"

namespace recount {

std::string Violation::to_string() const {
  std::ostringstream out;
  if (district) out << "district " << *district << ": ";
  out << constraint;
  if (!detail.empty()) out << " (" << detail << ")";
  return out.str();
}

namespace {

std::string join_violations(const std::vector<Violation>& violations) {
  std::string text = "validation failed";
  for (const auto& v : violations) text += "; " + v.to_string();
  return text;
}

bool checked_add(Count a, Count b, Count& out) {
  return !__builtin_add_overflow(a, b, &out) && out <= kMaxTotal;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(join_violations(violations)),
      violations_(std::move(violations)) {}

ValidationError::ValidationError(std::string constraint, std::string detail,
                                 std::optional<std::size_t> district)
    : ValidationError(std::vector<Violation>{
          Violation{district, std::move(constraint), std::move(detail)}}) {}

std::string_view rule_name(Rule rule) {
  return rule == Rule::kPluralityOverVoters ? "PV" : "PD";
}

std::optional<Rule> parse_rule(std::string_view name) {
  if (name == "PV") return Rule::kPluralityOverVoters;
  if (name == "PD") return Rule::kPluralityOverDistricts;
  return std::nullopt;
}

Count District::size() const {
  Count n = 0;
  for (Count v : votes) n += v;
  return n;
}

Election::Election(Rule rule, std::vector<std::string> candidates,
                   std::vector<CandidateId> tiebreak, std::vector<District> districts,
                   std::optional<CandidateId> preferred, Count budget_attacker,
                   Count budget_defender)
    : rule_(rule),
      candidates_(std::move(candidates)),
      tiebreak_(std::move(tiebreak)),
      districts_(std::move(districts)),
      preferred_(preferred),
      budget_attacker_(budget_attacker),
      budget_defender_(budget_defender) {
  std::vector<Violation> errors;
  const std::size_t m = candidates_.size();
  const auto k = static_cast<Count>(districts_.size());

  if (m == 0) errors.push_back({std::nullopt, "candidates.nonempty", "m >= 1"});
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      if (candidates_[a] == candidates_[b]) {
        errors.push_back({std::nullopt, "candidates.distinct", candidates_[a]});
      }
    }
  }
  priority_.assign(m, m);
  if (tiebreak_.size() != m) {
    errors.push_back({std::nullopt, "tiebreak.permutation",
                      "expected " + std::to_string(m) + " entries"});
  }
  for (std::size_t pos = 0; pos < tiebreak_.size(); ++pos) {
    const CandidateId c = tiebreak_[pos];
    if (c >= m || priority_[c] != m) {
      errors.push_back({std::nullopt, "tiebreak.permutation",
                        "bad or repeated entry at position " + std::to_string(pos)});
      continue;
    }
    priority_[c] = pos;
  }
  if (k == 0) errors.push_back({std::nullopt, "districts.nonempty", "k >= 1"});
  if (preferred_ && *preferred_ >= m) {
    errors.push_back({std::nullopt, "preferred.known", "unknown candidate id"});
  }
  if (budget_attacker_ < 1 || budget_attacker_ > k) {
    errors.push_back({std::nullopt, "budget_attacker.range",
                      "need 1 <= B_A <= k, got " + std::to_string(budget_attacker_)});
  }
  if (budget_defender_ < 0 || budget_defender_ > k) {
    errors.push_back({std::nullopt, "budget_defender.range",
                      "need 0 <= B_D <= k, got " + std::to_string(budget_defender_)});
  }

  bool overflow = false;
  for (std::size_t i = 0; i < districts_.size(); ++i) {
    const District& d = districts_[i];
    if (d.votes.size() != m) {
      errors.push_back({i, "votes.length", "expected " + std::to_string(m)});
      continue;
    }
    Count n = 0;
    bool negative = false;
    for (Count v : d.votes) {
      if (v < 0) negative = true;
      if (!checked_add(n, v < 0 ? 0 : v, n)) overflow = true;
    }
    if (negative) errors.push_back({i, "votes.nonnegative", ""});
    if (d.weight < 1) errors.push_back({i, "weight.positive", std::to_string(d.weight)});
    if (d.gamma < 0 || d.gamma > n) {
      errors.push_back({i, "gamma.range",
                        "need 0 <= gamma <= n_i = " + std::to_string(n)});
    }
    if (!checked_add(total_votes_, n, total_votes_)) overflow = true;
    if (!checked_add(total_weight_, std::max<Count>(d.weight, 0), total_weight_)) {
      overflow = true;
    }
  }
  if (overflow) {
    errors.push_back({std::nullopt, "totals.overflow", "total votes or weight exceed 2^62"});
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));

  welfare_.assign(m, 0);
  true_district_winners_.reserve(districts_.size());
  for (std::size_t i = 0; i < districts_.size(); ++i) {
    true_district_winners_.push_back(district_winner(*this, districts_[i].votes));
    add_contribution(*this, i, districts_[i].votes, welfare_);
  }
}

std::optional<CandidateId> Election::find(std::string_view name) const {
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    if (candidates_[c] == name) return c;
  }
  return std::nullopt;
}

CandidateId Election::require_preferred() const {
  if (!preferred_) throw PreconditionError("instance has no preferred candidate");
  return *preferred_;
}

bool Election::unweighted() const {
  return std::all_of(districts_.begin(), districts_.end(),
                     [](const District& d) { return d.weight == 1; });
}

Election Election::with_budgets(Count budget_attacker, Count budget_defender) const {
  return Election(rule_, candidates_, tiebreak_, districts_, preferred_,
                  budget_attacker, budget_defender);
}

Manipulation Manipulation::from_profile(const Election& election,
                                        std::span<const VoteVector> distorted) {
  if (distorted.size() != election.num_districts()) {
    throw ValidationError("profile.length", "distorted profile must list every district");
  }
  std::map<DistrictIndex, VoteVector> entries;
  for (std::size_t i = 0; i < distorted.size(); ++i) {
    if (distorted[i] != election.district(i).votes) entries.emplace(i, distorted[i]);
  }
  return Manipulation(std::move(entries));
}

std::vector<DistrictIndex> Manipulation::districts() const {
  std::vector<DistrictIndex> out;
  out.reserve(entries_.size());
  for (const auto& [i, _] : entries_) out.push_back(i);
  return out;
}

RecountSet::RecountSet(std::vector<DistrictIndex> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

bool RecountSet::contains(DistrictIndex i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

}  // namespace recount
