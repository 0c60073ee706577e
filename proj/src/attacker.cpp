#include "recount/attacker.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <string>

#include "recount/core.hpp"
#include "recount/defender.hpp"

namespace recount {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Votes other candidates must lose so that `target` holding `level` votes
// wins: each rival a keeps at most level - [a beats target on ties].
Count required_removals(const Election& election, std::span<const Count> votes,
                        CandidateId target, Count level) {
  Count need = 0;
  for (std::size_t a = 0; a < votes.size(); ++a) {
    if (a == target) continue;
    const Count keep = level - (election.favors(a, target) ? 1 : 0);
    // A favored rival always ties a target with no votes.
    if (keep < 0) return std::numeric_limits<Count>::max();
    need += std::max<Count>(0, votes[a] - keep);
  }
  return need;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b
             ? std::numeric_limits<std::uint64_t>::max()
             : a + b;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

// Sum over subsets of size in [lo, hi] of the product of their sizes.
std::uint64_t count_manipulations(const std::vector<std::uint64_t>& sizes, std::size_t lo,
                                  std::size_t hi) {
  std::vector<std::uint64_t> e(hi + 1, 0);  // elementary symmetric sums
  e[0] = 1;
  for (std::uint64_t s : sizes) {
    for (std::size_t j = hi; j >= 1; --j) e[j] = saturating_add(e[j], saturating_mul(e[j - 1], s));
  }
  std::uint64_t total = 0;
  for (std::size_t j = lo; j <= hi; ++j) total = saturating_add(total, e[j]);
  return total;
}

struct Search {
  const Election& election;
  CandidateId preferred;
  std::vector<bool> threats;  // candidates the defender prefers over p
  const ManipulationOptions& options;
  std::vector<std::vector<VoteVector>> choices;  // per district
};

struct Found {
  Manipulation manipulation;
  RecountSet recount;
};

// Tries every distortion combination on one M. Returns the first that the
// defender cannot overturn.
std::optional<Found> try_districts(const Search& s, const std::vector<DistrictIndex>& m_set,
                                   std::uint64_t& tried) {
  std::vector<std::size_t> pick(m_set.size(), 0);
  std::vector<std::pair<DistrictIndex, const VoteVector*>> attacked(m_set.size());
  EnumerationOptions enumeration{Execution::kSerial, s.options.subset_cap, s.threats};
  while (true) {
    for (std::size_t j = 0; j < m_set.size(); ++j) {
      attacked[j] = {m_set[j], &s.choices[m_set[j]][pick[j]]};
    }
    ++tried;
    RecountGame game(s.election, attacked);
    RecountOutcomes outcomes = enumerate_recounts(game, s.election.budget_defender(), enumeration);
    if (!outcomes.stopped_early && outcomes.achievable(s.preferred)) {
      std::map<DistrictIndex, VoteVector> entries;
      for (const auto& [i, votes] : attacked) entries.emplace(i, *votes);
      return Found{Manipulation(std::move(entries)), *outcomes.witness[s.preferred]};
    }
    // Odometer: last district varies fastest.
    std::size_t j = m_set.size();
    while (j > 0 && ++pick[j - 1] == s.choices[m_set[j - 1]].size()) pick[--j] = 0;
    if (j == 0) return std::nullopt;
  }
}

// All subsets of `pool` with size in [lo, hi], by size then lexicographic.
std::vector<std::vector<DistrictIndex>> subsets_by_size(const std::vector<DistrictIndex>& pool,
                                                        std::size_t lo, std::size_t hi) {
  std::vector<std::vector<DistrictIndex>> out;
  for (std::size_t size = lo; size <= hi && size <= pool.size(); ++size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t j = 0; j < size; ++j) idx[j] = j;
    while (true) {
      std::vector<DistrictIndex> set(size);
      for (std::size_t j = 0; j < size; ++j) set[j] = pool[idx[j]];
      out.push_back(std::move(set));
      std::size_t j = size;
      while (j > 0 && idx[j - 1] == pool.size() - size + j - 1) --j;
      if (j == 0) break;
      ++idx[j - 1];
      for (std::size_t t = j; t < size; ++t) idx[t] = idx[t - 1] + 1;
    }
  }
  return out;
}

}  // namespace

std::optional<Steal> district_min_steal(const Election& election, std::span<const Count> votes,
                                        CandidateId target) {
  Count total = 0;
  for (Count v : votes) total += v;
  const Count vp = votes[target];
  // required_removals(vp + t) <= t is monotone in t.
  Count lo = 0;
  Count hi = total - vp;
  if (required_removals(election, votes, target, vp + hi) > hi) return std::nullopt;
  while (lo < hi) {
    const Count mid = lo + (hi - lo) / 2;
    if (required_removals(election, votes, target, vp + mid) <= mid) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  Steal out{lo, VoteVector(votes.begin(), votes.end())};
  const Count level = vp + lo;
  Count moved = 0;
  for (std::size_t a = 0; a < votes.size(); ++a) {
    if (a == target) continue;
    const Count keep = std::max<Count>(0, level - (election.favors(a, target) ? 1 : 0));
    if (out.votes[a] > keep) {
      moved += out.votes[a] - keep;
      out.votes[a] = keep;
    }
  }
  // Spare moves come from the strongest rival (count, then priority).
  for (; moved < lo; ++moved) {
    std::optional<CandidateId> rival;
    for (CandidateId a : election.tiebreak()) {
      if (a != target && out.votes[a] > 0 && (!rival || out.votes[a] > out.votes[*rival])) {
        rival = a;
      }
    }
    --out.votes[*rival];
  }
  out.votes[target] = level;
  return out;
}

void for_each_distortion(std::span<const Count> votes, Count gamma, bool regular,
                         CandidateId preferred,
                         const std::function<void(const VoteVector&)>& visit) {
  const std::size_t m = votes.size();
  Count total = 0;
  for (Count v : votes) total += v;
  // suffix[a] = votes held by candidates a..m-1.
  std::vector<Count> suffix(m + 1, 0);
  for (std::size_t a = m; a > 0; --a) suffix[a - 1] = suffix[a] + votes[a - 1];
  VoteVector current(m, 0);

  auto recurse = [&](auto& self, std::size_t a, Count remaining, Count added) -> void {
    if (a == m) {
      if (remaining == 0) visit(current);
      return;
    }
    Count low = 0;
    Count high = remaining;
    if (regular) {
      if (a == preferred) {
        low = votes[a];
      } else {
        high = std::min(high, votes[a]);
      }
    }
    for (Count x = low; x <= high; ++x) {
      const Count now = added + std::max<Count>(0, x - votes[a]);
      if (now > gamma) break;
      // The rest must absorb remaining - x votes; anything above their own
      // votes is an addition.
      const Count rest = remaining - x;
      if (now + std::max<Count>(0, rest - suffix[a + 1]) > gamma) continue;
      current[a] = x;
      self(self, a + 1, rest, now);
    }
  };
  recurse(recurse, 0, total, 0);
}

std::vector<VoteVector> enumerate_distortions(std::span<const Count> votes, Count gamma,
                                              bool regular, CandidateId preferred) {
  std::vector<VoteVector> out;
  for_each_distortion(votes, gamma, regular, preferred,
                      [&](const VoteVector& v) { out.push_back(v); });
  return out;
}

SolveReport man_decide_brute(const Election& election, bool regular,
                             const ManipulationOptions& options) {
  const auto start = Clock::now();
  const CandidateId p = election.require_preferred();
  SolveReport report;
  report.algorithm = regular ? "brute-regular" : "brute";

  const CandidateId truth = tally(election).winner;
  if (truth == p) {
    report.decision = true;
    report.winner = p;
    report.manipulation = Manipulation{};
    report.recount = RecountSet{};
    report.stats.states_explored = 1;
    report.stats.wall_ms = elapsed_ms(start);
    return report;
  }

  Search search{election, p, std::vector<bool>(election.num_candidates(), false), options, {}};
  for (CandidateId c = 0; c < election.num_candidates(); ++c) {
    search.threats[c] = defender_prefers(election, c, p) == std::strong_ordering::greater;
  }
  const bool blind_defender = election.budget_defender() == 0;
  search.choices.resize(election.num_districts());
  std::vector<DistrictIndex> pool;
  std::vector<std::uint64_t> sizes;
  for (std::size_t i = 0; i < election.num_districts(); ++i) {
    const District& d = election.district(i);
    auto& list = search.choices[i];
    if (election.rule() == Rule::kPluralityOverVoters) {
      // Against a defender who cannot recount, moving as many votes as
      // allowed onto p dominates every other distortion.
      const Count full = std::min(d.gamma, d.size() - d.votes[p]);
      for_each_distortion(d.votes, d.gamma, regular || blind_defender, p,
                          [&](const VoteVector& v) {
                            if (v == d.votes) return;
                            if (blind_defender && v[p] != d.votes[p] + full) return;
                            list.push_back(v);
                          });
    } else {
      for (CandidateId c = 0; c < election.num_candidates(); ++c) {
        if (c == election.true_district_winner(i) || (regular && c != p)) continue;
        auto steal = district_min_steal(election, d.votes, c);
        if (steal && steal->moves <= d.gamma) list.push_back(std::move(steal->votes));
      }
    }
    if (!list.empty()) {
      pool.push_back(i);
      sizes.push_back(list.size());
    }
  }

  // A defender who can recount all of M restores the true winner, which is
  // also the defender's favorite outcome.
  const auto lo = static_cast<std::size_t>(election.budget_defender()) + 1;
  const auto hi = static_cast<std::size_t>(election.budget_attacker());
  if (lo <= hi) {
    const std::uint64_t total = count_manipulations(sizes, lo, std::min(hi, sizes.size()));
    if (total > options.manipulation_cap) {
      throw ResourceLimitError("manipulation search needs " + std::to_string(total) +
                               " candidates, cap is " +
                               std::to_string(options.manipulation_cap));
    }
  }
  const auto candidates = subsets_by_size(pool, lo, hi);

  std::optional<Found> found;
  std::uint64_t tried = 0;
  if (options.execution == Execution::kSerial) {
    for (const auto& m_set : candidates) {
      found = try_districts(search, m_set, tried);
      if (found) break;
    }
  } else {
    const auto n = static_cast<std::int64_t>(candidates.size());
    std::atomic<std::int64_t> first{n};
    std::vector<std::optional<Found>> results(candidates.size());
    std::atomic<std::uint64_t> tried_total{0};
    std::atomic<bool> failed{false};
    std::string failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t j = 0; j < n; ++j) {
      if (j > first.load(std::memory_order_relaxed) || failed.load()) continue;
      std::uint64_t local = 0;
      try {
        results[j] = try_districts(search, candidates[j], local);
      } catch (const ResourceLimitError& err) {
#pragma omp critical
        {
          if (!failed.exchange(true)) failure = err.what();
        }
      }
      tried_total += local;
      if (results[j]) {
        std::int64_t cur = first.load();
        while (j < cur && !first.compare_exchange_weak(cur, j)) {
        }
      }
    }
    if (failed) throw ResourceLimitError(failure);
    tried = tried_total;
    if (first < n) found = std::move(results[first]);
  }

  report.stats.states_explored = tried;
  if (found) {
    report.decision = true;
    report.winner = p;
    report.manipulation = std::move(found->manipulation);
    report.recount = std::move(found->recount);
  }
  report.stats.wall_ms = elapsed_ms(start);
  return report;
}

SolveReport man_pd_regular(const Election& election) {
  const auto start = Clock::now();
  if (election.rule() != Rule::kPluralityOverDistricts) {
    throw PreconditionError("pd-reg needs the PD rule");
  }
  const CandidateId p = election.require_preferred();

  // Districts that can be turned to p, grouped by their true winner.
  std::vector<DistrictIndex> turnable;
  std::map<DistrictIndex, VoteVector> steal;
  for (std::size_t i = 0; i < election.num_districts(); ++i) {
    if (election.true_district_winner(i) == p) continue;
    const District& d = election.district(i);
    auto s = district_min_steal(election, d.votes, p);
    if (s && s->moves <= d.gamma) {
      turnable.push_back(i);
      steal.emplace(i, std::move(s->votes));
    }
  }
  const auto heavier = [&](DistrictIndex a, DistrictIndex b) {
    const Count wa = election.district(a).weight;
    const Count wb = election.district(b).weight;
    return wa != wb ? wa > wb : a < b;
  };
  std::sort(turnable.begin(), turnable.end(), heavier);
  const std::size_t quota =
      std::min(static_cast<std::size_t>(election.budget_attacker()), turnable.size());

  SolveReport report;
  report.algorithm = "pd-reg";
  std::vector<DistrictIndex> fixed;  // Q
  while (true) {
    std::map<DistrictIndex, VoteVector> entries;
    for (DistrictIndex i : fixed) entries.emplace(i, steal.at(i));
    for (std::size_t j = 0; j < turnable.size() && entries.size() < quota; ++j) {
      entries.emplace(turnable[j], steal.at(turnable[j]));
    }
    Manipulation attack(std::move(entries));
    SolveReport greedy = greedy_recount(election, attack, election.budget_defender());
    ++report.stats.states_explored;
    const CandidateId a = *greedy.winner;
    if (a == p) {
      report.decision = true;
      report.winner = p;
      report.manipulation = std::move(attack);
      report.recount = RecountSet{};
      break;
    }
    if (fixed.size() == quota) break;
    // turnable is sorted heaviest first, so the first match is S_a^max.
    std::optional<DistrictIndex> next;
    for (DistrictIndex i : turnable) {
      if (election.true_district_winner(i) == a &&
          std::find(fixed.begin(), fixed.end(), i) == fixed.end()) {
        next = i;
        break;
      }
    }
    if (!next) break;
    fixed.push_back(*next);
  }
  report.stats.wall_ms = elapsed_ms(start);
  return report;
}

SolveReport verify_regular_attack(const Election& election, const Manipulation& manipulation) {
  const auto start = Clock::now();
  election.require_preferred();
  auto violations = validate(election, manipulation, true);
  if (!violations.empty()) {
    std::string detail;
    for (const auto& v : violations) detail += (detail.empty() ? "" : "; ") + v.to_string();
    throw PreconditionError("manipulation is not a valid regular manipulation: " + detail);
  }
  SolveReport greedy = greedy_recount(election, manipulation, election.budget_defender());
  SolveReport report;
  report.algorithm = "verify-regular";
  report.decision = greedy.winner == election.preferred();
  report.winner = greedy.winner;
  report.manipulation = manipulation;
  report.recount = std::move(greedy.recount);
  report.stats.states_explored = 1;
  report.stats.wall_ms = elapsed_ms(start);
  return report;
}

}  // namespace recount
