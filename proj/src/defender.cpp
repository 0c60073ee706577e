#include "recount/defender.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "min_cost_flow.hpp"
#include "recount/core.hpp"

namespace recount {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_target(const Election& election, CandidateId target) {
  if (target >= election.num_candidates()) {
    throw ValidationError("target.known", "candidate id " + std::to_string(target));
  }
}

void check_budget(Count budget) {
  if (budget < 0) throw ValidationError("recount.budget", "negative budget");
}

// Open-addressing index over the rows of a flat buffer (stride = width).
class RowIndex {
 public:
  explicit RowIndex(std::size_t width) : width_(width), slots_(1024, kEmpty) {}

  // Returns the entry holding the row at `rows[candidate]`, or `candidate`
  // itself after registering it.
  std::uint32_t find_or_insert(const std::vector<Count>& rows, std::uint32_t candidate) {
    if ((count_ + 1) * 2 > slots_.size()) grow(rows);
    const Count* row = rows.data() + std::size_t{candidate} * width_;
    std::size_t mask = slots_.size() - 1;
    for (std::size_t s = hash(row) & mask;; s = (s + 1) & mask) {
      if (slots_[s] == kEmpty) {
        slots_[s] = candidate;
        ++count_;
        return candidate;
      }
      if (std::equal(row, row + width_, rows.data() + std::size_t{slots_[s]} * width_)) {
        return slots_[s];
      }
    }
  }

 private:
  static constexpr std::uint32_t kEmpty = 0xffffffffu;

  std::size_t hash(const Count* row) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::size_t a = 0; a < width_; ++a) {
      h ^= static_cast<std::uint64_t>(row[a]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h * 0xff51afd7ed558ccdull >> 7);
  }

  void grow(const std::vector<Count>& rows) {
    std::vector<std::uint32_t> old(slots_.size() * 2, kEmpty);
    old.swap(slots_);
    const std::size_t mask = slots_.size() - 1;
    for (std::uint32_t id : old) {
      if (id == kEmpty) continue;
      std::size_t s = hash(rows.data() + std::size_t{id} * width_) & mask;
      while (slots_[s] != kEmpty) s = (s + 1) & mask;
      slots_[s] = id;
    }
  }

  std::size_t width_;
  std::vector<std::uint32_t> slots_;
  std::size_t count_ = 0;
};

SolveReport decision_report(std::string algorithm, bool found, CandidateId target,
                            std::optional<RecountSet> witness) {
  SolveReport r;
  r.algorithm = std::move(algorithm);
  r.decision = found;
  if (found) {
    r.winner = target;
    r.recount = std::move(witness);
  }
  return r;
}

}  // namespace

SolveReport rec_decide_brute(const Election& election, const Manipulation& manipulation,
                             Count budget, CandidateId target,
                             const RecountOptions& options) {
  const auto start = Clock::now();
  check_target(election, target);
  check_budget(budget);
  RecountGame game(election, manipulation);
  EnumerationOptions enumeration{options.execution, options.subset_cap, {}};
  enumeration.stop_on.assign(election.num_candidates(), false);
  enumeration.stop_on[target] = true;
  RecountOutcomes outcomes = enumerate_recounts(game, budget, enumeration);
  SolveReport r = decision_report("brute", outcomes.achievable(target), target,
                                  outcomes.witness[target]);
  r.stats.states_explored = outcomes.visited;
  r.stats.wall_ms = elapsed_ms(start);
  return r;
}

RecountTable::RecountTable(const Election& election, const Manipulation& manipulation,
                           Count budget, std::uint64_t state_cap)
    : game_(election, manipulation), width_(election.num_candidates()) {
  check_budget(budget);
  const auto limit = static_cast<std::int32_t>(
      std::min<Count>(budget, static_cast<Count>(game_.size())));

  Layer first;
  first.rows.assign(width_, 0);
  first.recounts.push_back(0);
  first.parent.push_back(0);
  first.took.push_back(0);
  layers_.push_back(std::move(first));
  states_ = 1;

  for (std::size_t t = 0; t < game_.size(); ++t) {
    const Layer& prev = layers_.back();
    const VoteVector& delta = game_.delta(t);
    Layer next;
    RowIndex index(width_);

    auto offer = [&](std::uint32_t parent, bool take) {
      const std::int32_t recounts = prev.recounts[parent] + (take ? 1 : 0);
      const auto entry = static_cast<std::uint32_t>(next.recounts.size());
      const Count* base = prev.rows.data() + std::size_t{parent} * width_;
      for (std::size_t a = 0; a < width_; ++a) {
        next.rows.push_back(base[a] + (take ? delta[a] : 0));
      }
      const std::uint32_t found = index.find_or_insert(next.rows, entry);
      if (found != entry) {
        next.rows.resize(next.rows.size() - width_);
        if (recounts < next.recounts[found]) {
          next.recounts[found] = recounts;
          next.parent[found] = parent;
          next.took[found] = take;
        }
        return;
      }
      next.recounts.push_back(recounts);
      next.parent.push_back(parent);
      next.took.push_back(take);
    };

    for (std::uint32_t j = 0; j < prev.recounts.size(); ++j) {
      offer(j, false);
      if (prev.recounts[j] < limit) offer(j, true);
    }
    states_ += next.recounts.size();
    if (states_ > state_cap) {
      throw ResourceLimitError("recount table exceeds " + std::to_string(state_cap) +
                               " states");
    }
    layers_.push_back(std::move(next));
  }
}

RecountSet RecountTable::rebuild(std::size_t entry) const {
  std::vector<DistrictIndex> out;
  for (std::size_t t = game_.size(); t > 0; --t) {
    const Layer& layer = layers_[t];
    if (layer.took[entry]) out.push_back(game_.districts()[t - 1]);
    entry = layer.parent[entry];
  }
  return RecountSet(std::move(out));
}

std::vector<std::optional<RecountSet>> RecountTable::witnesses() const {
  const Layer& last = layers_.back();
  std::vector<std::size_t> best(width_, last.recounts.size());
  VoteVector scores(width_);
  for (std::size_t j = 0; j < last.recounts.size(); ++j) {
    for (std::size_t a = 0; a < width_; ++a) {
      scores[a] = game_.distorted_scores()[a] + last.rows[j * width_ + a];
    }
    const CandidateId w = game_.winner(scores);
    if (best[w] == last.recounts.size() || last.recounts[j] < last.recounts[best[w]]) {
      best[w] = j;
    }
  }
  std::vector<std::optional<RecountSet>> out(width_);
  for (std::size_t c = 0; c < width_; ++c) {
    if (best[c] != last.recounts.size()) out[c] = rebuild(best[c]);
  }
  return out;
}

std::optional<RecountSet> RecountTable::witness_for(CandidateId target) const {
  return witnesses().at(target);
}

SolveReport rec_decide_dp(const Election& election, const Manipulation& manipulation,
                          Count budget, CandidateId target, const RecountOptions& options) {
  const auto start = Clock::now();
  check_target(election, target);
  RecountTable table(election, manipulation, budget, options.state_cap);
  std::optional<RecountSet> witness = table.witness_for(target);
  const bool found = witness.has_value();
  SolveReport r = decision_report("dp", found, target, std::move(witness));
  r.stats.states_explored = table.states();
  r.stats.wall_ms = elapsed_ms(start);
  return r;
}

SolveReport rec_optimize(const Election& election, const Manipulation& manipulation,
                         Count budget, RecountAlgorithm algorithm,
                         const RecountOptions& options) {
  const auto start = Clock::now();
  check_budget(budget);
  const std::vector<CandidateId> ranking = defender_ranking(election);
  std::vector<std::optional<RecountSet>> witness;
  SolveReport r;
  if (algorithm == RecountAlgorithm::kDp) {
    RecountTable table(election, manipulation, budget, options.state_cap);
    witness = table.witnesses();
    r.stats.states_explored = table.states();
    r.algorithm = "dp";
  } else {
    RecountGame game(election, manipulation);
    EnumerationOptions enumeration{options.execution, options.subset_cap, {}};
    enumeration.stop_on.assign(election.num_candidates(), false);
    enumeration.stop_on[ranking.front()] = true;
    RecountOutcomes outcomes = enumerate_recounts(game, budget, enumeration);
    witness = std::move(outcomes.witness);
    r.stats.states_explored = outcomes.visited;
    r.algorithm = "brute";
  }
  for (CandidateId c : ranking) {
    if (!witness[c]) continue;
    r.decision = true;
    r.winner = c;
    r.recount = std::move(witness[c]);
    break;
  }
  r.stats.wall_ms = elapsed_ms(start);
  return r;
}

SolveReport rec_pd_unweighted(const Election& election, const Manipulation& manipulation,
                              Count budget, CandidateId target) {
  const auto start = Clock::now();
  if (election.rule() != Rule::kPluralityOverDistricts || !election.unweighted()) {
    throw PreconditionError("unweighted-pd needs PD with unit district weights");
  }
  check_target(election, target);
  check_budget(budget);
  check_manipulation(election, manipulation);

  const std::size_t m = election.num_candidates();
  const CandidateId c = target;
  // Each attacked district whose distorted and true winners differ is a
  // switch y -> x the defender may buy at unit cost.
  VoteVector wins(m, 0);
  std::vector<std::vector<std::vector<DistrictIndex>>> switches(
      m, std::vector<std::vector<DistrictIndex>>(m));
  for (std::size_t i = 0; i < election.num_districts(); ++i) {
    const CandidateId x = election.true_district_winner(i);
    const CandidateId y = manipulation.contains(i)
                              ? district_winner(election, manipulation.distorted(i))
                              : x;
    ++wins[y];
    if (x != y) switches[y][x].push_back(i);
  }
  Count gain_max = 0;
  for (std::size_t y = 0; y < m; ++y) gain_max += static_cast<Count>(switches[y][c].size());

  const std::size_t source = m;
  const std::size_t sink = m + 1;
  // Any solution that reaches the final score T for c is cheaper than one
  // that falls short, so c's intake is forced to be maximal.
  const Count bonus = static_cast<Count>(election.num_districts()) + 1;
  Count demand = 0;
  for (std::size_t d = 0; d < m; ++d) {
    if (d != c) demand += wins[d];
  }

  std::optional<Count> best_cost;
  std::vector<std::vector<Count>> best_flow;
  std::uint64_t runs = 0;
  for (Count gain = 0; gain <= gain_max; ++gain) {
    const Count final_score = wins[c] + gain;
    bool feasible = true;
    for (std::size_t d = 0; d < m; ++d) {
      if (d != c && final_score - (election.favors(d, c) ? 1 : 0) < 0) feasible = false;
    }
    if (!feasible) continue;

    detail::MinCostFlow flow(m + 2);
    for (std::size_t d = 0; d < m; ++d) {
      if (d == c) continue;
      flow.add_arc(source, d, wins[d], 0);
      flow.add_arc(d, sink, final_score - (election.favors(d, c) ? 1 : 0), 0);
    }
    const std::size_t target_arc = flow.add_arc(c, sink, gain, -bonus);
    std::vector<std::vector<std::size_t>> arc(m, std::vector<std::size_t>(m, SIZE_MAX));
    for (std::size_t y = 0; y < m; ++y) {
      if (y == c) continue;
      for (std::size_t x = 0; x < m; ++x) {
        if (!switches[y][x].empty()) {
          arc[y][x] = flow.add_arc(y, x, static_cast<Count>(switches[y][x].size()), 1);
        }
      }
    }
    ++runs;
    const auto result = flow.solve(source, sink, demand);
    if (result.flow < demand || flow.flow(target_arc) < gain) continue;
    const Count cost = result.cost + bonus * gain;
    if (cost > budget || (best_cost && cost >= *best_cost)) continue;
    best_cost = cost;
    best_flow.assign(m, std::vector<Count>(m, 0));
    for (std::size_t y = 0; y < m; ++y) {
      for (std::size_t x = 0; x < m; ++x) {
        if (arc[y][x] != SIZE_MAX) best_flow[y][x] = flow.flow(arc[y][x]);
      }
    }
  }

  SolveReport r;
  r.algorithm = "unweighted-pd";
  r.stats.states_explored = runs;
  if (best_cost) {
    std::vector<DistrictIndex> picked;
    for (std::size_t y = 0; y < m; ++y) {
      for (std::size_t x = 0; x < m; ++x) {
        const auto& pool = switches[y][x];
        picked.insert(picked.end(), pool.begin(), pool.begin() + best_flow[y][x]);
      }
    }
    RecountSet witness(std::move(picked));
    if (tally(election, manipulation, witness).winner != c) {
      throw std::logic_error("unweighted-pd witness does not replay");
    }
    r.decision = true;
    r.winner = c;
    r.recount = std::move(witness);
  }
  r.stats.wall_ms = elapsed_ms(start);
  return r;
}

SolveReport greedy_recount(const Election& election, const Manipulation& manipulation,
                           Count budget) {
  const auto start = Clock::now();
  check_budget(budget);
  const CandidateId p = election.require_preferred();
  RecountGame game(election, manipulation);
  const auto take = static_cast<std::size_t>(std::min<Count>(budget, static_cast<Count>(game.size())));

  CandidateId output = p;
  RecountSet output_recount;
  std::vector<std::size_t> order(game.size());
  for (CandidateId a : defender_ranking(election)) {
    if (defender_prefers(election, a, p) != std::strong_ordering::greater) break;
    // Recount the districts that help a the most relative to p.
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t s, std::size_t t) {
      return game.delta(s)[a] - game.delta(s)[p] > game.delta(t)[a] - game.delta(t)[p];
    });
    VoteVector scores = game.distorted_scores();
    std::vector<DistrictIndex> chosen;
    for (std::size_t j = 0; j < take; ++j) {
      const VoteVector& d = game.delta(order[j]);
      for (std::size_t b = 0; b < scores.size(); ++b) scores[b] += d[b];
      chosen.push_back(game.districts()[order[j]]);
    }
    const CandidateId b = game.winner(scores);
    if (b != p && defender_prefers(election, b, output) == std::strong_ordering::greater) {
      output = b;
      output_recount = RecountSet(std::move(chosen));
    }
  }

  SolveReport r;
  r.algorithm = "greedy";
  r.decision = output != p;
  r.winner = output;
  r.recount = std::move(output_recount);
  r.stats.states_explored = 1;
  r.stats.wall_ms = elapsed_ms(start);
  return r;
}

}  // namespace recount
