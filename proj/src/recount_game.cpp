#include "recount/recount_game.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <string>

#include "recount/core.hpp"

namespace recount {

RecountGame::RecountGame(const Election& election, const Manipulation& manipulation)
    : election_(&election) {
  check_manipulation(election, manipulation);
  std::vector<std::pair<DistrictIndex, const VoteVector*>> attacked;
  attacked.reserve(manipulation.size());
  for (const auto& [i, votes] : manipulation.entries()) attacked.emplace_back(i, &votes);
  finish(attacked);
}

RecountGame::RecountGame(
    const Election& election,
    std::span<const std::pair<DistrictIndex, const VoteVector*>> attacked)
    : election_(&election) {
  finish(attacked);
}

void RecountGame::finish(
    std::span<const std::pair<DistrictIndex, const VoteVector*>> attacked) {
  const Election& e = *election_;
  const std::size_t m = e.num_candidates();
  std::vector<const VoteVector*> effective(e.num_districts(), nullptr);
  for (const auto& [i, votes] : attacked) effective[i] = votes;

  distorted_scores_.assign(m, 0);
  for (std::size_t i = 0; i < e.num_districts(); ++i) {
    const VoteVector& votes = effective[i] ? *effective[i] : e.district(i).votes;
    add_contribution(e, i, votes, distorted_scores_);
  }
  for (std::size_t i = 0; i < e.num_districts(); ++i) {
    if (!effective[i]) continue;
    districts_.push_back(i);
    VoteVector delta(m, 0);
    add_contribution(e, i, e.district(i).votes, delta);
    VoteVector removed(m, 0);
    add_contribution(e, i, *effective[i], removed);
    for (std::size_t a = 0; a < m; ++a) delta[a] -= removed[a];
    deltas_.push_back(std::move(delta));
  }
}

CandidateId RecountGame::winner(std::span<const Count> scores) const {
  return score_winner(*election_, scores);
}

VoteVector RecountGame::scores_after(const RecountSet& recount) const {
  VoteVector scores = distorted_scores_;
  for (DistrictIndex i : recount.indices()) {
    auto it = std::lower_bound(districts_.begin(), districts_.end(), i);
    if (it == districts_.end() || *it != i) {
      throw ValidationError("recount.subset", "not manipulated", i);
    }
    const VoteVector& d = deltas_[static_cast<std::size_t>(it - districts_.begin())];
    for (std::size_t a = 0; a < scores.size(); ++a) scores[a] += d[a];
  }
  return scores;
}

__extension__ using Wide = unsigned __int128;

std::uint64_t count_subsets(std::size_t n, std::uint64_t budget) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  std::uint64_t binom = 1;  // C(n, j)
  for (std::uint64_t j = 1; j <= budget && j <= n; ++j) {
    // C(n, j) = C(n, j-1) * (n - j + 1) / j, computed in 128 bits.
    const Wide next = static_cast<Wide>(binom) * (n - j + 1) / j;
    if (next > kMax) return kMax;
    binom = static_cast<std::uint64_t>(next);
    if (total > kMax - binom) return kMax;
    total += binom;
  }
  return total;
}

namespace {

// Depth-first walk over subsets whose smallest element is fixed by the
// caller. Pre-order DFS over increasing indices is lexicographic order.
class SubtreeWalker {
 public:
  SubtreeWalker(const RecountGame& game, std::size_t budget, const std::vector<bool>& stop_on)
      : game_(game), budget_(budget), stop_on_(stop_on),
        witness_(game.election().num_candidates()) {}

  // Returns true when a stop candidate was reached.
  bool walk_from(std::size_t first, VoteVector scores) {
    scores_ = std::move(scores);
    path_.clear();
    return visit_element(first);
  }

  std::vector<std::optional<std::vector<std::size_t>>>& witness() { return witness_; }
  std::uint64_t visited() const { return visited_; }

 private:
  bool visit_element(std::size_t t) {
    apply(t, +1);
    path_.push_back(t);
    ++visited_;
    const CandidateId w = game_.winner(scores_);
    if (!witness_[w]) witness_[w] = path_;
    bool stop = !stop_on_.empty() && stop_on_[w];
    if (!stop && path_.size() < budget_) {
      for (std::size_t u = t + 1; u < game_.size() && !stop; ++u) stop = visit_element(u);
    }
    path_.pop_back();
    apply(t, -1);
    return stop;
  }

  void apply(std::size_t t, Count sign) {
    const VoteVector& d = game_.delta(t);
    for (std::size_t a = 0; a < scores_.size(); ++a) scores_[a] += sign * d[a];
  }

  const RecountGame& game_;
  std::size_t budget_;
  const std::vector<bool>& stop_on_;
  VoteVector scores_;
  std::vector<std::size_t> path_;
  std::vector<std::optional<std::vector<std::size_t>>> witness_;
  std::uint64_t visited_ = 0;
};

RecountSet to_recount(const RecountGame& game, const std::vector<std::size_t>& positions) {
  std::vector<DistrictIndex> out;
  out.reserve(positions.size());
  for (std::size_t pos : positions) out.push_back(game.districts()[pos]);
  return RecountSet(std::move(out));
}

}  // namespace

RecountOutcomes enumerate_recounts(const RecountGame& game, Count budget,
                                   const EnumerationOptions& options) {
  const std::size_t m = game.election().num_candidates();
  if (!options.stop_on.empty() && options.stop_on.size() != m) {
    throw PreconditionError("stop_on must have one flag per candidate");
  }
  const auto depth = static_cast<std::size_t>(std::max<Count>(budget, 0));
  const std::uint64_t subsets = count_subsets(game.size(), depth);
  if (subsets > options.subset_cap) {
    throw ResourceLimitError("recount enumeration needs " + std::to_string(subsets) +
                             " subsets, cap is " + std::to_string(options.subset_cap));
  }

  RecountOutcomes out;
  out.witness.resize(m);
  const CandidateId base = game.winner(game.distorted_scores());
  out.witness[base] = RecountSet{};
  out.visited = 1;
  if (!options.stop_on.empty() && options.stop_on[base]) {
    out.stopped_early = true;
    return out;
  }
  if (depth == 0) return out;

  const std::size_t roots = game.size();
  // Per root: witnesses (as positions) and visit counts.
  std::vector<std::vector<std::optional<std::vector<std::size_t>>>> found(roots);
  std::vector<std::uint64_t> visited(roots, 0);
  std::vector<char> stopped(roots, 0);

  if (options.execution == Execution::kSerial) {
    for (std::size_t t = 0; t < roots; ++t) {
      SubtreeWalker local(game, depth, options.stop_on);
      stopped[t] = local.walk_from(t, game.distorted_scores());
      found[t] = std::move(local.witness());
      visited[t] = local.visited();
      if (stopped[t]) break;
    }
  } else {
    // Roots are independent subtrees; a stop found under root t makes every
    // root > t irrelevant because its subsets are lexicographically larger.
    std::atomic<std::size_t> first_stop{roots};
    const auto n = static_cast<std::int64_t>(roots);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t ti = 0; ti < n; ++ti) {
      const auto t = static_cast<std::size_t>(ti);
      if (t > first_stop.load(std::memory_order_relaxed)) continue;
      SubtreeWalker local(game, depth, options.stop_on);
      stopped[t] = local.walk_from(t, game.distorted_scores());
      found[t] = std::move(local.witness());
      visited[t] = local.visited();
      if (stopped[t]) {
        std::size_t cur = first_stop.load();
        while (t < cur && !first_stop.compare_exchange_weak(cur, t)) {
        }
      }
    }
  }

  for (std::size_t t = 0; t < roots; ++t) {
    out.visited += visited[t];
    for (std::size_t c = 0; c < m && !found[t].empty(); ++c) {
      if (!out.witness[c] && found[t][c]) out.witness[c] = to_recount(game, *found[t][c]);
    }
    if (stopped[t]) {
      out.stopped_early = true;
      break;
    }
  }
  return out;
}

}  // namespace recount
