#pragma once

// Score-space view of a manipulated election and the exhaustive recount
// enumeration kernel. Recounting district i moves the tally by
// delta_i = contribution(true votes) - contribution(distorted votes), so the
// tally after recounting R is distorted_scores + sum_{i in R} delta_i.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "recount/model.hpp"

namespace recount {

enum class Execution { kSerial, kParallel };

inline constexpr std::uint64_t kDefaultSubsetCap = 50'000'000;

class RecountGame {
 public:
  // Validates the manipulation (not regularity).
  RecountGame(const Election& election, const Manipulation& manipulation);
  // Unchecked fast path for solvers that build distortions themselves.
  RecountGame(const Election& election,
              std::span<const std::pair<DistrictIndex, const VoteVector*>> attacked);

  const Election& election() const { return *election_; }
  // Attacked districts in ascending order; positions index `delta`.
  const std::vector<DistrictIndex>& districts() const { return districts_; }
  const VoteVector& distorted_scores() const { return distorted_scores_; }
  const VoteVector& delta(std::size_t position) const { return deltas_[position]; }
  std::size_t size() const { return districts_.size(); }

  CandidateId winner(std::span<const Count> scores) const;
  VoteVector scores_after(const RecountSet& recount) const;

 private:
  void finish(std::span<const std::pair<DistrictIndex, const VoteVector*>> attacked);

  const Election* election_;
  std::vector<DistrictIndex> districts_;
  VoteVector distorted_scores_;
  std::vector<VoteVector> deltas_;
};

// Number of subsets of an n-set with at most `budget` elements, saturating
// at UINT64_MAX.
std::uint64_t count_subsets(std::size_t n, std::uint64_t budget);

struct RecountOutcomes {
  // Per candidate: lexicographically smallest R (by sorted index sequence)
  // that makes it win, if any was found.
  std::vector<std::optional<RecountSet>> witness;
  std::uint64_t visited = 0;
  bool stopped_early = false;

  bool achievable(CandidateId c) const { return witness[c].has_value(); }
};

struct EnumerationOptions {
  Execution execution = Execution::kSerial;
  std::uint64_t subset_cap = kDefaultSubsetCap;
  // Stop as soon as one of these candidates wins some R. Only witnesses of
  // stop candidates are guaranteed exact after an early stop.
  std::vector<bool> stop_on;
};

// Visits every R subset of M with |R| <= budget in lexicographic order.
// Throws ResourceLimitError when the number of subsets exceeds the cap.
RecountOutcomes enumerate_recounts(const RecountGame& game, Count budget,
                                   const EnumerationOptions& options = {});

}  // namespace recount
