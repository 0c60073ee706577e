#pragma once

// Recount solvers for the defender. All of them take the recount budget
// explicitly so callers can explore budgets other than the election's own.

#include <cstdint>

#include "recount/model.hpp"
#include "recount/recount_game.hpp"

namespace recount {

struct RecountOptions {
  Execution execution = Execution::kSerial;
  std::uint64_t subset_cap = kDefaultSubsetCap;  // brute force
  std::uint64_t state_cap = 10'000'000;          // dynamic program
};

// Exhaustive oracle. The witness is the lexicographically smallest R.
SolveReport rec_decide_brute(const Election& election, const Manipulation& manipulation,
                             Count budget, CandidateId target,
                             const RecountOptions& options = {});

// Table of reachable score vectors, one layer per attacked district. Each
// state keeps the fewest recounts reaching it plus a back-pointer.
class RecountTable {
 public:
  RecountTable(const Election& election, const Manipulation& manipulation, Count budget,
               std::uint64_t state_cap = RecountOptions{}.state_cap);

  // Fewest-recount R (ties: first state reached) making `target` win.
  std::optional<RecountSet> witness_for(CandidateId target) const;
  // The same for every candidate in one pass over the final layer.
  std::vector<std::optional<RecountSet>> witnesses() const;
  std::uint64_t states() const { return states_; }
  const RecountGame& game() const { return game_; }

 private:
  struct Layer {
    std::vector<Count> rows;  // offsets from the distorted tally, stride m
    std::vector<std::int32_t> recounts;
    std::vector<std::uint32_t> parent;
    std::vector<char> took;
  };

  RecountSet rebuild(std::size_t entry) const;

  RecountGame game_;
  std::size_t width_;
  std::vector<Layer> layers_;
  std::uint64_t states_ = 0;
};

SolveReport rec_decide_dp(const Election& election, const Manipulation& manipulation,
                          Count budget, CandidateId target,
                          const RecountOptions& options = {});

enum class RecountAlgorithm { kDp, kBrute };

// Defender's optimal response: the most preferred achievable winner
// (welfare, then priority) with its witness.
SolveReport rec_optimize(const Election& election, const Manipulation& manipulation,
                         Count budget, RecountAlgorithm algorithm,
                         const RecountOptions& options = {});

// Polynomial decision for unit-weight PD via {0,1}-price bribery solved as
// a min-cost flow over candidates. Throws PreconditionError otherwise.
SolveReport rec_pd_unweighted(const Election& election, const Manipulation& manipulation,
                              Count budget, CandidateId target);

// Greedy recounting against the preferred candidate p. Reports the chosen
// winner; `decision` is true when that winner is not p.
SolveReport greedy_recount(const Election& election, const Manipulation& manipulation,
                           Count budget);

}  // namespace recount
