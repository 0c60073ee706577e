#pragma once

// Attacker side: single-district distortions and the manipulation search.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "recount/model.hpp"
#include "recount/recount_game.hpp"

namespace recount {

struct Steal {
  Count moves = 0;    // votes moved to the target
  VoteVector votes;   // resulting district vote vector
};

// Fewest votes moved onto `target` so that it wins the district under the
// election's priority order. Empty only when the district has no voters and
// `target` cannot win it.
std::optional<Steal> district_min_steal(const Election& election, std::span<const Count> votes,
                                        CandidateId target);

// Every vector reachable with at most `gamma` added votes and the same total,
// in lexicographic order. With `regular`, only `preferred` may gain votes.
void for_each_distortion(std::span<const Count> votes, Count gamma, bool regular,
                         CandidateId preferred,
                         const std::function<void(const VoteVector&)>& visit);
std::vector<VoteVector> enumerate_distortions(std::span<const Count> votes, Count gamma,
                                              bool regular, CandidateId preferred);

struct ManipulationOptions {
  Execution execution = Execution::kSerial;
  std::uint64_t manipulation_cap = 20'000'000;  // candidate manipulations
  std::uint64_t subset_cap = kDefaultSubsetCap;  // recounts per manipulation
};

// Exhaustive search for a manipulation that keeps the preferred candidate
// winning against the defender's optimal recount. M is tried by size, then
// lexicographically; distortions lexicographically.
SolveReport man_decide_brute(const Election& election, bool regular,
                             const ManipulationOptions& options = {});

// Regular PD manipulation against the greedy defender. Needs PD.
SolveReport man_pd_regular(const Election& election);

// Runs the greedy defender on a regular manipulation; `decision` is true
// when the preferred candidate still wins.
SolveReport verify_regular_attack(const Election& election, const Manipulation& manipulation);

}  // namespace recount
