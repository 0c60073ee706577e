#pragma once

// Instance generators: hardness constructions that map source problems
// (Subset Sum, X3C, Independent Set, SSS, Partition) to game instances, and
// a seeded random generator. Districts with no voters are left out, so a
// generated election may have fewer districts than the construction lists.
// The voter total is whatever the listed districts sum to.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "recount/model.hpp"

namespace recount {

struct GeneratedInstance {
  Election election;
  std::optional<Manipulation> manipulation;
  // Candidate whose restoration (Rec) or victory (Man) encodes "yes".
  CandidateId target = 0;
};

// Restoring candidate "a" within B_D = |X| - 1 recounts is possible iff
// some non-empty subset of X sums to zero. Needs x != 0 and sum(X) > 0.
// `weighted` switches to PD with weight = district size.
GeneratedInstance gen_subsetsum_pv_rec(std::span<const Count> xs, bool weighted);

// Elements are 1..universe with universe = 3l; "a" can be restored iff the
// sets contain an exact cover. B_D = min(l, number of sets). Elements no set
// contains are allowed and make the answer "no".
GeneratedInstance gen_x3c_pv_rec(std::size_t universe,
                                 std::span<const std::array<std::size_t, 3>> sets);

// p can win (B_D = 0) iff some non-empty subset of X sums to zero.
// Needs |X| >= 2 and x != 0.
GeneratedInstance gen_subsetsum_pv_man(std::span<const Count> xs);

struct Graph {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

// "a" can be restored iff the graph has an independent set of size `size`.
// Needs at least one edge and size < nodes.
GeneratedInstance gen_is_pd_rec(const Graph& graph, std::size_t size);

// p can win iff some `size`-subset of X has no non-empty zero-sum subset.
// Needs distinct non-zero x, size >= 1 and |X| >= size.
GeneratedInstance gen_sss_pd_man(std::span<const Count> xs, std::size_t size);

// Regular PV manipulation; "a" can be restored iff X splits into two halves
// of equal sum. Needs every x > 0 divisible by 4 and epsilon > 0.
GeneratedInstance gen_partition_pv_recreg(std::span<const Count> xs, double epsilon);

enum class GammaMode { kFull, kRandom };

struct RandomParams {
  Rule rule = Rule::kPluralityOverVoters;
  std::size_t districts = 4;
  std::size_t candidates = 3;  // the last one is the preferred candidate "p"
  Count max_voters = 5;        // n_i uniform in [1, max_voters]
  Count max_weight = 1;        // PD weight uniform in [1, max_weight]
  GammaMode gamma = GammaMode::kFull;
  Count budget_attacker = 2;
  Count budget_defender = 1;
};

// Same seed and params give the same election on every platform.
Election gen_random(const RandomParams& params, std::uint64_t seed);

// Picks `size` random districts and a random distortion of each; with
// `regular`, only the preferred candidate gains votes (PV) or p wins each
// attacked district (PD, skipping districts p cannot take within gamma).
Manipulation random_manipulation(const Election& election, std::size_t size, bool regular,
                                 std::uint64_t seed);

}  // namespace recount
