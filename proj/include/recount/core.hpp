#pragma once

#include <compare>
#include <span>
#include <vector>

#include "recount/model.hpp"

namespace recount {

// Candidate with the highest score; equal scores go to the higher-priority
// candidate.
CandidateId score_winner(const Election& election, std::span<const Count> scores);

// Plurality winner of a single district's vote vector.
CandidateId district_winner(const Election& election, std::span<const Count> votes);

// Adds district `i`'s contribution under `votes` to `scores`
// (PV: the vote vector, PD: the district weight credited to its winner).
void add_contribution(const Election& election, DistrictIndex i,
                      std::span<const Count> votes, std::span<Count> scores);

// Tally of the effective profile: recounted and unattacked districts use
// true votes, the rest use the distorted votes. Validates its inputs.
Tally tally(const Election& election);
Tally tally(const Election& election, const Manipulation& manipulation);
Tally tally(const Election& election, const Manipulation& manipulation,
            const RecountSet& recount);

// Always computed on the true profile.
Count social_welfare(const Election& election, CandidateId candidate);

// greater: the defender prefers c1 (higher welfare, then priority).
std::strong_ordering defender_prefers(const Election& election, CandidateId c1,
                                      CandidateId c2);

// Candidates ordered from most to least preferred by the defender.
std::vector<CandidateId> defender_ranking(const Election& election);

std::vector<Violation> validate(const Election& election,
                                const Manipulation& manipulation,
                                bool require_regular);

// Throws ValidationError if `validate` reports anything.
void check_manipulation(const Election& election, const Manipulation& manipulation,
                        bool require_regular = false);
void check_recount(const Manipulation& manipulation, const RecountSet& recount,
                   Count budget);

bool is_regular(const Election& election, const Manipulation& manipulation);

}  // namespace recount
