#pragma once

#include <string>
#include <vector>

#include "recount/instance_io.hpp"
#include "recount/model.hpp"

namespace testing_support {

using namespace recount;

inline std::string fixture(const std::string& name) {
  return std::string(RECOUNT_FIXTURE_DIR) + "/" + name;
}

// Candidates a, b, p (ids 0, 1, 2) with priority p > a > b and gamma = n_i.
inline Election abp(Rule rule, const std::vector<VoteVector>& votes,
                    std::vector<Count> weights = {}, Count budget_attacker = 2,
                    Count budget_defender = 1) {
  std::vector<District> ds;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    District d;
    d.votes = votes[i];
    d.weight = weights.empty() ? 1 : weights[i];
    d.gamma = d.size();
    ds.push_back(d);
  }
  return Election(rule, {"a", "b", "p"}, {2, 0, 1}, ds, CandidateId{2}, budget_attacker,
                  budget_defender);
}

}  // namespace testing_support
