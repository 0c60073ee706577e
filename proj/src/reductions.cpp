#include "recount/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "recount/attacker.hpp"
#include "recount/core.hpp"

namespace recount {

namespace {

void require(bool ok, const char* constraint, const std::string& detail) {
  if (!ok) throw PreconditionError(std::string(constraint) + ": " + detail);
}

Count checked_mul(Count a, Count b) {
  Count out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw ValidationError("generator.overflow", "values exceed 64-bit range");
  }
  return out;
}

Count checked_add(Count a, Count b) {
  Count out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw ValidationError("generator.overflow", "values exceed 64-bit range");
  }
  return out;
}

// Accumulates districts and the distorted vectors of the attacked ones.
struct Builder {
  std::vector<std::string> names;
  std::vector<District> districts;
  std::map<DistrictIndex, VoteVector> distorted;

  explicit Builder(std::vector<std::string> candidates) : names(std::move(candidates)) {}

  std::size_t width() const { return names.size(); }

  // Empty districts are dropped.
  void add(VoteVector votes, Count weight, std::optional<Count> gamma = std::nullopt,
           std::optional<VoteVector> after = std::nullopt) {
    District d;
    d.votes = std::move(votes);
    d.weight = weight;
    const Count n = d.size();
    if (n == 0) return;
    d.gamma = gamma.value_or(n);
    if (after) distorted.emplace(districts.size(), std::move(*after));
    districts.push_back(std::move(d));
  }

  // Weight equal to the number of voters.
  void add_sized(VoteVector votes, std::optional<Count> gamma = std::nullopt,
                 std::optional<VoteVector> after = std::nullopt) {
    Count n = 0;
    for (Count v : votes) n = checked_add(n, v);
    add(std::move(votes), std::max<Count>(n, 1), gamma, std::move(after));
  }

  GeneratedInstance finish(Rule rule, std::vector<CandidateId> tiebreak,
                           std::optional<CandidateId> preferred, Count budget_attacker,
                           Count budget_defender, CandidateId target, bool with_manipulation) {
    Election e(rule, names, std::move(tiebreak), std::move(districts), preferred,
               budget_attacker, budget_defender);
    std::optional<Manipulation> m;
    if (with_manipulation) m = Manipulation(std::move(distorted));
    return GeneratedInstance{std::move(e), std::move(m), target};
  }
};

// Candidates a, b, p in that id order.
constexpr CandidateId kA = 0;
constexpr CandidateId kB = 1;
constexpr CandidateId kP = 2;

VoteVector abp(Count a, Count b, Count p) { return {a, b, p}; }

// Unbiased integer in [lo, hi] by rejection; std distributions are not
// specified bit-for-bit across standard libraries.
Count uniform(std::mt19937_64& rng, Count lo, Count hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<Count>(rng());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return lo + static_cast<Count>(draw % span);
}

}  // namespace

GeneratedInstance gen_subsetsum_pv_rec(std::span<const Count> xs, bool weighted) {
  require(!xs.empty(), "subset-sum", "X must be non-empty");
  Count sum = 0;
  Count y = 0;
  Count plus = 0;   // sum of 2x over positive x
  Count minus = 0;  // sum of 2x over negative x
  for (Count x : xs) {
    require(x != 0, "subset-sum", "entries must be non-zero");
    require(std::abs(x) < (Count{1} << 40), "subset-sum", "entry too large");
    sum += x;
    y = checked_add(y, 2 * std::abs(x));
    (x > 0 ? plus : minus) += 2 * x;
  }
  require(sum > 0, "subset-sum", "entries must have a positive sum");

  Builder b({"a", "b", "p"});
  auto add = [&](VoteVector v, std::optional<VoteVector> after = std::nullopt) {
    if (weighted) {
      b.add_sized(std::move(v), std::nullopt, std::move(after));
    } else {
      b.add(std::move(v), 1, std::nullopt, std::move(after));
    }
  };
  for (Count x : xs) {
    if (x > 0) {
      add(abp(0, 2 * x, 0), abp(0, 0, 2 * x));
    } else {
      add(abp(0, 0, -2 * x), abp(0, -2 * x, 0));
    }
  }
  add(abp(y + 1, 0, 0));
  add(abp(0, y - plus, 0));
  add(abp(0, 0, y + minus));
  const auto l = static_cast<Count>(xs.size());
  return b.finish(weighted ? Rule::kPluralityOverDistricts : Rule::kPluralityOverVoters,
                  {kP, kA, kB}, kP, l, l - 1, kA, true);
}

GeneratedInstance gen_x3c_pv_rec(std::size_t universe,
                                 std::span<const std::array<std::size_t, 3>> sets) {
  require(universe > 0 && universe % 3 == 0, "x3c", "universe size must be a positive multiple of 3");
  require(!sets.empty(), "x3c", "at least one set is needed");
  const std::size_t l = universe / 3;
  const auto s = static_cast<Count>(sets.size());
  const auto lc = static_cast<Count>(l);

  // Ids: a = 0, b = 1, element e (1-based) = e + 1.
  std::vector<std::string> names{"a", "b"};
  for (std::size_t e = 1; e <= universe; ++e) names.push_back("j" + std::to_string(e));
  Builder b(std::move(names));
  for (const auto& set : sets) {
    std::set<std::size_t> members(set.begin(), set.end());
    require(members.size() == 3, "x3c", "sets must have three distinct elements");
    for (std::size_t e : members) require(e >= 1 && e <= universe, "x3c", "element out of range");
    VoteVector truth(b.width(), 0);
    VoteVector after(b.width(), 0);
    truth[0] = after[0] = 2;
    truth[1] = 6;
    for (std::size_t e = 1; e <= universe; ++e) {
      truth[e + 1] = members.contains(e) ? 0 : 2;
      after[e + 1] = 2;
    }
    b.add(std::move(truth), 1, std::nullopt, std::move(after));
  }
  VoteVector base(b.width(), checked_mul(checked_mul(6, lc), s) + 1);
  base[0] = 6 * lc * s;
  base[1] = 0;
  b.add(std::move(base), 1);

  // Element candidates beat a on ties, then a beats b.
  std::vector<CandidateId> tiebreak;
  for (std::size_t e = 1; e <= universe; ++e) tiebreak.push_back(e + 1);
  tiebreak.push_back(0);
  tiebreak.push_back(1);
  // With fewer sets than l the defender can recount at most all of M anyway.
  return b.finish(Rule::kPluralityOverVoters, std::move(tiebreak), std::nullopt, s,
                  std::min(lc, s), 0, true);
}

GeneratedInstance gen_subsetsum_pv_man(std::span<const Count> xs) {
  require(xs.size() >= 2, "subset-sum", "X needs at least two entries");
  Count y = 0;
  for (Count x : xs) {
    require(x != 0, "subset-sum", "entries must be non-zero");
    require(std::abs(x) < (Count{1} << 40), "subset-sum", "entry too large");
    y = std::max(y, 2 * std::abs(x));
  }
  const auto l = static_cast<Count>(xs.size());
  Builder b({"a", "b", "p"});
  for (Count x : xs) b.add(abp(2 * y + 4 * x, 2 * y - 4 * x, 0), 1);
  for (Count j = 0; j + 1 < l; ++j) b.add(abp(2 * y, 2 * y, 0), 1);
  for (Count x : xs) {
    b.add(abp(y - 2 * x, y + 2 * x, 0), 1);
    b.add(abp(y - 2 * x, y + 2 * x, 0), 1);
  }
  b.add(abp(y, y, 0), 1);
  b.add(abp(y, y, 0), 1);
  b.add(abp(0, 0, 1), 1);
  // p must win outright; a and b share the true lead.
  return b.finish(Rule::kPluralityOverVoters, {kA, kB, kP}, kP, l, 0, kP, false);
}

GeneratedInstance gen_is_pd_rec(const Graph& graph, std::size_t size) {
  const auto nu = static_cast<Count>(graph.nodes);
  const auto mu = static_cast<Count>(graph.edges.size());
  const auto l = static_cast<Count>(size);
  require(mu >= 1, "independent-set", "the graph needs at least one edge");
  require(l < nu, "independent-set", "the set size must be below the node count");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [u, v] : graph.edges) {
    require(u < graph.nodes && v < graph.nodes && u != v, "independent-set", "bad edge");
    require(seen.insert(std::minmax(u, v)).second, "independent-set", "duplicate edge");
  }

  // Ids: p = 0, a = 1, node u = 2 + u, edge e = 2 + nu + e.
  std::vector<std::string> names{"p", "a"};
  for (std::size_t u = 0; u < graph.nodes; ++u) names.push_back("v" + std::to_string(u));
  for (std::size_t e = 0; e < graph.edges.size(); ++e) names.push_back("e" + std::to_string(e));
  const std::size_t width = names.size();
  const auto node = [](std::size_t u) { return 2 + u; };
  const auto edge = [&](std::size_t e) { return 2 + graph.nodes + e; };
  const auto single = [&](CandidateId c) {
    VoteVector v(width, 0);
    v[c] = 1;
    return v;
  };

  // Every weight is scaled by `scale` so the small districts stay integral.
  const Count scale = 2 * (nu + mu) + 1;
  const Count slack = checked_mul(2 * (nu - l), mu);
  Builder b(std::move(names));
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    for (std::size_t u : {graph.edges[e].first, graph.edges[e].second}) {
      b.add(single(edge(e)), 2 * scale, 1, single(node(u)));
    }
  }
  for (std::size_t u = 0; u < graph.nodes; ++u) {
    b.add(single(node(u)), checked_mul(2 * mu, scale), 1, single(0));
  }
  for (Count j = 0; j < scale; ++j) b.add(single(1), 2, 1, single(0));
  b.add(single(1), checked_mul(slack + 3, scale), 0);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    b.add(single(edge(e)), checked_mul(slack, scale), 0);
  }
  for (std::size_t u = 0; u < graph.nodes; ++u) {
    b.add(single(node(u)), checked_mul(slack - 2 * mu + 2, scale), 0);
  }
  std::vector<CandidateId> tiebreak(width);
  for (std::size_t c = 0; c < width; ++c) tiebreak[c] = c;
  const auto attacked = static_cast<Count>(b.distorted.size());
  return b.finish(Rule::kPluralityOverDistricts, std::move(tiebreak), 0, attacked, nu + mu, 1,
                  true);
}

GeneratedInstance gen_sss_pd_man(std::span<const Count> xs, std::size_t size) {
  require(size >= 1, "sss", "the subset size must be at least 1");
  require(xs.size() >= size, "sss", "X must have at least as many entries as the subset size");
  std::set<Count> distinct(xs.begin(), xs.end());
  require(distinct.size() == xs.size(), "sss", "entries must be distinct");
  Count y = 0;
  Count plus = 0;
  Count minus = 0;
  for (Count x : xs) {
    require(x != 0, "sss", "entries must be non-zero");
    require(std::abs(x) < (Count{1} << 40), "sss", "entry too large");
    y = checked_add(y, 3 * std::abs(x));
    (x > 0 ? plus : minus) += 3 * x;
  }
  Builder b({"a", "b", "p"});
  for (Count x : xs) b.add_sized(x > 0 ? abp(0, 3 * x, 0) : abp(0, 0, -3 * x));
  b.add_sized(abp(0, y + 3, 0));
  b.add_sized(abp(2 * y + 5, 0, 0), 0);
  b.add_sized(abp(0, y - plus, 0), 0);
  b.add_sized(abp(0, 0, 2 * y + 4 + minus), 0);
  const auto l = static_cast<Count>(size);
  return b.finish(Rule::kPluralityOverDistricts, {kP, kA, kB}, kP, l + 1, l, kP, false);
}

GeneratedInstance gen_partition_pv_recreg(std::span<const Count> xs, double epsilon) {
  require(!xs.empty(), "partition", "X must be non-empty");
  require(epsilon > 0 && std::isfinite(epsilon), "partition", "epsilon must be positive");
  Count y = 0;
  for (Count x : xs) {
    require(x > 0 && x % 4 == 0, "partition", "entries must be positive multiples of 4");
    y = checked_add(y, x);
  }
  const double zd = std::ceil(static_cast<double>(y) / epsilon);
  require(zd < 1e9, "partition", "y / epsilon is too large");
  const auto z = static_cast<Count>(zd);
  const auto l = static_cast<Count>(xs.size());
  const Count block = checked_mul(2 * z, l);

  Builder b({"a", "b", "p"});
  for (Count x : xs) {
    const Count v = checked_mul(2 * x, l);
    b.add(abp(0, v, 0), 1, std::nullopt, abp(0, 0, v));
  }
  for (Count j = 0; j < block; ++j) b.add(abp(1, 0, 0), 1, std::nullopt, abp(0, 0, 1));
  b.add(abp(block + checked_mul(y, l) + 2 * l, 0, 0), 1);
  b.add(abp(0, block, 0), 1);
  const auto attacked = static_cast<Count>(b.distorted.size());
  return b.finish(Rule::kPluralityOverVoters, {kP, kA, kB}, kP, attacked, l - 1, kA, true);
}

Election gen_random(const RandomParams& params, std::uint64_t seed) {
  std::vector<Violation> bad;
  if (params.candidates < 2) bad.push_back({std::nullopt, "random.candidates", "need m >= 2"});
  if (params.candidates > 26) bad.push_back({std::nullopt, "random.candidates", "need m <= 26"});
  if (params.districts < 1) bad.push_back({std::nullopt, "random.districts", "need k >= 1"});
  if (params.max_voters < 1) bad.push_back({std::nullopt, "random.max_voters", "need >= 1"});
  if (params.max_weight < 1) bad.push_back({std::nullopt, "random.max_weight", "need >= 1"});
  if (!bad.empty()) throw ValidationError(std::move(bad));

  std::mt19937_64 rng(seed);
  const std::size_t m = params.candidates;
  std::vector<std::string> names;
  for (std::size_t c = 0; c + 1 < m; ++c) names.emplace_back(1, static_cast<char>('a' + c));
  names.emplace_back("p");

  std::vector<CandidateId> tiebreak(m);
  for (std::size_t c = 0; c < m; ++c) tiebreak[c] = c;
  for (std::size_t c = m - 1; c > 0; --c) {
    std::swap(tiebreak[c], tiebreak[static_cast<std::size_t>(uniform(rng, 0, static_cast<Count>(c)))]);
  }

  std::vector<District> districts(params.districts);
  for (District& d : districts) {
    d.votes.assign(m, 0);
    const Count n = uniform(rng, 1, params.max_voters);
    for (Count v = 0; v < n; ++v) ++d.votes[static_cast<std::size_t>(uniform(rng, 0, static_cast<Count>(m) - 1))];
    d.weight = params.rule == Rule::kPluralityOverDistricts ? uniform(rng, 1, params.max_weight) : 1;
    d.gamma = params.gamma == GammaMode::kFull ? n : uniform(rng, 0, n);
  }
  return Election(params.rule, std::move(names), std::move(tiebreak), std::move(districts),
                  m - 1, params.budget_attacker, params.budget_defender);
}

Manipulation random_manipulation(const Election& election, std::size_t size, bool regular,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const CandidateId p = election.require_preferred();
  const std::size_t m = election.num_candidates();
  const bool pd = election.rule() == Rule::kPluralityOverDistricts;

  std::vector<DistrictIndex> pool;
  for (std::size_t i = 0; i < election.num_districts(); ++i) {
    const District& d = election.district(i);
    if (pd && regular) {
      auto steal = district_min_steal(election, d.votes, p);
      if (!steal || steal->moves > d.gamma) continue;
    }
    pool.push_back(i);
  }
  for (std::size_t j = pool.size(); j > 1; --j) {
    std::swap(pool[j - 1], pool[static_cast<std::size_t>(uniform(rng, 0, static_cast<Count>(j) - 1))]);
  }
  size = std::min({size, pool.size(), static_cast<std::size_t>(election.budget_attacker())});
  pool.resize(size);

  std::map<DistrictIndex, VoteVector> entries;
  for (DistrictIndex i : pool) {
    const District& d = election.district(i);
    VoteVector v = d.votes;
    if (pd && regular) {
      v = district_min_steal(election, d.votes, p)->votes;
      // Spend any remaining allowance on more votes for p.
      Count spare = d.gamma - (v[p] - d.votes[p]);
      const Count extra = uniform(rng, 0, std::max<Count>(spare, 0));
      for (Count t = 0; t < extra; ++t) {
        std::vector<CandidateId> donors;
        for (CandidateId c = 0; c < m; ++c) {
          if (c != p && v[c] > 0) donors.push_back(c);
        }
        if (donors.empty()) break;
        --v[donors[static_cast<std::size_t>(uniform(rng, 0, static_cast<Count>(donors.size()) - 1))]];
        ++v[p];
      }
    } else {
      // Single-vote moves never add more than one vote each.
      const Count moves = uniform(rng, 0, d.gamma);
      for (Count t = 0; t < moves; ++t) {
        std::vector<CandidateId> donors;
        for (CandidateId c = 0; c < m; ++c) {
          if (v[c] > 0 && (!regular || (c != p && v[c] > 0))) donors.push_back(c);
        }
        if (donors.empty()) break;
        const CandidateId from =
            donors[static_cast<std::size_t>(uniform(rng, 0, static_cast<Count>(donors.size()) - 1))];
        CandidateId to = p;
        if (!regular) {
          to = static_cast<CandidateId>(uniform(rng, 0, static_cast<Count>(m) - 2));
          if (to >= from) ++to;
        }
        --v[from];
        ++v[to];
      }
    }
    entries.emplace(i, std::move(v));
  }
  return Manipulation(std::move(entries));
}

}  // namespace recount
