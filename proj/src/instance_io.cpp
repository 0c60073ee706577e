#include "recount/instance_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "recount/core.hpp"

namespace recount {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& detail) {
  throw ValidationError(path, detail);
}

const json& field(const json& object, const std::string& key, const std::string& path) {
  auto it = object.find(key);
  if (it == object.end()) fail(path + "." + key, "missing");
  return *it;
}

Count integer(const json& value, const std::string& path) {
  if (!value.is_number_integer()) fail(path, "expected an integer");
  if (value.is_number_unsigned() && value.get<std::uint64_t>() > static_cast<std::uint64_t>(kMaxTotal)) {
    fail(path, "integer too large");
  }
  return value.get<Count>();
}

std::string text(const json& value, const std::string& path) {
  if (!value.is_string()) fail(path, "expected a string");
  return value.get<std::string>();
}

const json& array(const json& value, const std::string& path) {
  if (!value.is_array()) fail(path, "expected an array");
  return value;
}

CandidateId lookup(const std::map<std::string, CandidateId>& ids, const std::string& name,
                   const std::string& path) {
  auto it = ids.find(name);
  if (it == ids.end()) fail(path, "unknown candidate \"" + name + "\"");
  return it->second;
}

VoteVector votes(const json& value, const std::map<std::string, CandidateId>& ids,
                 const std::string& path) {
  if (!value.is_object()) fail(path, "expected an object of name -> count");
  VoteVector out(ids.size(), 0);
  for (const auto& [name, count] : value.items()) {
    out[lookup(ids, name, path)] = integer(count, path + "." + name);
  }
  return out;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view source, std::size_t offset) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < offset && i < source.size(); ++i) {
    if (source[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// Election violations name districts by index; rewrite them as paths.
[[noreturn]] void rethrow_with_paths(const ValidationError& err) {
  std::vector<Violation> out;
  for (Violation v : err.violations()) {
    if (v.district) {
      v.constraint = "districts[" + std::to_string(*v.district) + "]: " + v.constraint;
      v.district.reset();
    }
    out.push_back(std::move(v));
  }
  throw ValidationError(std::move(out));
}

}  // namespace

Instance parse_instance(std::string_view source) {
  json doc;
  try {
    doc = json::parse(source.begin(), source.end());
  } catch (const json::parse_error& err) {
    const std::size_t offset = err.byte > 0 ? err.byte - 1 : 0;
    const auto [line, column] = line_column(source, offset);
    throw ValidationError("syntax", "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + err.what());
  }
  if (!doc.is_object()) fail("$", "expected an object");

  const auto rule = parse_rule(text(field(doc, "rule", "$"), "$.rule"));
  if (!rule) fail("$.rule", "expected \"PV\" or \"PD\"");

  std::vector<std::string> names;
  std::map<std::string, CandidateId> ids;
  const json& candidates = array(field(doc, "candidates", "$"), "$.candidates");
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const std::string path = "$.candidates[" + std::to_string(c) + "]";
    names.push_back(text(candidates[c], path));
    if (!ids.emplace(names.back(), c).second) fail(path, "duplicate name");
  }

  std::vector<CandidateId> tiebreak;
  const json& order = array(field(doc, "tiebreak", "$"), "$.tiebreak");
  for (std::size_t j = 0; j < order.size(); ++j) {
    const std::string path = "$.tiebreak[" + std::to_string(j) + "]";
    tiebreak.push_back(lookup(ids, text(order[j], path), path));
  }

  std::optional<CandidateId> preferred;
  if (auto it = doc.find("preferred"); it != doc.end() && !it->is_null()) {
    preferred = lookup(ids, text(*it, "$.preferred"), "$.preferred");
  }

  std::vector<District> districts;
  const json& list = array(field(doc, "districts", "$"), "$.districts");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "$.districts[" + std::to_string(i) + "]";
    if (!list[i].is_object()) fail(path, "expected an object");
    District d;
    d.votes = votes(field(list[i], "votes", path), ids, path + ".votes");
    d.weight = list[i].contains("weight") ? integer(list[i]["weight"], path + ".weight") : 1;
    d.gamma = list[i].contains("gamma") ? integer(list[i]["gamma"], path + ".gamma") : d.size();
    districts.push_back(std::move(d));
  }

  const Count budget_attacker = integer(field(doc, "budget_attacker", "$"), "$.budget_attacker");
  const Count budget_defender = integer(field(doc, "budget_defender", "$"), "$.budget_defender");

  std::optional<Election> election;
  try {
    election.emplace(*rule, std::move(names), std::move(tiebreak), std::move(districts),
                     preferred, budget_attacker, budget_defender);
  } catch (const ValidationError& err) {
    rethrow_with_paths(err);
  }

  std::optional<Manipulation> manipulation;
  if (auto it = doc.find("manipulation"); it != doc.end() && !it->is_null()) {
    std::map<DistrictIndex, VoteVector> entries;
    const json& block = array(*it, "$.manipulation");
    for (std::size_t j = 0; j < block.size(); ++j) {
      const std::string path = "$.manipulation[" + std::to_string(j) + "]";
      if (!block[j].is_object()) fail(path, "expected an object");
      const Count index = integer(field(block[j], "index", path), path + ".index");
      if (index < 0 || index >= static_cast<Count>(election->num_districts())) {
        fail(path + ".index", "no such district");
      }
      if (!entries.emplace(static_cast<DistrictIndex>(index),
                           votes(field(block[j], "votes", path), ids, path + ".votes"))
               .second) {
        fail(path + ".index", "district listed twice");
      }
    }
    manipulation.emplace(std::move(entries));
    try {
      check_manipulation(*election, *manipulation);
    } catch (const ValidationError& err) {
      rethrow_with_paths(err);
    }
  }
  return Instance{std::move(*election), std::move(manipulation)};
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("file", "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

std::string serialize(const Election& election,
                      const std::optional<Manipulation>& manipulation) {
  auto vote_map = [&](const VoteVector& v) {
    json out = json::object();
    for (CandidateId c = 0; c < election.num_candidates(); ++c) out[election.name(c)] = v[c];
    return out;
  };
  json doc;
  doc["rule"] = std::string(rule_name(election.rule()));
  doc["candidates"] = election.candidates();
  json order = json::array();
  for (CandidateId c : election.tiebreak()) order.push_back(election.name(c));
  doc["tiebreak"] = order;
  if (election.preferred()) doc["preferred"] = election.name(*election.preferred());
  doc["budget_attacker"] = election.budget_attacker();
  doc["budget_defender"] = election.budget_defender();
  json districts = json::array();
  for (const District& d : election.districts()) {
    districts.push_back({{"weight", d.weight}, {"gamma", d.gamma}, {"votes", vote_map(d.votes)}});
  }
  doc["districts"] = districts;
  if (manipulation) {
    json block = json::array();
    for (const auto& [i, v] : manipulation->entries()) {
      block.push_back({{"index", i}, {"votes", vote_map(v)}});
    }
    doc["manipulation"] = block;
  }
  return doc.dump(2) + "\n";
}

}  // namespace recount
