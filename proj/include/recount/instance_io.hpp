#pragma once

// JSON instance files. One format covers recount inputs (with a
// manipulation block) and manipulation inputs (without one). Districts are
// 0-based in the manipulation block. See docs/instance-format.md.

#include <optional>
#include <string>
#include <string_view>

#include "recount/model.hpp"

namespace recount {

struct Instance {
  Election election;
  std::optional<Manipulation> manipulation;
};

// Throws ValidationError. Syntax errors carry "line L, column C"; semantic
// errors carry the JSON path of the offending field.
Instance parse_instance(std::string_view text);
Instance load_instance(const std::string& path);

// Canonical form: keys sorted, candidates and districts in declared order,
// every candidate listed in every vote map, two-space indent, trailing
// newline.
std::string serialize(const Election& election,
                      const std::optional<Manipulation>& manipulation = std::nullopt);

}  // namespace recount
