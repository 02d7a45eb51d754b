#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

namespace l2field {

using nlohmann::json;

/// Structured verdict emitted by every verification operation.
///
/// `verdict` is "pass", "fail" or "hypothesis-not-met"; the last one counts as
/// a pass (the implication under test was vacuous for the given inputs).
struct Report {
  std::string check;
  std::string mode;
  double max_abs_diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string verdict;
  std::optional<std::uint64_t> seed;
  json stats = json::object();
  json details = json::array();

  void set_pass(bool ok) {
    pass = ok;
    verdict = ok ? "pass" : "fail";
  }

  json to_json() const;
};

/// Concise form for doubles in JSON: non-finite values become strings.
json number(double x);

}  // namespace l2field
