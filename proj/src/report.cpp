#include "l2field/report.hpp"

#include <cmath>

namespace l2field {

json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json Report::to_json() const {
  json j;
  j["check"] = check;
  j["mode"] = mode;
  j["max_abs_diff"] = number(max_abs_diff);
  j["tolerance"] = number(tolerance);
  j["pass"] = pass;
  j["verdict"] = verdict.empty() ? (pass ? "pass" : "fail") : verdict;
  if (seed) j["seed"] = *seed;
  if (!stats.empty()) j["stats"] = stats;
  j["details"] = details;
  return j;
}

}  // namespace l2field
