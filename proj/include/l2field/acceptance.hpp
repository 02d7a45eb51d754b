#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "l2field/report.hpp"

namespace l2field {

/// Base seed of the acceptance suite; every stochastic criterion derives its
/// streams from it.
inline constexpr std::uint64_t kAcceptanceSeed = 271828;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double runtime_limit = 0.0;  // 0: no limit
  bool within_runtime = true;
  std::string summary;
  json details = json::object();
  /// Hash of every stochastic output, for the cross-thread determinism check.
  std::string fingerprint;

  /// Timings are left out when with_timing is false (replayable output).
  json to_json(bool with_timing = true) const;
  /// One line: "[PASS] 3 name: summary (0.12 s < 5 s)".
  std::string line() const;
};

struct AcceptanceOptions {
  std::uint64_t seed = kAcceptanceSeed;
  std::vector<int> only;           // empty: all criteria
  std::vector<int> thread_counts{1, 4, 8};
};

inline constexpr int kCriterionCount = 15;

CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

/// FNV-1a over the bytes of a double sequence, as 16 hex digits.
std::string hash_doubles(const double* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace l2field
