// Runs every acceptance criterion and prints one line per criterion.
// Exit status is 0 only when all of them pass.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>

#include "l2field/acceptance.hpp"
#include "l2field/parallel.hpp"

int main(int argc, char** argv) {
  l2field::apply_thread_env();
  l2field::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));

  int failed = 0, total = 0;
  for (int id = 1; id <= l2field::kCriterionCount; ++id) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    const l2field::CriterionResult r = l2field::run_criterion(id, opt);
    std::cout << r.line() << std::endl;
    ++total;
    if (!r.pass) ++failed;
  }
  std::cout << (total - failed) << "/" << total << " acceptance criteria passed (seed " << opt.seed << ")\n";
  return failed == 0 ? 0 : 1;
}
