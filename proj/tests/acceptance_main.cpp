// Verification suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Run directly or through ctest; `--rows` prints every claim.

#include <cstring>
#include <iostream>

#include "convkit/acceptance.hpp"

int main(int argc, char** argv) {
  convkit::acceptance::Options opts;
  bool rows = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--rows") == 0) rows = true;
    if (std::strcmp(argv[i], "--strict") == 0) opts.strict = true;
    if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
      opts.seed = std::strtoull(argv[++i], nullptr, 10);
  }
  const auto summaries = convkit::acceptance::run_all(opts);
  convkit::acceptance::print_table(summaries, std::cout, rows);
  const bool ok = convkit::acceptance::all_pass(summaries);
  std::cout << (ok ? "ALL CRITERIA PASS" : "CRITERIA FAILED") << std::endl;
  return ok ? 0 : 1;
}
