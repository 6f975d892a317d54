// One line per acceptance criterion; exit status 1 if any criterion fails.
#include <cstdio>
#include <algorithm>
#include <cstdlib>
#include <string>

#include "gelfand/golden.hpp"

int main(int argc, char** argv) {
  gelfand::GoldenOptions opts;
  if (argc > 1) opts.jobs = std::max(1, std::atoi(argv[1]));
  const auto results = gelfand::run_golden_suite(opts);
  int failed = 0;
  for (const auto& c : results) {
    std::printf("criterion %2d %s: %s (%s)\n", c.id, c.pass ? "PASS" : "FAIL", c.title.c_str(),
                c.detail.c_str());
    if (!c.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed,
              results.size());
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
