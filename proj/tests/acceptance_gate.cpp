// Gate over the acceptance table: one verdict line per criterion, exit code
// equal to the number of failing rows.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <thread>
#include <vector>

#include "difflab/acceptance.hpp"

int main(int argc, char** argv) {
  int threads = static_cast<int>(
      std::min<unsigned>(4, std::max<unsigned>(1,
          std::thread::hardware_concurrency())));
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
      threads = std::atoi(argv[++i]);
      if (threads < 1) {
        std::fprintf(stderr, "--threads wants a positive integer\n");
        return 64;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--threads N]\n", argv[0]);
      return 64;
    }
  }

  const std::vector<difflab::CriterionResult> rows =
      difflab::run_acceptance_suite(threads);
  int failures = 0;
  for (const difflab::CriterionResult& r : rows) {
    std::printf("[%s] criterion %2d %-36s measured %.6g %s %.6g (%.1fs)\n",
                r.pass ? "PASS" : "FAIL", r.index, r.name.c_str(), r.measured,
                r.comparator.c_str(), r.threshold, r.seconds);
    if (!r.pass) {
      ++failures;
      if (!r.detail.empty()) std::printf("       %s\n", r.detail.c_str());
    }
  }
  std::printf("%d of %zu criteria failing\n", failures, rows.size());
  return failures;
}
