#include <cstdio>
#include <cstring>

#include "acceptance.hpp"

// One line per criterion. Exit status is the number of failures.
int main(int argc, char** argv) {
  const bool json_out = argc > 1 && std::strcmp(argv[1], "--json") == 0;
  int failed = 0;
  nlohmann::json report = nlohmann::json::array();
  for (int id = 1; id <= vsheet::acceptance::kCriteria; ++id) {
    const auto r = vsheet::acceptance::run_criterion(id, vsheet::RunConfig{});
    std::printf("%s  (%.1f s)\n", vsheet::acceptance::format_line(r).c_str(), r.seconds);
    std::fflush(stdout);
    if (json_out) report.push_back(vsheet::acceptance::to_json(r));
    failed += r.passed ? 0 : 1;
  }
  if (json_out) std::printf("%s\n", report.dump(2).c_str());
  std::printf("%d of %d criteria passed\n", vsheet::acceptance::kCriteria - failed, vsheet::acceptance::kCriteria);
  return failed;
}
