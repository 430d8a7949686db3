#include <cstdlib>
#include <iostream>

#include "qkam/harness/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace qkam;
  AcceptanceOptions opt;
  if (argc > 1) opt.seed = std::strtoull(argv[1], nullptr, 10);
  const auto results = run_acceptance(opt, [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; });
  const auto summary = acceptance_summary(results, opt.seed);
  write_json("acceptance_summary.json", summary);
  int failed = 0;
  for (auto& r : results) failed += !r.pass;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed ? 1 : 0;
}
