// Acceptance gate: runs every verification criterion at full budget and
// prints one PASS/FAIL line each. Exits nonzero if any criterion fails.

#include <cstdio>
#include <iostream>

#include "ousg/verify.hpp"

int main(int argc, char** argv) {
  ousg::VerifyOptions options;
  options.seed = 42;
  options.log = nullptr;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--quick") options.quick = true;
    if (arg == "--verbose") options.log = &std::cerr;
  }
  std::vector<ousg::CriterionResult> results = ousg::run_verification(options);
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%s  criterion %2d: %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds);
    if (!r.pass) {
      std::printf("      %s\n", r.details.c_str());
      ok = false;
    }
  }
  return ok ? 0 : 1;
}
