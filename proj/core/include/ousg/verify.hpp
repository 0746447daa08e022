#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ousg {

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  std::string details;
  double seconds;
};

struct VerifyOptions {
  std::uint64_t seed = 42;
  /// Reduced budgets for development runs; the shipped gate uses full ones.
  bool quick = false;
  /// Progress stream (one line per criterion); null for silent.
  std::ostream* log = nullptr;
};

/// Runs the full verification suite and returns one result per criterion.
std::vector<CriterionResult> run_verification(const VerifyOptions& options);

/// CSV emission with provenance; byte-identical for identical options.
void write_verification_csv(std::ostream& out, const std::vector<CriterionResult>& results,
                            std::uint64_t seed);

/// True when every criterion passed.
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace ousg
