#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace ousg {

/// Fixed float formatting shared by every emitter so identical runs produce
/// byte-identical files.
std::string format_double(double v);

/// CSV emitter: one provenance comment line, a header row, then data rows.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::string& provenance, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& values);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

/// Provenance line content: tool version, echoed config, seed.
std::string provenance_line(const std::string& command, std::uint64_t seed,
                            const std::string& config_echo);

}  // namespace ousg
