#include "ousg/report.hpp"

#include <cstdio>

#include "ousg/errors.hpp"

namespace ousg {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::string& provenance,
                     const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  out_ << "# provenance: " << provenance << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    out_ << header[i];
    out_ << (i + 1 < header.size() ? ',' : '\n');
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw Error(ErrorCode::ConfigParse, "csv row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    out_ << format_double(values[i]);
    out_ << (i + 1 < values.size() ? ',' : '\n');
  }
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
  if (values.size() != columns_) throw Error(ErrorCode::ConfigParse, "csv row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    out_ << values[i];
    out_ << (i + 1 < values.size() ? ',' : '\n');
  }
}

std::string provenance_line(const std::string& command, std::uint64_t seed,
                            const std::string& config_echo) {
  std::string line = "ou 0.1.0 | " + command + " | seed=" + std::to_string(seed);
  if (!config_echo.empty()) line += " | " + config_echo;
  return line;
}

}  // namespace ousg
