#pragma once

#include <iosfwd>
#include <string>

#include "ousg/model.hpp"

namespace ousg {

/// Plain-text model format, one key per line:
///   n 2
///   Q 1 0 0 1
///   B -1 2 -2 -1
/// or, for the diagonal case, a single line
///   lambdas 1 2
/// Matrices are row-major, whitespace separated. Lines starting with '#'
/// are comments.
OUModel parse_model(std::istream& in);
OUModel load_model(const std::string& path);

/// Inverse of parse_model (full Q/B form).
void write_model(std::ostream& out, const OUModel& model);

}  // namespace ousg
