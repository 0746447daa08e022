#include "ousg/model_io.hpp"

#include <fstream>
#include <sstream>

#include "ousg/report.hpp"

namespace ousg {

OUModel parse_model(std::istream& in) {
  int n = -1;
  std::vector<double> q_entries, b_entries, lambdas;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    if (key == "n") {
      if (!(ls >> n) || n <= 0) throw Error(ErrorCode::ConfigParse, "bad dimension line");
    } else if (key == "Q" || key == "B" || key == "lambdas") {
      std::vector<double>& target = key == "Q" ? q_entries : key == "B" ? b_entries : lambdas;
      double v;
      while (ls >> v) target.push_back(v);
    } else {
      throw Error(ErrorCode::ConfigParse, "unknown model key '" + key + "'");
    }
  }
  if (!lambdas.empty()) {
    if (!q_entries.empty() || !b_entries.empty())
      throw Error(ErrorCode::ConfigParse, "lambdas excludes explicit Q/B");
    return OUModel::diagonal(SpectralParams(lambdas));
  }
  if (n <= 0) throw Error(ErrorCode::ConfigParse, "missing dimension");
  std::size_t expected = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (q_entries.size() != expected || b_entries.size() != expected)
    throw Error(ErrorCode::ConfigParse, "Q and B need n*n row-major entries");
  Eigen::MatrixXd q(n, n), b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      q(i, j) = q_entries[static_cast<std::size_t>(i * n + j)];
      b(i, j) = b_entries[static_cast<std::size_t>(i * n + j)];
    }
  return OUModel::validate(q, b);
}

OUModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParse, "cannot open model file " + path);
  return parse_model(in);
}

void write_model(std::ostream& out, const OUModel& model) {
  int n = model.dim();
  out << "n " << n << "\n";
  out << "Q";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out << ' ' << format_double(model.Q()(i, j));
  out << "\nB";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out << ' ' << format_double(model.B()(i, j));
  out << "\n";
}

}  // namespace ousg
