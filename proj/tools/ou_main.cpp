// ou: command-line front end for the Ornstein-Uhlenbeck semigroup library.
//
// Exit codes: 0 success, 2 configuration/parse error, 3 invalid model,
// 4 subcommand failure (including failed must-hold verdicts).

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "ousg/geometry.hpp"
#include "ousg/mehler.hpp"
#include "ousg/model.hpp"
#include "ousg/model_io.hpp"
#include "ousg/normal_form.hpp"
#include "ousg/parallel.hpp"
#include "ousg/report.hpp"
#include "ousg/semigroup.hpp"
#include "ousg/verify.hpp"
#include "ousg/weaktype.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitModel = 3;
constexpr int kExitSubcommand = 4;

int exit_code_for(const ousg::Error& e) {
  switch (e.code()) {
    case ousg::ErrorCode::ConfigParse:
      return kExitConfig;
    case ousg::ErrorCode::NotSymmetric:
    case ousg::ErrorCode::NotPositiveDefinite:
    case ousg::ErrorCode::NotHurwitz:
    case ousg::ErrorCode::DimensionMismatch:
      return kExitModel;
    default:
      return kExitSubcommand;
  }
}

struct CommonOptions {
  std::string model_path;
  std::vector<double> lambdas;
  std::string out_path;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

ousg::OUModel resolve_model(const CommonOptions& opt) {
  if (!opt.lambdas.empty()) return ousg::OUModel::diagonal(ousg::SpectralParams(opt.lambdas));
  if (opt.model_path.empty())
    throw ousg::Error(ousg::ErrorCode::ConfigParse, "need --model FILE or --lambdas LIST");
  return ousg::load_model(opt.model_path);
}

ousg::SpectralParams resolve_rates(const CommonOptions& opt) {
  if (!opt.lambdas.empty()) return ousg::SpectralParams(opt.lambdas);
  ousg::OUModel model = resolve_model(opt);
  auto params = model.diagonal_params();
  if (!params)
    throw ousg::Error(ousg::ErrorCode::ConfigParse, "this subcommand needs a diagonal model");
  return *params;
}

// honor the default-output-directory environment variable for relative paths
std::string resolve_out_path(const std::string& path) {
  if (path.empty() || path == "-" || path.front() == '/') return path;
  const char* dir = std::getenv("OU_OUTPUT_DIR");
  if (!dir || !*dir) return path;
  return std::string(dir) + "/" + path;
}

struct OutStream {
  std::ofstream file;
  std::ostream* stream;
  explicit OutStream(const std::string& path) {
    std::string resolved = resolve_out_path(path);
    if (resolved.empty() || resolved == "-") {
      stream = &std::cout;
    } else {
      file.open(resolved);
      if (!file) throw ousg::Error(ousg::ErrorCode::ConfigParse, "cannot open " + resolved);
      stream = &file;
    }
  }
  std::ostream& get() { return *stream; }
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool needs_seed) {
  cmd->add_option("--model", opt.model_path, "model file (see README for the format)");
  cmd->add_option("--lambdas", opt.lambdas, "inline diagonal rates")->delimiter(',');
  cmd->add_option("--out", opt.out_path, "output path ('-' = stdout)");
  auto* seed = cmd->add_option("--seed", opt.seed, "RNG seed");
  if (needs_seed) seed->required();
  cmd->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
}

ousg::TestFunction make_test_function(const std::string& kind, const std::vector<double>& center,
                                      double width, const std::string& atoms_spec) {
  if (kind == "atoms") {
    std::vector<Eigen::VectorXd> centers;
    std::vector<double> masses;
    std::istringstream groups(atoms_spec);
    std::string group;
    while (std::getline(groups, group, ';')) {
      std::istringstream gs(group);
      std::vector<double> vals;
      double v;
      while (gs >> v) vals.push_back(v);
      if (vals.size() < 2)
        throw ousg::Error(ousg::ErrorCode::ConfigParse, "atom group needs coords and a mass");
      Eigen::VectorXd c(static_cast<int>(vals.size()) - 1);
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) c(static_cast<int>(i)) = vals[i];
      centers.push_back(c);
      masses.push_back(vals.back());
    }
    return ousg::TestFunction::atom_cloud(centers, masses);
  }
  Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(center.data(), static_cast<int>(center.size()));
  if (kind == "bump") return ousg::TestFunction::gaussian_bump(c, width);
  if (kind == "box") return ousg::TestFunction::indicator_box(c, width);
  throw ousg::Error(ousg::ErrorCode::ConfigParse, "unknown test function kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ornstein-Uhlenbeck semigroup toolbox"};
  app.require_subcommand(1);

  // --- validate ---------------------------------------------------------
  CommonOptions val_opt;
  auto* cmd_validate = app.add_subcommand("validate", "validate a (Q,B) model");
  add_common(cmd_validate, val_opt, false);

  // --- decompose --------------------------------------------------------
  CommonOptions dec_opt;
  bool emit_model = false;
  auto* cmd_decompose = app.add_subcommand("decompose", "canonical block form of a normal model");
  add_common(cmd_decompose, dec_opt, false);
  cmd_decompose->add_flag("--emit-model", emit_model, "emit the reconstructed model file");

  // --- kernel -----------------------------------------------------------
  CommonOptions ker_opt;
  std::string variant = "diag";
  std::vector<double> ker_t, ker_x, ker_u;
  double ker_kappa = 1.0, ker_q = 1.0;
  auto* cmd_kernel = app.add_subcommand("kernel", "evaluate a kernel variant on a grid");
  add_common(cmd_kernel, ker_opt, false);
  cmd_kernel->add_option("--variant", variant, "diag | kappa | block2d | bound2d | general");
  cmd_kernel->add_option("--t", ker_t, "times")->delimiter(',')->required();
  cmd_kernel->add_option("--x", ker_x, "x points, flattened row-major")->delimiter(',')->required();
  cmd_kernel->add_option("--u", ker_u, "u points, flattened row-major")->delimiter(',')->required();
  cmd_kernel->add_option("--kappa", ker_kappa, "damping for --variant kappa");
  cmd_kernel->add_option("--q", ker_q, "rotation rate for --variant block2d");

  // --- apply ------------------------------------------------------------
  CommonOptions app_opt;
  std::string route = "mehler", f_kind = "bump", f_atoms;
  std::vector<double> f_center{0.0};
  double f_width = 1.0;
  std::vector<double> app_x, app_t;
  int gh_order = 64;
  auto* cmd_apply = app.add_subcommand("apply", "apply the semigroup to a test function");
  add_common(cmd_apply, app_opt, false);
  cmd_apply->add_option("--route", route, "kolmogorov | mehler");
  cmd_apply->add_option("--f-kind", f_kind, "bump | box | atoms");
  cmd_apply->add_option("--f-center", f_center, "center of bump/box")->delimiter(',');
  cmd_apply->add_option("--f-width", f_width, "bump width / box half-width");
  cmd_apply->add_option("--f-atoms", f_atoms, "atoms 'c1 c2 mass; ...'");
  cmd_apply->add_option("--x", app_x, "evaluation point")->delimiter(',')->required();
  cmd_apply->add_option("--t", app_t, "times")->delimiter(',')->required();
  cmd_apply->add_option("--order", gh_order, "Gauss-Hermite order per axis");

  // --- maximal ----------------------------------------------------------
  CommonOptions max_opt;
  std::string max_f_kind = "bump", max_f_atoms;
  std::vector<double> max_f_center{0.0};
  double max_f_width = 1.0;
  std::vector<double> max_x;
  double grid_lo = 1e-4, grid_hi = 1e2;
  int grid_count = 200;
  auto* cmd_maximal = app.add_subcommand("maximal", "maximal function over a time grid");
  add_common(cmd_maximal, max_opt, false);
  cmd_maximal->add_option("--f-kind", max_f_kind, "bump | box | atoms");
  cmd_maximal->add_option("--f-center", max_f_center, "center")->delimiter(',');
  cmd_maximal->add_option("--f-width", max_f_width, "width");
  cmd_maximal->add_option("--f-atoms", max_f_atoms, "atoms 'c1 c2 mass; ...'");
  cmd_maximal->add_option("--x", max_x, "evaluation point")->delimiter(',')->required();
  cmd_maximal->add_option("--grid-lo", grid_lo, "smallest time");
  cmd_maximal->add_option("--grid-hi", grid_hi, "largest time");
  cmd_maximal->add_option("--grid-count", grid_count, "grid size");

  // --- sample -----------------------------------------------------------
  CommonOptions smp_opt;
  std::vector<double> smp_x;
  double smp_t = 1.0;
  int smp_count = 1000;
  std::vector<double> smp_path;
  auto* cmd_sample = app.add_subcommand("sample", "exact transition-law samples");
  add_common(cmd_sample, smp_opt, true);
  cmd_sample->add_option("--x", smp_x, "start point")->delimiter(',')->required();
  cmd_sample->add_option("--t", smp_t, "time");
  cmd_sample->add_option("--count", smp_count, "number of samples");
  cmd_sample->add_option("--path", smp_path, "increasing times: emit one path instead")->delimiter(',');

  // --- geometry ---------------------------------------------------------
  CommonOptions geo_opt;
  std::string lemma;
  long geo_budget = 100000;
  auto* cmd_geometry = app.add_subcommand("geometry", "sampled inequality margins");
  add_common(cmd_geometry, geo_opt, true);
  cmd_geometry->add_option("--lemma", lemma, "lemma id (see README)")->required();
  cmd_geometry->add_option("--budget", geo_budget, "sample budget");

  // --- weaktype ---------------------------------------------------------
  CommonOptions wk_opt;
  std::vector<double> alpha_grid;
  long wk_budget = 100000;
  double wk_kappa = 1.0;
  bool recursion = false;
  int wk_m1 = 0, wk_m2 = 0, wk_k = 1;
  std::vector<long> wk_nu;
  double wk_alpha = 0.0, wk_big_m = 2.0;
  std::string wk_f_kind = "atoms", wk_f_atoms = "2 0 1";
  std::vector<double> wk_f_center{2.0};
  double wk_f_width = 0.3;
  auto* cmd_weaktype = app.add_subcommand("weaktype", "level-set scans and the zone recursion");
  add_common(cmd_weaktype, wk_opt, true);
  cmd_weaktype->add_option("--alpha-grid", alpha_grid, "level grid")->delimiter(',');
  cmd_weaktype->add_option("--budget", wk_budget, "Monte Carlo budget");
  cmd_weaktype->add_option("--kappa", wk_kappa, "kernel damping");
  cmd_weaktype->add_flag("--recursion", recursion, "run the forbidden-zone recursion");
  cmd_weaktype->add_option("--m1", wk_m1, "global dyadic index");
  cmd_weaktype->add_option("--m2", wk_m2, "local dyadic index");
  cmd_weaktype->add_option("--k", wk_k, "number of global coordinates");
  cmd_weaktype->add_option("--nu", wk_nu, "local cell multiindex")->delimiter(',');
  cmd_weaktype->add_option("--alpha", wk_alpha, "level for the recursion");
  cmd_weaktype->add_option("--M", wk_big_m, "proof constant M (A, B derive from it)");
  cmd_weaktype->add_option("--f-kind", wk_f_kind, "bump | box | atoms");
  cmd_weaktype->add_option("--f-center", wk_f_center, "center")->delimiter(',');
  cmd_weaktype->add_option("--f-width", wk_f_width, "width");
  cmd_weaktype->add_option("--f-atoms", wk_f_atoms, "atoms 'c1 c2 mass; ...'");

  // --- verify-all -------------------------------------------------------
  CommonOptions ver_opt;
  bool quick = false;
  auto* cmd_verify = app.add_subcommand("verify-all", "run the full verification suite");
  add_common(cmd_verify, ver_opt, true);
  cmd_verify->add_flag("--quick", quick, "reduced budgets (development only)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_validate->parsed()) {
      ousg::set_thread_count(val_opt.threads);
      ousg::OUModel model = resolve_model(val_opt);
      OutStream out(val_opt.out_path);
      out.get() << "# provenance: " << ousg::provenance_line("validate", val_opt.seed, "") << "\n";
      out.get() << "valid model, n = " << model.dim() << "\n";
      out.get() << "drift eigenvalues:\n";
      for (int i = 0; i < model.dim(); ++i) {
        auto ev = model.drift_eigenvalues()(i);
        out.get() << "  " << ousg::format_double(ev.real()) << " + "
                  << ousg::format_double(ev.imag()) << "i\n";
      }
      ousg::NormalityCheck nc = ousg::check_normal(model);
      out.get() << "normal: " << (nc.normal ? "yes" : "no")
                << " (commutator norm " << ousg::format_double(nc.commutator_norm) << ")\n";
      return 0;
    }

    if (cmd_decompose->parsed()) {
      ousg::OUModel model = resolve_model(dec_opt);
      ousg::CanonicalForm form = ousg::decompose(model);
      OutStream out(dec_opt.out_path);
      out.get() << "# provenance: " << ousg::provenance_line("decompose", dec_opt.seed, "") << "\n";
      if (form.demoted_blocks > 0)
        out.get() << "warning: " << form.demoted_blocks
                  << " degenerate block(s) resolved to scalar rates\n";
      out.get() << "blocks (lambda, q):\n";
      for (const auto& [lambda, q] : form.blocks)
        out.get() << "  " << ousg::format_double(lambda) << " " << ousg::format_double(q) << "\n";
      out.get() << "scalars:";
      for (double lambda : form.scalars) out.get() << " " << ousg::format_double(lambda);
      out.get() << "\nbasis:\n";
      for (int i = 0; i < form.dim(); ++i) {
        out.get() << " ";
        for (int j = 0; j < form.dim(); ++j)
          out.get() << " " << ousg::format_double(form.basis(i, j));
        out.get() << "\n";
      }
      if (emit_model) ousg::write_model(out.get(), ousg::reconstruct(form));
      return 0;
    }

    if (cmd_kernel->parsed()) {
      ousg::SpectralParams rates = variant == "block2d" || variant == "bound2d"
                                       ? ousg::SpectralParams({1.0})
                                       : resolve_rates(ker_opt);
      int dim = variant == "block2d" || variant == "bound2d" ? 2 : rates.dim();
      if (ker_x.size() % dim != 0 || ker_u.size() % dim != 0 || ker_x.size() != ker_u.size())
        throw ousg::Error(ousg::ErrorCode::ConfigParse, "point lists must be multiples of dim");
      std::size_t points = ker_x.size() / static_cast<std::size_t>(dim);
      OutStream out(ker_opt.out_path);
      std::vector<std::string> header{"t"};
      for (int j = 0; j < dim; ++j) header.push_back("x" + std::to_string(j));
      for (int j = 0; j < dim; ++j) header.push_back("u" + std::to_string(j));
      header.push_back("value");
      header.push_back("log_value");
      ousg::CsvWriter csv(out.get(),
                          ousg::provenance_line("kernel", ker_opt.seed, "variant=" + variant),
                          header);
      for (double t : ker_t) {
        for (std::size_t p = 0; p < points; ++p) {
          Eigen::VectorXd x(dim), u(dim);
          for (int j = 0; j < dim; ++j) {
            x(j) = ker_x[p * dim + static_cast<std::size_t>(j)];
            u(j) = ker_u[p * dim + static_cast<std::size_t>(j)];
          }
          double log_v;
          double lam0 = variant == "block2d" || variant == "bound2d"
                            ? (ker_opt.lambdas.empty() ? 1.0 : ker_opt.lambdas[0])
                            : 0.0;
          if (variant == "diag") {
            log_v = ousg::log_kernel_diag(rates, t, x, u);
          } else if (variant == "kappa") {
            log_v = ousg::log_kernel_kappa({rates, ker_kappa}, t, x, u);
          } else if (variant == "block2d") {
            log_v = ousg::log_kernel_block2d(lam0, ker_q, t, x, u);
          } else if (variant == "bound2d") {
            log_v = ousg::log_bound_block2d(lam0, t, x, u);
          } else if (variant == "general") {
            ousg::CanonicalForm form = ousg::decompose(resolve_model(ker_opt));
            log_v = ousg::log_kernel_general(form, t, x, u);
          } else {
            throw ousg::Error(ousg::ErrorCode::ConfigParse, "unknown variant '" + variant + "'");
          }
          std::vector<double> row{t};
          for (int j = 0; j < dim; ++j) row.push_back(x(j));
          for (int j = 0; j < dim; ++j) row.push_back(u(j));
          row.push_back(std::exp(log_v));
          row.push_back(log_v);
          csv.row(row);
        }
      }
      return 0;
    }

    if (cmd_apply->parsed()) {
      ousg::set_thread_count(app_opt.threads);
      ousg::OUModel model = resolve_model(app_opt);
      ousg::TestFunction f = make_test_function(f_kind, f_center, f_width, f_atoms);
      auto rates = model.diagonal_params();
      if (rates) f.normalize(*rates, model.dim());
      Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(app_x.data(), static_cast<int>(app_x.size()));
      OutStream out(app_opt.out_path);
      ousg::CsvWriter csv(out.get(),
                          ousg::provenance_line("apply", app_opt.seed, "route=" + route),
                          {"t", "value"});
      for (double t : app_t) {
        double v;
        if (f_kind == "atoms") {
          if (!rates) throw ousg::Error(ousg::ErrorCode::ConfigParse, "atoms need a diagonal model");
          v = f.ht_value(*rates, 1.0, x, t);
        } else if (route == "kolmogorov") {
          ousg::ScalarField field = [&](const Eigen::VectorXd& y) { return f.value(y); };
          v = ousg::apply_kolmogorov(model, field, x, t, gh_order, f.support);
        } else {
          ousg::ScalarField field = [&](const Eigen::VectorXd& y) { return f.value(y); };
          v = ousg::apply_mehler(model, field, x, t, gh_order, f.support);
        }
        csv.row({t, v});
      }
      return 0;
    }

    if (cmd_maximal->parsed()) {
      ousg::set_thread_count(max_opt.threads);
      ousg::SpectralParams rates = resolve_rates(max_opt);
      ousg::TestFunction f = make_test_function(max_f_kind, max_f_center, max_f_width, max_f_atoms);
      f.normalize(rates, rates.dim());
      Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(max_x.data(), static_cast<int>(max_x.size()));
      ousg::TGrid grid = ousg::TGrid::log_spaced(grid_lo, grid_hi, grid_count);
      ousg::MaximalResult res = ousg::maximal_over_grid(
          grid, [&](double t) { return f.ht_value(rates, 1.0, x, t); });
      OutStream out(max_opt.out_path);
      ousg::CsvWriter csv(out.get(), ousg::provenance_line("maximal", max_opt.seed, ""),
                          {"value", "argmax_t", "small_t_max", "large_t_max"});
      csv.row({res.value, res.argmax_t, res.small_t_max, res.large_t_max});
      return 0;
    }

    if (cmd_sample->parsed()) {
      ousg::set_thread_count(smp_opt.threads);
      ousg::OUModel model = resolve_model(smp_opt);
      Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(smp_x.data(), static_cast<int>(smp_x.size()));
      OutStream out(smp_opt.out_path);
      std::vector<std::string> header;
      Eigen::MatrixXd data;
      if (!smp_path.empty()) {
        data = ousg::sde_path(model, x, smp_path, smp_opt.seed);
        header.push_back("t");
      } else {
        data = ousg::sde_sample(model, x, smp_t, smp_count, smp_opt.seed);
        header.push_back("index");
      }
      for (int j = 0; j < model.dim(); ++j) header.push_back("x" + std::to_string(j));
      ousg::CsvWriter csv(out.get(),
                          ousg::provenance_line("sample", smp_opt.seed,
                                                "t=" + ousg::format_double(smp_t)),
                          header);
      for (int i = 0; i < data.rows(); ++i) {
        std::vector<double> row;
        row.push_back(!smp_path.empty() ? smp_path[static_cast<std::size_t>(i)]
                                        : static_cast<double>(i));
        for (int j = 0; j < model.dim(); ++j) row.push_back(data(i, j));
        csv.row(row);
      }
      return 0;
    }

    if (cmd_geometry->parsed()) {
      ousg::set_thread_count(geo_opt.threads);
      ousg::SpectralParams rates = geo_opt.lambdas.empty() && geo_opt.model_path.empty()
                                       ? ousg::SpectralParams({1.0, 2.0})
                                       : resolve_rates(geo_opt);
      ousg::MarginReport rep = ousg::verify_inequality(lemma, geo_budget, rates, geo_opt.seed);
      OutStream out(geo_opt.out_path);
      out.get() << "# provenance: "
                << ousg::provenance_line("geometry", geo_opt.seed, "lemma=" + lemma) << "\n";
      out.get() << "lemma: " << rep.lemma_id << "\n";
      out.get() << "samples: " << rep.samples << "\n";
      if (rep.explicit_constant) {
        out.get() << "min margin: " << ousg::format_double(rep.min_margin) << "\n";
        out.get() << "verdict: " << (rep.min_margin >= 0.0 ? "PASS" : "FAIL") << "\n";
      } else {
        out.get() << "inf ratio: " << ousg::format_double(rep.inf_ratio) << "\n";
        out.get() << "inf ratio (half budget): " << ousg::format_double(rep.inf_ratio_half) << "\n";
      }
      out.get() << "witness:";
      for (double w : rep.witness) out.get() << " " << ousg::format_double(w);
      out.get() << "\n";
      if (rep.explicit_constant && rep.min_margin < 0.0) return kExitSubcommand;
      return 0;
    }

    if (cmd_weaktype->parsed()) {
      ousg::set_thread_count(wk_opt.threads);
      ousg::SpectralParams rates = resolve_rates(wk_opt);
      if (recursion) {
        if (!(wk_alpha > 0.0))
          throw ousg::Error(ousg::ErrorCode::ConfigParse, "--recursion needs --alpha");
        std::vector<long> nu = wk_nu;
        if (nu.empty()) nu.assign(static_cast<std::size_t>(rates.dim() - wk_k), 0);
        ousg::SmallTSlot slot{rates, wk_k, nu};
        ousg::TestFunction f = make_test_function(wk_f_kind, wk_f_center, wk_f_width, wk_f_atoms);
        f.normalize(rates, wk_k);
        ousg::RecursionConfig config{slot, f, wk_alpha, wk_m1, wk_m2, wk_big_m, -1.0, 1.0,
                                     200, 20, 48};
        ousg::ForbiddenZoneRun run = ousg::forbidden_zone_recursion(config);
        OutStream out(wk_opt.out_path);
        ousg::CsvWriter csv(out.get(),
                            ousg::provenance_line("weaktype", wk_opt.seed, "recursion=1"),
                            {"ell", "t", "r_level", "zone_measure", "b_mass", "bound_ratio"});
        for (std::size_t l = 0; l < run.zones.size(); ++l) {
          const auto& z = run.zones[l];
          csv.row({static_cast<double>(l + 1), z.t, z.r_level, z.zone_measure, z.b_mass,
                   z.bound_ratio});
        }
        out.get() << "# zones: " << run.zones.size() << " of " << run.level_set_points
                  << " level-set grid points\n";
        out.get() << "# disjoint: " << (run.disjoint ? "yes" : "no") << "\n";
        out.get() << "# covered: " << (run.covered ? "yes" : "no") << "\n";
        out.get() << "# A = " << ousg::format_double(run.constant_a)
                  << ", B = " << ousg::format_double(run.constant_b)
                  << ", c = " << ousg::format_double(run.c_effective) << "\n";
        if (!run.disjoint || !run.covered || !run.r_monotone) return kExitSubcommand;
        return 0;
      }
      if (alpha_grid.empty()) alpha_grid = {10.0, 31.6227766016838, 100.0, 316.227766016838, 1000.0};
      ousg::TestFunction f = make_test_function(wk_f_kind, wk_f_center, wk_f_width, wk_f_atoms);
      f.normalize(rates, rates.dim());
      ousg::LevelSetReport rep =
          ousg::weak_type_scan(rates, f, alpha_grid, wk_budget, wk_opt.seed, wk_kappa);
      OutStream out(wk_opt.out_path);
      ousg::CsvWriter csv(
          out.get(),
          ousg::provenance_line("weaktype", wk_opt.seed,
                                "kappa=" + ousg::format_double(wk_kappa) + " budget=" +
                                    std::to_string(rep.budget)),
          {"alpha", "measure", "std_error", "quotient"});
      for (std::size_t i = 0; i < rep.alphas.size(); ++i)
        csv.row({rep.alphas[i], rep.measures[i], rep.std_errors[i], rep.quotients[i]});
      out.get() << "# slope: " << ousg::format_double(rep.slope) << "\n";
      out.get() << "# tail bound: " << ousg::format_double(rep.tail_bound) << "\n";
      return 0;
    }

    if (cmd_verify->parsed()) {
      ousg::set_thread_count(ver_opt.threads);
      ousg::VerifyOptions options;
      options.seed = ver_opt.seed;
      options.quick = quick;
      options.log = &std::cerr;
      std::vector<ousg::CriterionResult> results = ousg::run_verification(options);
      OutStream out(ver_opt.out_path);
      ousg::write_verification_csv(out.get(), results, ver_opt.seed);
      return ousg::all_passed(results) ? 0 : kExitSubcommand;
    }
  } catch (const ousg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSubcommand;
  }
  return 0;
}
