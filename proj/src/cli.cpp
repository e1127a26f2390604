#include "pbx/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <numbers>
#include <ostream>

#include "pbx/bicoherent.hpp"
#include "pbx/config.hpp"
#include "pbx/lattice.hpp"
#include "pbx/numeric.hpp"
#include "pbx/parallel.hpp"
#include "pbx/report_io.hpp"
#include "pbx/zak.hpp"

namespace pbx {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Stage {
  StructureReport checks;
  json results = json::object();
  std::vector<std::string> warnings;
};

void add_warnings(Stage& st, const std::vector<std::string>& w, const std::string& where) {
  for (const auto& s : w) st.warnings.push_back(where + ": " + s);
}

StateVector unit_vector(Index dim, Index n) {
  StateVector e = StateVector::Zero(dim);
  e(n) = 1.0;
  return e;
}

Stage run_build(const RunConfig&, const PseudoBosonSystem& sys) {
  Stage st;
  st.results["kind"] = std::string(to_string(sys.spec.kind));
  st.results["dim"] = sys.dim();
  st.results["safe_margin"] = sys.safe_margin;
  st.results["condition_number"] = sys.condition_number;
  st.results["notes"] = sys.notes;
  if (sys.dim() >= 8) {
    const NormGrowthFit fit = norm_growth_fit(sys);
    st.results["norm_growth"] = {{"r_phi", fit.r_phi},
                                 {"alpha_phi", fit.alpha_phi},
                                 {"r_psi", fit.r_psi},
                                 {"alpha_psi", fit.alpha_psi},
                                 {"admissible_phi", fit.admissible_phi},
                                 {"admissible_psi", fit.admissible_psi}};
  }
  const Eigen::MatrixXcd gram = sys.phi.adjoint() * sys.psi;
  const Index n = sys.safe_size();
  st.checks.record("normalization", std::abs(gram(0, 0) - 1.0));
  st.checks.record("biorthogonality",
                   (gram.topLeftCorner(n, n) - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff());
  return st;
}

Stage run_verify(const RunConfig& cfg, const PseudoBosonSystem& sys) {
  Stage st;
  st.checks = verify_structure(sys, {cfg.seed, 100});
  st.results["notes"] = st.checks.notes;
  st.checks.notes.clear();
  ProbeRng rng(cfg.seed ^ 0x5155ULL);
  const Index support = std::min<Index>(8, sys.safe_size());
  const StateVector f = rng.vector(sys.dim(), support);
  const StateVector g = rng.vector(sys.dim(), support);
  const std::vector<double> res = quasi_basis_residual(sys, f, g, sys.dim());
  st.results["quasi_basis_residual"] = res;
  st.checks.record("quasi_basis", res.back() / std::max(1.0, std::abs(f.dot(g))));
  return st;
}

Stage run_bcs(const RunConfig& cfg, const PseudoBosonSystem& sys, const fs::path& out) {
  Stage st;
  const int ng = cfg.bcs.z_grid;
  const double half = cfg.bcs.z_radius / std::numbers::sqrt2;
  std::vector<std::vector<double>> rows;
  for (int a = 0; a < ng; ++a) {
    for (int b = 0; b < ng; ++b) {
      const double x = ng == 1 ? 0.0 : -half + 2.0 * half * a / (ng - 1);
      const double y = ng == 1 ? 0.0 : -half + 2.0 * half * b / (ng - 1);
      const BiCoherentPair pair = bicoherent_pair(sys, cplx(x, y), Route::series);
      add_warnings(st, pair.warnings, "bcs");
      const EigenResiduals r = eigen_residuals(sys, pair);
      st.checks.record("bcs_r1", r.r1);
      st.checks.record("bcs_r2", r.r2);
      st.checks.record("bcs_r3", r.r3);
      double route = 0.0;
      if (sys.regular()) {
        const BiCoherentPair alt = bicoherent_pair(sys, cplx(x, y), Route::s_transform);
        route = std::max((pair.phi_z - alt.phi_z).norm(), (pair.psi_z - alt.psi_z).norm());
        st.checks.record("route_consistency", route);
      }
      rows.push_back({x, y, r.r1, r.r2, r.r3, route});
    }
  }
  write_csv(out / "bcs_eigen.csv", {"z_re", "z_im", "r1", "r2", "r3", "route_gap"}, rows);

  std::vector<std::vector<double>> res_rows;
  const Index mm = cfg.quadrature.max_mode;
  for (Index m = 0; m <= mm; ++m) {
    for (Index n = 0; n <= mm; ++n) {
      const ResolutionResult rr = resolution_quadrature(sys, unit_vector(sys.dim(), m),
                                                        unit_vector(sys.dim(), n),
                                                        cfg.quadrature.disc);
      if (m == 0 && n == 0) add_warnings(st, rr.warnings, "resolution");
      st.checks.record("resolution", rr.error);
      res_rows.push_back({double(m), double(n), rr.value.real(), rr.value.imag(), rr.error});
    }
  }
  write_csv(out / "resolution.csv", {"m", "n", "re", "im", "error"}, res_rows);

  WeylOptions wo;
  wo.n_modes = cfg.bcs.weyl_modes;
  wo.n_sigma = cfg.bcs.sigma_n;
  wo.seed = cfg.seed;
  st.checks.merge(weyl_factorization_check(sys, cfg.bcs.weyl_alpha, wo));
  st.checks.merge(commutation_check(sys, cfg.zak.alpha, wo));
  st.results["weyl_alpha"] = cfg.bcs.weyl_alpha;
  st.results["commutation_alpha"] = cfg.zak.alpha;
  return st;
}

Stage run_zak(const RunConfig& cfg, const PseudoBosonSystem& sys, const fs::path& out) {
  Stage st;
  if (!sys.regular()) {
    st.results["skipped"] = true;
    st.results["reason"] = "kq engine needs a regular system";
    return st;
  }
  st.results["skipped"] = false;
  ZakSuiteOptions zo;
  zo.seed = cfg.seed;
  st.checks = zak_suite(sys, cfg.zak, zo);
  ProbeRng rng(cfg.seed);
  StateVector f = rng.vector(sys.dim(), std::min<Index>(zo.n_modes, sys.safe_size()));
  f /= f.norm();
  write_zak_csv(out / "zak_psi.csv", kq_coefficients(sys, f, KqFamily::Psi, cfg.zak));
  write_zak_csv(out / "zak_phi.csv", kq_coefficients(sys, f, KqFamily::Phi, cfg.zak));
  return st;
}

Stage run_lattice(const RunConfig& cfg, const PseudoBosonSystem& sys, const fs::path& out) {
  Stage st;
  const LatticeConfig& lc = cfg.lattice;
  const bool expect_complete = lc.resolved() == Expectation::complete;
  st.results["expect"] = expect_complete ? "complete" : "incomplete";

  const double fact = displacement_factorization_check(sys, lc.spec, lc.factorization_range(),
                                                       lc.factorization_modes);
  st.checks.record("displacement_factorization", fact);
  st.results["factorization_n_max"] = lc.factorization_range();

  std::vector<std::vector<double>> sv_rows, res_rows;
  bool verdicts[2] = {false, false};
  for (int fam = 0; fam < 2; ++fam) {
    const std::string name = fam == 0 ? "phi" : "psi";
    SynthesisOptions so;
    so.family = fam == 0 ? LatticeFamily::phi : LatticeFamily::psi;
    LatticeReport rep = synthesis_svd(sys, lc.spec, so);
    rep.factorization_deviation = fact;
    add_warnings(st, rep.warnings, "lattice." + name);
    const double worst = rep.max_residual();
    const bool ok = expect_complete ? worst < lc.complete_threshold
                                    : worst > lc.incomplete_threshold;
    verdicts[fam] = ok;
    st.checks.record("lattice_verdict_" + name, ok ? 0.0 : 1.0);
    st.results[name] = {{"max_residual", worst},
                        {"residuals", rep.residuals},
                        {"rank", rep.rank},
                        {"rank_fraction", rep.rank_fraction},
                        {"rows", rep.n_rows},
                        {"columns", rep.n_columns}};
    for (std::size_t i = 0; i < rep.singular_values.size(); ++i)
      sv_rows.push_back({double(fam), double(i), rep.singular_values[i]});
    for (std::size_t m = 0; m < rep.residuals.size(); ++m)
      res_rows.push_back({double(fam), double(m), rep.residuals[m]});
  }
  st.checks.record("duality", verdicts[0] == verdicts[1] ? 0.0 : 1.0);
  write_csv(out / "lattice_singular_values.csv", {"family", "index", "sigma"}, sv_rows);
  write_csv(out / "lattice_residuals.csv", {"family", "mode", "residual"}, res_rows);

  const auto curve = window_curve(sys, lc.spec, lc.windows);
  std::vector<std::vector<double>> curve_rows;
  json curve_json = json::array();
  bool monotone = true;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    curve_rows.push_back({double(curve[i].first), curve[i].second});
    curve_json.push_back({{"W", curve[i].first}, {"max_residual", curve[i].second}});
    if (i > 0 && curve[i].first > curve[i - 1].first && curve[i].second > curve[i - 1].second + 1e-12)
      monotone = false;
  }
  st.results["window_curve"] = curve_json;
  write_csv(out / "lattice_window_curve.csv", {"W", "max_residual"}, curve_rows);
  if (expect_complete) st.checks.record("window_monotone", monotone ? 0.0 : 1.0);

  const ExponentialRank er = exponential_rank(lc.spec.L, 12 * Index(lc.spec.L));
  st.results["exponential_rank"] = {{"K", 12 * lc.spec.L}, {"rank", er.rank}, {"expected", er.expected}};
  st.checks.record("exponential_rank", er.rank == er.expected ? 0.0 : 1.0);
  return st;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pseudo-boson / bi-coherent state laboratory", "pbx"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"build", "construct the system and report its metadata"},
      {"verify", "check the ladder structure"},
      {"bcs", "bi-coherent states, resolution of the identity, Weyl factorizations"},
      {"zak", "kq-representation checks"},
      {"lattice", "lattice completeness evidence"},
      {"all", "every stage above"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "probe seed (overrides seed)");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitPass : kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    const fs::path dir = out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir);
    fs::create_directories(dir);

    const PseudoBosonSystem sys = build_system(cfg.system);
    std::vector<std::pair<std::string, Stage>> stages;
    const bool all = command == "all";
    if (all || command == "build") stages.emplace_back("build", run_build(cfg, sys));
    if (all || command == "verify") stages.emplace_back("verify", run_verify(cfg, sys));
    if (all || command == "bcs") stages.emplace_back("bcs", run_bcs(cfg, sys, dir));
    if (all || command == "zak") stages.emplace_back("zak", run_zak(cfg, sys, dir));
    if (all || command == "lattice") stages.emplace_back("lattice", run_lattice(cfg, sys, dir));

    StructureReport merged;
    json results = json::object();
    std::vector<std::string> warnings;
    for (auto& [name, st] : stages) {
      merged.merge(st.checks, name + ".");
      results[name] = st.results;
      warnings.insert(warnings.end(), st.warnings.begin(), st.warnings.end());
    }
    const std::vector<CheckRecord> records = merged.evaluate(cfg.tolerances);
    bool pass = true;
    for (const auto& r : records) pass = pass && r.pass;

    const json report = {{"schema_version", std::string(kSchemaVersion)},
                         {"command", command},
                         {"config", cfg.echo()},
                         {"provenance", {{"config_sha1", git_blob_sha1(cfg.source_text)}}},
                         {"checks", checks_json(records)},
                         {"results", results},
                         {"warnings", warnings},
                         {"all_pass", pass}};
    write_text(dir / "report.json", canonical_json(report));
    const json meta = {{"timestamp", utc_timestamp()},
                       {"threads", thread_budget()},
                       {"config_path", config_path}};
    write_text(dir / "run_meta.json", canonical_json(meta));

    std::size_t failed = 0;
    for (const auto& r : records) {
      if (r.pass) continue;
      ++failed;
      err << "FAIL " << r.name << ": deviation " << r.deviation << " >= tolerance " << r.tolerance
          << "\n";
    }
    out << command << ": " << records.size() << " checks, " << failed << " failed; report at "
        << (dir / "report.json").string() << "\n";
    return pass ? kExitPass : kExitCheckFailed;
  } catch (const Error& e) {
    err << "pbx: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "pbx: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace pbx
