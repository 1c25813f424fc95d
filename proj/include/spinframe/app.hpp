// SPDX-License-Identifier: Apache-2.0
#pragma once

// Command implementations behind the `spinframe` executable.
//
// Exit codes: 0 success, 1 numerical threshold failure, 2 configuration or
// input validation failure, 3 solver non-convergence.
//
// Reports are ordered JSON and contain no timestamps; run metadata is written
// next to them in metadata.json.

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "spinframe/dirac.hpp"
#include "spinframe/eigensolver.hpp"
#include "spinframe/framing.hpp"
#include "spinframe/io.hpp"
#include "spinframe/verify.hpp"

namespace spinframe {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitSuccess = 0, kExitThreshold = 1, kExitConfig = 2, kExitSolver = 3 };

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides output.dir
  std::optional<std::uint64_t> seed;             // overrides solver.seed
  bool dense_oracle = false;
};

namespace detail {

inline std::filesystem::path prepare_out_dir(const JobConfig& cfg, const RunOptions& run) {
  const std::filesystem::path dir = run.out_dir ? *run.out_dir : std::filesystem::path(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

inline void write_metadata(const std::filesystem::path& dir, const std::string& command, const JobConfig& cfg) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream ts;
  ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  ordered_json meta{{"command", command}, {"version", kVersion}, {"config", cfg.source}, {"timestamp", ts.str()}};
  write_json(dir / "metadata.json", meta);
}

inline SolverOptions effective_solver(const JobConfig& cfg, const RunOptions& run) {
  SolverOptions s = cfg.solver;
  if (run.seed) s.seed = *run.seed;
  return s;
}

inline ordered_json report_header(const std::string& command, const JobConfig& cfg, const SolverOptions& solver) {
  ordered_json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["operator"] = operator_to_json(cfg);
  j["solver"] = solver_to_json(solver);
  return j;
}

/// Pairs each computed value with the nearest unused oracle value.
inline ordered_json oracle_table(const std::vector<EigenPair>& pairs, const OperatorSpec& spec, double* max_dev) {
  double top = 0.0;
  for (const auto& p : pairs) top = std::max(top, std::abs(p.lambda));
  auto oracle = expand_levels(flat_spectrum_oracle(spec.lattice, spec.spin, top * (1.0 + 1e-6) + 1e-6));
  std::vector<bool> used(oracle.size(), false);
  ordered_json table = ordered_json::array();
  *max_dev = 0.0;
  for (const auto& p : pairs) {
    std::size_t best = oracle.size();
    for (std::size_t i = 0; i < oracle.size(); ++i)
      if (!used[i] && (best == oracle.size() || std::abs(oracle[i] - p.lambda) < std::abs(oracle[best] - p.lambda))) best = i;
    if (best == oracle.size()) {
      *max_dev = std::numeric_limits<double>::infinity();
      table.push_back({{"computed", p.lambda}, {"oracle", nullptr}, {"deviation", nullptr}});
      continue;
    }
    used[best] = true;
    const double dev = std::abs(oracle[best] - p.lambda);
    *max_dev = std::max(*max_dev, dev);
    table.push_back({{"computed", p.lambda}, {"oracle", oracle[best]}, {"deviation", dev}});
  }
  return table;
}

inline ordered_json clusters_to_json(const std::vector<Cluster>& clusters) {
  ordered_json out = ordered_json::array();
  for (const auto& c : clusters)
    out.push_back({{"lambda_mean", c.lambda_mean}, {"multiplicity", c.multiplicity}, {"simple_over_quaternions", c.simple_over_quaternions()}});
  return out;
}

}  // namespace detail

inline constexpr double kClusterGap = 1e-6;
inline constexpr double kKernelTol = 1e-8;

inline int cmd_spectrum(const JobConfig& cfg, const RunOptions& run, std::ostream& log) {
  const auto dir = detail::prepare_out_dir(cfg, run);
  const OperatorSpec spec = cfg.spec();
  const SolverOptions solver = detail::effective_solver(cfg, run);
  if (run.dense_oracle && 2 * spec.grid.size() > kDefaultDenseLimit)
    throw std::invalid_argument("--dense-oracle: grid too large for dense assembly");

  const auto pairs = eigensolve(spec, solver);
  const auto clusters = cluster_multiplicities(pairs, kClusterGap);
  const bool even = evenness_check(complete_clusters(clusters, kClusterGap));

  ordered_json rep = detail::report_header("spectrum", cfg, solver);
  ordered_json eig = ordered_json::array();
  bool residuals_ok = true;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    eig.push_back({{"index", i}, {"lambda", pairs[i].lambda}, {"residual", pairs[i].residual}, {"cluster", pairs[i].cluster_id}});
    residuals_ok = residuals_ok && pairs[i].residual <= solver.tol;
  }
  rep["eigenpairs"] = eig;
  rep["clusters"] = detail::clusters_to_json(clusters);
  rep["even_multiplicities"] = even;

  ordered_json oracle;
  if (spec.flat()) {
    double dev = 0.0;
    oracle["applicable"] = true;
    oracle["table"] = detail::oracle_table(pairs, spec, &dev);
    oracle["max_deviation"] = dev;
  } else {
    oracle["applicable"] = false;
  }
  rep["oracle"] = oracle;
  if (run.dense_oracle) {
    const auto dense = dense_spectrum(spec);
    std::vector<double> computed, reference = lowest_magnitudes(dense.eigenvalues, pairs.size());
    for (const auto& p : pairs) computed.push_back(std::abs(p.lambda));
    std::sort(computed.begin(), computed.end());
    rep["dense"] = {{"hermiticity_defect", dense.hermiticity_defect}, {"max_deviation", spectrum_deviation(computed, reference)}};
  }
  rep["status"] = residuals_ok ? "pass" : "fail";
  write_json(dir / "spectrum.json", rep);
  detail::write_metadata(dir, "spectrum", cfg);

  log << "spectrum: " << pairs.size() << " eigenpairs, " << clusters.size() << " clusters\n";
  for (const auto& c : clusters) log << "  lambda " << std::setprecision(12) << c.lambda_mean << "  multiplicity " << c.multiplicity << "\n";
  if (spec.flat()) log << "  oracle max deviation " << oracle["max_deviation"].get<double>() << "\n";
  log << "  even multiplicities: " << (even ? "yes" : "no") << "\n";
  log << "report: " << (dir / "spectrum.json").string() << "\n";
  return residuals_ok ? kExitSuccess : kExitThreshold;
}

inline int cmd_framing(const JobConfig& cfg, const RunOptions& run, std::ostream& log) {
  const auto dir = detail::prepare_out_dir(cfg, run);
  const OperatorSpec spec = cfg.spec();
  const SolverOptions solver = detail::effective_solver(cfg, run);
  ordered_json rep = detail::report_header("framing", cfg, solver);
  ordered_json warnings = ordered_json::array();

  EigenPair source;
  int multiplicity = 0;
  if (cfg.framing_source == FramingSource::kPlaneWave) {
    auto pw = plane_wave_eigenspinor(spec.lattice, spec.spin, spec.grid, cfg.plane_wave_k, cfg.plane_wave_sign);
    source.lambda = pw.lambda;
    source.field = std::move(pw.field);
    source.field *= 1.0 / std::sqrt(spec.lattice.volume());
    SpinorField r = flat_dirac_apply(source.field, spec.lattice, spec.spin);
    r -= Cplx(source.lambda) * source.field;
    source.residual = norm(r, spec.lattice) / norm(source.field, spec.lattice);
    source.cluster_id = -1;
    rep["source"] = {{"kind", "plane_wave"}, {"k", cfg.plane_wave_k}, {"sign", cfg.plane_wave_sign}};
    for (int a = 0; a < 3; ++a)
      if (std::abs(2 * cfg.plane_wave_k[a] + spec.spin[a]) >= spec.grid.n(a) / 2) {
        const std::string w = "framing of this plane wave has frequency 2k+eps beyond the grid Nyquist band; divergence is not resolved";
        warnings.push_back(w);
        log << "warning: " << w << "\n";
        break;
      }
  } else {
    const auto pairs = eigensolve(spec, solver);
    std::size_t chosen = pairs.size();
    if (cfg.framing_index) {
      chosen = static_cast<std::size_t>(*cfg.framing_index);
    } else {
      for (std::size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i].lambda > kKernelTol) {
          chosen = i;
          break;
        }
      if (chosen == pairs.size()) throw std::invalid_argument("framing: no positive eigenvalue among the computed eigenpairs; raise solver.count");
    }
    source = pairs[chosen];
    for (const auto& c : cluster_multiplicities(pairs, kClusterGap))
      if (std::abs(c.lambda_mean - source.lambda) < kClusterGap * std::max(1.0, std::abs(source.lambda))) multiplicity = c.multiplicity;
    rep["source"] = {{"kind", "eigensolve"}, {"index", chosen}};
  }
  if (std::abs(source.lambda) < kKernelTol) {
    const std::string w = "harmonic source: lambda = 0 is outside the eigenspinor construction; the framing is still divergence-free by the same computation";
    warnings.push_back(w);
    log << "warning: " << w << "\n";
  }
  rep["eigenpair"] = {{"lambda", source.lambda}, {"residual", source.residual}, {"cluster", source.cluster_id}, {"cluster_multiplicity", multiplicity}};

  Framing fr = framing_from_eigenpair(source, spec, multiplicity);
  if (cfg.framing_source == FramingSource::kPlaneWave) fr.provenance.construction = "plane_wave";
  if (cfg.rescale) fr = conformal_rescale(fr, *cfg.rescale);
  const FramingReport report = framing_report(fr, spec.lattice);
  const FramingThresholds th = cfg.effective_thresholds();
  const bool pass = report.passes(th);

  rep["construction"] = fr.provenance.construction;
  rep["metric"] = fr.metric_h ? conformal_to_json(*fr.metric_h) : ordered_json(nullptr);
  rep["report"] = framing_report_to_json(report);
  rep["thresholds"] = {{"max_divergence", th.max_divergence}, {"orthogonality", th.orthogonality}, {"length_spread", th.length_spread}};
  rep["warnings"] = warnings;
  rep["files"] = {"framing_fields.csv", "eigenspinor.csv"};
  rep["status"] = pass ? "pass" : "fail";

  write_csv(dir / "framing_fields.csv", framing_table(fr), spec.lattice);
  write_csv(dir / "eigenspinor.csv", spinor_table(source.field), spec.lattice);
  write_json(dir / "framing.json", rep);
  detail::write_metadata(dir, "framing", cfg);

  log << "framing: lambda " << std::setprecision(12) << source.lambda << " (" << fr.provenance.construction << ")\n"
      << "  max |div|          " << report.max_divergence << "\n"
      << "  orthogonality      " << report.orthogonality_defect << "\n"
      << "  length spread      " << report.length_spread << "\n"
      << "  min length         " << report.min_length << (report.degenerate ? " (degenerate)" : "") << "\n"
      << "  status             " << (pass ? "pass" : "fail") << "\n";
  return pass ? kExitSuccess : kExitThreshold;
}

inline int cmd_verify(const JobConfig& cfg, const RunOptions& run, std::ostream& log) {
  const auto dir = detail::prepare_out_dir(cfg, run);
  const OperatorSpec spec = cfg.spec();
  const SolverOptions solver = detail::effective_solver(cfg, run);
  const bool dense_feasible = 2 * spec.grid.size() <= kDefaultDenseLimit;
  if (run.dense_oracle && !dense_feasible) throw std::invalid_argument("--dense-oracle: grid too large for dense assembly");

  ordered_json rep = detail::report_header("verify", cfg, solver);
  ordered_json checks = ordered_json::array();
  bool all = true;
  auto record = [&](const std::string& name, double value, double threshold, bool pass) {
    checks.push_back({{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}});
    all = all && pass;
    log << (pass ? "PASS " : "FAIL ") << std::left << std::setw(34) << name << " " << std::setprecision(6) << value << " (threshold " << threshold
        << ")\n";
  };

  const double comm = quaternionic_commutation_check(spec, cfg.verify_trials, solver.seed);
  record("quaternionic_commutation", comm, 1e-12, comm <= 1e-12);
  if (spec.conformal) {
    const OperatorSpec flat(spec.lattice, spec.spin, spec.grid);
    const double c = quaternionic_commutation_check(flat, cfg.verify_trials, solver.seed);
    record("quaternionic_commutation_flat", c, 1e-12, c <= 1e-12);
  }
  const double sym = symmetry_defect(spec, cfg.verify_trials, solver.seed + 1);
  record("symmetry_defect", sym, 1e-12, sym <= 1e-12);

  const auto pairs = eigensolve(spec, solver);
  const auto clusters = complete_clusters(cluster_multiplicities(pairs, kClusterGap), kClusterGap);
  const bool even = evenness_check(clusters);
  record("even_cluster_multiplicities", static_cast<double>(clusters.size()), 0.0, even);

  const int expected_kernel = spec.spin.periodic() ? 2 : 0;
  KernelOptions ko;
  ko.seed = solver.seed;
  ko.max_iter = solver.max_iter;
  ko.count = std::max(8, expected_kernel + 4);
  const int kernel = kernel_dimension(spec, kKernelTol, ko);
  record("kernel_dimension", kernel, expected_kernel, kernel == expected_kernel);

  if (spec.flat()) {
    double dev = 0.0;
    detail::oracle_table(pairs, spec, &dev);
    record("eigensolve_vs_oracle", dev, 1e-8, dev <= 1e-8);
  }
  if (dense_feasible || run.dense_oracle) {
    const auto dense = dense_spectrum(spec);
    record("dense_hermiticity_defect", dense.hermiticity_defect, 1e-12, dense.hermiticity_defect <= 1e-12);
    if (spec.flat()) {
      const double d = spectrum_deviation(dense.eigenvalues, grid_spectrum_oracle(spec.lattice, spec.spin, spec.grid));
      record("dense_vs_oracle", d, 1e-10, d <= 1e-10);
    }
    std::vector<double> computed;
    for (const auto& p : pairs) computed.push_back(std::abs(p.lambda));
    std::sort(computed.begin(), computed.end());
    const double d = spectrum_deviation(computed, lowest_magnitudes(dense.eigenvalues, pairs.size()));
    record("eigensolve_vs_dense", d, 1e-8, d <= 1e-8);
  }
  rep["checks"] = checks;
  rep["status"] = all ? "pass" : "fail";
  write_json(dir / "verify.json", rep);
  detail::write_metadata(dir, "verify", cfg);
  return all ? kExitSuccess : kExitThreshold;
}

inline int cmd_export(const JobConfig& cfg, const RunOptions& run, std::ostream& log) {
  const auto dir = detail::prepare_out_dir(cfg, run);
  const Lattice lattice(cfg.basis);
  const Grid grid(cfg.grid);
  ordered_json files = ordered_json::array();

  const auto framing_csv = dir / "framing_fields.csv";
  if (!std::filesystem::exists(framing_csv)) throw IoError("missing input " + framing_csv.string() + " (run `framing` first)");
  const FieldTable fr = read_csv(framing_csv, grid);
  write_vtk(dir / "framing_fields.vtk", fr, lattice, "spinframe framing");
  write_csv(framing_csv, fr, lattice);
  files.push_back({{"csv", "framing_fields.csv"}, {"vtk", "framing_fields.vtk"}, {"rows", grid.size()}});

  const auto spinor_csv = dir / "eigenspinor.csv";
  if (std::filesystem::exists(spinor_csv)) {
    const FieldTable sp = read_csv(spinor_csv, grid);
    write_vtk(dir / "eigenspinor.vtk", sp, lattice, "spinframe eigenspinor");
    write_csv(spinor_csv, sp, lattice);
    files.push_back({{"csv", "eigenspinor.csv"}, {"vtk", "eigenspinor.vtk"}, {"rows", grid.size()}});
  }
  ordered_json rep{{"command", "export"}, {"version", kVersion}, {"grid", cfg.grid}, {"files", files}};
  write_json(dir / "export.json", rep);
  detail::write_metadata(dir, "export", cfg);
  log << "export: " << files.size() << " field set(s) written to " << dir.string() << "\n";
  return kExitSuccess;
}

inline void print_error(std::ostream& err, int code, const std::string& kind, const std::string& message, int line = 0) {
  ordered_json e{{"code", code}, {"kind", kind}, {"message", message}};
  if (line > 0) e["line"] = line;
  err << ordered_json{{"error", e}}.dump() << "\n";
}

/// Runs one command, mapping failures onto the exit-code contract.
inline int dispatch(const std::string& command, const std::filesystem::path& config_path, const RunOptions& run, std::ostream& out,
                    std::ostream& err) {
  try {
    const JobConfig cfg = load_config(config_path);
    if (command == "spectrum") return cmd_spectrum(cfg, run, out);
    if (command == "framing") return cmd_framing(cfg, run, out);
    if (command == "verify") return cmd_verify(cfg, run, out);
    if (command == "export") return cmd_export(cfg, run, out);
    print_error(err, kExitConfig, "usage", "unknown command " + command);
    return kExitConfig;
  } catch (const ConfigError& e) {
    print_error(err, kExitConfig, "config", e.what(), e.line());
    return kExitConfig;
  } catch (const ConvergenceError& e) {
    std::ostringstream msg;
    msg << e.what() << "; achieved S^2 residuals:";
    for (double r : e.achieved_residuals()) msg << " " << r;
    print_error(err, kExitSolver, "convergence", msg.str());
    return kExitSolver;
  } catch (const IoError& e) {
    print_error(err, kExitConfig, "io", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    print_error(err, kExitConfig, "validation", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    print_error(err, kExitThreshold, "numerical", e.what());
    return kExitThreshold;
  }
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"spinframe: eigenspinors and divergence-free framings of 3-tori"};
  app.require_subcommand(1);
  std::string config;
  std::string out_dir;
  long long seed = -1;
  bool dense = false;
  for (const char* name : {"spectrum", "framing", "verify", "export"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON job configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "random seed (overrides solver.seed)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--dense-oracle", dense, "force the dense cross-check (small grids only)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    print_error(err, kExitConfig, "usage", e.what());
    return kExitConfig;
  }
  RunOptions run;
  if (!out_dir.empty()) run.out_dir = out_dir;
  if (seed >= 0) run.seed = static_cast<std::uint64_t>(seed);
  run.dense_oracle = dense;
  return dispatch(app.get_subcommands().front()->get_name(), config, run, out, err);
}

}  // namespace spinframe
