// SPDX-License-Identifier: Apache-2.0
#pragma once

// Job configuration (JSON), field dumps (CSV, 17 significant digits) and legacy
// ASCII VTK structured points. Node order is x fastest throughout.

#if __has_include(<json.hpp>)
#include <json.hpp>
#else
#include <nlohmann/json.hpp>
#endif

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinframe/dirac.hpp"
#include "spinframe/eigensolver.hpp"
#include "spinframe/framing.hpp"
#include "spinframe/verify.hpp"

namespace spinframe {

using ordered_json = nlohmann::ordered_json;

/// Validation failure with the config line it refers to (0 when unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& pointer, const std::string& message)
      : std::runtime_error(format(source, line, pointer, message)), source_(source), line_(line), pointer_(pointer), message_(message) {}

  int line() const { return line_; }
  const std::string& pointer() const { return pointer_; }
  const std::string& message() const { return message_; }
  const std::string& source() const { return source_; }

 private:
  static std::string format(const std::string& source, int line, const std::string& pointer, const std::string& message) {
    std::string s = source;
    if (line > 0) s += ":" + std::to_string(line);
    s += ": ";
    if (!pointer.empty()) s += pointer + ": ";
    return s + message;
  }
  std::string source_;
  int line_;
  std::string pointer_;
  std::string message_;
};

/// Input/output failure (missing inputs, unwritable paths, malformed dumps).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FramingSource { kEigensolve, kPlaneWave };

struct JobConfig {
  std::string source = "<config>";
  Eigen::Matrix3d basis = Eigen::Matrix3d::Identity();
  std::array<int, 3> spin{0, 0, 0};
  std::array<int, 3> grid{16, 16, 16};
  std::optional<ConformalFactor> conformal;
  std::optional<ConformalFactor> rescale;
  SolverOptions solver{14, 1e-8, 1000, 0, 4};

  FramingSource framing_source = FramingSource::kEigensolve;
  std::optional<int> framing_index;  // default: smallest positive eigenvalue
  std::array<int, 3> plane_wave_k{1, 0, 0};
  int plane_wave_sign = 1;

  std::optional<FramingThresholds> thresholds;  // default depends on the metric
  int verify_trials = 10;
  std::string output_dir = "out";

  OperatorSpec spec() const { return OperatorSpec(Lattice(basis), SpinStructure(spin), Grid(grid), conformal); }
  FramingThresholds effective_thresholds() const {
    if (thresholds) return *thresholds;
    return (conformal || rescale) ? conformal_thresholds() : flat_thresholds();
  }
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

/// Line of the key sequence in a JSON pointer ("/solver/tol"): each object key
/// is searched after the previous one. Array indices are skipped.
inline int line_of_pointer(const std::string& text, const std::string& pointer) {
  std::size_t pos = 0;
  bool found = false;
  std::stringstream ss(pointer);
  std::string token;
  while (std::getline(ss, token, '/')) {
    if (token.empty() || std::all_of(token.begin(), token.end(), ::isdigit)) continue;
    const auto hit = text.find("\"" + token + "\"", pos);
    if (hit == std::string::npos) break;
    pos = hit;
    found = true;
  }
  return found ? line_of_offset(text, pos) : 0;
}

class ConfigReader {
 public:
  ConfigReader(const std::string& text, const std::string& source) : text_(text), source_(source) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    throw ConfigError(source_, line_of_pointer(text_, pointer), pointer, message);
  }

  double number(const nlohmann::json& j, const std::string& ptr) const {
    if (!j.is_number()) fail(ptr, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(ptr, "expected a finite number");
    return v;
  }
  long long integer(const nlohmann::json& j, const std::string& ptr) const {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    return j.get<long long>();
  }
  std::array<int, 3> int3(const nlohmann::json& j, const std::string& ptr) const {
    if (!j.is_array() || j.size() != 3) fail(ptr, "expected an array of 3 integers");
    std::array<int, 3> out{};
    for (int a = 0; a < 3; ++a) out[a] = static_cast<int>(integer(j[a], ptr + "/" + std::to_string(a)));
    return out;
  }
  void only_keys(const nlohmann::json& j, const std::string& ptr, std::initializer_list<const char*> keys) const {
    if (!j.is_object()) fail(ptr, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool known = false;
      for (const char* k : keys) known = known || it.key() == k;
      if (!known) fail(ptr + "/" + it.key(), "unknown key");
    }
  }

  ConformalFactor conformal(const nlohmann::json& j, const std::string& ptr) const {
    only_keys(j, ptr, {"offset", "terms"});
    if (!j.contains("offset")) fail(ptr, "missing key \"offset\"");
    const double offset = number(j["offset"], ptr + "/offset");
    std::vector<ConformalTerm> terms;
    if (j.contains("terms")) {
      if (!j["terms"].is_array()) fail(ptr + "/terms", "expected an array");
      for (std::size_t i = 0; i < j["terms"].size(); ++i) {
        const auto& t = j["terms"][i];
        const std::string tp = ptr + "/terms/" + std::to_string(i);
        only_keys(t, tp, {"m", "amplitude", "phase"});
        if (!t.contains("m") || !t.contains("amplitude")) fail(tp, "terms need \"m\" and \"amplitude\"");
        ConformalTerm term;
        term.m = int3(t["m"], tp + "/m");
        term.amplitude = number(t["amplitude"], tp + "/amplitude");
        term.phase = t.contains("phase") ? number(t["phase"], tp + "/phase") : 0.0;
        terms.push_back(term);
      }
    }
    try {
      return ConformalFactor(offset, std::move(terms));
    } catch (const std::invalid_argument& e) {
      fail(ptr, e.what());
    }
  }

 private:
  const std::string& text_;
  std::string source_;
};

}  // namespace detail

inline JobConfig parse_config(const std::string& text, const std::string& source = "<config>") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source, detail::line_of_offset(text, e.byte), "", std::string("malformed JSON: ") + e.what());
  }
  const detail::ConfigReader rd(text, source);
  rd.only_keys(j, "", {"lattice", "spin_structure", "grid", "conformal", "rescale", "solver", "framing", "thresholds", "verify", "output"});

  JobConfig cfg;
  cfg.source = source;
  if (j.contains("lattice")) {
    const auto& l = j["lattice"];
    if (!l.is_array() || l.size() != 9) rd.fail("/lattice", "expected 9 numbers (row-major 3x3, columns are generators)");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) cfg.basis(r, c) = rd.number(l[3 * r + c], "/lattice/" + std::to_string(3 * r + c));
    if (!(cfg.basis.determinant() > 0.0)) rd.fail("/lattice", "lattice basis must have positive determinant");
  }
  if (j.contains("spin_structure")) {
    cfg.spin = rd.int3(j["spin_structure"], "/spin_structure");
    for (int e : cfg.spin)
      if (e != 0 && e != 1) rd.fail("/spin_structure", "spin structure flags must be 0 or 1");
  }
  if (j.contains("grid")) {
    cfg.grid = rd.int3(j["grid"], "/grid");
    for (int n : cfg.grid) {
      if (n % 2 != 0) rd.fail("/grid", "grid dimensions must be even");
      if (n < 4) rd.fail("/grid", "grid dimensions must be at least 4");
    }
  }
  const Grid grid(cfg.grid);
  if (j.contains("conformal") && !j["conformal"].is_null()) {
    cfg.conformal = rd.conformal(j["conformal"], "/conformal");
    if (!cfg.conformal->admissible_on(grid)) rd.fail("/conformal", "conformal factor exceeds the grid bandlimit (|m_a| < n_a/4 required)");
  }
  if (j.contains("rescale") && !j["rescale"].is_null()) {
    cfg.rescale = rd.conformal(j["rescale"], "/rescale");
    if (!cfg.rescale->admissible_on(grid)) rd.fail("/rescale", "rescale factor exceeds the grid bandlimit (|m_a| < n_a/4 required)");
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    rd.only_keys(s, "/solver", {"count", "tol", "max_iter", "seed", "padding"});
    if (s.contains("count")) cfg.solver.count = static_cast<int>(rd.integer(s["count"], "/solver/count"));
    if (s.contains("tol")) cfg.solver.tol = rd.number(s["tol"], "/solver/tol");
    if (s.contains("max_iter")) cfg.solver.max_iter = static_cast<int>(rd.integer(s["max_iter"], "/solver/max_iter"));
    if (s.contains("seed")) {
      const long long seed = rd.integer(s["seed"], "/solver/seed");
      if (seed < 0) rd.fail("/solver/seed", "seed must be non-negative");
      cfg.solver.seed = static_cast<std::uint64_t>(seed);
    }
    if (s.contains("padding")) cfg.solver.padding = static_cast<int>(rd.integer(s["padding"], "/solver/padding"));
    if (cfg.solver.count < 1) rd.fail("/solver/count", "count must be at least 1");
    if (static_cast<std::size_t>(cfg.solver.count) > 2 * grid.size()) rd.fail("/solver/count", "count exceeds the grid dimension");
    if (!(cfg.solver.tol > 0.0)) rd.fail("/solver/tol", "tol must be positive");
    if (cfg.solver.max_iter < 1) rd.fail("/solver/max_iter", "max_iter must be at least 1");
    if (cfg.solver.padding < 0) rd.fail("/solver/padding", "padding must be non-negative");
  }
  if (j.contains("framing")) {
    const auto& f = j["framing"];
    rd.only_keys(f, "/framing", {"source", "eigenpair", "k", "sign"});
    if (f.contains("source")) {
      if (!f["source"].is_string()) rd.fail("/framing/source", "expected \"eigensolve\" or \"plane_wave\"");
      const auto src = f["source"].get<std::string>();
      if (src == "eigensolve")
        cfg.framing_source = FramingSource::kEigensolve;
      else if (src == "plane_wave")
        cfg.framing_source = FramingSource::kPlaneWave;
      else
        rd.fail("/framing/source", "expected \"eigensolve\" or \"plane_wave\"");
    }
    if (f.contains("eigenpair")) {
      const auto& e = f["eigenpair"];
      if (e.is_string() && e.get<std::string>() == "smallest_positive")
        cfg.framing_index.reset();
      else if (e.is_number_integer()) {
        cfg.framing_index = static_cast<int>(e.get<long long>());
        if (*cfg.framing_index < 0 || *cfg.framing_index >= cfg.solver.count)
          rd.fail("/framing/eigenpair", "eigenpair index must lie in [0, solver.count)");
      } else
        rd.fail("/framing/eigenpair", "expected an index or \"smallest_positive\"");
    }
    if (f.contains("k")) cfg.plane_wave_k = rd.int3(f["k"], "/framing/k");
    if (f.contains("sign")) {
      cfg.plane_wave_sign = static_cast<int>(rd.integer(f["sign"], "/framing/sign"));
      if (cfg.plane_wave_sign != 1 && cfg.plane_wave_sign != -1) rd.fail("/framing/sign", "sign must be +1 or -1");
    }
    if (cfg.framing_source == FramingSource::kPlaneWave && cfg.conformal)
      rd.fail("/framing/source", "plane-wave sources exist only for the flat metric");
  }
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    rd.only_keys(t, "/thresholds", {"max_divergence", "orthogonality", "length_spread"});
    FramingThresholds th = (cfg.conformal || cfg.rescale) ? conformal_thresholds() : flat_thresholds();
    if (t.contains("max_divergence")) th.max_divergence = rd.number(t["max_divergence"], "/thresholds/max_divergence");
    if (t.contains("orthogonality")) th.orthogonality = rd.number(t["orthogonality"], "/thresholds/orthogonality");
    if (t.contains("length_spread")) th.length_spread = rd.number(t["length_spread"], "/thresholds/length_spread");
    if (!(th.max_divergence >= 0.0 && th.orthogonality >= 0.0 && th.length_spread >= 0.0))
      rd.fail("/thresholds", "thresholds must be non-negative");
    cfg.thresholds = th;
  }
  if (j.contains("verify")) {
    const auto& v = j["verify"];
    rd.only_keys(v, "/verify", {"trials"});
    if (v.contains("trials")) cfg.verify_trials = static_cast<int>(rd.integer(v["trials"], "/verify/trials"));
    if (cfg.verify_trials < 1) rd.fail("/verify/trials", "trials must be at least 1");
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    rd.only_keys(o, "/output", {"dir"});
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) rd.fail("/output/dir", "expected a string");
      cfg.output_dir = o["dir"].get<std::string>();
    }
  }
  return cfg;
}

inline JobConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

inline ordered_json conformal_to_json(const ConformalFactor& h) {
  ordered_json terms = ordered_json::array();
  for (const auto& t : h.terms()) terms.push_back({{"m", t.m}, {"amplitude", t.amplitude}, {"phase", t.phase}});
  return {{"offset", h.offset()}, {"terms", terms}};
}

inline ordered_json operator_to_json(const JobConfig& cfg) {
  std::vector<double> rows;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rows.push_back(cfg.basis(r, c));
  ordered_json j;
  j["lattice"] = rows;
  j["spin_structure"] = cfg.spin;
  j["grid"] = cfg.grid;
  j["conformal"] = cfg.conformal ? conformal_to_json(*cfg.conformal) : ordered_json(nullptr);
  return j;
}

inline ordered_json solver_to_json(const SolverOptions& s) {
  return {{"count", s.count}, {"tol", s.tol}, {"max_iter", s.max_iter}, {"seed", s.seed}, {"padding", s.padding}};
}

inline ordered_json framing_report_to_json(const FramingReport& r) {
  return {{"max_divergence", r.max_divergence},
          {"max_divergence_relative", r.max_divergence_relative},
          {"orthogonality_defect", r.orthogonality_defect},
          {"length_spread", r.length_spread},
          {"min_length", r.min_length},
          {"max_length", r.max_length},
          {"degenerate", r.degenerate}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing input " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_json(const std::filesystem::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Field tables

/// Columns of per-node values sharing one grid; `names` excludes x, y, z.
struct FieldTable {
  Grid grid;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline FieldTable framing_table(const Framing& fr) {
  FieldTable t{fr.grid(), {}, {}};
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c) {
      t.names.push_back("X" + std::to_string(a + 1) + "_" + std::to_string(c + 1));
      std::vector<double> col(fr.grid().size());
      for (std::size_t i = 0; i < col.size(); ++i) col[i] = fr.field(a)[i][c];
      t.columns.push_back(std::move(col));
    }
  return t;
}

inline FieldTable spinor_table(const SpinorField& f) {
  FieldTable t{f.grid(), {"alpha_re", "alpha_im", "beta_re", "beta_im"}, std::vector<std::vector<double>>(4, std::vector<double>(f.nodes()))};
  for (std::size_t i = 0; i < f.nodes(); ++i) {
    const Spinor s = f.at(i);
    t.columns[0][i] = s.alpha.real();
    t.columns[1][i] = s.alpha.imag();
    t.columns[2][i] = s.beta.real();
    t.columns[3][i] = s.beta.imag();
  }
  return t;
}

inline std::array<VectorField, 3> vector_fields_from_table(const FieldTable& t) {
  if (t.columns.size() != 9) throw IoError("framing table must have 9 field columns");
  std::array<VectorField, 3> out{VectorField(t.grid), VectorField(t.grid), VectorField(t.grid)};
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < t.grid.size(); ++i)
      out[a][i] = {t.columns[3 * a][i], t.columns[3 * a + 1][i], t.columns[3 * a + 2][i]};
  return out;
}

inline SpinorField spinor_from_table(const FieldTable& t) {
  if (t.columns.size() != 4) throw IoError("spinor table must have 4 field columns");
  SpinorField f(t.grid);
  for (std::size_t i = 0; i < t.grid.size(); ++i)
    f.set(i, {{t.columns[0][i], t.columns[1][i]}, {t.columns[2][i], t.columns[3][i]}});
  return f;
}

inline std::string csv_string(const FieldTable& t, const Lattice& lattice) {
  std::string out = "x,y,z";
  for (const auto& n : t.names) out += "," + n;
  out += "\n";
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    const Vec3 x = lattice.position(t.grid.fractional(i));
    out += format_double(x.c1) + "," + format_double(x.c2) + "," + format_double(x.c3);
    for (const auto& col : t.columns) out += "," + format_double(col[i]);
    out += "\n";
  }
  return out;
}

inline void write_csv(const std::filesystem::path& path, const FieldTable& t, const Lattice& lattice) {
  write_text(path, csv_string(t, lattice));
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw IoError(where + ": not a number: '" + s + "'");
  return v;
}

/// Reads a dump written by write_csv; `grid` fixes the expected node count.
inline FieldTable read_csv(const std::filesystem::path& path, const Grid& grid) {
  std::stringstream ss(read_text(path));
  std::string line;
  if (!std::getline(ss, line)) throw IoError(path.string() + ": empty file");
  const auto header = split(line, ',');
  if (header.size() < 4 || header[0] != "x" || header[1] != "y" || header[2] != "z")
    throw IoError(path.string() + ": header must start with x,y,z");
  FieldTable t{grid, std::vector<std::string>(header.begin() + 3, header.end()), {}};
  t.columns.assign(t.names.size(), {});
  std::size_t rows = 0;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw IoError(path.string() + ":" + std::to_string(rows + 2) + ": wrong column count");
    for (std::size_t c = 3; c < cells.size(); ++c) t.columns[c - 3].push_back(parse_double(cells[c], path.string()));
    ++rows;
  }
  if (rows != grid.size())
    throw IoError(path.string() + ": expected " + std::to_string(grid.size()) + " rows, found " + std::to_string(rows));
  return t;
}

/// Legacy ASCII VTK structured points. Orthogonal-diagonal lattices get
/// physical spacing; otherwise the points are in lattice coordinates.
inline std::string vtk_string(const FieldTable& t, const Lattice& lattice, const std::string& title) {
  const Grid& g = t.grid;
  std::string out = "# vtk DataFile Version 3.0\n";
  out += title + (lattice.is_diagonal() ? "" : " (lattice coordinates)") + "\n";
  out += "ASCII\nDATASET STRUCTURED_POINTS\n";
  out += "DIMENSIONS " + std::to_string(g.n(0)) + " " + std::to_string(g.n(1)) + " " + std::to_string(g.n(2)) + "\n";
  out += "ORIGIN 0 0 0\nSPACING";
  for (int a = 0; a < 3; ++a) out += " " + format_double((lattice.is_diagonal() ? lattice.basis()(a, a) : 1.0) / g.n(a));
  out += "\nPOINT_DATA " + std::to_string(g.size()) + "\n";
  std::size_t c = 0;
  while (c < t.columns.size()) {
    // Triples named <field>_1.._3 are written as VECTORS, the rest as SCALARS.
    const std::string& name = t.names[c];
    const bool vec = c + 2 < t.columns.size() && name.size() > 2 && name.substr(name.size() - 2) == "_1" &&
                     t.names[c + 1] == name.substr(0, name.size() - 2) + "_2" && t.names[c + 2] == name.substr(0, name.size() - 2) + "_3";
    if (vec) {
      out += "VECTORS " + name.substr(0, name.size() - 2) + " double\n";
      for (std::size_t i = 0; i < g.size(); ++i)
        out += format_double(t.columns[c][i]) + " " + format_double(t.columns[c + 1][i]) + " " + format_double(t.columns[c + 2][i]) + "\n";
      c += 3;
    } else {
      out += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
      for (std::size_t i = 0; i < g.size(); ++i) out += format_double(t.columns[c][i]) + "\n";
      c += 1;
    }
  }
  return out;
}

inline void write_vtk(const std::filesystem::path& path, const FieldTable& t, const Lattice& lattice, const std::string& title) {
  write_text(path, vtk_string(t, lattice, title));
}

/// Parses files produced by write_vtk back into a table.
inline FieldTable read_vtk(const std::filesystem::path& path) {
  std::stringstream ss(read_text(path));
  std::string word, line;
  std::getline(ss, line);
  if (line.rfind("# vtk DataFile", 0) != 0) throw IoError(path.string() + ": not a legacy VTK file");
  std::getline(ss, line);  // title
  std::getline(ss, line);
  if (line != "ASCII") throw IoError(path.string() + ": only ASCII VTK is supported");
  std::array<int, 3> dims{};
  FieldTable t;
  std::size_t points = 0;
  while (ss >> word) {
    if (word == "DATASET" || word == "ORIGIN" || word == "SPACING") {
      std::getline(ss, line);
    } else if (word == "DIMENSIONS") {
      ss >> dims[0] >> dims[1] >> dims[2];
      t.grid = Grid(dims);
    } else if (word == "POINT_DATA") {
      ss >> points;
      if (points != t.grid.size()) throw IoError(path.string() + ": POINT_DATA does not match DIMENSIONS");
    } else if (word == "VECTORS" || word == "SCALARS") {
      std::string name, type;
      ss >> name >> type;
      int comps = 3;
      if (word == "SCALARS") {
        ss >> comps;
        ss >> word >> line;  // LOOKUP_TABLE default
        comps = 1;
      }
      std::vector<std::vector<double>> cols(static_cast<std::size_t>(comps), std::vector<double>(points));
      for (std::size_t i = 0; i < points; ++i)
        for (int c = 0; c < comps; ++c) {
          std::string v;
          if (!(ss >> v)) throw IoError(path.string() + ": truncated data for " + name);
          cols[static_cast<std::size_t>(c)][i] = parse_double(v, path.string());
        }
      for (int c = 0; c < comps; ++c) {
        t.names.push_back(comps == 3 ? name + "_" + std::to_string(c + 1) : name);
        t.columns.push_back(std::move(cols[static_cast<std::size_t>(c)]));
      }
    } else {
      throw IoError(path.string() + ": unexpected token '" + word + "'");
    }
  }
  return t;
}

}  // namespace spinframe
