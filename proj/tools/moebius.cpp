// moebius: spectra of the flat, effective and curved Moebius strip.
//
//   moebius mathieu        characteristic values a_m(q), b_m(q)
//   moebius spectrum       eigenvalues of the fake / effective / true model
//   moebius converge       a -> 0 sweeps of eigenvalue or eigenvector differences
//   moebius eigenfunction  |f_k|^2 on a grid, optionally with 3-space points
//   moebius verify         invariant suite
//
// Exit codes: 0 success, 2 bad input, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <numbers>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "moebius/convergence.hpp"
#include "moebius/error.hpp"
#include "moebius/galerkin.hpp"
#include "moebius/geometry.hpp"
#include "moebius/mathieu.hpp"
#include "moebius/models.hpp"
#include "moebius/report.hpp"
#include "moebius/verify.hpp"

#ifndef MOEBIUS_VERSION
#define MOEBIUS_VERSION "0.0.0"
#endif

using namespace moebius;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Output {
  std::string format = "csv";
  std::string path;
  std::size_t threads = 0;

  Format fmt() const { return format == "json" ? Format::json : Format::csv; }
};

void add_output(CLI::App* cmd, Output& out, bool threads) {
  cmd->add_option("--format", out.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd->add_option("--output", out.path, "output file (default: stdout)");
  if (threads) cmd->add_option("--threads", out.threads, "worker threads, 0 = all cores")->capture_default_str();
}

// Radius either directly or through the circumference 2 pi R.
struct Radius {
  double R = 0.0;
  double circumference = 0.0;
  CLI::Option* r_option = nullptr;

  void add(CLI::App* cmd, double default_circumference) {
    circumference = default_circumference;
    r_option = cmd->add_option("--R", R, "radius of the centre circle");
    auto* c = cmd->add_option("--circumference", circumference, "length 2 pi R of the centre circle")->capture_default_str();
    r_option->excludes(c);
  }
  double value() const {
    const double r = r_option->count() ? R : circumference / (2.0 * std::numbers::pi);
    if (!(std::isfinite(r) && r > 0.0)) throw input_error("radius must be positive");
    return r;
  }
};

Manifest manifest(const std::string& command) {
  Manifest m;
  m.command = command;
  m.version = MOEBIUS_VERSION;
  m.timestamp = run_timestamp();
  return m;
}

std::size_t resolve_threads(std::size_t t) { return t ? t : std::max(1u, std::thread::hardware_concurrency()); }

// --- mathieu -------------------------------------------------------------

struct MathieuArgs {
  double q = kEffectiveMathieuQ;
  int max_order = 10;
  Output out;
};

void run_mathieu(const MathieuArgs& a) {
  if (a.max_order < 0) throw input_error("--max-order must be non-negative");
  const CharacteristicTable t = char_values(a.q, a.max_order);
  Table table{{"m", "a_m", "b_m"}, {}};
  for (int m = 0; m <= a.max_order; ++m)
    table.add({static_cast<long long>(m), t.a[m], m == 0 ? Cell{} : Cell{t.b[m]}});
  Manifest man = manifest("mathieu");
  man.parameters["q"] = a.q;
  man.parameters["max_order"] = a.max_order;
  emit(table, man, a.out.fmt(), a.out.path);
}

// --- spectrum ------------------------------------------------------------

struct SpectrumArgs {
  std::string model = "fake";
  double a = 0.75;
  Radius radius;
  std::size_t count = 20;
  std::size_t N = 0;
  std::size_t s_points = 0;
  std::size_t u_points = 0;
  std::string ordering = "rectangle";
  Output out;
};

BasisOrdering parse_ordering(const std::string& s) {
  return s == "strip" ? BasisOrdering::strip_spectrum : BasisOrdering::rescaled_rectangle;
}

void run_spectrum(const SpectrumArgs& a) {
  const StripParams p(a.a, a.radius.value());
  if (a.count == 0) throw input_error("--count must be at least 1");
  Manifest man = manifest("spectrum");
  man.parameters["model"] = a.model;
  man.parameters["a"] = p.a;
  man.parameters["R"] = p.R;
  man.parameters["count"] = a.count;

  if (a.model == "fake" || a.model == "effective") {
    const Spectrum spec = a.model == "fake" ? fake_spectrum(p, a.count) : effective_spectrum(p, a.count);
    Table table{{"n", "value", "multiplicity", "entry", "mode"}, {}};
    std::size_t n = 0;
    for (std::size_t e = 0; e < spec.entries.size() && n < a.count; ++e) {
      const auto& entry = spec.entries[e];
      for (std::size_t i = 0; i < entry.multiplicity() && n < a.count; ++i)
        table.add({static_cast<long long>(++n), entry.mode_values[i], static_cast<long long>(entry.multiplicity()),
                   static_cast<long long>(e + 1), to_string(entry.modes[i])});
    }
    if (a.model == "effective") man.parameters["mathieu_q"] = kEffectiveMathieuQ;
    emit(table, man, a.out.fmt(), a.out.path);
    return;
  }

  if (a.N == 0) throw input_error("--model true requires --N");
  if (a.count > a.N) throw input_error("--count must not exceed --N");
  GalerkinConfig cfg{p, a.N, a.s_points, a.u_points, GeometryMode::true_geometry, parse_ordering(a.ordering)};
  const GalerkinSolution sol = solve(cfg);
  const auto sizes = detail::grid_sizes(cfg, sol.basis);
  const auto res = residual_norms(sol, a.count);
  Table table{{"n", "value", "residual", "dominant_mode", "dominant_weight"}, {}};
  for (std::size_t k = 0; k < a.count; ++k) {
    const auto c = sol.coefficients(k);
    std::size_t best = 0;
    for (std::size_t j = 1; j < c.size(); ++j)
      if (std::abs(c[j]) > std::abs(c[best])) best = j;
    table.add({static_cast<long long>(k + 1), sol.eigenvalues()[k], res[k], to_string(fake_mode(sol.basis[best])),
               c[best] * c[best]});
  }
  man.parameters["N"] = a.N;
  man.parameters["basis_ordering"] = a.ordering;
  man.parameters["s_points"] = sizes.s_points;
  man.parameters["u_points"] = sizes.u_points;
  man.parameters["residual_s_points"] = 2 * sizes.s_points;
  man.parameters["residual_u_points"] = 2 * sizes.u_points;
  emit(table, man, a.out.fmt(), a.out.path);
}

// --- converge ------------------------------------------------------------

struct ConvergeArgs {
  std::string kind = "eigenvalue";
  Radius radius;
  double a_min = 0.01;
  double a_max = 1.5;
  std::size_t steps = 150;
  std::string grid = "uniform";
  std::size_t K = 0;  // 0: 20 for eigenvalues, 5 for eigenvectors
  std::size_t N = 72;
  double fit_min = 0.05;
  double fit_max = 0.5;
  bool no_fit = false;
  Output out;
};

void run_converge(const ConvergeArgs& a) {
  if (!(a.a_min > 0.0)) throw input_error("--a-min must be positive");
  const double R = a.radius.value();
  const bool values = a.kind == "eigenvalue";
  const std::size_t K = a.K ? a.K : (values ? 20 : 5);
  const auto grid = a.grid == "geometric" ? geometric_grid(a.a_min, a.a_max, a.steps) : uniform_grid(a.a_min, a.a_max, a.steps);
  SweepOptions opts;
  opts.threads = resolve_threads(a.out.threads);
  const SweepResult sweep = values ? eigenvalue_sweep(R, grid, K, a.N, opts) : eigenvector_sweep(R, grid, K, a.N, opts);

  Table table{{"row", "a", "n", "mode", "lambda_eff", "lambda_true", "distance", "ratio", "slope"}, {}};
  for (const auto& pt : sweep.points)
    for (std::size_t n = 0; n < K; ++n)
      table.add({std::string("data"), pt.a, static_cast<long long>(n + 1), to_string(pt.modes[n]), pt.effective[n],
                 pt.galerkin[n], values ? Cell{} : Cell{pt.distance[n]}, pt.ratio[n], Cell{}});
  if (!a.no_fit)
    for (std::size_t n = 1; n <= K; ++n)
      table.add({std::string("slope"), Cell{}, static_cast<long long>(n), Cell{}, Cell{}, Cell{}, Cell{}, Cell{},
                 fit_rate(sweep, n, a.fit_min, a.fit_max)});

  Manifest man = manifest("converge");
  man.parameters["kind"] = a.kind;
  man.parameters["R"] = R;
  man.parameters["a_min"] = a.a_min;
  man.parameters["a_max"] = a.a_max;
  man.parameters["steps"] = a.steps;
  man.parameters["grid"] = a.grid;
  man.parameters["K"] = K;
  man.parameters["N"] = a.N;
  man.parameters["basis_ordering"] = "rectangle";
  if (!a.no_fit) {
    man.parameters["fit_min"] = a.fit_min;
    man.parameters["fit_max"] = a.fit_max;
  }
  emit(table, man, a.out.fmt(), a.out.path);
}

// --- eigenfunction -------------------------------------------------------

struct EigenfunctionArgs {
  std::size_t k = 1;
  double a = 1.3;
  Radius radius;
  std::size_t N = 96;
  std::string grid = "129x33";
  bool embed3d = false;
  Output out;
};

std::pair<std::size_t, std::size_t> parse_grid(const std::string& g) {
  std::size_t ms = 0, mu = 0;
  char tail = 0;
  if (std::sscanf(g.c_str(), "%zux%zu%c", &ms, &mu, &tail) != 2 || ms < 2 || mu < 2)
    throw input_error("--grid must look like MsxMu with both counts >= 2, got '" + g + "'");
  return {ms, mu};
}

void run_eigenfunction(const EigenfunctionArgs& a) {
  const StripParams p(a.a, a.radius.value());
  const auto [ms, mu] = parse_grid(a.grid);
  if (a.k < 1 || a.k > a.N) throw input_error("--k must lie in 1..N");
  const GalerkinSolution sol = solve(GalerkinConfig{p, a.N});
  const std::size_t k = a.k - 1;
  // sign fixed by the largest coefficient, so reruns agree
  const auto c = sol.coefficients(k);
  std::size_t best = 0;
  for (std::size_t j = 1; j < c.size(); ++j)
    if (std::abs(c[j]) > std::abs(c[best])) best = j;
  const double sign = c[best] < 0 ? -1.0 : 1.0;

  Table table{{"s", "u", "value", "density"}, {}};
  if (a.embed3d) table.columns.insert(table.columns.end(), {"x", "y", "z"});
  for (std::size_t i = 0; i < ms; ++i) {
    const double s = p.length() * static_cast<double>(i) / static_cast<double>(ms - 1);
    for (std::size_t j = 0; j < mu; ++j) {
      const double u = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(mu - 1);
      const double v = sign * sol.evaluate(k, s, u);
      std::vector<Cell> row{s, u, v, v * v};
      if (a.embed3d) {
        const auto x = embed(p, s, p.a * u);
        row.insert(row.end(), {x[0], x[1], x[2]});
      }
      table.add(std::move(row));
    }
  }
  Manifest man = manifest("eigenfunction");
  man.parameters["k"] = a.k;
  man.parameters["a"] = p.a;
  man.parameters["R"] = p.R;
  man.parameters["N"] = a.N;
  man.parameters["grid"] = {ms, mu};
  man.parameters["embed3d"] = a.embed3d;
  man.parameters["eigenvalue"] = sol.eigenvalues()[k];
  emit(table, man, a.out.fmt(), a.out.path);
}

// --- verify --------------------------------------------------------------

struct VerifyArgs {
  std::string inject;
  Output out;
};

int run_verify_cmd(const VerifyArgs& a) {
  VerifyOptions opt;
  if (a.inject == "kappa-sign") opt.geodesic_curvature_sign = -1.0;
  else if (a.inject == "ce-even-coupling") opt.recurrence.ce_even_coupling_scale = 1.0;
  else if (!a.inject.empty()) throw input_error("unknown fault '" + a.inject + "'");
  const auto checks = run_verify(opt);
  Table table{{"module", "check", "observed", "threshold", "status"}, {}};
  for (const auto& c : checks)
    table.add({c.module, c.name, c.observed, c.expected, std::string(c.passed ? "PASS" : "FAIL")});
  Manifest man = manifest("verify");
  if (!a.inject.empty()) man.parameters["inject"] = a.inject;
  emit(table, man, a.out.fmt(), a.out.path);
  for (const auto& c : checks)
    if (!c.passed)
      std::cerr << "verify: FAIL [" << c.module << "] " << c.name << ": observed " << format_number(c.observed)
                << ", expected " << format_number(c.expected) << "\n";
  return all_passed(checks) ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* seedless = std::getenv("MOEBIUS_SEEDLESS"); seedless && std::string(seedless) != "1") {
    std::cerr << "moebius: MOEBIUS_SEEDLESS may only be 1 (nothing here is random)\n";
    return kExitInput;
  }

  CLI::App app{"Spectra of the flat, effective and curved Moebius strip"};
  app.set_version_flag("--version", MOEBIUS_VERSION);
  app.require_subcommand(1);

  MathieuArgs ma;
  auto* mathieu = app.add_subcommand("mathieu", "Mathieu characteristic values a_m(q), b_m(q)");
  mathieu->add_option("--q", ma.q, "Mathieu parameter")->capture_default_str();
  mathieu->add_option("--max-order", ma.max_order, "largest order m")->capture_default_str();
  add_output(mathieu, ma.out, false);

  SpectrumArgs sa;
  auto* spectrum = app.add_subcommand("spectrum", "lowest eigenvalues of one model");
  spectrum->add_option("--model", sa.model, "fake, effective or true")
      ->check(CLI::IsMember({"fake", "effective", "true"}))
      ->capture_default_str();
  spectrum->add_option("--a", sa.a, "half-width")->capture_default_str();
  sa.radius.add(spectrum, 13.2);
  spectrum->add_option("--count", sa.count, "number of eigenvalues")->capture_default_str();
  spectrum->add_option("--N", sa.N, "Galerkin basis size (model true)");
  spectrum->add_option("--s-points", sa.s_points, "trapezoid nodes along the strip (0 = automatic)");
  spectrum->add_option("--u-points", sa.u_points, "Gauss-Legendre nodes across the strip (0 = automatic)");
  spectrum->add_option("--basis-ordering", sa.ordering, "rectangle (a-independent) or strip")
      ->check(CLI::IsMember({"rectangle", "strip"}))
      ->capture_default_str();
  add_output(spectrum, sa.out, false);

  ConvergeArgs ca;
  auto* converge = app.add_subcommand("converge", "a -> 0 sweep against the effective model");
  converge->add_option("--kind", ca.kind, "eigenvalue or eigenvector")
      ->check(CLI::IsMember({"eigenvalue", "eigenvector"}))
      ->capture_default_str();
  ca.radius.add(converge, 18.0);
  converge->add_option("--a-min", ca.a_min)->capture_default_str();
  converge->add_option("--a-max", ca.a_max)->capture_default_str();
  converge->add_option("--steps", ca.steps, "grid points")->capture_default_str();
  converge->add_option("--grid", ca.grid, "uniform or geometric")
      ->check(CLI::IsMember({"uniform", "geometric"}))
      ->capture_default_str();
  converge->add_option("--K", ca.K, "compared eigenpairs (default 20 / 5)");
  converge->add_option("--N", ca.N, "Galerkin basis size")->capture_default_str();
  converge->add_option("--fit-min", ca.fit_min, "slope window lower end")->capture_default_str();
  converge->add_option("--fit-max", ca.fit_max, "slope window upper end")->capture_default_str();
  converge->add_flag("--no-fit", ca.no_fit, "omit the slope rows");
  add_output(converge, ca.out, true);

  EigenfunctionArgs ea;
  auto* eigenfunction = app.add_subcommand("eigenfunction", "density |f_k|^2 of a Galerkin eigenfunction on a grid");
  eigenfunction->add_option("--k", ea.k, "eigenpair index, 1-based")->capture_default_str();
  eigenfunction->add_option("--a", ea.a, "half-width")->capture_default_str();
  ea.radius.add(eigenfunction, 18.0);
  eigenfunction->add_option("--N", ea.N, "Galerkin basis size")->capture_default_str();
  eigenfunction->add_option("--grid", ea.grid, "MsxMu, endpoints included")->capture_default_str();
  eigenfunction->add_flag("--embed3d", ea.embed3d, "append the embedded point (x, y, z)");
  add_output(eigenfunction, ea.out, false);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--inject", va.inject, "fault injection for self-tests")->group("");
  add_output(verify, va.out, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*mathieu) run_mathieu(ma);
    else if (*spectrum) run_spectrum(sa);
    else if (*converge) run_converge(ca);
    else if (*eigenfunction) run_eigenfunction(ea);
    else if (*verify) return run_verify_cmd(va);
    return 0;
  } catch (const input_error& e) {
    std::cerr << "moebius: " << e.what() << "\n";
    return kExitInput;
  } catch (const numerical_error& e) {
    std::cerr << "moebius: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "moebius: " << e.what() << "\n";
    return kExitNumerical;
  }
}
