#include "nltv/cli.hpp"

#include "nltv/gamma.hpp"
#include "nltv/io.hpp"
#include "nltv/kernel.hpp"
#include "nltv/minimizer.hpp"
#include "nltv/oracle.hpp"
#include "nltv/random.hpp"
#include "nltv/schemes_1d.hpp"
#include "nltv/schemes_2d.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace nltv::cli {

namespace {

const char* command_name(Command c) {
  switch (c) {
    case Command::Eval: return "eval";
    case Command::Verify: return "verify";
    case Command::Denoise: return "denoise";
    case Command::Gamma: return "gamma";
    case Command::Table: return "table";
  }
  return "?";
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

bool ends_with_pgm(const std::string& path) {
  if (path.size() < 4) return false;
  std::string ext = path.substr(path.size() - 4);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm";
}

KernelKind parse_kernel(const std::string& name) {
  if (name == "box") return KernelKind::Box1D;
  if (name == "box2") return KernelKind::Box1DWide;
  if (name == "disc") return KernelKind::Disc2D;
  if (name == "square") return KernelKind::Square2D;
  throw UsageError("--kernel: unknown kernel '" + name + "'");
}

// The help text travels through this exception so parse_args stays pure.
struct HelpRequested {
  std::string text;
};

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Non-local total variation functionals: evaluation, verification and denoising", "nltv"};
  app.require_subcommand(1, 1);

  const auto kernels = CLI::IsMember({"box", "box2", "disc", "square"});
  double scale = 0.0;
  std::vector<CLI::Option*> scale_opts;

  auto* eval = app.add_subcommand("eval", "Closed-form value of the regularizer");
  eval->add_option("--family", cfg.family, "pc, pc-wide, spline, haar or image")
      ->required()
      ->check(CLI::IsMember({"pc", "pc-wide", "spline", "haar", "image"}));
  eval->add_option("--input", cfg.input_path, "CSV signal or PGM image");
  eval->add_option("--kernel", cfg.kernel)->check(kernels);
  eval->add_option("--k", cfg.k, "Haar level");
  eval->add_option("--j", cfg.j, "Haar position");
  scale_opts.push_back(eval->add_option("--scale", scale, "Haar kernel scale"));
  eval->add_option("--out", cfg.output_path);

  auto* verify = app.add_subcommand("verify", "Closed form against the quadrature oracle");
  verify->add_option("--family", cfg.family)->required()->check(CLI::IsMember({"pc", "pc-wide", "spline", "image"}));
  verify->add_option("--kernel", cfg.kernel)->check(kernels);
  verify->add_option("--n", cfg.n, "Grid size of the random input");
  verify->add_option("--samples", cfg.samples);
  verify->add_option("--seed", cfg.seed);
  verify->add_option("--input", cfg.input_path, "Use this input instead of a random one");
  verify->add_option("--method", cfg.method)->check(CLI::IsMember({"mc", "gauss"}));
  verify->add_option("--points", cfg.points, "Gauss points per piece");
  verify->add_option("--tol", cfg.tol, "Relative tolerance");
  verify->add_option("--out", cfg.output_path);

  auto* denoise = app.add_subcommand("denoise", "Minimize the regularized energy");
  denoise->add_option("--input", cfg.input_path)->required();
  denoise->add_option("--alpha", cfg.alpha)->required();
  denoise->add_option("--p", cfg.p);
  denoise->add_option("--kernel", cfg.kernel)->check(kernels);
  scale_opts.push_back(denoise->add_option("--scale", scale));
  denoise->add_option("--solver", cfg.solver)->check(CLI::IsMember({"pd", "smooth"}));
  denoise->add_option("--scheme", cfg.scheme)->check(CLI::IsMember({"auto", "closed", "oracle"}));
  denoise->add_option("--tol", cfg.solver_tol);
  denoise->add_option("--eps", cfg.eps);
  denoise->add_option("--max-iter", cfg.max_iter);
  denoise->add_option("--points", cfg.points);
  denoise->add_option("--out", cfg.output_path)->required();
  denoise->add_option("--trace", cfg.trace_path);

  auto* gamma = app.add_subcommand("gamma", "Minimizers across kernel scales against the limit problem");
  gamma->add_option("--input", cfg.input_path)->required();
  gamma->add_option("--alpha", cfg.alpha)->required();
  gamma->add_option("--scales", cfg.scales)->required()->delimiter(',');
  gamma->add_option("--p", cfg.p);
  gamma->add_option("--kernel", cfg.kernel)->check(kernels);
  gamma->add_option("--solver", cfg.solver)->check(CLI::IsMember({"pd", "smooth"}));
  gamma->add_option("--tol", cfg.solver_tol);
  gamma->add_option("--max-iter", cfg.max_iter);
  gamma->add_option("--points", cfg.points);
  gamma->add_option("--out", cfg.output_path);

  auto* table = app.add_subcommand("table", "Tabulate closed forms");
  table->add_option("name", cfg.table)->required()->check(CLI::IsMember({"haar"}));
  table->add_option("--kmax", cfg.kmax);
  table->add_option("--nmax", cfg.nmax);
  table->add_option("--out", cfg.output_path);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (eval->parsed()) cfg.command = Command::Eval;
  if (verify->parsed()) cfg.command = Command::Verify;
  if (denoise->parsed()) cfg.command = Command::Denoise;
  if (gamma->parsed()) cfg.command = Command::Gamma;
  if (table->parsed()) cfg.command = Command::Table;
  for (auto* opt : scale_opts) {
    if (opt->count() > 0) cfg.scale = scale;
  }

  switch (cfg.command) {
    case Command::Eval:
      if (cfg.family == "haar") {
        require(cfg.scale.has_value(), "--scale is required for the haar family");
        require(HaarIndex{cfg.k, cfg.j}.valid(), "--k/--j: not a valid Haar index");
      } else {
        require(!cfg.input_path.empty(), "--input is required for family " + cfg.family);
      }
      break;
    case Command::Verify:
      require(cfg.n >= 2 && cfg.n <= 4096, "--n must be in [2, 4096]");
      require(cfg.method == "gauss" || cfg.samples >= 10'000, "--samples must be at least 10000");
      require(cfg.samples <= 1'000'000'000, "--samples must be at most 1e9");
      require(cfg.points >= 2 && cfg.points <= 64, "--points must be in [2, 64]");
      require(cfg.tol > 0.0, "--tol must be positive");
      break;
    case Command::Denoise:
    case Command::Gamma:
      require(std::isfinite(cfg.alpha) && cfg.alpha > 0.0, "--alpha: alpha must be positive");
      require(std::isfinite(cfg.p) && cfg.p >= 1.0, "--p must be >= 1");
      require(!cfg.scale || (std::isfinite(*cfg.scale) && *cfg.scale > 0.0), "--scale must be positive");
      require(cfg.solver_tol > 0.0, "--tol must be positive");
      require(cfg.eps > 0.0, "--eps must be positive");
      require(cfg.max_iter >= 1, "--max-iter must be >= 1");
      require(cfg.points >= 2 && cfg.points <= 64, "--points must be in [2, 64]");
      if (cfg.command == Command::Gamma) {
        require(!cfg.scales.empty(), "--scales must list at least one scale");
        for (std::size_t i = 0; i < cfg.scales.size(); ++i) {
          require(cfg.scales[i] > 0.0, "--scales must be positive");
          require(i == 0 || cfg.scales[i] > cfg.scales[i - 1], "--scales must be increasing");
        }
      }
      break;
    case Command::Table:
      require(cfg.kmax >= 0 && cfg.kmax <= 20, "--kmax must be in [0, 20]");
      require(cfg.nmax >= 1 && cfg.nmax <= 1'000'000, "--nmax must be in [1, 1000000]");
      break;
  }
  return cfg;
}

std::string canonical(const RunConfig& c) {
  std::string scales;
  for (double s : c.scales) scales += format_real(s) + ",";
  return fmt::format(
      "command={};family={};kernel={};input={};output={};trace={};scale={};n={};k={};j={};samples={};seed={};"
      "method={};points={};tol={};alpha={};p={};solver={};scheme={};solver_tol={};eps={};max_iter={};scales={};"
      "table={};kmax={};nmax={}",
      command_name(c.command), c.family, c.kernel, c.input_path, c.output_path, c.trace_path,
      c.scale ? format_real(*c.scale) : "", c.n, c.k, c.j, c.samples, c.seed, c.method, c.points,
      format_real(c.tol), format_real(c.alpha), format_real(c.p), c.solver, c.scheme, format_real(c.solver_tol),
      format_real(c.eps), c.max_iter, scales, c.table, c.kmax, c.nmax);
}

namespace {

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output_path.empty()) {
    out << text;
  } else {
    write_text_file(cfg.output_path, text);
  }
}

KernelKind kernel_or(const RunConfig& cfg, KernelKind fallback) {
  return cfg.kernel.empty() ? fallback : parse_kernel(cfg.kernel);
}

int run_eval(const RunConfig& cfg, std::ostream& out) {
  std::string text = report_header(canonical(cfg)) + "\n";
  if (cfg.family == "haar") {
    require(kernel_or(cfg, KernelKind::Box1D) == KernelKind::Box1D, "--kernel: the haar family uses box");
    const double v = eval_haar({cfg.k, cfg.j}, *cfg.scale);
    text += fmt::format("family,k,j,n,value\nhaar,{},{},{},{}\n", cfg.k, cfg.j, format_real(*cfg.scale), format_real(v));
    emit(cfg, text, out);
    return kExitOk;
  }
  double value = 0.0;
  int n = 0;
  KernelKind kind = KernelKind::Box1D;
  if (cfg.family == "image") {
    kind = kernel_or(cfg, KernelKind::Disc2D);
    require(kind == KernelKind::Disc2D || kind == KernelKind::Square2D, "--kernel: the image family needs disc or square");
    const Image2D img = read_pgm(cfg.input_path);
    n = img.n();
    value = eval_image(img, kind);
  } else {
    const std::vector<double> v = read_signal_csv(cfg.input_path);
    if (cfg.family == "pc") {
      kind = kernel_or(cfg, KernelKind::Box1D);
      require(kind == KernelKind::Box1D, "--kernel: the pc family uses box");
      const PiecewiseConstant1D f(v);
      n = f.n();
      value = eval_pc_box(f);
    } else if (cfg.family == "pc-wide") {
      kind = kernel_or(cfg, KernelKind::Box1DWide);
      require(kind == KernelKind::Box1DWide, "--kernel: the pc-wide family uses box2");
      const PiecewiseConstant1D f(v);
      n = f.n();
      value = eval_pc_box_wide(f);
    } else {
      kind = kernel_or(cfg, KernelKind::Box1D);
      require(kind == KernelKind::Box1D, "--kernel: the spline family uses box");
      const Spline1D f(v);
      n = f.n();
      value = eval_spline(f);
    }
  }
  text += fmt::format("family,kernel,n,value\n{},{},{},{}\n", cfg.family, to_string(kind), n, format_real(value));
  emit(cfg, text, out);
  return kExitOk;
}

int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  KernelKind kind;
  if (cfg.family == "pc" || cfg.family == "spline") {
    kind = kernel_or(cfg, KernelKind::Box1D);
    require(kind == KernelKind::Box1D, "--kernel: family " + cfg.family + " uses box");
  } else if (cfg.family == "pc-wide") {
    kind = kernel_or(cfg, KernelKind::Box1DWide);
    require(kind == KernelKind::Box1DWide, "--kernel: the pc-wide family uses box2");
  } else {
    kind = kernel_or(cfg, KernelKind::Disc2D);
    require(kind == KernelKind::Disc2D || kind == KernelKind::Square2D, "--kernel: the image family needs disc or square");
  }

  OracleConfig oc;
  oc.method = cfg.method == "mc" ? OracleMethod::MonteCarlo : OracleMethod::TensorGauss;
  oc.samples = cfg.samples;
  oc.seed = cfg.seed;
  oc.points_per_cell_axis = cfg.points;

  // Random input drawn from its own stream so that it does not depend on
  // the oracle's draws.
  CounterRng rng(cfg.seed, 0x696e707574ULL);
  auto random_values = [&](std::size_t count) {
    std::vector<double> v(count);
    for (double& x : v) x = rng.uniform();
    return v;
  };

  double closed = 0.0;
  EvalReport rep;
  int n = cfg.n;
  if (cfg.family == "image") {
    const Image2D img = cfg.input_path.empty()
                            ? Image2D(n, random_values(static_cast<std::size_t>(n) * n))
                            : read_pgm(cfg.input_path);
    n = img.n();
    require(n >= 2, "--n must be >= 2");
    closed = eval_image(img, kind);
    rep = oracle_eval(img, Kernel(kind, n), oc);
  } else if (cfg.family == "spline") {
    const Spline1D f(cfg.input_path.empty() ? random_values(n + 1) : read_signal_csv(cfg.input_path));
    n = f.n();
    require(n >= 2, "--n must be >= 2");
    closed = eval_spline(f);
    rep = oracle_eval(f, Kernel(kind, n), oc);
  } else {
    const PiecewiseConstant1D f(cfg.input_path.empty() ? random_values(n) : read_signal_csv(cfg.input_path));
    n = f.n();
    require(n >= 2, "--n must be >= 2");
    closed = cfg.family == "pc" ? eval_pc_box(f) : eval_pc_box_wide(f);
    rep = oracle_eval(f, Kernel(kind, n), oc);
  }
  const double diff = std::abs(rep.value - closed);
  const double rel = closed != 0.0 ? diff / std::abs(closed) : diff;
  std::string text = report_header(canonical(cfg)) + "\n";
  text += "family,kernel,n,method,closed_form,oracle,stderr,richardson_delta,relative_error\n";
  text += fmt::format("{},{},{},{},{},{},{},{},{}\n", cfg.family, to_string(kind), n, cfg.method, format_real(closed),
                      format_real(rep.value), format_real(rep.stderr_estimate), format_real(rep.richardson_delta),
                      format_real(rel));
  emit(cfg, text, out);
  if (!(rel <= cfg.tol)) {
    err << fmt::format("verify: relative error {} exceeds tolerance {}\n", format_real(rel), format_real(cfg.tol));
    return kExitVerify;
  }
  return kExitOk;
}

DataTerm load_data(const RunConfig& cfg) {
  if (ends_with_pgm(cfg.input_path)) return DataTerm::from_image(read_pgm(cfg.input_path));
  return DataTerm::from_signal(read_signal_csv(cfg.input_path));
}

SolverConfig solver_config(const RunConfig& cfg) {
  SolverConfig s;
  s.method = cfg.solver == "pd" ? SolverMethod::PrimalDual : SolverMethod::Smoothed;
  s.tol = cfg.solver_tol;
  s.eps = cfg.eps;
  s.max_iter = cfg.max_iter;
  return s;
}

int run_denoise(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const DataTerm data = load_data(cfg);
  const KernelKind kind = kernel_or(cfg, data.dim == 1 ? KernelKind::Box1D : KernelKind::Disc2D);
  EnergyParams params;
  params.p = cfg.p;
  params.alpha = cfg.alpha;
  params.grid_n = data.grid_n;
  params.kernel = Kernel(kind, cfg.scale.value_or(data.grid_n));
  require(params.kernel.dim() == data.dim, "--kernel: kernel dimension does not match the input");
  const bool matched = params.kernel.scale() == static_cast<double>(data.grid_n);
  if (cfg.scheme == "oracle" || (cfg.scheme == "auto" && !matched)) {
    params.scheme = Scheme::Oracle;
  } else {
    require(matched, "--scheme closed needs --scale equal to the grid size");
    params.scheme = data.dim == 1 ? Scheme::ClosedForm1D : Scheme::ClosedForm2D;
  }
  params.oracle.points_per_cell_axis = cfg.points;
  const DenoiseResult r = denoise(data, params, solver_config(cfg));

  if (ends_with_pgm(cfg.output_path)) {
    require(data.dim == 2, "--out: PGM output needs image input");
    write_pgm(cfg.output_path, Image2D(data.grid_n, r.minimizer));
  } else {
    write_signal_csv(cfg.output_path, r.minimizer, report_header(canonical(cfg)));
  }
  if (!cfg.trace_path.empty()) {
    std::string trace = report_header(canonical(cfg)) + "\niteration,energy\n";
    for (std::size_t i = 0; i < r.energy_trace.size(); ++i) {
      trace += fmt::format("{},{}\n", i + 1, format_real(r.energy_trace[i]));
    }
    write_text_file(cfg.trace_path, trace);
  }
  out << report_header(canonical(cfg)) << "\n"
      << "iterations,converged,energy,fidelity,regularizer\n"
      << fmt::format("{},{},{},{},{}\n", r.iterations, r.converged ? 1 : 0,
                     format_real(r.energy_trace.empty() ? 0.0 : r.energy_trace.back()), format_real(r.fidelity_value),
                     format_real(r.regularizer_value));
  if (!r.converged) {
    err << fmt::format("denoise: no convergence within {} iterations\n", cfg.max_iter);
    return kExitNonConvergence;
  }
  return kExitOk;
}

int run_gamma(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const DataTerm data = load_data(cfg);
  GammaOptions opt;
  opt.kernel = kernel_or(cfg, data.dim == 1 ? KernelKind::Box1D : KernelKind::Disc2D);
  require(Kernel(opt.kernel, 1.0).dim() == data.dim, "--kernel: kernel dimension does not match the input");
  opt.solver = solver_config(cfg);
  opt.oracle.points_per_cell_axis = cfg.points;
  const GammaTable t = gamma_experiment(data, cfg.p, cfg.alpha, cfg.scales, opt);
  std::string text = report_header(canonical(cfg)) + "\n";
  text += fmt::format("# reference {}\n", to_string(t.reference));
  text += "scale,distance,energy,iterations,converged\n";
  bool all = true;
  for (const GammaRow& row : t.rows) {
    text += fmt::format("{},{},{},{},{}\n", format_real(row.scale), format_real(row.distance), format_real(row.energy),
                        row.iterations, row.converged ? 1 : 0);
    all = all && row.converged;
  }
  emit(cfg, text, out);
  if (!all) {
    err << "gamma: at least one scale did not converge\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int run_table(const RunConfig& cfg, std::ostream& out) {
  std::string text = report_header(canonical(cfg)) + "\nk,j,n,value\n";
  for (int k = 0; k <= cfg.kmax; ++k) {
    const int jmin = k == 0 ? 0 : 1;
    const int jmax = k == 0 ? 1 : (1 << k);
    for (int j = jmin; j <= jmax; ++j) {
      for (int n = 1; n <= cfg.nmax; ++n) {
        try {
          text += fmt::format("{},{},{},{}\n", k, j, n, format_real(eval_haar({k, j}, n)));
        } catch (const std::domain_error&) {
          // Scale between branches; no closed form.
        }
      }
    }
  }
  emit(cfg, text, out);
  return kExitOk;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  switch (cfg.command) {
    case Command::Eval: return run_eval(cfg, out);
    case Command::Verify: return run_verify(cfg, out, err);
    case Command::Denoise: return run_denoise(cfg, out, err);
    case Command::Gamma: return run_gamma(cfg, out, err);
    case Command::Table: return run_table(cfg, out);
  }
  return kExitUsage;
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(parse_args(args), out, err);
  } catch (const HelpRequested& h) {
    out << h.text;
    return kExitOk;
  } catch (const UsageError& e) {
    err << "nltv: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "nltv: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "nltv: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "nltv: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace nltv::cli
