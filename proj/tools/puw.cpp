#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "puw/grid.hpp"
#include "puw/io.hpp"
#include "puw/lsq.hpp"
#include "puw/model.hpp"
#include "puw/oracle.hpp"
#include "puw/solver.hpp"
#include "puw/synth.hpp"

namespace {

using namespace puw;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

WrappedImage load_wrapped(const std::string& path) {
  Raster<double> raster = read_raster(path);
  try {
    return WrappedImage(std::move(raster));
  } catch (const std::invalid_argument& e) {
    throw FormatError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------- synth ----

struct SynthOpts {
  std::string spec_path;
  std::string preset;
  std::string out_spec, out_surface, out_wrapped, out_shifts;
  int rows = 0, cols = 0;
  std::int64_t seed = -1;
};

void run_synth(const SynthOpts& o) {
  if (o.spec_path.empty() == o.preset.empty()) {
    throw std::invalid_argument("synth needs exactly one of --spec or --preset");
  }
  TerrainSpec spec;
  if (!o.spec_path.empty()) {
    std::ifstream in(o.spec_path);
    if (!in) throw IoError("cannot open for reading: " + o.spec_path);
    spec = parse_terrain_spec(in);
    if (o.rows > 0) spec.rows = o.rows;
    if (o.cols > 0) spec.cols = o.cols;
    if (o.seed >= 0) spec.seed = static_cast<std::uint64_t>(o.seed);
  } else {
    const int rows = o.rows > 0 ? o.rows : 100;
    const int cols = o.cols > 0 ? o.cols : 100;
    const std::uint64_t seed = o.seed >= 0 ? static_cast<std::uint64_t>(o.seed) : 1;
    if (o.preset == "default") {
      spec = preset_default(rows, cols, seed);
    } else if (o.preset == "smooth") {
      spec = preset_smooth(rows, cols, seed);
    } else if (o.preset == "hard") {
      spec = preset_hard(rows, cols, seed);
    } else {
      throw std::invalid_argument("unknown preset: " + o.preset);
    }
  }

  const UnwrappedSurface surface = generate(spec);
  const WrapResult wrapped = wrap_surface(surface);

  if (!o.out_spec.empty()) {
    std::ofstream out(o.out_spec, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + o.out_spec);
    serialize_terrain_spec(spec, out);
    out.flush();
    if (!out) throw IoError("write failed: " + o.out_spec);
  }
  if (!o.out_surface.empty()) write_raster(o.out_surface, surface.psi);
  if (!o.out_wrapped.empty()) write_raster(o.out_wrapped, wrapped.image.phi);
  if (!o.out_shifts.empty()) write_shifts(o.out_shifts, wrapped.shifts);
}

// --------------------------------------------------------------- greedy ----

struct GreedyOpts {
  std::string in, out_shifts;
};

void run_greedy(const GreedyOpts& o) {
  const WrappedImage img = load_wrapped(o.in);
  const ShiftField shifts = greedy_shift_field(img);
  std::cout << "violations=" << curl(shifts).violation_count << "\n";
  if (!o.out_shifts.empty()) write_shifts(o.out_shifts, shifts);
}

// --------------------------------------------------------------- unwrap ----

struct UnwrapOpts {
  std::string in, out_surface, out_shifts, out_entropy, report;
  double sigma = 0.3, t_start = 10.0, t_end = 0.05, tol = 1e-7;
  int t_steps = 20, sweeps = 10;
  bool randomize = false;
  std::uint64_t seed = 0;
};

void run_unwrap(const UnwrapOpts& o) {
  if (!(o.sigma > 0.0)) throw std::invalid_argument("--sigma must be positive");
  const WrappedImage img = load_wrapped(o.in);
  const AnnealSchedule schedule =
      AnnealSchedule::geometric(o.t_start, o.t_end, o.t_steps, o.sweeps, o.tol);
  const SolveReport result = anneal(img, schedule, o.sigma, SolveOptions{o.randomize, o.seed});

  if (!o.report.empty()) write_report_csv(o.report, result);
  if (!o.out_shifts.empty()) write_shifts(o.out_shifts, result.map_shifts);
  if (!o.out_entropy.empty()) write_entropy(o.out_entropy, entropy_map(result.beliefs));

  const int violations = curl(result.map_shifts).violation_count;
  std::cout << "violations=" << violations << "\n";
  std::cout << "converged=" << (result.converged ? "true" : "false") << "\n";
  std::cout << "final_F=" << fmt(result.records.back().free_energy) << "\n";
  std::cout << "final_mean_entropy=" << fmt(mean_entropy(result.beliefs)) << "\n";

  if (violations != 0) {
    // Shifts, entropy, and report are on disk for the hybrid path; a surface
    // would be a lie, so refuse with the dedicated status code.
    throw CurlViolationError(violations);
  }
  write_raster(o.out_surface, integrate(img, result.map_shifts).psi);
}

// ------------------------------------------------------------ lsq/hybrid ----

struct FitOpts {
  std::string in, shifts, out_surface;
  double tolerance = 1e-8;
  int max_iterations = 0;
};

void finish_fit(const LsqResult& fit, const std::string& out_surface) {
  std::cout << "iterations=" << fit.iterations << "\n";
  std::cout << "relative_residual=" << fmt(fit.residual_norm) << "\n";
  write_raster(out_surface, fit.surface.psi);
  if (!fit.converged) {
    std::cerr << "warning: least-squares solver stopped above tolerance"
              << " (relative residual " << fmt(fit.residual_norm)
              << "); surface written anyway\n";
    throw std::runtime_error("least-squares solver did not converge");
  }
}

void run_lsq(const FitOpts& o) {
  const WrappedImage img = load_wrapped(o.in);
  finish_fit(lsq_unwrap(img, {o.tolerance, o.max_iterations}), o.out_surface);
}

void run_hybrid(const FitOpts& o) {
  const WrappedImage img = load_wrapped(o.in);
  const ShiftField shifts = read_shifts(o.shifts);
  finish_fit(hybrid_unwrap(img, shifts, {o.tolerance, o.max_iterations}), o.out_surface);
}

// ----------------------------------------------------------------- eval ----

struct EvalOpts {
  std::string truth, estimate;
};

void run_eval(const EvalOpts& o) {
  const UnwrappedSurface truth{read_raster(o.truth)};
  const UnwrappedSurface estimate{read_raster(o.estimate)};
  const Metrics m = evaluate(truth, estimate);
  std::cout << "exact_match=" << (m.exact_match ? "true" : "false") << "\n";
  std::cout << "rmse=" << fmt(m.rmse) << "\n";
  std::cout << "max_abs_dev=" << fmt(m.max_abs_dev) << "\n";
  std::cout << "offset=" << m.offset << "\n";
  std::cout << "wrapped_rmse=" << fmt(m.wrapped_rmse) << "\n";
}

// -------------------------------------------------------------- entropy ----

struct EntropyOpts {
  std::string beliefs_report, out;
};

Raster<double> pixel_entropy(const EntropyMap& e) {
  const int rows = e.a.rows(), cols = e.b.cols();
  Raster<double> out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double sum = 0.0;
      int count = 0;
      if (j > 0) sum += e.a(i, j - 1), ++count;
      if (j + 1 < cols) sum += e.a(i, j), ++count;
      if (i > 0) sum += e.b(i - 1, j), ++count;
      if (i + 1 < rows) sum += e.b(i, j), ++count;
      out(i, j) = sum / count;
    }
  }
  return out;
}

void run_entropy(const EntropyOpts& o) {
  const EntropyMap entropy = read_entropy(o.beliefs_report);
  const PgmScale scale = write_pgm(o.out, pixel_entropy(entropy), /*invert=*/true);
  std::cerr << "pgm scale: min=" << fmt(scale.min) << " max=" << fmt(scale.max)
            << " (black = high entropy)\n";
}

// --------------------------------------------------------------- oracle ----

struct OracleOpts {
  std::string in;
  double sigma = 0.3, temp = 1.0;
};

void run_oracle(const OracleOpts& o) {
  const WrappedImage img = load_wrapped(o.in);
  const ExactPosterior post = enumerate_posterior(img, ModelParams(o.temp, o.sigma));
  std::cout << "rows=" << post.rows << " cols=" << post.cols << " edges=" << post.edge_count
            << "\n";
  std::cout << "Z=" << fmt(post.partition_value) << "\n";
  std::cout << "logZ=" << fmt(post.log_partition) << "\n";
  std::cout << "map_index=" << post.map_index << "\n";
  std::cout << "map_probability=" << fmt(post.map_probability) << "\n";
  const auto print_family = [](const char* name, const Raster<std::int8_t>& raster) {
    for (int i = 0; i < raster.rows(); ++i) {
      for (int j = 0; j < raster.cols(); ++j) {
        std::cout << "map_" << name << "[" << i << "][" << j
                  << "]=" << static_cast<int>(raster(i, j)) << "\n";
      }
    }
  };
  print_family("a", post.map_config.a);
  print_family("b", post.map_config.b);
  const auto print_marginals = [](const char* name, const Raster<Prob3>& raster) {
    for (int i = 0; i < raster.rows(); ++i) {
      for (int j = 0; j < raster.cols(); ++j) {
        const Prob3& t = raster(i, j);
        std::cout << "marginal_" << name << "[" << i << "][" << j << "]=" << fmt(t(-1)) << ","
                  << fmt(t(0)) << "," << fmt(t(1)) << "\n";
      }
    }
  };
  print_marginals("a", post.edge_marginals.alpha);
  print_marginals("b", post.edge_marginals.beta);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D phase unwrapping: annealed factorized inference over integer shift fields,"
               " with a least-squares baseline and synthetic benchmarks"};
  app.require_subcommand(1);

  auto synth_opts = std::make_shared<SynthOpts>();
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic wrapped dataset");
  synth->add_option("--spec", synth_opts->spec_path, "terrain spec file (key = value lines)");
  synth->add_option("--preset", synth_opts->preset, "built-in terrain: default, smooth, hard");
  synth->add_option("--rows", synth_opts->rows, "override rows");
  synth->add_option("--cols", synth_opts->cols, "override cols");
  synth->add_option("--seed", synth_opts->seed, "override noise seed");
  synth->add_option("--out-spec", synth_opts->out_spec, "write the effective spec");
  synth->add_option("--out-surface", synth_opts->out_surface, "write the true surface (PUW1)");
  synth->add_option("--out-wrapped", synth_opts->out_wrapped, "write the wrapped phases (PUW1)");
  synth->add_option("--out-shifts", synth_opts->out_shifts, "write the true shifts (PUWS1)");
  synth->callback([synth_opts] { run_synth(*synth_opts); });

  auto greedy_opts = std::make_shared<GreedyOpts>();
  CLI::App* greedy = app.add_subcommand("greedy", "per-edge nearest-integer shift decisions");
  greedy->add_option("--in", greedy_opts->in, "wrapped phases (PUW1)")->required();
  greedy->add_option("--out-shifts", greedy_opts->out_shifts, "write the shifts (PUWS1)");
  greedy->callback([greedy_opts] { run_greedy(*greedy_opts); });

  auto unwrap_opts = std::make_shared<UnwrapOpts>();
  CLI::App* unwrap = app.add_subcommand(
      "unwrap", "annealed variational inference of shifts, then surface integration");
  unwrap->add_option("--in", unwrap_opts->in, "wrapped phases (PUW1)")->required();
  unwrap->add_option("--sigma", unwrap_opts->sigma, "data standard deviation (default 0.3)");
  unwrap->add_option("--t-start", unwrap_opts->t_start, "initial temperature (default 10)");
  unwrap->add_option("--t-end", unwrap_opts->t_end, "final temperature (default 0.05)");
  unwrap->add_option("--t-steps", unwrap_opts->t_steps, "number of temperatures (default 20)");
  unwrap->add_option("--sweeps", unwrap_opts->sweeps, "max sweeps per temperature (default 10)");
  unwrap->add_option("--tol", unwrap_opts->tol, "relative objective tolerance (default 1e-7)");
  unwrap->add_flag("--randomize", unwrap_opts->randomize, "shuffle edge order each sweep");
  unwrap->add_option("--seed", unwrap_opts->seed, "seed for --randomize");
  unwrap->add_option("--out-surface", unwrap_opts->out_surface, "write the surface (PUW1)")
      ->required();
  unwrap->add_option("--out-shifts", unwrap_opts->out_shifts, "write the argmax shifts (PUWS1)");
  unwrap->add_option("--out-entropy", unwrap_opts->out_entropy,
                     "write the per-edge entropy map (PUWE1)");
  unwrap->add_option("--report", unwrap_opts->report, "write the per-temperature CSV report");
  unwrap->callback([unwrap_opts] { run_unwrap(*unwrap_opts); });

  auto lsq_opts = std::make_shared<FitOpts>();
  CLI::App* lsq = app.add_subcommand("lsq", "least-squares unwrapping of wrapped gradients");
  lsq->add_option("--in", lsq_opts->in, "wrapped phases (PUW1)")->required();
  lsq->add_option("--out-surface", lsq_opts->out_surface, "write the surface (PUW1)")->required();
  lsq->add_option("--tol", lsq_opts->tolerance, "solver relative tolerance (default 1e-8)");
  lsq->add_option("--max-iter", lsq_opts->max_iterations,
                  "solver iteration cap (default 10*(rows+cols))");
  lsq->callback([lsq_opts] { run_lsq(*lsq_opts); });

  auto hybrid_opts = std::make_shared<FitOpts>();
  CLI::App* hybrid = app.add_subcommand(
      "hybrid", "least-squares surface fit to externally inferred shifts");
  hybrid->add_option("--in", hybrid_opts->in, "wrapped phases (PUW1)")->required();
  hybrid->add_option("--shifts", hybrid_opts->shifts, "shift field (PUWS1)")->required();
  hybrid->add_option("--out-surface", hybrid_opts->out_surface, "write the surface (PUW1)")
      ->required();
  hybrid->add_option("--tol", hybrid_opts->tolerance, "solver relative tolerance (default 1e-8)");
  hybrid->add_option("--max-iter", hybrid_opts->max_iterations,
                     "solver iteration cap (default 10*(rows+cols))");
  hybrid->callback([hybrid_opts] { run_hybrid(*hybrid_opts); });

  auto eval_opts = std::make_shared<EvalOpts>();
  CLI::App* eval = app.add_subcommand("eval", "score an estimated surface against the truth");
  eval->add_option("--truth", eval_opts->truth, "true surface (PUW1)")->required();
  eval->add_option("--estimate", eval_opts->estimate, "estimated surface (PUW1)")->required();
  eval->callback([eval_opts] { run_eval(*eval_opts); });

  auto entropy_opts = std::make_shared<EntropyOpts>();
  CLI::App* entropy = app.add_subcommand("entropy", "render an entropy map as a PGM heatmap");
  entropy->add_option("--beliefs-report", entropy_opts->beliefs_report,
                      "entropy map file (PUWE1) from unwrap --out-entropy")
      ->required();
  entropy->add_option("--out", entropy_opts->out, "output PGM (P5) path")->required();
  entropy->callback([entropy_opts] { run_entropy(*entropy_opts); });

  auto oracle_opts = std::make_shared<OracleOpts>();
  CLI::App* oracle = app.add_subcommand("oracle", "exhaustive posterior on tiny grids");
  oracle->add_option("--in", oracle_opts->in, "wrapped phases (PUW1)")->required();
  oracle->add_option("--sigma", oracle_opts->sigma, "data standard deviation (default 0.3)");
  oracle->add_option("--temp", oracle_opts->temp, "temperature (default 1)");
  oracle->callback([oracle_opts] { run_oracle(*oracle_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CurlViolationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
