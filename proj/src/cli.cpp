#include "eikonal/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "eikonal/grid_io.hpp"
#include "eikonal/metrics.hpp"
#include "eikonal/solvers.hpp"

namespace eikonal::cli {

namespace {

/// Options shared by solve, bench and classify.
struct ProblemOptions {
  std::string input;
  std::string seeds;
  double value_scale = 1.0;
};

struct SolverOptions {
  std::string method = "fmm";
  std::string op = "monotone";
  std::size_t threads = 1;
  std::optional<double> scale;
  double epsilon = 0.0;
  std::string tracking = "decrease";
  std::size_t chunk = kDefaultChunkSize;
};

struct Problem {
  VelocityGrid velocity;
  SeedSet seeds;
};

void add_problem_options(CLI::App* cmd, ProblemOptions& o) {
  cmd->add_option("--input", o.input, "velocity grid file")->required();
  cmd->add_option("--seeds", o.seeds, "seeds CSV (i,j,t0)")->required();
  cmd->add_option("--value-scale", o.value_scale,
                  "multiply seed times and slowness 1/v by this factor")->capture_default_str();
}

void add_solver_options(CLI::App* cmd, SolverOptions& o, bool single_config) {
  if (single_config) {
    cmd->add_option("--method", o.method, "fmm | topological | fsm | fim | amm")->capture_default_str();
    cmd->add_option("--operator", o.op, "naive | rearranged | monotone | newton")->capture_default_str();
    cmd->add_option("--threads", o.threads, "worker threads (amm and fim only)")->capture_default_str();
  }
  cmd->add_option("--scale", o.scale, "amm bin width (default h / (4 max v))");
  cmd->add_option("--epsilon", o.epsilon, "fim convergence threshold")->capture_default_str();
  cmd->add_option("--tracking", o.tracking, "decrease | any")->capture_default_str();
  cmd->add_option("--chunk", o.chunk, "amm worklist chunk size")->capture_default_str();
}

Problem load_problem(const ProblemOptions& o) {
  if (!(o.value_scale > 0.0)) throw std::invalid_argument("--value-scale must be positive");
  VelocityGrid raw = read_velocity_file(o.input);
  SeedSet seeds = read_seeds_file(o.seeds);
  validate_seeds(raw.shape(), seeds);
  if (o.value_scale == 1.0) return {std::move(raw), std::move(seeds)};
  std::vector<double> v(raw.values().begin(), raw.values().end());
  for (double& x : v) x /= o.value_scale;
  for (Seed& s : seeds) s.t0 *= o.value_scale;
  return {VelocityGrid(raw.shape(), std::move(v)), std::move(seeds)};
}

SolveConfig make_config(const SolverOptions& o, Method method, UpdateVariant variant, std::size_t threads) {
  SolveConfig c;
  c.method = method;
  c.variant = variant;
  c.threads = threads;
  c.scale = o.scale;
  c.epsilon = o.epsilon;
  c.tracking = parse_tracking(o.tracking);
  c.chunk_size = o.chunk;
  c.validate();
  return c;
}

bool single_threaded(Method m) { return m != Method::AMM && m != Method::FIM; }

ArrivalGrid reference_solution(const Problem& p) {
  SolveConfig c;
  c.method = Method::FMM;
  c.variant = UpdateVariant::MonotoneRoot;
  return solve_fmm(p.velocity, p.seeds, c).arrivals;
}

void write_bench_row(std::ostream& out, Method m, UpdateVariant v, std::size_t threads, std::size_t repeat,
                     const SolveResult& r, const UpdateCounters& c, double residual_error) {
  if (!c.balanced()) throw InvariantViolation("update counters do not sum to total");
  out << to_string(m) << ',' << to_string(v) << ',' << threads << ',' << repeat << ','
      << format_double(r.wall_time) << ',' << c.good << ',' << c.empty << ',' << c.bad << ',' << c.total << ','
      << format_double(residual_error) << ',' << r.inversions << '\n';
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

int cmd_gen(const std::string& kind, std::size_t nx, std::size_t ny, double h, double speed, double slow,
            double fast, std::size_t cell, double median, double sigma, std::uint64_t seed,
            const std::string& output) {
  const GridShape shape(nx, ny, h);
  std::optional<VelocityGrid> grid;
  if (kind == "constant") {
    grid.emplace(make_constant(shape, speed));
  } else if (kind == "checkerboard") {
    grid.emplace(make_checkerboard(shape, slow, fast, cell));
  } else if (kind == "lognormal") {
    grid.emplace(make_lognormal(shape, median, sigma, seed));
  } else {
    throw std::invalid_argument("unknown field kind '" + kind + "'");
  }
  write_grid_file(output, grid->shape(), grid->values());
  return kExitOk;
}

int cmd_solve(const ProblemOptions& po, const SolverOptions& so, const std::string& output, std::ostream& out) {
  const Problem p = load_problem(po);
  const Method method = parse_method(so.method);
  const UpdateVariant variant = parse_variant(so.op);
  const SolveConfig config = make_config(so, method, variant, so.threads);
  const SolveResult r = solve(p.velocity, p.seeds, config);
  write_grid_file(output, r.arrivals.shape(), r.arrivals.values());
  const auto mask = seed_mask(p.velocity.shape(), p.seeds);
  const ResidualReport rep = residual(r.arrivals, p.velocity, variant, mask);
  out << "method=" << to_string(method) << " operator=" << to_string(variant) << " threads=" << config.threads
      << " wall_time_s=" << format_double(r.wall_time) << " updates=" << r.updates
      << " residual=" << format_double(rep.max_rel_error) << '\n';
  return kExitOk;
}

int cmd_verify(const std::string& solution, const std::string& input, const std::string& op,
               const std::string& seeds_path, std::ostream& out) {
  const ArrivalGrid sol = read_arrival_file(solution);
  const VelocityGrid velocity = read_velocity_file(input);
  if (!(sol.shape() == velocity.shape())) throw std::invalid_argument("solution and input grids differ in shape");
  std::vector<std::uint8_t> mask;
  if (!seeds_path.empty()) {
    const SeedSet seeds = read_seeds_file(seeds_path);
    validate_seeds(velocity.shape(), seeds);
    mask = seed_mask(velocity.shape(), seeds);
  }
  const ResidualReport rep = residual(sol, velocity, parse_variant(op), mask);
  out << format_double(rep.max_rel_error) << ',' << rep.argmax_i << ',' << rep.argmax_j << '\n';
  return kExitOk;
}

int cmd_compare(const std::string& a, const std::string& b, std::ostream& out) {
  const Comparison c = compare_solutions(read_arrival_file(a), read_arrival_file(b));
  out << format_double(c.max_abs) << ',' << format_double(c.max_rel) << ',' << (c.bitwise_equal ? "true" : "false")
      << '\n';
  return kExitOk;
}

int cmd_bench(const ProblemOptions& po, const SolverOptions& so, const std::vector<std::string>& methods_arg,
              const std::vector<std::string>& operators_arg, const std::vector<std::size_t>& threads_list,
              std::size_t repeats, const std::string& output, std::ostream& out, std::ostream& err) {
  const Problem p = load_problem(po);
  std::vector<Method> methods;
  for (const auto& m : split_list(methods_arg)) methods.push_back(parse_method(m));
  std::vector<UpdateVariant> variants;
  for (const auto& v : split_list(operators_arg)) variants.push_back(parse_variant(v));
  if (methods.empty() || variants.empty() || threads_list.empty()) {
    throw std::invalid_argument("bench needs at least one method, operator and thread count");
  }
  if (repeats == 0) throw std::invalid_argument("--repeats must be at least 1");

  const ArrivalGrid reference = reference_solution(p);
  const auto mask = seed_mask(p.velocity.shape(), p.seeds);

  std::ofstream file;
  if (!output.empty()) {
    file.open(output, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + output + " for writing");
  }
  std::ostream& csv = output.empty() ? out : file;
  csv << kBenchHeader << '\n';
  for (Method m : methods) {
    for (UpdateVariant v : variants) {
      for (std::size_t threads : threads_list) {
        if (threads > 1 && single_threaded(m)) {
          if (v == variants.front())
            err << "note: skipping " << to_string(m) << " at " << threads << " threads (single-threaded method)\n";
          continue;
        }
        SolveConfig config = make_config(so, m, v, threads);
        config.reference = &reference;
        for (std::size_t rep = 0; rep < repeats; ++rep) {
          const SolveResult r = solve(p.velocity, p.seeds, config);
          const double res = residual(r.arrivals, p.velocity, v, mask).max_rel_error;
          write_bench_row(csv, m, v, threads, rep, r, r.stats.value_or(UpdateCounters{}), res);
        }
      }
    }
  }
  return kExitOk;
}

int cmd_classify(const ProblemOptions& po, const SolverOptions& so, const std::string& output, std::ostream& out) {
  const Problem p = load_problem(po);
  const Method method = parse_method(so.method);
  const UpdateVariant variant = parse_variant(so.op);
  const ArrivalGrid reference = reference_solution(p);
  SolveConfig config = make_config(so, method, variant, so.threads);
  config.reference = &reference;
  config.trace = true;
  const SolveResult r = solve(p.velocity, p.seeds, config);
  const UpdateCounters from_trace = classify_updates(r.trace, reference, is_exact(variant));
  if (!r.stats || !(*r.stats == from_trace) || from_trace.total != r.updates) {
    throw InvariantViolation("trace classification disagrees with on-the-fly counters");
  }
  const double res = residual(r.arrivals, p.velocity, variant, seed_mask(p.velocity.shape(), p.seeds)).max_rel_error;

  std::ofstream file;
  if (!output.empty()) {
    file.open(output, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + output + " for writing");
  }
  std::ostream& csv = output.empty() ? out : file;
  csv << kBenchHeader << '\n';
  write_bench_row(csv, method, variant, config.threads, 0, r, from_trace, res);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parallel Eikonal solvers on regular 2D grids", args.empty() ? "eikonal" : args.front()};
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);

  // gen
  std::string gen_kind = "constant";
  std::size_t nx = 0;
  std::size_t ny = 0;
  double h = 1.0;
  double speed = 1.0;
  double slow = 1.0;
  double fast = 2.0;
  std::size_t cell = 8;
  double median = 1.0;
  double sigma = 0.5;
  std::uint64_t rng_seed = 0;
  std::string gen_output;
  auto* gen = app.add_subcommand("gen", "generate a synthetic velocity field");
  gen->add_option("--kind", gen_kind, "constant | checkerboard | lognormal")->capture_default_str();
  gen->add_option("--nx", nx, "nodes in x")->required();
  gen->add_option("--ny", ny, "nodes in y")->required();
  gen->add_option("--h", h, "grid spacing")->capture_default_str();
  gen->add_option("--speed", speed, "constant speed")->capture_default_str();
  gen->add_option("--slow", slow, "checkerboard speed of even cells")->capture_default_str();
  gen->add_option("--fast", fast, "checkerboard speed of odd cells")->capture_default_str();
  gen->add_option("--cell", cell, "checkerboard cell size in nodes")->capture_default_str();
  gen->add_option("--median", median, "lognormal median speed")->capture_default_str();
  gen->add_option("--sigma", sigma, "lognormal log-standard deviation")->capture_default_str();
  gen->add_option("--seed", rng_seed, "random seed")->capture_default_str();
  gen->add_option("-o,--output", gen_output, "output grid file")->required();

  // solve
  ProblemOptions solve_problem;
  SolverOptions solve_solver;
  std::string solve_output;
  auto* solve_cmd = app.add_subcommand("solve", "solve for arrival times");
  add_problem_options(solve_cmd, solve_problem);
  add_solver_options(solve_cmd, solve_solver, true);
  solve_cmd->add_option("-o,--output", solve_output, "output arrival grid file")->required();

  // verify
  std::string verify_solution;
  std::string verify_input;
  std::string verify_op = "monotone";
  std::string verify_seeds;
  auto* verify = app.add_subcommand("verify", "fixed-point residual of a solution");
  verify->add_option("--solution", verify_solution, "arrival grid file")->required();
  verify->add_option("--input", verify_input, "velocity grid file")->required();
  verify->add_option("--operator", verify_op, "naive | rearranged | monotone | newton")->capture_default_str();
  verify->add_option("--seeds", verify_seeds, "seeds CSV; inferred from the solution when omitted");

  // compare
  std::string compare_a;
  std::string compare_b;
  auto* compare = app.add_subcommand("compare", "compare two arrival grids");
  compare->add_option("a", compare_a, "first grid file")->required();
  compare->add_option("b", compare_b, "second grid file")->required();

  // bench
  ProblemOptions bench_problem;
  SolverOptions bench_solver;
  std::vector<std::string> bench_methods{"fmm", "amm"};
  std::vector<std::string> bench_operators{"monotone"};
  std::vector<std::size_t> bench_threads{1};
  std::size_t repeats = 1;
  std::string bench_output;
  auto* bench = app.add_subcommand("bench", "time solver configurations and classify their work");
  add_problem_options(bench, bench_problem);
  add_solver_options(bench, bench_solver, false);
  bench->add_option("--methods", bench_methods, "comma-separated methods")->delimiter(',');
  bench->add_option("--operators", bench_operators, "comma-separated operators")->delimiter(',');
  bench->add_option("--threads", bench_threads, "comma-separated thread counts")->delimiter(',');
  bench->add_option("--repeats", repeats, "runs per configuration")->capture_default_str();
  bench->add_option("-o,--output", bench_output, "CSV file (default standard output)");

  // classify
  ProblemOptions classify_problem;
  SolverOptions classify_solver;
  std::string classify_output;
  auto* classify = app.add_subcommand("classify", "traced good/empty/bad classification of one configuration");
  add_problem_options(classify, classify_problem);
  add_solver_options(classify, classify_solver, true);
  classify->add_option("-o,--output", classify_output, "CSV file (default standard output)");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("eikonal");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*gen) {
      return cmd_gen(gen_kind, nx, ny, h, speed, slow, fast, cell, median, sigma, rng_seed, gen_output);
    }
    if (*solve_cmd) return cmd_solve(solve_problem, solve_solver, solve_output, out);
    if (*verify) return cmd_verify(verify_solution, verify_input, verify_op, verify_seeds, out);
    if (*compare) return cmd_compare(compare_a, compare_b, out);
    if (*bench) {
      return cmd_bench(bench_problem, bench_solver, bench_methods, bench_operators, bench_threads, repeats,
                       bench_output, out, err);
    }
    if (*classify) return cmd_classify(classify_problem, classify_solver, classify_output, out);
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace eikonal::cli
