#include "degenwave/cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "degenwave/cli/config.hpp"
#include "degenwave/cli/io.hpp"
#include "degenwave/discretization.hpp"
#include "degenwave/error.hpp"
#include "degenwave/hum_control.hpp"
#include "degenwave/observability.hpp"
#include "degenwave/spectral.hpp"
#include "degenwave/verify/criteria.hpp"
#include "degenwave/wave_solver.hpp"
#include "degenwave/weight_model.hpp"

namespace degenwave::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Flag name -> config key. Every flag is routed through apply_config_value so
// flags and config files share one parser.
const std::vector<std::pair<std::string, std::string>>& flag_keys() {
  static const std::vector<std::pair<std::string, std::string>> table{
      {"alpha", "weight.alpha"},     {"epsilon", "weight.epsilon"},   {"R0", "weight.R0"},
      {"eps-list", "approx.epsilons"}, {"dimension", "grid.dimension"}, {"n", "grid.n"},
      {"L", "grid.L"},               {"T", "time.T"},                 {"dt", "time.dt"},
      {"steps", "time.steps"},       {"T-list", "observe.T_list"},    {"slack", "observe.slack"},
      {"draws", "observe.draws"},    {"modes", "modes.count"},        {"gamma", "modes.gamma"},
      {"seed", "run.seed"},          {"data", "run.data"},            {"solver", "run.solver"},
      {"tolerance", "hum.tolerance"}, {"max-iterations", "hum.max_iterations"},
  };
  return table;
}

struct Context {
  RunConfig config;
  fs::path out_dir;
  std::ostream& out;
  std::ostream& err;

  json config_json() const { return to_json(config); }

  void write(const std::string& name, const std::string& content) const {
    atomic_write(out_dir / name, content);
    out << "wrote " << (out_dir / name).string() << "\n";
  }
};

struct Problem {
  Grid grid;
  OperatorMatrix op;
};

Problem make_problem(const RunConfig& c) {
  Grid grid = build_grid(c.dimension, c.n, c.L);
  OperatorMatrix op = assemble_operator(grid, c.weight_params());
  return {std::move(grid), std::move(op)};
}

// Basis before filtering: the m lowest modes when `modes` is set, otherwise
// every mode passing the filter. Cached on disk under the config's key.
EigenBasis raw_basis(const Context& ctx, const OperatorMatrix& op) {
  const RunConfig& c = ctx.config;
  std::ostringstream header;
  header << "degenwave eigenbasis key=" << cache_key(c) << " alpha=" << num(c.alpha) << " epsilon=" << num(c.epsilon)
         << " N=" << c.dimension << " n=" << c.n << " L=" << num(c.L) << " modes=" << c.modes
         << " gamma=" << num(c.gamma);
  const fs::path path = ctx.out_dir / "cache" / ("eigs-" + cache_key(c) + ".txt");
  if (c.cache) {
    if (auto cached = load_basis(path, header.str()); cached && cached->interior_count() == op.size()) {
      cached->params = op.params;
      ctx.out << "eigenbasis loaded from cache " << path.string() << "\n";
      return *cached;
    }
  }
  EigenBasis basis = c.modes > 0 ? compute_eigs(op, c.modes) : compute_filtered_eigs(op, c.gamma);
  if (c.cache) save_basis(path, basis, header.str());
  return basis;
}

EigenBasis filtered_basis(const Context& ctx, const OperatorMatrix& op) {
  EigenBasis basis = filter_modes(raw_basis(ctx, op), ctx.config.gamma, op.grid.spacing());
  if (basis.size() == 0) throw ConfigError("no eigenmode passes the filter sqrt(lambda) h <= gamma; raise gamma or n");
  return basis;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> initial_data(const Context& ctx, const OperatorMatrix& op,
                                                         const EigenBasis* filtered, std::mt19937_64& rng) {
  const RunConfig& c = ctx.config;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(op.size());
  if (c.data == "bump") return {smooth_bump(op.grid, {}, 0.5 * c.L), zero};
  if (c.data == "mode") {
    if (filtered != nullptr) return {filtered->eigenvectors.col(0), zero};
    return {compute_eigs(op, 1).eigenvectors.col(0), zero};
  }
  if (filtered == nullptr) throw ConfigError("random data needs a filtered eigenbasis");
  return random_filtered_data(*filtered, rng);
}

// --- subcommands ----------------------------------------------------------

int cmd_constants(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Grid grid = build_grid(c.dimension, c.n, c.L);
  const WeightParams p = c.weight_params();
  const MultiplierConstants k = constants(p, grid);
  const double lambda_bound = first_eigenvalue_lower_bound(c.alpha, c.dimension, k.M);
  const std::vector<std::pair<std::string, double>> rows{
      {"a", k.a},
      {"hat_a", k.hat_a},
      {"b", k.b},
      {"c", k.c},
      {"P", k.P},
      {"theta", k.theta},
      {"T_star", k.T_star},
      {"M", k.M},
      {"observability_constant", k.observability_constant(c.T, c.alpha)},
      {"weighted_observability_constant", k.weighted_observability_constant(c.T, c.alpha)},
      {"lambda1_lower_bound", lambda_bound},
  };
  json result;
  for (const auto& [name, value] : rows) {
    ctx.out << name << std::string(34 - name.size(), ' ') << num(value) << "\n";
    result[name] = value;
  }
  result["T"] = c.T;
  result["T_exceeds_T_star"] = c.T > k.T_star;
  ctx.write("constants.json", report("degenwave.constants/1", ctx.config_json(), result));
  return kExitOk;
}

int cmd_eigen(const Context& ctx) {
  const auto [grid, op] = make_problem(ctx.config);
  const auto start = std::chrono::steady_clock::now();
  const EigenBasis basis = raw_basis(ctx, op);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double h = grid.spacing();

  CsvTable csv(ctx.config_json(), {"index", "lambda", "sqrt_lambda_h", "residual"});
  for (Index k = 0; k < basis.size(); ++k) {
    csv.row({static_cast<double>(k + 1), basis.eigenvalues[k], std::sqrt(basis.eigenvalues[k]) * h,
             basis.residuals[k]});
  }
  ctx.write("eigenvalues.csv", csv.str());
  ctx.write("eigenvalues.gp", gnuplot_script("eigenvalues.csv", "eigenvalues.png", "index", "lambda", {{1, 2, "lambda_k"}}));

  json result;
  result["modes"] = basis.size();
  result["interior_unknowns"] = op.size();
  result["lambda_1"] = basis.eigenvalues[0];
  result["lambda_last"] = basis.eigenvalues[basis.size() - 1];
  result["lambda_max_estimate"] = op.lambda_max_estimate;
  result["lambda1_lower_bound"] =
      first_eigenvalue_lower_bound(ctx.config.alpha, ctx.config.dimension, ctx.config.weight_params().sup_radius_plus_one());
  result["gram_residual"] = gram_residual(basis);
  result["max_residual"] = basis.residuals.maxCoeff();
  ctx.write("eigen.json", report("degenwave.eigen/1", ctx.config_json(), result));
  ctx.out << "modes " << basis.size() << ", lambda_1 = " << num(basis.eigenvalues[0]) << " (" << num(seconds)
          << " s)\n";

  if (ctx.config.export_matrix) {
    std::ostringstream os;
    export_coordinate(op, os);
    ctx.write("operator.mtx", os.str());
  }
  return kExitOk;
}

int cmd_simulate(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto [grid, op] = make_problem(c);
  std::mt19937_64 rng(c.seed);
  std::optional<EigenBasis> basis;
  if (c.solver == "spectral" || c.data == "random") basis = filtered_basis(ctx, op);
  auto [phi0, phi1] = initial_data(ctx, op, basis ? &*basis : nullptr, rng);

  SolutionRecord rec;
  if (c.solver == "spectral") {
    rec = solve_spectral(op, *basis, phi0, phi1, Forcing::zero(), c.T, c.steps, SolveOptions{false});
  } else {
    const double dt = c.dt > 0.0 ? c.dt : 0.5 * cfl_limit(op);
    rec = solve_leapfrog(op, phi0, phi1, Forcing::zero(), c.T, dt, SolveOptions{false});
  }

  CsvTable energy(ctx.config_json(), {"t", "kinetic", "potential", "total"});
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    energy.row({rec.times[k], rec.energy.kinetic[k], rec.energy.potential[k], rec.energy.total[k]});
  }
  ctx.write("energy.csv", energy.str());
  ctx.write("energy.gp", gnuplot_script("energy.csv", "energy.png", "t", "energy",
                                        {{1, 2, "kinetic"}, {1, 3, "potential"}, {1, 4, "total"}}));

  CsvTable nodes(ctx.config_json(), {"node", "x", "y", "z", "nu_x", "nu_y", "nu_z"});
  for (std::size_t b = 0; b < grid.boundary().size(); ++b) {
    const auto& bn = grid.boundary()[b];
    nodes.row({static_cast<double>(b), bn.position[0], bn.position[1], bn.position[2], bn.normal[0], bn.normal[1],
               bn.normal[2]});
  }
  ctx.write("boundary_nodes.csv", nodes.str());

  CsvTable flux(ctx.config_json(), {"t", "node", "flux", "weighted_flux", "conormal"});
  for (Index k = 0; k < static_cast<Index>(rec.times.size()); ++k) {
    for (Index b = 0; b < grid.boundary_count(); ++b) {
      flux.row({rec.times[static_cast<std::size_t>(k)], static_cast<double>(b), rec.flux.flux(b, k),
                rec.flux.weighted_flux(b, k), rec.flux.conormal(b, k)});
    }
  }
  ctx.write("flux.csv", flux.str());

  const auto [lo, hi] = std::minmax_element(rec.energy.total.begin(), rec.energy.total.end());
  const auto support = gamma0(grid);
  json result;
  result["solver"] = c.solver;
  result["samples"] = rec.times.size();
  result["dt"] = rec.dt;
  result["modes"] = basis ? basis->size() : 0;
  result["energy_initial"] = rec.energy.total.front();
  result["energy_final"] = rec.energy.total.back();
  result["energy_drift"] = (*hi - *lo) / rec.energy.total.front();
  result["flux_integral_gamma0"] = flux_integral(rec.flux.flux, rec.times, support, grid);
  result["weighted_flux_integral_gamma0"] = flux_integral(rec.flux.weighted_flux, rec.times, support, grid);
  ctx.write("simulate.json", report("degenwave.simulate/1", ctx.config_json(), result));
  ctx.out << "E(0) = " << num(rec.energy.total.front()) << ", relative drift " << num(result["energy_drift"]) << "\n";
  return kExitOk;
}

int cmd_approx(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Grid grid = build_grid(c.dimension, c.n, c.L);
  const WeightParams base = c.weight_params().with_epsilon(0.0);
  const OperatorMatrix degenerate = assemble_operator(grid, base);
  std::mt19937_64 rng(c.seed);
  std::optional<EigenBasis> basis;
  if (c.data == "random") basis = filter_modes(compute_filtered_eigs(degenerate, c.gamma), c.gamma, grid.spacing());
  const auto [phi0, phi1] = initial_data(ctx, degenerate, basis ? &*basis : nullptr, rng);

  ApproximationConfig ac;
  ac.T = c.T;
  ac.dt = c.dt;
  const ApproximationSweep s = approximation_sweep(base, grid, phi0, phi1, c.epsilons, ac);

  CsvTable csv(ctx.config_json(), {"epsilon", "solution_distance", "flux_distance", "energy", "energy_gap",
                                   "energy_gap_bound", "measure", "measure_bound"});
  json rows = json::array();
  bool gap_ok = true, measure_ok = true;
  for (std::size_t i = 0; i < s.epsilons.size(); ++i) {
    csv.row({s.epsilons[i], s.solution_distance[i], s.flux_distance[i], s.energy[i], s.energy_gap[i],
             s.energy_gap_bound[i], s.measure[i], s.measure_bound[i]});
    json r;
    r["epsilon"] = s.epsilons[i];
    r["solution_distance"] = s.solution_distance[i];
    r["flux_distance"] = s.flux_distance[i];
    r["energy"] = s.energy[i];
    r["energy_gap"] = s.energy_gap[i];
    r["energy_gap_bound"] = s.energy_gap_bound[i];
    r["measure"] = s.measure[i];
    r["measure_bound"] = s.measure_bound[i];
    rows.push_back(r);
    gap_ok = gap_ok && s.energy_gap[i] <= s.energy_gap_bound[i];
    measure_ok = measure_ok && s.measure[i] <= s.measure_bound[i];
  }
  // Monotonicity along the list order sorted by decreasing epsilon.
  std::vector<std::size_t> order(s.epsilons.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.epsilons[a] > s.epsilons[b]; });
  bool sol_mono = true, flux_mono = true;
  for (std::size_t i = 1; i < order.size(); ++i) {
    sol_mono = sol_mono && s.solution_distance[order[i]] <= s.solution_distance[order[i - 1]];
    flux_mono = flux_mono && s.flux_distance[order[i]] <= s.flux_distance[order[i - 1]];
  }
  ctx.write("approx.csv", csv.str());
  ctx.write("approx.gp", gnuplot_script("approx.csv", "approx.png", "epsilon", "distance",
                                        {{1, 2, "L2(Q) distance"}, {1, 3, "boundary flux distance"}}, true));
  json result;
  result["dt"] = s.dt;
  result["reference_energy"] = s.reference_energy;
  result["rows"] = rows;
  result["solution_distance_nonincreasing"] = sol_mono;
  result["flux_distance_nonincreasing"] = flux_mono;
  result["energy_gap_within_bound"] = gap_ok;
  result["measure_within_bound"] = measure_ok;
  ctx.write("approx.json", report("degenwave.approx/1", ctx.config_json(), result));
  return kExitOk;
}

int cmd_observe(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto [grid, op] = make_problem(c);
  const MultiplierConstants k = constants(*op.params, grid);
  const std::vector<double> horizons = c.T_list.empty() ? std::vector<double>{c.T} : c.T_list;
  for (double T : horizons) {
    if (!(T > k.T_star)) {
      throw ConfigError("observation time T = " + num(T) + " must exceed T* = 2b/a = " + num(k.T_star));
    }
  }
  const EigenBasis basis = filtered_basis(ctx, op);
  const int draws = c.data == "random" ? c.draws : 1;

  CsvTable csv(ctx.config_json(), {"T", "draw", "energy0", "quotient", "predicted", "weighted_quotient",
                                   "weighted_predicted", "pass", "weighted_pass"});
  json reports = json::array();
  int passed = 0, weighted_passed = 0, total = 0;
  double best_c1 = 0.0;  // smallest C1 with E(0) <= C1 int int flux^2 over every run
  for (double T : horizons) {
    std::mt19937_64 rng(c.seed);  // the same data for every horizon
    ObservabilityConfig oc;
    oc.T = T;
    oc.steps = c.steps;
    oc.gamma = c.gamma;
    oc.slack = c.slack;
    for (int d = 0; d < draws; ++d) {
      const auto [phi0, phi1] = initial_data(ctx, op, &basis, rng);
      const ObservabilityReport r = observability_experiment(op, basis, k, phi0, phi1, oc);
      csv.row({T, static_cast<double>(d), r.energy0, r.quotient, r.predicted, r.weighted_quotient,
               r.weighted_predicted, r.pass ? 1.0 : 0.0, r.weighted_pass ? 1.0 : 0.0});
      json j;
      j["T"] = T;
      j["draw"] = d;
      j["modes"] = r.modes;
      j["energy0"] = r.energy0;
      j["flux_integral"] = r.flux_integral;
      j["weighted_flux_integral"] = r.weighted_flux_integral;
      j["quotient"] = r.quotient;
      j["predicted"] = r.predicted;
      j["weighted_quotient"] = r.weighted_quotient;
      j["weighted_predicted"] = r.weighted_predicted;
      j["pass"] = r.pass;
      j["weighted_pass"] = r.weighted_pass;
      j["strict_pass"] = r.strict_pass;
      reports.push_back(j);
      passed += r.pass;
      weighted_passed += r.weighted_pass;
      ++total;
      best_c1 = std::max(best_c1, 1.0 / r.quotient);
    }
  }
  ctx.write("observe.csv", csv.str());
  json result;
  result["a"] = k.a;
  result["b"] = k.b;
  result["theta"] = k.theta;
  result["T_star"] = k.T_star;
  result["modes"] = basis.size();
  result["runs"] = total;
  result["passed"] = passed;
  result["weighted_passed"] = weighted_passed;
  result["empirical_C1"] = best_c1;
  result["reports"] = reports;
  ctx.write("observe.json", report("degenwave.observe/1", ctx.config_json(), result));
  ctx.out << passed << "/" << total << " runs reach (1 - slack) x the predicted constant; weighted " << weighted_passed
          << "/" << total << "\n";
  return kExitOk;
}

int cmd_hum(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto [grid, op] = make_problem(c);
  const EigenBasis basis = filtered_basis(ctx, op);
  std::mt19937_64 rng(c.seed);
  const auto [phi0, phi1] = initial_data(ctx, op, &basis, rng);

  HUMProblem prob;
  prob.op = &op;
  prob.basis = &basis;
  prob.T = c.T;
  prob.dt = c.dt;
  prob.phi0 = phi0;
  prob.phi1 = phi1;
  prob.gamma = c.gamma;
  prob.tolerance = c.tolerance;
  prob.max_iterations = c.max_iterations;
  const auto start = std::chrono::steady_clock::now();
  const HUMResult res = hum_solve(prob);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double cost = control_cost(res);
  Eigen::VectorXd sigma(2 * basis.size());
  sigma << res.sigma0, res.sigma1;
  const double pairing = res.iterations > 0 ? hum_apply(prob, sigma).dot(sigma) : 0.0;

  CsvTable control(ctx.config_json(), {"t", "node", "u"});
  for (Index k = 0; k < res.control.cols(); ++k) {
    for (Index b : res.support) control.row({res.times[static_cast<std::size_t>(k)], static_cast<double>(b), res.control(b, k)});
  }
  ctx.write("hum_control.csv", control.str());
  CsvTable residuals(ctx.config_json(), {"iteration", "relative_residual", "functional"});
  for (std::size_t i = 0; i < res.residual_history.size(); ++i) {
    residuals.row({static_cast<double>(i), res.residual_history[i], res.functional_history[i]});
  }
  ctx.write("hum_residuals.csv", residuals.str());
  ctx.write("hum_residuals.gp", gnuplot_script("hum_residuals.csv", "hum_residuals.png", "CG iteration",
                                               "relative energy-norm residual", {{1, 2, "residual"}}, true));

  json result;
  result["converged"] = res.converged;
  result["iterations"] = res.iterations;
  result["residual_history"] = res.residual_history;
  result["functional_history"] = res.functional_history;
  result["terminal_energy_ratio"] = res.terminal_energy_ratio;
  result["unfiltered_energy_ratio"] = res.unfiltered_ratio;
  result["initial_energy"] = res.initial_energy;
  result["cost"] = cost;
  result["lambda_sigma_sigma"] = pairing;
  result["gamma"] = res.gamma;
  result["modes"] = basis.size();
  result["dt"] = res.dt;
  result["T"] = res.T;
  result["T_star"] = constants(*op.params, grid).T_star;
  result["support_nodes"] = res.support.size();
  result["sigma0"] = std::vector<double>(res.sigma0.data(), res.sigma0.data() + res.sigma0.size());
  result["sigma1"] = std::vector<double>(res.sigma1.data(), res.sigma1.data() + res.sigma1.size());
  ctx.write("hum.json", report("degenwave.hum/1", ctx.config_json(), result));
  ctx.out << "CG iterations " << res.iterations << ", E(T)/E(0) = " << num(res.terminal_energy_ratio)
          << " (full grid " << num(res.unfiltered_ratio) << "), cost " << num(cost) << ", " << num(seconds) << " s\n";
  if (!res.converged) {
    ctx.err << "error: conjugate gradient hit the iteration cap (" << c.max_iterations
            << ") with relative residual " << num(res.residual_history.back()) << " > tolerance "
            << num(c.tolerance) << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_verify(const Context& ctx) {
  const auto ids = ctx.config.full ? verify::full_suite() : verify::quick_suite();
  json results = json::array();
  bool all = true;
  double seconds = 0.0;
  for (int id : ids) {
    const verify::CriterionResult r = verify::run_criterion(id);
    ctx.out << verify::summary_line(r) << "\n";
    for (const auto& d : r.details) ctx.out << "    " << d << "\n";
    ctx.out.flush();
    json j;
    j["id"] = r.id;
    j["title"] = r.title;
    j["pass"] = r.pass;
    j["details"] = r.details;
    results.push_back(j);
    all = all && r.pass;
    seconds += r.seconds;
  }
  json result;
  result["suite"] = ctx.config.full ? "full" : "quick";
  result["pass"] = all;
  result["criteria"] = results;
  ctx.write("verify.json", report("degenwave.verify/1", ctx.config_json(), result));
  ctx.out << (all ? "all criteria passed" : "verification FAILED") << " (" << num(seconds) << " s)\n";
  return all ? kExitOk : kExitVerifyFailed;
}

const std::map<std::string, std::string>& default_data() {
  static const std::map<std::string, std::string> table{
      {"simulate", "bump"}, {"approx", "bump"}, {"observe", "random"}, {"hum", "mode"}};
  return table;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation, observability and boundary null control for interior-degenerate wave equations",
               "degenwave"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"constants", "print the multiplier constants (a, b, c, P, theta, T*) for the grid"},
      {"eigen", "compute the lowest eigenpairs and write eigenvalues.csv"},
      {"simulate", "solve the homogeneous problem and write energy and boundary-flux traces"},
      {"approx", "compare regularized solutions with the degenerate one over an epsilon sweep"},
      {"observe", "measure boundary observability quotients against the predicted constants"},
      {"hum", "synthesize a boundary null control by conjugate gradient on the HUM operator"},
      {"verify", "run the invariant suite; nonzero exit on any failure"},
  };

  std::map<std::string, std::string> raw;
  std::string config_path, out_flag;
  bool no_cache = false, export_matrix = false, full = false;
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    for (const auto& [flag, key] : flag_keys()) sub->add_option("--" + flag, raw[flag], key);
    sub->add_option("--config", config_path, "key = value configuration file (flags override it)");
    sub->add_option("--out", out_flag, "output directory (overrides DEGENWAVE_OUT and the file)");
    sub->add_flag("--no-cache", no_cache, "do not read or write the eigenbasis cache");
    if (name == "eigen") sub->add_flag("--export-matrix", export_matrix, "also write operator.mtx");
    if (name == "verify") sub->add_flag("--full", full, "include the long criteria (approximation, observability, HUM)");
    subs.push_back(sub);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg, extra;
    const int code = app.exit(e, msg, extra);
    out << msg.str();
    err << extra.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* chosen = nullptr;
  for (CLI::App* s : subs) {
    if (s->parsed()) chosen = s;
  }

  try {
    RunConfig config;
    config.subcommand = chosen->get_name();
    config.data.clear();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
      apply_config_file(in, config);
    }
    for (const auto& [flag, key] : flag_keys()) {
      if (chosen->count("--" + flag) > 0) apply_config_value(key, raw[flag], config);
    }
    if (const char* env = std::getenv("DEGENWAVE_OUT"); env != nullptr && *env != '\0') config.output_dir = env;
    if (!out_flag.empty()) config.output_dir = out_flag;
    if (no_cache) config.cache = false;
    config.export_matrix = config.export_matrix || export_matrix;
    config.full = full;
    if (config.data.empty()) {
      const auto it = default_data().find(config.subcommand);
      config.data = it != default_data().end() ? it->second : "bump";
    }
    config.validate();

    Context ctx{config, fs::path(config.output_dir), out, err};
    const std::string& cmd = config.subcommand;
    if (cmd == "constants") return cmd_constants(ctx);
    if (cmd == "eigen") return cmd_eigen(ctx);
    if (cmd == "simulate") return cmd_simulate(ctx);
    if (cmd == "approx") return cmd_approx(ctx);
    if (cmd == "observe") return cmd_observe(ctx);
    if (cmd == "hum") return cmd_hum(ctx);
    return cmd_verify(ctx);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace degenwave::cli
