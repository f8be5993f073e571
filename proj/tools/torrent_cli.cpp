// Command-line front end: instance generation, single fits, phase-transition
// sweeps, timing races, and subset-spectrum probes. Emits CSV/JSON for
// external plotting; exit codes are 0 on success, 1 on solver failure,
// 2 on usage or IO errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "torrent/experiments.hpp"
#include "torrent/iht.hpp"
#include "torrent/instance_io.hpp"
#include "torrent/l1.hpp"
#include "torrent/subset_spectrum.hpp"

namespace {

using nlohmann::json;
using namespace torrent;

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

Variant parse_variant(const std::string& name) {
  if (name == "fc") return Variant::FC;
  if (name == "gd") return Variant::GD;
  if (name == "hyb") return Variant::HYB;
  if (name == "hd") return Variant::HD;
  throw UsageError("unknown variant: " + name);
}

BenchSolver parse_bench_solver(const std::string& name) {
  if (name == "fc") return BenchSolver::FC;
  if (name == "gd") return BenchSolver::GD;
  if (name == "hyb") return BenchSolver::HYB;
  if (name == "hd") return BenchSolver::HD;
  if (name == "l1") return BenchSolver::L1;
  throw UsageError("unknown solver: " + name);
}

// Shared instance-shape flags for gen/phase/race.
struct InstanceFlags {
  Index p = 0;
  double sigma = 0.0;
  double scale = 5.0;
  std::optional<Index> s_star;
  std::string adversary = "oblivious";
  std::string cov = "identity";
  double cov_low = 0.0;
  double cov_high = 1.0;

  void attach(CLI::App* cmd, bool with_p = true) {
    if (with_p) cmd->add_option("--p", p, "feature dimension")->required();
    cmd->add_option("--sigma", sigma, "dense-noise std")->check(CLI::NonNegativeNumber);
    cmd->add_option("--scale", scale, "corruption magnitude multiplier M");
    auto* s = cmd->add_option("--s-star", "ground-truth sparsity");
    s->each([this](const std::string& v) { s_star = std::stoll(v); });
    cmd->add_option("--adversary", adversary, "oblivious|adaptive")
        ->check(CLI::IsMember({"oblivious", "adaptive"}));
    cmd->add_option("--cov", cov, "identity|diag-uniform")
        ->check(CLI::IsMember({"identity", "diag-uniform"}));
    cmd->add_option("--cov-low", cov_low, "diagonal covariance lower bound");
    cmd->add_option("--cov-high", cov_high, "diagonal covariance upper bound");
  }

  void fill(InstanceSpec& spec) const {
    spec.p = p;
    spec.sigma = sigma;
    spec.corruption_scale = scale;
    spec.sparsity_s_star = s_star;
    spec.adversary = adversary == "adaptive" ? AdversaryKind::AdaptiveModelShift
                                             : AdversaryKind::UniformOblivious;
    spec.covariance = cov == "diag-uniform" ? Covariance::diagonal_uniform(cov_low, cov_high)
                                            : Covariance::identity();
  }
};

// Solver flags shared by fit/phase/race.
struct SolverFlags {
  double beta = 0.4;
  double epsilon = 1e-10;
  std::optional<double> step;
  Index delta = 0;
  Index max_iters = 400;
  double rel_change_tol = 1e-14;
  std::optional<Index> sparsity;

  void attach(CLI::App* cmd) {
    cmd->add_option("--beta", beta, "assumed corruption budget");
    cmd->add_option("--epsilon", epsilon, "active-residual stopping tolerance");
    auto* st = cmd->add_option("--step", "GD/HYB step size (default 1/lambda_max)");
    st->each([this](const std::string& v) { step = std::stod(v); });
    cmd->add_option("--delta", delta, "HYB stability threshold");
    cmd->add_option("--max-iters", max_iters, "outer iteration cap");
    cmd->add_option("--rel-change-tol", rel_change_tol, "relative model-change stop");
    auto* sp = cmd->add_option("--sparsity", "HD target sparsity");
    sp->each([this](const std::string& v) { sparsity = std::stoll(v); });
  }

  SolverConfig config(Variant variant) const {
    SolverConfig cfg;
    cfg.variant = variant;
    cfg.beta = beta;
    cfg.epsilon = epsilon;
    cfg.step_size = step;
    cfg.delta = delta;
    cfg.max_iters = max_iters;
    cfg.rel_change_tol = rel_change_tol;
    cfg.sparsity_s = sparsity;
    return cfg;
  }
};

struct ExperimentFlags {
  InstanceFlags instance;
  SolverFlags solver;
  std::vector<double> alpha_grid;
  std::vector<Index> n_grid;
  Index trials = 0;
  std::vector<std::string> solver_names;
  double threshold = 1e-4;
  std::uint64_t seed = 0;
  bool match_beta = false;
  double beta_margin = 0.05;
  std::string out;

  ExperimentSpec spec(ExperimentSpec::Kind kind, Index default_trials) const {
    ExperimentSpec s;
    s.kind = kind;
    s.alpha_grid = alpha_grid;
    s.n_grid = n_grid;
    s.p = instance.p;
    s.sigma = instance.sigma;
    s.magnitude = instance.scale;
    s.sparsity_s_star = instance.s_star;
    s.adversary = instance.adversary == "adaptive" ? AdversaryKind::AdaptiveModelShift
                                                   : AdversaryKind::UniformOblivious;
    s.trials_per_cell = trials > 0 ? trials : default_trials;
    s.success_threshold = threshold;
    s.base_seed = seed;
    s.match_beta_to_alpha = match_beta;
    s.beta_margin = beta_margin;
    for (const auto& name : solver_names) {
      SolverSpec entry;
      entry.name = name;
      entry.kind = parse_bench_solver(name);
      entry.config = solver.config(Variant::FC);  // variant overridden per kind
      s.solvers.push_back(std::move(entry));
    }
    return s;
  }
};

json fit_json(const FitResult& fit, const SolverConfig& cfg, std::uint64_t digest) {
  json j;
  j["variant"] = to_string(cfg.variant);
  j["beta"] = cfg.beta;
  j["epsilon"] = cfg.epsilon;
  j["max_iters"] = cfg.max_iters;
  j["termination"] = to_string(fit.termination);
  j["wall_time_sec"] = fit.wall_time;
  j["iterations"] = fit.trace.size();
  j["final_active_residual"] = fit.trace.back().active_residual_norm;
  j["active_set_size"] = fit.active_set.size();
  j["instance_digest"] = digest;
  json model = json::array();
  for (Index i = 0; i < fit.model.size(); ++i) model.push_back(fit.model[i]);
  j["model"] = model;
  return j;
}

void write_trace_csv(std::ostream& os, const FitResult& fit) {
  os << "iter,update_kind,active_residual_norm,model_error,corruption_mass,"
        "set_churn,elapsed_sec\r\n";
  for (const auto& rec : fit.trace) {
    os << rec.iter << ',' << to_string(rec.update_kind) << ','
       << format_double(rec.active_residual_norm) << ',';
    if (rec.model_error) os << format_double(*rec.model_error);
    os << ',';
    if (rec.corruption_mass) os << format_double(*rec.corruption_mass);
    os << ',' << rec.set_churn << ',' << format_double(rec.elapsed_sec) << "\r\n";
  }
}

int run(int argc, char** argv) {
  CLI::App app{"robust regression by iterative hard thresholding"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate a synthetic instance directory");
  InstanceFlags gen_inst;
  gen_inst.attach(gen);
  Index gen_n = 0;
  double gen_alpha = 0.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", gen_n, "sample count")->required();
  gen->add_option("--alpha", gen_alpha, "corrupted fraction");
  gen->add_option("--seed", gen_seed, "instance seed")->required();
  gen->add_option("--out", gen_out, "output directory")->required();

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "run one solve on a stored instance");
  SolverFlags fit_solver;
  fit_solver.attach(fit);
  std::string fit_instance, fit_out, fit_variant = "fc";
  fit->add_option("--instance", fit_instance, "instance directory")->required();
  fit->add_option("--variant", fit_variant, "fc|gd|hyb|hd")
      ->check(CLI::IsMember({"fc", "gd", "hyb", "hd"}));
  fit->add_option("--out", fit_out, "output directory")->required();

  // ---- phase ----
  auto* phase = app.add_subcommand("phase", "success-probability grid over (alpha, n)");
  ExperimentFlags phase_flags;
  phase_flags.instance.attach(phase);
  phase_flags.solver.attach(phase);
  phase->add_option("--alpha-grid", phase_flags.alpha_grid, "corruption fractions")
      ->required()->delimiter(',');
  phase->add_option("--n-grid", phase_flags.n_grid, "sample counts")->required()->delimiter(',');
  phase->add_option("--trials", phase_flags.trials, "trials per cell (default 100)");
  phase->add_option("--solvers", phase_flags.solver_names, "fc,gd,hyb,hd,l1")
      ->required()->delimiter(',');
  phase->add_option("--threshold", phase_flags.threshold, "relative-error success threshold");
  phase->add_option("--seed", phase_flags.seed, "base seed")->required();
  phase->add_flag("--match-beta", phase_flags.match_beta, "set beta = alpha + margin per cell");
  phase->add_option("--beta-margin", phase_flags.beta_margin, "margin for --match-beta");
  phase->add_option("--out", phase_flags.out, "output CSV")->required();

  // ---- race ----
  auto* race = app.add_subcommand("race", "error-vs-time trajectories on shared instances");
  ExperimentFlags race_flags;
  race_flags.instance.attach(race);
  race_flags.solver.attach(race);
  double race_alpha = 0.0;
  Index race_n = 0;
  race->add_option("--n", race_n, "sample count")->required();
  race->add_option("--alpha", race_alpha, "corrupted fraction")->required();
  race->add_option("--trials", race_flags.trials, "trials (default 20)");
  race->add_option("--solvers", race_flags.solver_names, "fc,gd,hyb,hd,l1")
      ->required()->delimiter(',');
  race->add_option("--seed", race_flags.seed, "base seed")->required();
  race->add_option("--out", race_flags.out, "output CSV")->required();

  // ---- probe ----
  auto* probe = app.add_subcommand("probe", "subset eigenvalue extremes of a stored instance");
  std::string probe_instance, probe_out, probe_mode = "exact", probe_check;
  std::vector<double> probe_gammas;
  Index probe_trials = 2000;
  std::uint64_t probe_seed = 0;
  std::optional<Index> probe_sparsity;
  std::optional<double> probe_beta, probe_eta;
  probe->add_option("--instance", probe_instance, "instance directory")->required();
  probe->add_option("--gamma", probe_gammas, "subset fractions (gamma * n integral)")
      ->delimiter(',');
  probe->add_option("--mode", probe_mode, "exact|sampled")
      ->check(CLI::IsMember({"exact", "sampled"}));
  probe->add_option("--trials", probe_trials, "sampled-mode subset draws");
  probe->add_option("--seed", probe_seed, "sampled-mode seed");
  auto* ps = probe->add_option("--sparsity", "restricted level s");
  ps->each([&probe_sparsity](const std::string& v) { probe_sparsity = std::stoll(v); });
  auto* pb = probe->add_option("--check-beta", "evaluate predicates at this beta");
  pb->each([&probe_beta](const std::string& v) { probe_beta = std::stod(v); });
  probe->add_option("--check", probe_check, "fc|gd|hyb|hd|fc-dense (needs --check-beta)")
      ->check(CLI::IsMember({"fc", "gd", "hyb", "hd", "fc-dense"}));
  auto* pe = probe->add_option("--eta", "explicit GD step for the predicate");
  pe->each([&probe_eta](const std::string& v) { probe_eta = std::stod(v); });
  probe->add_option("--out", probe_out, "output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  if (gen->parsed()) {
    InstanceSpec spec;
    gen_inst.fill(spec);
    spec.n = gen_n;
    spec.alpha = gen_alpha;
    spec.seed = gen_seed;
    validate(spec);
    save_instance(gen_out, spec, gen_instance(spec));
    return kExitOk;
  }

  if (fit->parsed()) {
    const LoadedInstance loaded = load_instance(fit_instance);
    const SolverConfig cfg = fit_solver.config(parse_variant(fit_variant));
    GroundTruth truth;
    truth.w_star = loaded.instance.w_star;
    truth.corruption = loaded.instance.b;
    const FitResult result = torrent_solve(loaded.instance.x, loaded.instance.y, cfg, truth);
    std::filesystem::create_directories(fit_out);
    auto jf = open_output(std::filesystem::path(fit_out) / "fit.json");
    jf << fit_json(result, cfg, instance_digest(loaded.instance)).dump(2) << "\n";
    auto tf = open_output(std::filesystem::path(fit_out) / "trace.csv");
    write_trace_csv(tf, result);
    return kExitOk;
  }

  if (phase->parsed()) {
    const auto cells = run_phase(phase_flags.spec(ExperimentSpec::Kind::Phase, 100));
    auto out = open_output(phase_flags.out);
    write_phase_csv(out, cells);
    return kExitOk;
  }

  if (race->parsed()) {
    race_flags.alpha_grid = {race_alpha};
    race_flags.n_grid = {race_n};
    const auto samples = run_race(race_flags.spec(ExperimentSpec::Kind::Race, 20));
    auto out = open_output(race_flags.out);
    write_race_csv(out, samples);
    return kExitOk;
  }

  if (probe->parsed()) {
    const LoadedInstance loaded = load_instance(probe_instance);
    const Matrix& x = loaded.instance.x;
    std::vector<double> gammas = probe_gammas;
    if (probe_beta) {
      gammas.push_back(*probe_beta);
      gammas.push_back(1.0 - *probe_beta);
    }
    if (gammas.empty()) throw UsageError("probe: need --gamma or --check-beta");

    SpectrumMode mode;
    if (probe_mode == "sampled") {
      mode = SampledMode{probe_trials, probe_seed};
    } else {
      mode = ExactMode{};
    }

    std::vector<SubsetSpectrumReport> reports;
    json out_json;
    out_json["reports"] = json::array();
    for (double g : gammas) {
      reports.push_back(estimate_subset_spectrum(x, g, mode, probe_sparsity));
      out_json["reports"].push_back(json::parse(report_json(reports.back())));
    }
    if (!probe_check.empty()) {
      if (!probe_beta) throw UsageError("probe: --check requires --check-beta");
      ConditionVariant variant = ConditionVariant::FC;
      if (probe_check == "gd") variant = ConditionVariant::GD;
      else if (probe_check == "hyb") variant = ConditionVariant::HYB;
      else if (probe_check == "hd") variant = ConditionVariant::HD;
      else if (probe_check == "fc-dense") variant = ConditionVariant::FCDenseNoise;
      const ConditionVerdict v = check_convergence_condition(reports, variant, probe_eta);
      out_json["verdict"] = {{"variant", to_string(v.variant)},
                             {"predicate_value", v.predicate_value},
                             {"satisfied", v.satisfied},
                             {"rate_eta", v.rate_eta}};
    }
    if (probe_out.empty()) {
      std::cout << out_json.dump(2) << "\n";
    } else {
      auto out = open_output(probe_out);
      out << out_json.dump(2) << "\n";
    }
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SingularSystem& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const BadSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BadK& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
