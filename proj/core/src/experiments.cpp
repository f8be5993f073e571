#include "torrent/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "torrent/iht.hpp"
#include "torrent/instance_io.hpp"
#include "torrent/rng.hpp"

namespace torrent {

const char* to_string(BenchSolver s) {
  switch (s) {
    case BenchSolver::FC: return "fc";
    case BenchSolver::GD: return "gd";
    case BenchSolver::HYB: return "hyb";
    case BenchSolver::HD: return "hd";
    case BenchSolver::L1: return "l1";
  }
  return "?";
}

void validate(const ExperimentSpec& spec) {
  if (spec.alpha_grid.empty() || spec.n_grid.empty()) {
    throw BadSpec("experiment: alpha and n grids must be non-empty");
  }
  if (spec.p < 1) throw BadSpec("experiment: p must be at least 1");
  if (spec.trials_per_cell < 1) throw BadSpec("experiment: trials must be at least 1");
  if (spec.solvers.empty()) throw BadSpec("experiment: need at least one solver");
  if (!(spec.success_threshold > 0.0)) throw BadSpec("experiment: threshold must be positive");
  for (const auto& s : spec.solvers) {
    if (s.kind == BenchSolver::HD && !s.config.sparsity_s && !spec.sparsity_s_star) {
      throw BadSpec("experiment: HD solver needs sparsity_s or an s* to derive it");
    }
  }
}

std::uint64_t cell_seed(std::uint64_t base, Index cell_index) {
  return mix_seed(base, static_cast<std::uint64_t>(cell_index));
}

std::uint64_t trial_seed(std::uint64_t base, Index cell_index, Index trial) {
  return mix_seed(base, static_cast<std::uint64_t>(cell_index),
                  static_cast<std::uint64_t>(trial));
}

namespace {

InstanceSpec cell_instance_spec(const ExperimentSpec& spec, double alpha, Index n,
                                std::uint64_t seed) {
  InstanceSpec inst;
  inst.p = spec.p;
  inst.n = n;
  inst.sparsity_s_star = spec.sparsity_s_star;
  inst.sigma = spec.sigma;
  inst.alpha = alpha;
  inst.corruption_scale = spec.magnitude;
  inst.adversary = spec.adversary;
  inst.seed = seed;
  return inst;
}

SolverConfig cell_solver_config(const ExperimentSpec& spec, const SolverSpec& solver,
                                double alpha) {
  SolverConfig cfg = solver.config;
  switch (solver.kind) {
    case BenchSolver::FC: cfg.variant = Variant::FC; break;
    case BenchSolver::GD: cfg.variant = Variant::GD; break;
    case BenchSolver::HYB: cfg.variant = Variant::HYB; break;
    case BenchSolver::HD: cfg.variant = Variant::HD; break;
    case BenchSolver::L1: break;
  }
  if (spec.match_beta_to_alpha) {
    cfg.beta = std::min(0.5, std::max(alpha + spec.beta_margin, spec.beta_margin));
  }
  if (solver.kind == BenchSolver::HD && !cfg.sparsity_s && spec.sparsity_s_star) {
    // Target sparsity defaults to twice the generating sparsity.
    cfg.sparsity_s = std::min<Index>(spec.p, 2 * *spec.sparsity_s_star);
  }
  return cfg;
}

struct TrialOutcome {
  double error = 0.0;
  double wall = 0.0;
  double iters = 0.0;
};

TrialOutcome run_trial_solver(const ExperimentSpec& spec, const SolverSpec& solver,
                              double alpha, const RegressionInstance& inst) {
  TrialOutcome out;
  if (solver.kind == BenchSolver::L1) {
    const auto& grid = solver.l1_grid.empty() ? default_lambda_grid() : solver.l1_grid;
    const auto t0 = std::chrono::steady_clock::now();
    const L1GridResult best = l1_grid_fit(inst.x, inst.y, grid, &inst.w_star, 0.1, solver.l1);
    out.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.error = (best.model - inst.w_star).norm();
    out.iters = static_cast<double>(grid.size());
    return out;
  }
  const SolverConfig cfg = cell_solver_config(spec, solver, alpha);
  const FitResult fit = torrent_solve(inst.x, inst.y, cfg);
  out.error = (fit.model - inst.w_star).norm();
  out.wall = fit.wall_time;
  out.iters = static_cast<double>(fit.trace.size());
  return out;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<CellResult> run_phase(const ExperimentSpec& spec) {
  validate(spec);
  const Index n_alpha = static_cast<Index>(spec.alpha_grid.size());
  const Index n_sizes = static_cast<Index>(spec.n_grid.size());
  const Index n_cells = n_alpha * n_sizes;
  const Index n_solvers = static_cast<Index>(spec.solvers.size());
  const Index trials = spec.trials_per_cell;

  // outcomes[(cell * n_solvers + solver) * trials + trial]
  std::vector<TrialOutcome> outcomes(
      static_cast<std::size_t>(n_cells * n_solvers * trials));

  parallel_for(n_cells * trials, [&](Index task) {
    const Index cell = task / trials;
    const Index trial = task % trials;
    const double alpha = spec.alpha_grid[static_cast<std::size_t>(cell / n_sizes)];
    const Index n = spec.n_grid[static_cast<std::size_t>(cell % n_sizes)];
    const RegressionInstance inst =
        gen_instance(cell_instance_spec(spec, alpha, n, trial_seed(spec.base_seed, cell, trial)));
    for (Index s = 0; s < n_solvers; ++s) {
      outcomes[static_cast<std::size_t>((cell * n_solvers + s) * trials + trial)] =
          run_trial_solver(spec, spec.solvers[static_cast<std::size_t>(s)], alpha, inst);
    }
  });

  std::vector<CellResult> results;
  results.reserve(static_cast<std::size_t>(n_cells * n_solvers));
  for (Index cell = 0; cell < n_cells; ++cell) {
    const double alpha = spec.alpha_grid[static_cast<std::size_t>(cell / n_sizes)];
    const Index n = spec.n_grid[static_cast<std::size_t>(cell % n_sizes)];
    for (Index s = 0; s < n_solvers; ++s) {
      CellResult row;
      row.alpha = alpha;
      row.n = n;
      row.p = spec.p;
      row.sigma = spec.sigma;
      row.solver = spec.solvers[static_cast<std::size_t>(s)].name;
      row.trials = trials;
      row.seed = cell_seed(spec.base_seed, cell);

      std::vector<double> errors, walls, iters;
      errors.reserve(static_cast<std::size_t>(trials));
      Index successes = 0;
      for (Index t = 0; t < trials; ++t) {
        const auto& o =
            outcomes[static_cast<std::size_t>((cell * n_solvers + s) * trials + t)];
        // w* is unit-norm by construction, so the threshold is relative.
        if (o.error < spec.success_threshold) ++successes;
        errors.push_back(o.error);
        walls.push_back(o.wall);
        iters.push_back(o.iters);
      }
      row.success_rate = static_cast<double>(successes) / static_cast<double>(trials);
      row.median_error = median(std::move(errors));
      row.median_wall_time = median(std::move(walls));
      row.median_iters = median(std::move(iters));
      results.push_back(std::move(row));
    }
  }
  return results;
}

std::vector<RaceSample> run_race(const ExperimentSpec& spec) {
  validate(spec);
  const double alpha = spec.alpha_grid.front();
  const Index n = spec.n_grid.front();
  const Index trials = spec.trials_per_cell;
  const Index n_solvers = static_cast<Index>(spec.solvers.size());

  std::vector<std::vector<RaceSample>> buckets(
      static_cast<std::size_t>(n_solvers * trials));

  parallel_for(trials, [&](Index trial) {
    const std::uint64_t seed = trial_seed(spec.base_seed, 0, trial);
    const RegressionInstance inst =
        gen_instance(cell_instance_spec(spec, alpha, n, seed));
    const std::uint64_t digest = instance_digest(inst);
    const double w_norm = inst.w_star.norm();

    for (Index s = 0; s < n_solvers; ++s) {
      const SolverSpec& solver = spec.solvers[static_cast<std::size_t>(s)];
      auto& bucket = buckets[static_cast<std::size_t>(s * trials + trial)];
      auto push = [&](Index iter, double elapsed, double err) {
        RaceSample sample;
        sample.solver = solver.name;
        sample.trial = trial;
        sample.seed = seed;
        sample.instance_digest = digest;
        sample.iter = iter;
        sample.elapsed_sec = elapsed;
        sample.rel_error = err / w_norm;
        bucket.push_back(std::move(sample));
      };

      if (solver.kind == BenchSolver::L1) {
        const auto& grid = solver.l1_grid.empty() ? default_lambda_grid() : solver.l1_grid;
        double elapsed = 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < grid.size(); ++g) {
          L1Config cfg = solver.l1;
          cfg.lambda = grid[g];
          const auto t0 = std::chrono::steady_clock::now();
          const L1Result run = l1_solve(inst.x, inst.y, cfg);
          elapsed += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          best = std::min(best, (run.model - inst.w_star).norm());
          push(static_cast<Index>(g + 1), elapsed, best);
        }
        continue;
      }

      const SolverConfig cfg = cell_solver_config(spec, solver, alpha);
      GroundTruth truth;
      truth.w_star = inst.w_star;
      const FitResult fit = torrent_solve(inst.x, inst.y, cfg, truth);
      for (const auto& rec : fit.trace) {
        push(rec.iter, rec.elapsed_sec, rec.model_error.value_or(0.0));
      }
    }
  });

  std::vector<RaceSample> merged;
  for (Index s = 0; s < n_solvers; ++s) {
    for (Index t = 0; t < trials; ++t) {
      auto& bucket = buckets[static_cast<std::size_t>(s * trials + t)];
      merged.insert(merged.end(), std::make_move_iterator(bucket.begin()),
                    std::make_move_iterator(bucket.end()));
    }
  }
  return merged;
}

void write_phase_csv(std::ostream& os, const std::vector<CellResult>& cells) {
  os << "alpha,n,p,sigma,solver,trials,success_rate,median_error,"
        "median_wall_time,median_iters,cell_seed\r\n";
  for (const auto& c : cells) {
    os << format_double(c.alpha) << ',' << c.n << ',' << c.p << ','
       << format_double(c.sigma) << ',' << c.solver << ',' << c.trials << ','
       << format_double(c.success_rate) << ',' << format_double(c.median_error) << ','
       << format_double(c.median_wall_time) << ',' << format_double(c.median_iters) << ','
       << c.seed << "\r\n";
  }
}

void write_race_csv(std::ostream& os, const std::vector<RaceSample>& samples) {
  os << "solver,trial,seed,instance_digest,iter,elapsed_sec,rel_error\r\n";
  for (const auto& s : samples) {
    os << s.solver << ',' << s.trial << ',' << s.seed << ',' << s.instance_digest << ','
       << s.iter << ',' << format_double(s.elapsed_sec) << ','
       << format_double(s.rel_error) << "\r\n";
  }
}

}  // namespace torrent
