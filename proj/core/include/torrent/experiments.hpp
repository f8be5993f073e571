#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "torrent/datagen.hpp"
#include "torrent/l1.hpp"
#include "torrent/parallel.hpp"
#include "torrent/solver.hpp"

namespace torrent {

enum class BenchSolver { FC, GD, HYB, HD, L1 };

const char* to_string(BenchSolver s);

struct SolverSpec {
  std::string name;
  BenchSolver kind = BenchSolver::FC;
  SolverConfig config;          // TORRENT variants
  L1Config l1;                  // L1 baseline
  std::vector<double> l1_grid;  // empty -> default grid
};

struct ExperimentSpec {
  enum class Kind { Phase, Sweep, Race };
  Kind kind = Kind::Phase;

  std::vector<double> alpha_grid;
  std::vector<Index> n_grid;
  Index p = 10;
  double sigma = 0.0;
  double magnitude = 5.0;  // corruption scale M
  std::optional<Index> sparsity_s_star;
  AdversaryKind adversary = AdversaryKind::UniformOblivious;

  Index trials_per_cell = 100;
  std::vector<SolverSpec> solvers;
  // Success rule: ||theta - w*||_2 < success_threshold * ||w*||_2.
  double success_threshold = 1e-4;
  std::uint64_t base_seed = 0;

  // When set, each cell runs with beta = min(alpha + beta_margin, 0.5)
  // instead of the solver's configured beta.
  bool match_beta_to_alpha = false;
  double beta_margin = 0.05;
};

void validate(const ExperimentSpec& spec);

std::uint64_t cell_seed(std::uint64_t base, Index cell_index);
std::uint64_t trial_seed(std::uint64_t base, Index cell_index, Index trial);

struct CellResult {
  double alpha = 0.0;
  Index n = 0;
  Index p = 0;
  double sigma = 0.0;
  std::string solver;
  Index trials = 0;
  double success_rate = 0.0;
  double median_error = 0.0;
  double median_wall_time = 0.0;
  double median_iters = 0.0;
  std::uint64_t seed = 0;  // cell seed; trial seeds derive from it by index
};

// One result per (cell, solver), cells in grid order (alpha-major, then n).
std::vector<CellResult> run_phase(const ExperimentSpec& spec);

struct RaceSample {
  std::string solver;
  Index trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t instance_digest = 0;
  Index iter = 0;
  double elapsed_sec = 0.0;
  double rel_error = 0.0;
};

// Per-iteration (time, error) trajectories; every solver runs on the same
// seeded instances (single cell: first alpha, first n).
std::vector<RaceSample> run_race(const ExperimentSpec& spec);

void write_phase_csv(std::ostream& os, const std::vector<CellResult>& cells);
void write_race_csv(std::ostream& os, const std::vector<RaceSample>& samples);

double median(std::vector<double> values);

}  // namespace torrent
