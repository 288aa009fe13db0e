#pragma once

#include <cstdint>
#include <vector>

#include "puw/model.hpp"

namespace puw {

enum class EdgeFamily : std::uint8_t { A, B };

struct EdgeId {
  EdgeFamily family;
  int i;
  int j;
};

/// Strictly decreasing temperature ladder with a per-temperature sweep budget
/// and a relative change-in-objective convergence threshold.
struct AnnealSchedule {
  std::vector<double> temperatures;
  int max_sweeps_per_temp = 10;
  double f_tolerance = 1e-7;

  /// Geometric ladder from t_start down to t_end in `steps` temperatures.
  /// With steps == 1 the ladder is just {t_start}.
  static AnnealSchedule geometric(double t_start, double t_end, int steps,
                                  int max_sweeps_per_temp = 10, double f_tolerance = 1e-7);

  void validate() const;
};

/// One row per temperature. Free energy, sweep count and argmax curl
/// violations describe the state after the stage's sweeps; mean_entropy is
/// measured on the beliefs entering the stage, so the first row reflects the
/// uniform initialization.
struct TempRecord {
  double temperature;
  int sweeps_used;
  double free_energy;
  int curl_violations;
  double mean_entropy;
  bool reached_tolerance;
};

struct SolveReport {
  std::vector<TempRecord> records;
  BeliefField beliefs;
  ShiftField map_shifts;
  bool converged = false;
};

struct SolveOptions {
  bool randomize_order = false;  // shuffle the edge visit order each sweep
  std::uint64_t seed = 0;
};

/// Per-edge entropies in nats, one raster per edge family.
struct EntropyMap {
  Raster<double> a;  // R x (C-1)
  Raster<double> b;  // (R-1) x C
};

/// Replaces one belief triple with the exact minimizer of the free energy in
/// that coordinate block (softmax of the negated data and coupling costs,
/// floored at 1e-12 and renormalized). Returns the new triple.
Prob3 coordinate_update(const WrappedImage& img, BeliefField& beliefs, const ModelParams& params,
                        const EdgeId& edge);

/// One full pass of coordinate updates in fixed raster order (a-edges then
/// b-edges). Returns the free energy after the pass; never larger than the
/// pre-sweep value beyond floor rounding.
double sweep(const WrappedImage& img, BeliefField& beliefs, const ModelParams& params);

/// Runs the temperature ladder, warm-starting beliefs across temperatures
/// from a uniform initialization. Non-convergence is reported, not thrown.
SolveReport anneal(const WrappedImage& img, const AnnealSchedule& schedule, double sigma,
                   const SolveOptions& options = {});

/// Highest-probability shift of a triple; ties prefer 0, then 1, then -1.
int argmax_shift(const Prob3& t);

/// Per-edge argmax shifts of the beliefs.
ShiftField extract_map_shifts(const BeliefField& beliefs);

EntropyMap entropy_map(const BeliefField& beliefs);

/// Mean per-edge entropy over both edge families, in nats.
double mean_entropy(const BeliefField& beliefs);

}  // namespace puw
