#pragma once

#include <array>

#include "puw/grid.hpp"

namespace puw {

/// Temperature of the loop-sum prior and standard deviation of the Gaussian
/// data term, both required positive.
struct ModelParams {
  double temperature;
  double sigma;

  ModelParams(double temperature_in, double sigma_in);
};

/// Probability triple over the shift alphabet {-1, 0, 1}, indexed by shift.
struct Prob3 {
  std::array<double, 3> p{0.0, 0.0, 0.0};

  double operator()(int k) const { return p[static_cast<std::size_t>(k + 1)]; }
  double& operator()(int k) { return p[static_cast<std::size_t>(k + 1)]; }

  static Prob3 uniform() { return Prob3{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}; }
  static Prob3 point_mass(int k);

  double first_moment() const { return p[2] - p[0]; }
  double second_moment() const { return p[2] + p[0]; }
  double entropy() const;  // nats, with 0 log 0 = 0
  bool is_simplex(double tol = 1e-9) const;
};

/// Factorized distribution over a shift field: one triple per edge.
struct BeliefField {
  Raster<Prob3> alpha;  // R x (C-1)
  Raster<Prob3> beta;   // (R-1) x C

  static BeliefField uniform(int rows, int cols);
  static BeliefField point_mass(const ShiftField& shifts);

  int rows() const { return alpha.rows(); }
  int cols() const { return beta.cols(); }
  std::size_t edge_count() const { return alpha.size() + beta.size(); }

  void validate() const;  // throws if any triple is off the simplex
};

/// Energy of a shift configuration:
///   sum_plaquettes c^2 / T + sum_edges residual^2 / (2 sigma^2),
/// so that the joint probability is proportional to exp(-E).
double joint_energy(const WrappedImage& img, const ShiftField& shifts, const ModelParams& params);

/// Expectation of the squared plaquette loop sum under the factorized beliefs,
/// evaluated as the explicit sum over all 81 shift combinations.
double expected_plaquette_curl_sq(const BeliefField& beliefs, int i, int j);

/// Variational objective: negative belief entropy plus expected energy.
/// Equals joint_energy exactly when the beliefs are point masses.
double free_energy(const WrappedImage& img, const BeliefField& beliefs, const ModelParams& params);

}  // namespace puw
