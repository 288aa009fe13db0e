#pragma once

#include "puw/grid.hpp"

namespace puw {

struct PoissonSolveOptions {
  double tolerance = 1e-8;  // relative residual target on the normal equations
  int max_iterations = 0;   // 0 means 10 * (rows + cols)
};

struct LsqResult {
  UnwrappedSurface surface;
  int iterations = 0;
  double residual_norm = 0.0;  // final relative residual
  bool converged = false;
};

/// Maps a real into [-0.5, 0.5), congruent to the input modulo 1.
double wrap_to_half(double d);

/// Per-edge wrapped phase differences: gx = W(phi(i,j+1) - phi(i,j)), gy
/// likewise vertically. Equivalent to the raw difference minus its nearest
/// integer shift.
GradientField wrapped_gradient(const WrappedImage& img);

/// Surface minimizing the squared mismatch to the target gradient field,
/// shifted so its mean equals target_mean. Solves the Neumann-boundary
/// normal equations with matrix-free conjugate gradients; the quadratic is
/// exactly attainable iff the target field is curl-free.
LsqResult fit_surface_to_gradient(const GradientField& g, double target_mean,
                                  const PoissonSolveOptions& options = {});

/// Classical least-squares unwrapping: fit to the wrapped gradient, mean
/// pinned to the mean of the observations.
LsqResult lsq_unwrap(const WrappedImage& img, const PoissonSolveOptions& options = {});

/// Least-squares fit to the gradient field implied by externally supplied
/// shifts (phi differences minus shifts). The shifts may violate the
/// zero-curl constraint; the fit then distributes the inconsistency in the
/// least-squares sense instead of refusing, which is what makes this usable
/// as a post-processor for partially converged shift estimates.
LsqResult hybrid_unwrap(const WrappedImage& img, const ShiftField& shifts,
                        const PoissonSolveOptions& options = {});

}  // namespace puw
