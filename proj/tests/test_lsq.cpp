#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "puw/grid.hpp"
#include "puw/lsq.hpp"
#include "puw/synth.hpp"

using namespace puw;

namespace {

double spread(const Raster<double>& x, const Raster<double>& y) {
  // Maximum deviation from the mean difference: distance up to a constant.
  double mean = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) mean += x.data()[n] - y.data()[n];
  mean /= static_cast<double>(x.size());
  double worst = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    worst = std::max(worst, std::abs(x.data()[n] - y.data()[n] - mean));
  }
  return worst;
}

TerrainSpec rolling_terrain() {
  TerrainSpec spec;
  spec.rows = 24;
  spec.cols = 30;
  spec.slope_row = 0.04;
  spec.slope_col = 0.07;
  spec.bumps = {{10.0, 8.0, 1.4, 6.0}, {16.0, 22.0, -1.1, 7.0}};
  spec.noise_std = 0.0;
  return spec;
}

}  // namespace

TEST_CASE("half-open wrapping picks the nearest congruent representative") {
  CHECK(wrap_to_half(0.6) == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(wrap_to_half(0.1) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(wrap_to_half(-0.9) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(wrap_to_half(2.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(wrap_to_half(0.5) == -0.5);
  CHECK(wrap_to_half(-0.5) == -0.5);
  CHECK(wrap_to_half(1.0) == 0.0);
  CHECK(wrap_to_half(-1.0) == 0.0);
  CHECK(wrap_to_half(0.0) == 0.0);
  CHECK_THROWS_AS(wrap_to_half(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("wrapped gradients equal the nearest-integer-shift gradients") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Raster<double> phi(7, 6);
  for (double& v : phi.data()) {
    v = u(rng);
    if (v >= 1.0) v = 0.0;
  }
  const WrappedImage img(std::move(phi));
  const GradientField direct = wrapped_gradient(img);
  const GradientField via_shifts = gradient_field(img, greedy_shift_field(img));
  for (std::size_t n = 0; n < direct.gx.size(); ++n) {
    CHECK(direct.gx.data()[n] == doctest::Approx(via_shifts.gx.data()[n]).epsilon(1e-12));
  }
  for (std::size_t n = 0; n < direct.gy.size(); ++n) {
    CHECK(direct.gy.data()[n] == doctest::Approx(via_shifts.gy.data()[n]).epsilon(1e-12));
  }
}

TEST_CASE("fitting consistent gradients reproduces the surface") {
  const UnwrappedSurface truth = generate(rolling_terrain());
  const WrapResult wrapped = wrap_surface(truth);
  const GradientField g = gradient_field(wrapped.image, wrapped.shifts);
  const LsqResult fit = fit_surface_to_gradient(g, 0.0, {});
  CHECK(fit.converged);
  CHECK(fit.residual_norm <= 1e-8);
  CHECK(spread(fit.surface.psi, truth.psi) < 1e-6);
}

TEST_CASE("zero gradients produce a flat surface at the requested mean") {
  GradientField g{Raster<double>(5, 4), Raster<double>(4, 5)};
  const LsqResult fit = fit_surface_to_gradient(g, 2.5, {});
  CHECK(fit.converged);
  for (double v : fit.surface.psi.data()) {
    CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
  }
}

TEST_CASE("the fitted surface honors the mean gauge") {
  const UnwrappedSurface truth = generate(rolling_terrain());
  const WrapResult wrapped = wrap_surface(truth);
  const LsqResult fit = lsq_unwrap(wrapped.image);
  double phase_mean = 0.0;
  for (double v : wrapped.image.phi.data()) phase_mean += v;
  phase_mean /= static_cast<double>(wrapped.image.phi.size());
  double fit_mean = 0.0;
  for (double v : fit.surface.psi.data()) fit_mean += v;
  fit_mean /= static_cast<double>(fit.surface.psi.size());
  CHECK(fit_mean == doctest::Approx(phase_mean).epsilon(1e-9));
}

TEST_CASE("plain least squares is exact when no difference wraps") {
  // Amplitudes small enough that every adjacent difference stays inside
  // (-1/2, 1/2): the wrapped gradients are already the true ones.
  TerrainSpec spec;
  spec.rows = 12;
  spec.cols = 12;
  spec.slope_row = 0.01;
  spec.slope_col = 0.02;
  spec.bumps = {{6.0, 6.0, 0.8, 5.0}};
  const UnwrappedSurface truth = generate(spec);
  const WrapResult wrapped = wrap_surface(truth);
  const LsqResult fit = lsq_unwrap(wrapped.image);
  CHECK(fit.converged);
  CHECK(spread(fit.surface.psi, truth.psi) < 1e-6);
}

TEST_CASE("shift-informed fitting matches direct integration on curl-free fields") {
  const UnwrappedSurface truth = generate(rolling_terrain());
  const WrapResult wrapped = wrap_surface(truth);
  REQUIRE(curl(wrapped.shifts).violation_count == 0);
  const LsqResult fit = hybrid_unwrap(wrapped.image, wrapped.shifts);
  const UnwrappedSurface direct = integrate(wrapped.image, wrapped.shifts);
  CHECK(fit.converged);
  CHECK(spread(fit.surface.psi, direct.psi) < 1e-6);
}

TEST_CASE("iteration caps surface as non-convergence, not an exception") {
  const UnwrappedSurface truth = generate(rolling_terrain());
  const WrapResult wrapped = wrap_surface(truth);
  PoissonSolveOptions options;
  options.max_iterations = 1;
  const LsqResult fit = lsq_unwrap(wrapped.image, options);
  CHECK_FALSE(fit.converged);
  CHECK(fit.iterations == 1);
  for (double v : fit.surface.psi.data()) CHECK(std::isfinite(v));
}

TEST_CASE("gradient fitting validates shapes and options") {
  GradientField bad{Raster<double>(5, 4), Raster<double>(3, 5)};
  CHECK_THROWS_AS(fit_surface_to_gradient(bad, 0.0, {}), std::invalid_argument);
  GradientField good{Raster<double>(5, 4), Raster<double>(4, 5)};
  PoissonSolveOptions negative_tol;
  negative_tol.tolerance = -1.0;
  CHECK_THROWS_AS(fit_surface_to_gradient(good, 0.0, negative_tol),
                  std::invalid_argument);
  const UnwrappedSurface truth = generate(rolling_terrain());
  const WrapResult wrapped = wrap_surface(truth);
  CHECK_THROWS_AS(hybrid_unwrap(wrapped.image, ShiftField(5, 5)),
                  std::invalid_argument);
}
