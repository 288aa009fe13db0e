#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "puw/errors.hpp"
#include "puw/grid.hpp"
#include "puw/synth.hpp"

using namespace puw;

namespace {

TerrainSpec hill_spec() {
  TerrainSpec spec;
  spec.rows = 20;
  spec.cols = 25;
  spec.slope_row = 0.03;
  spec.slope_col = 0.05;
  spec.bumps = {{9.0, 11.0, 1.7, 5.0}};
  spec.noise_std = 0.0;
  spec.seed = 3;
  return spec;
}

}  // namespace

TEST_CASE("generation composes ramp and bump terms exactly") {
  TerrainSpec flat;
  flat.rows = 4;
  flat.cols = 5;
  const UnwrappedSurface zero = generate(flat);
  for (double v : zero.psi.data()) CHECK(v == 0.0);

  TerrainSpec ramp = flat;
  ramp.slope_row = 0.02;
  ramp.slope_col = 0.03;
  const UnwrappedSurface plane = generate(ramp);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 5; ++j) {
      CHECK(plane.psi(i, j) == doctest::Approx(0.02 * i + 0.03 * j).epsilon(1e-12));
    }
  }

  TerrainSpec bumpy = flat;
  bumpy.bumps = {{2.0, 2.0, 1.5, 3.0}};
  const UnwrappedSurface hill = generate(bumpy);
  CHECK(hill.psi(2, 2) == doctest::Approx(1.5).epsilon(1e-12));
  const double off = hill.psi(2, 4);
  CHECK(off == doctest::Approx(1.5 * std::exp(-4.0 / 18.0)).epsilon(1e-12));
}

TEST_CASE("a moderate bump spans multiple wavelengths") {
  TerrainSpec spec;
  spec.rows = 100;
  spec.cols = 100;
  spec.bumps = {{50.0, 50.0, 3.0, 20.0}};
  const UnwrappedSurface surface = generate(spec);
  double lo = surface.psi.data()[0];
  double hi = lo;
  for (double v : surface.psi.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo >= 2.5);
}

TEST_CASE("noisy generation is deterministic per seed") {
  TerrainSpec spec = hill_spec();
  spec.noise_std = 0.05;
  const UnwrappedSurface first = generate(spec);
  const UnwrappedSurface second = generate(spec);
  CHECK(first.psi == second.psi);
  spec.seed = 4;
  const UnwrappedSurface other = generate(spec);
  CHECK_FALSE(first.psi == other.psi);
}

TEST_CASE("generation validates its specification") {
  TerrainSpec tiny;
  tiny.rows = 1;
  CHECK_THROWS_AS(generate(tiny), std::invalid_argument);
  TerrainSpec bad_width = hill_spec();
  bad_width.bumps[0].width = 0.0;
  CHECK_THROWS_AS(generate(bad_width), std::invalid_argument);
  TerrainSpec bad_noise = hill_spec();
  bad_noise.noise_std = -0.1;
  CHECK_THROWS_AS(generate(bad_noise), std::invalid_argument);
}

TEST_CASE("wrapping produces phases, curl-free shifts, and exact gradients") {
  const UnwrappedSurface truth = generate(hill_spec());
  const WrapResult wrapped = wrap_surface(truth);
  for (double v : wrapped.image.phi.data()) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  CHECK(curl(wrapped.shifts).violation_count == 0);
  // The recorded shifts turn wrapped differences back into true ones.
  const GradientField g = gradient_field(wrapped.image, wrapped.shifts);
  for (int i = 0; i < truth.psi.rows(); ++i) {
    for (int j = 0; j + 1 < truth.psi.cols(); ++j) {
      CHECK(g.gx(i, j) ==
            doctest::Approx(truth.psi(i, j + 1) - truth.psi(i, j)).epsilon(1e-9));
    }
  }
  for (int i = 0; i + 1 < truth.psi.rows(); ++i) {
    for (int j = 0; j < truth.psi.cols(); ++j) {
      CHECK(g.gy(i, j) ==
            doctest::Approx(truth.psi(i + 1, j) - truth.psi(i, j)).epsilon(1e-9));
    }
  }
  // Integrating those shifts recovers the surface up to one global integer.
  const UnwrappedSurface rebuilt = integrate(wrapped.image, wrapped.shifts);
  const double offset = rebuilt.psi(0, 0) - truth.psi(0, 0);
  CHECK(std::abs(offset - std::round(offset)) < 1e-9);
  for (int i = 0; i < truth.psi.rows(); ++i) {
    for (int j = 0; j < truth.psi.cols(); ++j) {
      CHECK(rebuilt.psi(i, j) - truth.psi(i, j) ==
            doctest::Approx(offset).epsilon(1e-9));
    }
  }
}

TEST_CASE("wrapping a constant surface gives constant phase and zero shifts") {
  const UnwrappedSurface flat{Raster<double>(3, 3, 7.25)};
  const WrapResult wrapped = wrap_surface(flat);
  for (double v : wrapped.image.phi.data()) {
    CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
  }
  for (auto v : wrapped.shifts.a.data()) CHECK(v == 0);
  for (auto v : wrapped.shifts.b.data()) CHECK(v == 0);
}

TEST_CASE("wrapping rejects surfaces with steep adjacent differences") {
  Raster<double> steep(2, 2);
  steep(0, 0) = 0.0;
  steep(0, 1) = 1.6;
  steep(1, 0) = 0.0;
  steep(1, 1) = 1.6;
  CHECK_THROWS_AS(wrap_surface(UnwrappedSurface{std::move(steep)}), std::domain_error);
}

TEST_CASE("evaluation removes whole-wavelength offsets") {
  const UnwrappedSurface truth = generate(hill_spec());
  UnwrappedSurface shifted = truth;
  for (double& v : shifted.psi.data()) v += 3.0;
  const Metrics exact = evaluate(truth, shifted);
  CHECK(exact.exact_match);
  CHECK(exact.offset == 3);
  CHECK(exact.rmse < 1e-12);
  CHECK(exact.wrapped_rmse < 1e-9);

  UnwrappedSurface half = truth;
  for (double& v : half.psi.data()) v += 0.5;
  const Metrics off = evaluate(truth, half);
  CHECK_FALSE(off.exact_match);
  CHECK(off.rmse == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(off.max_abs_dev == doctest::Approx(0.5).epsilon(1e-9));
  // A constant is pure gauge in the wrapped metric.
  CHECK(off.wrapped_rmse < 1e-9);
}

TEST_CASE("a mean-free error pattern is measured as is") {
  const UnwrappedSurface truth = generate(hill_spec());
  UnwrappedSurface alternating = truth;
  for (std::size_t n = 0; n < alternating.psi.size(); ++n) {
    alternating.psi.data()[n] += (n % 2 == 0) ? 0.2 : -0.2;
  }
  const Metrics m = evaluate(truth, alternating);
  CHECK(m.rmse == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(m.wrapped_rmse == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("the wrapped distance ignores per-pixel whole wavelengths and any constant") {
  const UnwrappedSurface truth = generate(hill_spec());
  Raster<double> mangled = truth.psi;
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> whole(-3, 3);
  for (double& v : mangled.data()) v += whole(rng) + 0.37;
  CHECK(wrapped_rmse(mangled, truth.psi) < 1e-9);
}

TEST_CASE("the wrapped distance finds the best constant across the seam") {
  // Differences of -0.4 and +0.4 are only 0.2 apart on the circle; the
  // minimizing constant sits at the seam, not at the plain mean 0.
  Raster<double> x(2, 2);
  Raster<double> y(2, 2);
  x(0, 0) = 0.4; x(0, 1) = 0.4; x(1, 0) = 0.0; x(1, 1) = 0.0;
  y(0, 0) = 0.0; y(0, 1) = 0.0; y(1, 0) = 0.4; y(1, 1) = 0.4;
  CHECK(wrapped_rmse(x, y) == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("specifications round-trip through their text form") {
  TerrainSpec spec = hill_spec();
  spec.noise_std = 0.05;
  spec.seed = 77;
  spec.slope_row = 1.0 / 3.0;  // exercise full-precision printing
  std::ostringstream out;
  serialize_terrain_spec(spec, out);
  std::istringstream in(out.str());
  const TerrainSpec back = parse_terrain_spec(in);
  CHECK(back.rows == spec.rows);
  CHECK(back.cols == spec.cols);
  CHECK(back.slope_row == spec.slope_row);
  CHECK(back.slope_col == spec.slope_col);
  CHECK(back.noise_std == spec.noise_std);
  CHECK(back.seed == spec.seed);
  REQUIRE(back.bumps.size() == spec.bumps.size());
  for (std::size_t n = 0; n < spec.bumps.size(); ++n) {
    CHECK(back.bumps[n].center_row == spec.bumps[n].center_row);
    CHECK(back.bumps[n].center_col == spec.bumps[n].center_col);
    CHECK(back.bumps[n].amplitude == spec.bumps[n].amplitude);
    CHECK(back.bumps[n].width == spec.bumps[n].width);
  }
}

TEST_CASE("specification parsing tolerates comments and flags malformed input") {
  std::istringstream ok(
      "# synthetic hill\n"
      "rows = 8\n"
      "cols = 9\n"
      "slope_row = 0.01\n"
      "\n"
      "bump.0.center_row = 4\n"
      "bump.0.center_col = 4.5\n"
      "bump.0.amplitude = 1.25\n"
      "bump.0.width = 2\n");
  const TerrainSpec spec = parse_terrain_spec(ok);
  CHECK(spec.rows == 8);
  CHECK(spec.cols == 9);
  CHECK(spec.slope_col == 0.0);
  REQUIRE(spec.bumps.size() == 1);
  CHECK(spec.bumps[0].amplitude == 1.25);

  std::istringstream unknown("rows = 8\ncols = 8\nwavelength = 2\n");
  CHECK_THROWS_AS(parse_terrain_spec(unknown), FormatError);
  std::istringstream missing("rows = 8\ncols = 8\nbump.0.width = 2\n");
  CHECK_THROWS_AS(parse_terrain_spec(missing), FormatError);
  std::istringstream gap(
      "rows = 8\ncols = 8\n"
      "bump.1.center_row = 1\nbump.1.center_col = 1\n"
      "bump.1.amplitude = 1\nbump.1.width = 1\n");
  CHECK_THROWS_AS(parse_terrain_spec(gap), FormatError);
  std::istringstream garbage("rows = eight\n");
  CHECK_THROWS_AS(parse_terrain_spec(garbage), FormatError);
  std::istringstream no_equals("rows 8\n");
  CHECK_THROWS_AS(parse_terrain_spec(no_equals), FormatError);
}

TEST_CASE("presets build valid wrappable terrains") {
  const TerrainSpec easy = preset_default(100, 100, 1);
  CHECK(easy.noise_std == 0.0);
  CHECK(easy.bumps.size() == 3);
  CHECK_NOTHROW(wrap_surface(generate(easy)));

  const TerrainSpec smooth = preset_smooth(64, 64, 1);
  CHECK(smooth.bumps.size() == 2);
  CHECK_NOTHROW(wrap_surface(generate(smooth)));

  const TerrainSpec rough = preset_hard(100, 100, 1);
  CHECK(rough.noise_std == doctest::Approx(0.05));
  CHECK(rough.bumps.size() == 4);
  CHECK_NOTHROW(wrap_surface(generate(rough)));
  // Small grids scale the features down instead of rejecting.
  CHECK_NOTHROW(wrap_surface(generate(preset_default(16, 16, 1))));
}
