#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "puw/grid.hpp"

namespace puw {

struct GaussianBump {
  double center_row = 0.0;
  double center_col = 0.0;
  double amplitude = 0.0;  // wavelengths at the peak
  double width = 1.0;      // Gaussian standard deviation, pixels
};

/// Recipe for a deterministic synthetic surface: linear ramp plus Gaussian
/// bumps plus optional seeded Gaussian noise, all in wavelength units.
struct TerrainSpec {
  int rows = 100;
  int cols = 100;
  double slope_row = 0.0;  // wavelengths per pixel step down a column
  double slope_col = 0.0;  // wavelengths per pixel step along a row
  std::vector<GaussianBump> bumps;
  double noise_std = 0.0;
  std::uint64_t seed = 1;
};

/// Ramp plus two bumps, one steep enough that nearest-integer edge decisions
/// fail on a band around it (the interesting regime for annealed inference)
/// while every true adjacent difference stays well under one wavelength.
TerrainSpec preset_default(int rows = 100, int cols = 100, std::uint64_t seed = 1);

/// Gentle ramp-and-bumps terrain whose adjacent differences stay far below
/// half a wavelength: every method should unwrap it exactly.
TerrainSpec preset_smooth(int rows = 100, int cols = 100, std::uint64_t seed = 1);

/// The default terrain plus an even steeper bump and additive noise
/// (std 0.05), built to leave residual loop inconsistencies in per-edge
/// decisions so least-squares fits smear and truncated anneals end dirty.
TerrainSpec preset_hard(int rows = 100, int cols = 100, std::uint64_t seed = 1);

UnwrappedSurface generate(const TerrainSpec& spec);

struct WrapResult {
  WrappedImage image;
  ShiftField shifts;  // ground truth; always curl-free
};

/// Wraps a surface into [0,1) phases and the exact integer shifts that make
/// gradient_field(image, shifts) reproduce the true adjacent differences.
/// Rejects surfaces with an adjacent difference of magnitude >= 1.5 or whose
/// implied shift falls outside {-1,0,1}.
WrapResult wrap_surface(const UnwrappedSurface& surface);

struct Metrics {
  double rmse = 0.0;         // after removing the best integer offset
  double max_abs_dev = 0.0;  // likewise
  long offset = 0;           // the removed integer offset
  bool exact_match = false;  // max_abs_dev < 1e-6
  double wrapped_rmse = 0.0; // rms of the mod-1 distance, offset-insensitive
};

Metrics evaluate(const UnwrappedSurface& truth, const UnwrappedSurface& estimate);

/// Root-mean-square of the wrapped (mod 1, nearest representative)
/// pointwise differences between two same-shape rasters, minimized over a
/// global real constant — surfaces are only defined up to a constant, so
/// the metric is gauge-free (adding any constant or per-pixel integers to
/// either raster leaves it unchanged).
double wrapped_rmse(const Raster<double>& x, const Raster<double>& y);

/// Flat `key = value` text form; bumps appear as bump.N.center_row etc.
void serialize_terrain_spec(const TerrainSpec& spec, std::ostream& out);

/// Inverse of serialize_terrain_spec; '#' starts a comment. Malformed input
/// raises FormatError.
TerrainSpec parse_terrain_spec(std::istream& in);

}  // namespace puw
