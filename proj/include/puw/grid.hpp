#pragma once

#include <cstdint>
#include <stdexcept>

#include "puw/raster.hpp"

namespace puw {

/// Phase observations on an R x C grid, every value in [0, 1).
/// Grids smaller than 2 x 2 are rejected: they have no 2x2 loop to constrain.
struct WrappedImage {
  Raster<double> phi;

  explicit WrappedImage(Raster<double> values);

  int rows() const { return phi.rows(); }
  int cols() const { return phi.cols(); }
};

/// Integer wrap-count shifts between neighboring pixels, each in {-1, 0, 1}.
/// a(i,j) sits between (i,j) and (i,j+1); b(i,j) between (i,j) and (i+1,j).
struct ShiftField {
  Raster<std::int8_t> a;  // R x (C-1)
  Raster<std::int8_t> b;  // (R-1) x C

  ShiftField(int rows, int cols);  // all-zero shifts
  ShiftField(Raster<std::int8_t> a_in, Raster<std::int8_t> b_in);

  int rows() const { return a.rows(); }
  int cols() const { return b.cols(); }
};

/// Signed loop sum of shifts per 2x2 plaquette, and how many are nonzero.
struct CurlMap {
  Raster<int> c;  // (R-1) x (C-1)
  int violation_count = 0;
};

/// Real-valued per-edge differences of the unwrapped surface implied by
/// (phi, shifts): gx = phi(i,j+1) - phi(i,j) - a(i,j), gy likewise with b.
struct GradientField {
  Raster<double> gx;  // R x (C-1)
  Raster<double> gy;  // (R-1) x C
};

struct UnwrappedSurface {
  Raster<double> psi;
};

/// Thrown when an operation needs a curl-free shift field but got violations.
class CurlViolationError : public std::runtime_error {
 public:
  explicit CurlViolationError(int violation_count);
  int violation_count;
};

/// Maps x to x - floor(x) in [0, 1). Rejects non-finite input.
double wrap(double x);

/// The shift k in {-1,0,1} closest to the raw phase difference d, |d| < 1.
/// Ties at |d| = 0.5 round away from zero.
int local_shift_guess(double d);

/// Per-edge independent shift decisions over the whole image.
ShiftField greedy_shift_field(const WrappedImage& img);

/// c(i,j) = a(i,j) + b(i,j+1) - a(i+1,j) - b(i,j) per plaquette.
CurlMap curl(const ShiftField& shifts);

GradientField gradient_field(const WrappedImage& img, const ShiftField& shifts);

/// Sums the gradient field from the (0,0) anchor: row 0 left to right, then
/// each column downward. Requires zero curl; any traversal order then agrees.
UnwrappedSurface integrate(const WrappedImage& img, const ShiftField& shifts);

}  // namespace puw
