#include "puw/grid.hpp"

#include <cmath>
#include <string>

namespace puw {

WrappedImage::WrappedImage(Raster<double> values) : phi(std::move(values)) {
  if (phi.rows() < 2 || phi.cols() < 2) {
    throw std::invalid_argument("wrapped image must be at least 2x2, got " +
                                std::to_string(phi.rows()) + "x" + std::to_string(phi.cols()));
  }
  for (double v : phi.data()) {
    if (!(v >= 0.0 && v < 1.0)) {
      throw std::invalid_argument("wrapped phase values must lie in [0,1)");
    }
  }
}

ShiftField::ShiftField(int rows, int cols)
    : a(rows, cols - 1, 0), b(rows - 1, cols, 0) {
  if (rows < 2 || cols < 2) {
    throw std::invalid_argument("shift field needs a grid of at least 2x2");
  }
}

ShiftField::ShiftField(Raster<std::int8_t> a_in, Raster<std::int8_t> b_in)
    : a(std::move(a_in)), b(std::move(b_in)) {
  if (a.rows() < 2 || b.cols() < 2 || a.rows() != b.rows() + 1 || b.cols() != a.cols() + 1) {
    throw std::invalid_argument("shift rasters have inconsistent shapes");
  }
  for (std::int8_t v : a.data()) {
    if (v < -1 || v > 1) throw std::invalid_argument("shift entries must be in {-1,0,1}");
  }
  for (std::int8_t v : b.data()) {
    if (v < -1 || v > 1) throw std::invalid_argument("shift entries must be in {-1,0,1}");
  }
}

CurlViolationError::CurlViolationError(int count)
    : std::runtime_error("shift field has " + std::to_string(count) + " curl violation(s)"),
      violation_count(count) {}

double wrap(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("wrap: input must be finite");
  double r = x - std::floor(x);
  // x slightly below an integer can round the difference up to exactly 1.
  if (r >= 1.0) r = 0.0;
  return r;
}

int local_shift_guess(double d) {
  if (!(std::fabs(d) < 1.0)) {
    throw std::invalid_argument("local_shift_guess: raw difference must satisfy |d| < 1");
  }
  return static_cast<int>(std::lround(d));  // lround ties away from zero
}

ShiftField greedy_shift_field(const WrappedImage& img) {
  const int r = img.rows(), c = img.cols();
  ShiftField s(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j + 1 < c; ++j) {
      s.a(i, j) = static_cast<std::int8_t>(local_shift_guess(img.phi(i, j + 1) - img.phi(i, j)));
    }
  }
  for (int i = 0; i + 1 < r; ++i) {
    for (int j = 0; j < c; ++j) {
      s.b(i, j) = static_cast<std::int8_t>(local_shift_guess(img.phi(i + 1, j) - img.phi(i, j)));
    }
  }
  return s;
}

CurlMap curl(const ShiftField& shifts) {
  const int r = shifts.rows(), c = shifts.cols();
  CurlMap m{Raster<int>(r - 1, c - 1), 0};
  for (int i = 0; i + 1 < r; ++i) {
    for (int j = 0; j + 1 < c; ++j) {
      const int v = shifts.a(i, j) + shifts.b(i, j + 1) - shifts.a(i + 1, j) - shifts.b(i, j);
      m.c(i, j) = v;
      if (v != 0) ++m.violation_count;
    }
  }
  return m;
}

GradientField gradient_field(const WrappedImage& img, const ShiftField& shifts) {
  const int r = img.rows(), c = img.cols();
  if (shifts.rows() != r || shifts.cols() != c) {
    throw std::invalid_argument("gradient_field: image and shift shapes disagree");
  }
  GradientField g{Raster<double>(r, c - 1), Raster<double>(r - 1, c)};
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j + 1 < c; ++j) {
      g.gx(i, j) = img.phi(i, j + 1) - img.phi(i, j) - shifts.a(i, j);
    }
  }
  for (int i = 0; i + 1 < r; ++i) {
    for (int j = 0; j < c; ++j) {
      g.gy(i, j) = img.phi(i + 1, j) - img.phi(i, j) - shifts.b(i, j);
    }
  }
  return g;
}

UnwrappedSurface integrate(const WrappedImage& img, const ShiftField& shifts) {
  const CurlMap m = curl(shifts);
  if (m.violation_count != 0) throw CurlViolationError(m.violation_count);

  const GradientField g = gradient_field(img, shifts);
  const int r = img.rows(), c = img.cols();
  Raster<double> psi(r, c);
  psi(0, 0) = img.phi(0, 0);
  for (int j = 0; j + 1 < c; ++j) psi(0, j + 1) = psi(0, j) + g.gx(0, j);
  for (int j = 0; j < c; ++j) {
    for (int i = 0; i + 1 < r; ++i) psi(i + 1, j) = psi(i, j) + g.gy(i, j);
  }
  return {psi};
}

}  // namespace puw
