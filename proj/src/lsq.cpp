#include "puw/lsq.hpp"

#include <cmath>
#include <stdexcept>

namespace puw {

namespace {

double mean_of(const Raster<double>& r) {
  double sum = 0.0;
  for (double v : r.data()) sum += v;
  return sum / static_cast<double>(r.size());
}

void validate_gradient_shapes(const GradientField& g, int& rows, int& cols) {
  rows = g.gx.rows();
  cols = g.gy.cols();
  if (rows < 2 || cols < 2 || g.gx.cols() != cols - 1 || g.gy.rows() != rows - 1) {
    throw std::invalid_argument("gradient field shapes are inconsistent");
  }
}

// Normal-equation operator: out(i,j) = sum over existing 4-neighbors of
// (x(i,j) - x(neighbor)). Neumann boundary falls out of simply omitting
// absent neighbors.
void apply_laplacian(const Raster<double>& x, Raster<double>& out) {
  const int r = x.rows(), c = x.cols();
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      double v = 0.0;
      const double xc = x(i, j);
      if (j > 0) v += xc - x(i, j - 1);
      if (j + 1 < c) v += xc - x(i, j + 1);
      if (i > 0) v += xc - x(i - 1, j);
      if (i + 1 < r) v += xc - x(i + 1, j);
      out(i, j) = v;
    }
  }
}

double dot(const Raster<double>& x, const Raster<double>& y) {
  double sum = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) sum += x.data()[n] * y.data()[n];
  return sum;
}

}  // namespace

double wrap_to_half(double d) {
  if (!std::isfinite(d)) throw std::invalid_argument("wrap_to_half: non-finite input");
  double r = d - std::floor(d + 0.5);
  if (r >= 0.5) r = -0.5;  // floating-point edge of the half-open interval
  return r;
}

GradientField wrapped_gradient(const WrappedImage& img) {
  const int r = img.rows(), c = img.cols();
  GradientField g{Raster<double>(r, c - 1), Raster<double>(r - 1, c)};
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j + 1 < c; ++j) {
      g.gx(i, j) = wrap_to_half(img.phi(i, j + 1) - img.phi(i, j));
    }
  }
  for (int i = 0; i + 1 < r; ++i) {
    for (int j = 0; j < c; ++j) {
      g.gy(i, j) = wrap_to_half(img.phi(i + 1, j) - img.phi(i, j));
    }
  }
  return g;
}

LsqResult fit_surface_to_gradient(const GradientField& g, double target_mean,
                                  const PoissonSolveOptions& options) {
  int rows = 0, cols = 0;
  validate_gradient_shapes(g, rows, cols);
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (options.max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
  const int max_iter =
      options.max_iterations > 0 ? options.max_iterations : 10 * (rows + cols);

  // Divergence of the target field; sums to zero by telescoping, so the
  // singular Neumann system is consistent up to rounding.
  Raster<double> b(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double v = 0.0;
      if (j > 0) v += g.gx(i, j - 1);
      if (j + 1 < cols) v -= g.gx(i, j);
      if (i > 0) v += g.gy(i - 1, j);
      if (i + 1 < rows) v -= g.gy(i, j);
      b(i, j) = v;
    }
  }
  const double b_mean = mean_of(b);
  for (double& v : b.data()) v -= b_mean;  // project off the constant nullspace

  LsqResult result{UnwrappedSurface{Raster<double>(rows, cols)}, 0, 0.0, false};
  Raster<double>& x = result.surface.psi;

  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) {
    for (double& v : x.data()) v = target_mean;
    result.converged = true;
    return result;
  }

  // Conjugate gradients; iterates stay mean-free because b is and the
  // operator preserves it.
  Raster<double> r_vec = b;
  Raster<double> p = b;
  Raster<double> ap(rows, cols);
  double rs = dot(r_vec, r_vec);
  for (int it = 1; it <= max_iter; ++it) {
    apply_laplacian(p, ap);
    const double p_ap = dot(p, ap);
    if (!(p_ap > 0.0)) break;  // p in the nullspace: nothing left to reduce
    const double alpha = rs / p_ap;
    for (std::size_t n = 0; n < x.size(); ++n) {
      x.data()[n] += alpha * p.data()[n];
      r_vec.data()[n] -= alpha * ap.data()[n];
    }
    const double rs_next = dot(r_vec, r_vec);
    result.iterations = it;
    if (std::sqrt(rs_next) <= options.tolerance * b_norm) {
      rs = rs_next;
      result.converged = true;
      break;
    }
    const double beta = rs_next / rs;
    for (std::size_t n = 0; n < p.size(); ++n) {
      p.data()[n] = r_vec.data()[n] + beta * p.data()[n];
    }
    rs = rs_next;
  }
  result.residual_norm = std::sqrt(rs) / b_norm;

  const double shift = target_mean - mean_of(x);
  for (double& v : x.data()) v += shift;
  return result;
}

LsqResult lsq_unwrap(const WrappedImage& img, const PoissonSolveOptions& options) {
  return fit_surface_to_gradient(wrapped_gradient(img), mean_of(img.phi), options);
}

LsqResult hybrid_unwrap(const WrappedImage& img, const ShiftField& shifts,
                        const PoissonSolveOptions& options) {
  if (shifts.rows() != img.rows() || shifts.cols() != img.cols()) {
    throw std::invalid_argument("shift field shape does not match the image");
  }
  return fit_surface_to_gradient(gradient_field(img, shifts), mean_of(img.phi), options);
}

}  // namespace puw
