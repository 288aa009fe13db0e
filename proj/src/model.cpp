#include "puw/model.hpp"

#include <cmath>
#include <stdexcept>

namespace puw {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

ModelParams::ModelParams(double temperature_in, double sigma_in)
    : temperature(temperature_in), sigma(sigma_in) {
  if (!(temperature > 0.0) || !(sigma > 0.0)) {
    throw std::invalid_argument("model parameters require temperature > 0 and sigma > 0");
  }
}

Prob3 Prob3::point_mass(int k) {
  if (k < -1 || k > 1) throw std::invalid_argument("shift value must be in {-1,0,1}");
  Prob3 t;
  t(k) = 1.0;
  return t;
}

double Prob3::entropy() const { return -(xlogx(p[0]) + xlogx(p[1]) + xlogx(p[2])); }

bool Prob3::is_simplex(double tol) const {
  if (p[0] < 0.0 || p[1] < 0.0 || p[2] < 0.0) return false;
  return std::fabs(p[0] + p[1] + p[2] - 1.0) <= tol;
}

BeliefField BeliefField::uniform(int rows, int cols) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("belief field needs a grid of at least 2x2");
  return BeliefField{Raster<Prob3>(rows, cols - 1, Prob3::uniform()),
                     Raster<Prob3>(rows - 1, cols, Prob3::uniform())};
}

BeliefField BeliefField::point_mass(const ShiftField& shifts) {
  BeliefField b = uniform(shifts.rows(), shifts.cols());
  for (std::size_t n = 0; n < b.alpha.size(); ++n) {
    b.alpha.data()[n] = Prob3::point_mass(shifts.a.data()[n]);
  }
  for (std::size_t n = 0; n < b.beta.size(); ++n) {
    b.beta.data()[n] = Prob3::point_mass(shifts.b.data()[n]);
  }
  return b;
}

void BeliefField::validate() const {
  if (alpha.rows() != beta.rows() + 1 || beta.cols() != alpha.cols() + 1) {
    throw std::invalid_argument("belief rasters have inconsistent shapes");
  }
  for (const Prob3& t : alpha.data()) {
    if (!t.is_simplex()) throw std::invalid_argument("alpha triple is not a probability simplex");
  }
  for (const Prob3& t : beta.data()) {
    if (!t.is_simplex()) throw std::invalid_argument("beta triple is not a probability simplex");
  }
}

double joint_energy(const WrappedImage& img, const ShiftField& shifts, const ModelParams& params) {
  const int r = img.rows(), c = img.cols();
  if (shifts.rows() != r || shifts.cols() != c) {
    throw std::invalid_argument("joint_energy: image and shift shapes disagree");
  }

  double curl_sq = 0.0;
  for (int i = 0; i + 1 < r; ++i) {
    for (int j = 0; j + 1 < c; ++j) {
      const int v = shifts.a(i, j) + shifts.b(i, j + 1) - shifts.a(i + 1, j) - shifts.b(i, j);
      curl_sq += static_cast<double>(v) * v;
    }
  }

  double data_sq = 0.0;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j + 1 < c; ++j) {
      const double d = img.phi(i, j + 1) - img.phi(i, j) - shifts.a(i, j);
      data_sq += d * d;
    }
  }
  for (int i = 0; i + 1 < r; ++i) {
    for (int j = 0; j < c; ++j) {
      const double d = img.phi(i + 1, j) - img.phi(i, j) - shifts.b(i, j);
      data_sq += d * d;
    }
  }

  return curl_sq / params.temperature + data_sq / (2.0 * params.sigma * params.sigma);
}

double expected_plaquette_curl_sq(const BeliefField& beliefs, int i, int j) {
  if (i < 0 || j < 0 || i + 1 >= beliefs.rows() || j + 1 >= beliefs.cols()) {
    throw std::out_of_range("plaquette index out of range");
  }
  const Prob3& top = beliefs.alpha(i, j);
  const Prob3& right = beliefs.beta(i, j + 1);
  const Prob3& bottom = beliefs.alpha(i + 1, j);
  const Prob3& left = beliefs.beta(i, j);

  double e = 0.0;
  for (int k = -1; k <= 1; ++k) {
    for (int l = -1; l <= 1; ++l) {
      for (int m = -1; m <= 1; ++m) {
        for (int n = -1; n <= 1; ++n) {
          const int loop = k + l - m - n;
          e += top(k) * right(l) * bottom(m) * left(n) * static_cast<double>(loop * loop);
        }
      }
    }
  }
  return e;
}

double free_energy(const WrappedImage& img, const BeliefField& beliefs, const ModelParams& params) {
  const int r = img.rows(), c = img.cols();
  if (beliefs.rows() != r || beliefs.cols() != c) {
    throw std::invalid_argument("free_energy: image and belief shapes disagree");
  }
  beliefs.validate();

  double neg_entropy = 0.0;
  for (const Prob3& t : beliefs.alpha.data()) neg_entropy -= t.entropy();
  for (const Prob3& t : beliefs.beta.data()) neg_entropy -= t.entropy();

  double plaquette = 0.0;
  for (int i = 0; i + 1 < r; ++i) {
    for (int j = 0; j + 1 < c; ++j) plaquette += expected_plaquette_curl_sq(beliefs, i, j);
  }

  double data = 0.0;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j + 1 < c; ++j) {
      const double d = img.phi(i, j + 1) - img.phi(i, j);
      const Prob3& t = beliefs.alpha(i, j);
      for (int k = -1; k <= 1; ++k) data += t(k) * (d - k) * (d - k);
    }
  }
  for (int i = 0; i + 1 < r; ++i) {
    for (int j = 0; j < c; ++j) {
      const double d = img.phi(i + 1, j) - img.phi(i, j);
      const Prob3& t = beliefs.beta(i, j);
      for (int k = -1; k <= 1; ++k) data += t(k) * (d - k) * (d - k);
    }
  }

  return neg_entropy + plaquette / params.temperature +
         data / (2.0 * params.sigma * params.sigma);
}

}  // namespace puw
