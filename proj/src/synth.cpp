#include "puw/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "puw/errors.hpp"
#include "puw/lsq.hpp"

namespace puw {

namespace {

double scale_for(int rows, int cols) { return std::min(rows, cols) / 100.0; }

void validate_spec(const TerrainSpec& spec) {
  if (spec.rows < 2 || spec.cols < 2) {
    throw std::invalid_argument("terrain needs at least 2x2 pixels");
  }
  for (const GaussianBump& b : spec.bumps) {
    if (!(b.width > 0.0)) throw std::invalid_argument("bump width must be positive");
  }
  if (!(spec.noise_std >= 0.0)) throw std::invalid_argument("noise_std must be nonnegative");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw FormatError("bad numeric value for '" + key + "': " + value);
  }
}

long long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw FormatError("bad integer value for '" + key + "': " + value);
  }
}

}  // namespace

TerrainSpec preset_default(int rows, int cols, std::uint64_t seed) {
  const double s = scale_for(rows, cols);
  TerrainSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.slope_row = 0.02;
  spec.slope_col = 0.03;
  // Two opposing steep bumps whose peak slope sits just above the 0.5
  // wavelengths/pixel rounding threshold (max slope of a Gaussian of
  // amplitude A and width w is A/(w*sqrt(e)) ~ 0.505 here): nearest-integer
  // shift guesses get a band of errors around each bump, so annealing has
  // real work to do, yet the slope is shallow enough that the solver can
  // still erode every violation and recover the surface exactly.
  const double steep_width = std::max(6.0 * s, 1.2);
  const double steep_amp = (5.0 / 6.0) * steep_width;
  spec.bumps = {
      {0.35 * rows, 0.30 * cols, steep_amp, steep_width},
      {0.72 * rows, 0.28 * cols, -steep_amp, steep_width},
      {0.65 * rows, 0.70 * cols, -1.5 * s, 25.0 * s},
  };
  spec.noise_std = 0.0;
  spec.seed = seed;
  return spec;
}

TerrainSpec preset_smooth(int rows, int cols, std::uint64_t seed) {
  const double s = scale_for(rows, cols);
  TerrainSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.slope_row = 0.02;
  spec.slope_col = 0.03;
  spec.bumps = {
      {0.35 * rows, 0.30 * cols, 2.0 * s, 18.0 * s},
      {0.65 * rows, 0.70 * cols, -1.5 * s, 25.0 * s},
  };
  spec.noise_std = 0.0;
  spec.seed = seed;
  return spec;
}

TerrainSpec preset_hard(int rows, int cols, std::uint64_t seed) {
  TerrainSpec spec = preset_default(rows, cols, seed);
  const double s = scale_for(rows, cols);
  // A narrow spike steeper than the default bumps (peak slope ~0.53): its
  // ring of shift errors resists annealing, so runs typically finish with
  // residual curl violations and exercise the hybrid fallback path.
  const double spike_width = std::max(4.0 * s, 1.5);
  spec.bumps.push_back({0.18 * rows, 0.72 * cols, 0.875 * spike_width, spike_width});
  spec.noise_std = 0.05;
  return spec;
}

UnwrappedSurface generate(const TerrainSpec& spec) {
  validate_spec(spec);
  UnwrappedSurface surface{Raster<double>(spec.rows, spec.cols)};
  for (int i = 0; i < spec.rows; ++i) {
    for (int j = 0; j < spec.cols; ++j) {
      double v = spec.slope_row * i + spec.slope_col * j;
      for (const GaussianBump& b : spec.bumps) {
        const double di = i - b.center_row;
        const double dj = j - b.center_col;
        v += b.amplitude * std::exp(-(di * di + dj * dj) / (2.0 * b.width * b.width));
      }
      surface.psi(i, j) = v;
    }
  }
  if (spec.noise_std > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_std);
    for (double& v : surface.psi.data()) v += noise(rng);
  }
  return surface;
}

WrapResult wrap_surface(const UnwrappedSurface& surface) {
  const Raster<double>& psi = surface.psi;
  const int r = psi.rows(), c = psi.cols();

  Raster<double> phi(r, c);
  for (std::size_t n = 0; n < psi.size(); ++n) phi.data()[n] = wrap(psi.data()[n]);

  auto shift_for = [&](double phi_diff, double psi_diff) {
    if (!(std::fabs(psi_diff) < 1.5)) {
      throw std::domain_error("surface too steep: adjacent difference of magnitude >= 1.5");
    }
    const long k = std::lround(phi_diff - psi_diff);
    if (k < -1 || k > 1) {
      throw std::domain_error("surface too steep: implied shift outside {-1,0,1}");
    }
    return static_cast<std::int8_t>(k);
  };

  ShiftField shifts(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j + 1 < c; ++j) {
      shifts.a(i, j) = shift_for(phi(i, j + 1) - phi(i, j), psi(i, j + 1) - psi(i, j));
    }
  }
  for (int i = 0; i + 1 < r; ++i) {
    for (int j = 0; j < c; ++j) {
      shifts.b(i, j) = shift_for(phi(i + 1, j) - phi(i, j), psi(i + 1, j) - psi(i, j));
    }
  }
  return {WrappedImage(std::move(phi)), std::move(shifts)};
}

double wrapped_rmse(const Raster<double>& x, const Raster<double>& y) {
  if (!x.same_shape(y)) throw std::invalid_argument("wrapped_rmse: shape mismatch");
  const std::size_t n = x.size();
  // Pointwise mod-1 differences, each mapped to [-0.5, 0.5).
  std::vector<double> e(n);
  for (std::size_t p = 0; p < n; ++p) {
    e[p] = wrap_to_half(x.data()[p] - y.data()[p]);
  }
  // Surfaces are only defined up to a global constant, so minimize
  // sum_p W(e_p - g)^2 over the real constant g. The objective is
  // piecewise quadratic in g: as g sweeps one period, each point's
  // nearest mod-1 representative jumps exactly once (at g = e_p + 0.5).
  // Sweep the sorted breakpoints and evaluate each piece's own minimum
  // in closed form via running sums.
  std::sort(e.begin(), e.end());
  const double count = static_cast<double>(n);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : e) {
    sum += v;
    sum_sq += v * v;
  }
  double best = std::numeric_limits<double>::infinity();
  // Piece m: the m smallest points (all with e_p < g - 0.5) are
  // represented as e_p + 1; the optimal g for that assignment is the
  // plain mean of the shifted values, clamped into the piece's interval
  // (g between e_{m-1} + 0.5 and e_m + 0.5).
  for (std::size_t m = 0; m <= n; ++m) {
    if (m > 0) {
      const double v = e[m - 1];
      sum += 1.0;                  // v -> v + 1
      sum_sq += 2.0 * v + 1.0;     // v^2 -> (v + 1)^2
    }
    double g = sum / count;
    const double lo = (m == 0) ? -std::numeric_limits<double>::infinity() : e[m - 1] + 0.5;
    const double hi = (m == n) ? std::numeric_limits<double>::infinity() : e[m] + 0.5;
    g = std::clamp(g, lo, hi);
    const double objective = sum_sq - 2.0 * g * sum + count * g * g;
    best = std::min(best, objective);
  }
  return std::sqrt(std::max(best, 0.0) / count);
}

Metrics evaluate(const UnwrappedSurface& truth, const UnwrappedSurface& estimate) {
  if (!truth.psi.same_shape(estimate.psi)) {
    throw std::invalid_argument("evaluate: shape mismatch");
  }
  const std::size_t n_pixels = truth.psi.size();

  double mean_diff = 0.0;
  for (std::size_t n = 0; n < n_pixels; ++n) {
    mean_diff += estimate.psi.data()[n] - truth.psi.data()[n];
  }
  mean_diff /= static_cast<double>(n_pixels);

  Metrics m;
  // A correct unwrapping can only be off by a whole number of wavelengths,
  // so the gauge removed before scoring is the nearest integer.
  m.offset = std::lround(mean_diff);
  double sum_sq = 0.0;
  for (std::size_t n = 0; n < n_pixels; ++n) {
    const double dev =
        estimate.psi.data()[n] - truth.psi.data()[n] - static_cast<double>(m.offset);
    sum_sq += dev * dev;
    m.max_abs_dev = std::max(m.max_abs_dev, std::fabs(dev));
  }
  m.rmse = std::sqrt(sum_sq / static_cast<double>(n_pixels));
  m.exact_match = m.max_abs_dev < 1e-6;
  m.wrapped_rmse = wrapped_rmse(estimate.psi, truth.psi);
  return m;
}

void serialize_terrain_spec(const TerrainSpec& spec, std::ostream& out) {
  out << "rows = " << spec.rows << "\n";
  out << "cols = " << spec.cols << "\n";
  out << "slope_row = " << format_double(spec.slope_row) << "\n";
  out << "slope_col = " << format_double(spec.slope_col) << "\n";
  out << "noise_std = " << format_double(spec.noise_std) << "\n";
  out << "seed = " << spec.seed << "\n";
  for (std::size_t n = 0; n < spec.bumps.size(); ++n) {
    const GaussianBump& b = spec.bumps[n];
    const std::string prefix = "bump." + std::to_string(n) + ".";
    out << prefix << "center_row = " << format_double(b.center_row) << "\n";
    out << prefix << "center_col = " << format_double(b.center_col) << "\n";
    out << prefix << "amplitude = " << format_double(b.amplitude) << "\n";
    out << prefix << "width = " << format_double(b.width) << "\n";
  }
}

TerrainSpec parse_terrain_spec(std::istream& in) {
  TerrainSpec spec;
  spec.bumps.clear();
  std::map<std::size_t, GaussianBump> bumps;
  std::map<std::size_t, int> bump_fields_seen;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw FormatError("spec line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw FormatError("spec line " + std::to_string(line_no) + ": empty key or value");
    }

    if (key == "rows") {
      spec.rows = static_cast<int>(parse_integer(key, value));
    } else if (key == "cols") {
      spec.cols = static_cast<int>(parse_integer(key, value));
    } else if (key == "slope_row") {
      spec.slope_row = parse_double(key, value);
    } else if (key == "slope_col") {
      spec.slope_col = parse_double(key, value);
    } else if (key == "noise_std") {
      spec.noise_std = parse_double(key, value);
    } else if (key == "seed") {
      const long long v = parse_integer(key, value);
      if (v < 0) throw FormatError("seed must be nonnegative");
      spec.seed = static_cast<std::uint64_t>(v);
    } else if (key.rfind("bump.", 0) == 0) {
      const std::size_t dot = key.find('.', 5);
      if (dot == std::string::npos) throw FormatError("bad bump key: " + key);
      std::size_t index = 0;
      try {
        std::size_t used = 0;
        index = std::stoul(key.substr(5, dot - 5), &used);
        if (used != dot - 5) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw FormatError("bad bump index in key: " + key);
      }
      const std::string field = key.substr(dot + 1);
      GaussianBump& b = bumps[index];
      int& seen = bump_fields_seen[index];
      if (field == "center_row") {
        b.center_row = parse_double(key, value);
        seen |= 1;
      } else if (field == "center_col") {
        b.center_col = parse_double(key, value);
        seen |= 2;
      } else if (field == "amplitude") {
        b.amplitude = parse_double(key, value);
        seen |= 4;
      } else if (field == "width") {
        b.width = parse_double(key, value);
        seen |= 8;
      } else {
        throw FormatError("unknown bump field: " + key);
      }
    } else {
      throw FormatError("unknown spec key: " + key);
    }
  }
  if (in.bad()) throw IoError("failed reading terrain spec");

  for (const auto& [index, seen] : bump_fields_seen) {
    if (seen != 15) {
      throw FormatError("bump." + std::to_string(index) + " is missing fields");
    }
    if (index != spec.bumps.size()) {
      throw FormatError("bump indices must be contiguous from 0");
    }
    spec.bumps.push_back(bumps[index]);
  }
  return spec;
}

}  // namespace puw
