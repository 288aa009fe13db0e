#include "puw/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace puw {

namespace {

constexpr int kMaxEdges = 12;

std::uint64_t pow3(int e) {
  std::uint64_t v = 1;
  for (int n = 0; n < e; ++n) v *= 3;
  return v;
}

}  // namespace

int count_edges(int rows, int cols) {
  return rows * (cols - 1) + (rows - 1) * cols;
}

ShiftField shift_field_from_index(int rows, int cols, std::uint64_t index) {
  ShiftField s(rows, cols);
  for (std::size_t n = 0; n < s.a.size(); ++n) {
    s.a.data()[n] = static_cast<std::int8_t>(static_cast<int>(index % 3) - 1);
    index /= 3;
  }
  for (std::size_t n = 0; n < s.b.size(); ++n) {
    s.b.data()[n] = static_cast<std::int8_t>(static_cast<int>(index % 3) - 1);
    index /= 3;
  }
  if (index != 0) throw std::invalid_argument("configuration index out of range");
  return s;
}

std::uint64_t index_from_shift_field(const ShiftField& shifts) {
  std::uint64_t index = 0;
  std::uint64_t place = 1;
  for (std::size_t n = 0; n < shifts.a.size(); ++n) {
    index += place * static_cast<std::uint64_t>(shifts.a.data()[n] + 1);
    place *= 3;
  }
  for (std::size_t n = 0; n < shifts.b.size(); ++n) {
    index += place * static_cast<std::uint64_t>(shifts.b.data()[n] + 1);
    place *= 3;
  }
  return index;
}

ExactPosterior enumerate_posterior(const WrappedImage& img, const ModelParams& params) {
  const int r = img.rows(), c = img.cols();
  const int edges = count_edges(r, c);
  if (edges > kMaxEdges) {
    throw std::invalid_argument("exhaustive enumeration limited to 12 edges");
  }
  const std::uint64_t total = pow3(edges);

  std::vector<double> energy(total);
  double e_min = std::numeric_limits<double>::infinity();
  std::uint64_t map_index = 0;
  for (std::uint64_t n = 0; n < total; ++n) {
    const double e = joint_energy(img, shift_field_from_index(r, c, n), params);
    energy[n] = e;
    if (e < e_min) {
      e_min = e;
      map_index = n;
    }
  }

  // Normalize in log space around the lowest energy so exp never underflows
  // for the configurations that carry the mass.
  double sum = 0.0;
  std::vector<double> prob(total);
  for (std::uint64_t n = 0; n < total; ++n) {
    prob[n] = std::exp(-(energy[n] - e_min));
    sum += prob[n];
  }
  for (double& p : prob) p /= sum;

  BeliefField marg{Raster<Prob3>(r, c - 1), Raster<Prob3>(r - 1, c)};
  for (std::uint64_t n = 0; n < total; ++n) {
    std::uint64_t rem = n;
    for (std::size_t e = 0; e < marg.alpha.size(); ++e) {
      marg.alpha.data()[e](static_cast<int>(rem % 3) - 1) += prob[n];
      rem /= 3;
    }
    for (std::size_t e = 0; e < marg.beta.size(); ++e) {
      marg.beta.data()[e](static_cast<int>(rem % 3) - 1) += prob[n];
      rem /= 3;
    }
  }

  const double map_probability = prob[map_index];
  return ExactPosterior{r,
                        c,
                        edges,
                        std::move(prob),
                        std::exp(-e_min) * sum,
                        -e_min + std::log(sum),
                        map_index,
                        shift_field_from_index(r, c, map_index),
                        map_probability,
                        std::move(marg)};
}

}  // namespace puw
