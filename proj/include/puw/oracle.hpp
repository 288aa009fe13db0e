#pragma once

#include <cstdint>
#include <vector>

#include "puw/model.hpp"

namespace puw {

/// Brute-force posterior over every shift configuration of a small grid.
/// Configurations are indexed in base 3: digit n holds (shift + 1) for edge n
/// with place value 3^n, where edges are numbered a-edges in raster order
/// followed by b-edges in raster order.
struct ExactPosterior {
  int rows = 0;
  int cols = 0;
  int edge_count = 0;
  std::vector<double> probabilities;  // 3^edge_count entries, sums to 1
  double partition_value = 0.0;       // sum over configs of exp(-E)
  double log_partition = 0.0;
  std::uint64_t map_index = 0;   // lowest index among energy ties
  ShiftField map_config;
  double map_probability = 0.0;
  BeliefField edge_marginals;    // per-edge marginals of the full posterior
};

int count_edges(int rows, int cols);

/// Decodes a configuration index into a shift field (see ExactPosterior).
ShiftField shift_field_from_index(int rows, int cols, std::uint64_t index);

std::uint64_t index_from_shift_field(const ShiftField& shifts);

/// Enumerates all 3^E configurations. Rejects grids with more than 12 edges
/// (over half a million configurations) with std::invalid_argument.
ExactPosterior enumerate_posterior(const WrappedImage& img, const ModelParams& params);

}  // namespace puw
