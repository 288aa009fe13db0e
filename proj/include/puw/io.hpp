#pragma once

#include <string>

#include "puw/errors.hpp"
#include "puw/grid.hpp"
#include "puw/solver.hpp"

namespace puw {

/// Raster file: ASCII header "PUW1 <rows> <cols>\n" then row-major 64-bit
/// little-endian IEEE-754 payload. Round-trips bit-exactly.
Raster<double> read_raster(const std::string& path);
void write_raster(const std::string& path, const Raster<double>& raster);

/// Shift file: header "PUWS1 <rows> <cols>\n" (grid dimensions) then the
/// horizontal raster followed by the vertical raster as signed bytes, every
/// value in {-1,0,1}.
ShiftField read_shifts(const std::string& path);
void write_shifts(const std::string& path, const ShiftField& shifts);

/// Entropy file: header "PUWE1 <rows> <cols>\n" (grid dimensions) then the
/// horizontal-edge raster followed by the vertical-edge raster as 64-bit
/// little-endian IEEE-754 values.
EntropyMap read_entropy(const std::string& path);
void write_entropy(const std::string& path, const EntropyMap& entropy);

/// One CSV row per temperature:
/// temperature,inv_temperature,sweeps,F,curl_violations,mean_entropy
void write_report_csv(const std::string& path, const SolveReport& report);

struct PgmScale {
  double min = 0.0;
  double max = 0.0;
};

/// 8-bit binary PGM (P5) with min-max scaling; invert maps large values to
/// black. Returns the scale actually applied so callers can report it.
PgmScale write_pgm(const std::string& path, const Raster<double>& raster, bool invert);

}  // namespace puw
