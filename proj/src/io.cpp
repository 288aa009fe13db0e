#include "puw/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace puw {

namespace {

constexpr std::size_t kMaxPixels = 100'000'000;  // refuse absurd headers

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

void write_doubles(std::ostream& out, const std::vector<double>& values) {
  std::vector<char> buf(values.size() * 8);
  for (std::size_t n = 0; n < values.size(); ++n) {
    char bytes[8];
    std::memcpy(bytes, &values[n], 8);
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(bytes, bytes + 8);
    }
    std::memcpy(buf.data() + n * 8, bytes, 8);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void read_doubles(std::istream& in, std::vector<double>& values) {
  std::vector<char> buf(values.size() * 8);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
    throw FormatError("truncated payload");
  }
  for (std::size_t n = 0; n < values.size(); ++n) {
    char bytes[8];
    std::memcpy(bytes, buf.data() + n * 8, 8);
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(bytes, bytes + 8);
    }
    std::memcpy(&values[n], bytes, 8);
  }
}

void expect_eof(std::istream& in, const std::string& path) {
  char extra;
  if (in.read(&extra, 1).gcount() != 0) {
    throw FormatError("trailing bytes after payload: " + path);
  }
}

void parse_header(std::istream& in, const std::string& path, const char* magic, int& rows,
                  int& cols) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing header: " + path);
  std::istringstream fields(line);
  std::string tag;
  long long r = 0, c = 0;
  if (!(fields >> tag >> r >> c) || tag != magic) {
    throw FormatError("bad header (expected \"" + std::string(magic) + " <rows> <cols>\"): " +
                      path);
  }
  std::string rest;
  if (fields >> rest) throw FormatError("bad header (extra fields): " + path);
  if (r < 2 || c < 2) throw FormatError("header dimensions below 2x2: " + path);
  if (static_cast<std::size_t>(r) * static_cast<std::size_t>(c) > kMaxPixels) {
    throw FormatError("header dimensions unreasonably large: " + path);
  }
  rows = static_cast<int>(r);
  cols = static_cast<int>(c);
}

void write_header(std::ostream& out, const char* magic, int rows, int cols) {
  out << magic << ' ' << rows << ' ' << cols << '\n';
}

void check_write(std::ostream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Raster<double> read_raster(const std::string& path) {
  std::ifstream in = open_in(path);
  int rows = 0, cols = 0;
  parse_header(in, path, "PUW1", rows, cols);
  Raster<double> raster(rows, cols);
  read_doubles(in, raster.data());
  expect_eof(in, path);
  return raster;
}

void write_raster(const std::string& path, const Raster<double>& raster) {
  std::ofstream out = open_out(path);
  write_header(out, "PUW1", raster.rows(), raster.cols());
  write_doubles(out, raster.data());
  check_write(out, path);
}

ShiftField read_shifts(const std::string& path) {
  std::ifstream in = open_in(path);
  int rows = 0, cols = 0;
  parse_header(in, path, "PUWS1", rows, cols);
  ShiftField shifts(rows, cols);
  auto read_family = [&](Raster<std::int8_t>& raster) {
    in.read(reinterpret_cast<char*>(raster.data().data()),
            static_cast<std::streamsize>(raster.size()));
    if (static_cast<std::size_t>(in.gcount()) != raster.size()) {
      throw FormatError("truncated payload");
    }
    for (std::int8_t v : raster.data()) {
      if (v < -1 || v > 1) throw FormatError("shift value outside {-1,0,1}: " + path);
    }
  };
  read_family(shifts.a);
  read_family(shifts.b);
  expect_eof(in, path);
  return shifts;
}

void write_shifts(const std::string& path, const ShiftField& shifts) {
  std::ofstream out = open_out(path);
  write_header(out, "PUWS1", shifts.rows(), shifts.cols());
  out.write(reinterpret_cast<const char*>(shifts.a.data().data()),
            static_cast<std::streamsize>(shifts.a.size()));
  out.write(reinterpret_cast<const char*>(shifts.b.data().data()),
            static_cast<std::streamsize>(shifts.b.size()));
  check_write(out, path);
}

EntropyMap read_entropy(const std::string& path) {
  std::ifstream in = open_in(path);
  int rows = 0, cols = 0;
  parse_header(in, path, "PUWE1", rows, cols);
  EntropyMap entropy{Raster<double>(rows, cols - 1), Raster<double>(rows - 1, cols)};
  read_doubles(in, entropy.a.data());
  read_doubles(in, entropy.b.data());
  expect_eof(in, path);
  return entropy;
}

void write_entropy(const std::string& path, const EntropyMap& entropy) {
  const int rows = entropy.a.rows();
  const int cols = entropy.b.cols();
  if (entropy.a.cols() != cols - 1 || entropy.b.rows() != rows - 1) {
    throw std::invalid_argument("entropy map shapes are inconsistent");
  }
  std::ofstream out = open_out(path);
  write_header(out, "PUWE1", rows, cols);
  write_doubles(out, entropy.a.data());
  write_doubles(out, entropy.b.data());
  check_write(out, path);
}

void write_report_csv(const std::string& path, const SolveReport& report) {
  std::ofstream out = open_out(path);
  out << "temperature,inv_temperature,sweeps,F,curl_violations,mean_entropy\n";
  for (const TempRecord& rec : report.records) {
    out << format_double(rec.temperature) << ',' << format_double(1.0 / rec.temperature) << ','
        << rec.sweeps_used << ',' << format_double(rec.free_energy) << ',' << rec.curl_violations
        << ',' << format_double(rec.mean_entropy) << '\n';
  }
  check_write(out, path);
}

PgmScale write_pgm(const std::string& path, const Raster<double>& raster, bool invert) {
  PgmScale scale{std::numeric_limits<double>::infinity(),
                 -std::numeric_limits<double>::infinity()};
  for (double v : raster.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("PGM export needs finite values");
    scale.min = std::min(scale.min, v);
    scale.max = std::max(scale.max, v);
  }
  const double span = scale.max - scale.min;

  std::ofstream out = open_out(path);
  out << "P5\n" << raster.cols() << ' ' << raster.rows() << "\n255\n";
  std::vector<unsigned char> bytes(raster.size());
  for (std::size_t n = 0; n < raster.size(); ++n) {
    int gray = span > 0.0
                   ? static_cast<int>(std::lround(255.0 * (raster.data()[n] - scale.min) / span))
                   : 0;
    gray = std::clamp(gray, 0, 255);
    if (invert) gray = 255 - gray;
    bytes[n] = static_cast<unsigned char>(gray);
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  check_write(out, path);
  return scale;
}

}  // namespace puw
