#pragma once

// Checkpoints and CSV tables.
//
// Checkpoint layout, all little-endian: "DGBO", u32 version, u64 N, f64 L, f64 alpha, f64 t,
// then N f64 samples.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "dgbo/errors.hpp"
#include "dgbo/grid.hpp"

namespace dgbo::cli {

inline constexpr char kCheckpointMagic[4] = {'D', 'G', 'B', 'O'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  double alpha = 0.0;
  double t = 0.0;
  RealField state;
};

namespace detail {

template <typename U>
void put_le(std::ostream& out, U v) {
  unsigned char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), sizeof(U));
}

template <typename U>
U get_le(std::istream& in, const std::string& what) {
  unsigned char b[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(U))) throw InvalidArgument("checkpoint: truncated while reading " + what);
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

inline void put_f64(std::ostream& out, double x) { put_le(out, std::bit_cast<std::uint64_t>(x)); }
inline double get_f64(std::istream& in, const std::string& what) { return std::bit_cast<double>(get_le<std::uint64_t>(in, what)); }

}  // namespace detail

inline void write_checkpoint(std::ostream& out, const Checkpoint& c) {
  out.write(kCheckpointMagic, 4);
  detail::put_le<std::uint32_t>(out, kCheckpointVersion);
  detail::put_le<std::uint64_t>(out, c.state.size());
  detail::put_f64(out, c.state.grid().length());
  detail::put_f64(out, c.alpha);
  detail::put_f64(out, c.t);
  for (double v : c.state.values()) detail::put_f64(out, v);
}

inline Checkpoint read_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) throw InvalidArgument("checkpoint: bad magic");
  const auto version = detail::get_le<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) throw InvalidArgument("checkpoint: unsupported version " + std::to_string(version));
  const auto n = detail::get_le<std::uint64_t>(in, "N");
  if (n > (std::uint64_t{1} << 32)) throw InvalidArgument("checkpoint: implausible N");
  const double length = detail::get_f64(in, "L");
  Checkpoint c{detail::get_f64(in, "alpha"), detail::get_f64(in, "t"), RealField(Grid(static_cast<std::size_t>(n), length))};
  for (std::size_t j = 0; j < n; ++j) c.state[j] = detail::get_f64(in, "samples");
  if (in.peek() != std::char_traits<char>::eof()) throw InvalidArgument("checkpoint: trailing bytes");
  return c;
}

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_checkpoint(out, c);
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

/// Small CSV writer with a fixed header.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header) : out_(path), width_(header.size()) {
    if (!out_) throw Error("cannot write " + path.string());
    row_strings(header);
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    for (double v : values) s.push_back(format_double(v));
    row_strings(s);
  }

  void row_strings(const std::vector<std::string>& values) {
    require(values.size() == width_, "CsvWriter: row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  std::size_t width_;
};

/// x,u table of a state.
inline void write_state_csv(std::ostream& out, const RealField& u) {
  out << "x,u\n";
  for (std::size_t j = 0; j < u.size(); ++j) out << format_double(u.grid().node(j)) << ',' << format_double(u[j]) << '\n';
}

}  // namespace dgbo::cli
