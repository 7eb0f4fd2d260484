#include "eikonal/grid_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace eikonal {

namespace {

constexpr std::array<char, 4> kMagic = {'E', 'I', 'K', 'G'};

template <class UInt>
void put_le(std::ostream& out, UInt value) {
  std::array<char, sizeof(UInt)> bytes;
  for (std::size_t k = 0; k < sizeof(UInt); ++k) bytes[k] = static_cast<char>((value >> (8 * k)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <class UInt>
UInt get_le(std::istream& in) {
  std::array<unsigned char, sizeof(UInt)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw std::runtime_error("grid file truncated");
  }
  UInt value = 0;
  for (std::size_t k = 0; k < sizeof(UInt); ++k) value |= static_cast<UInt>(bytes[k]) << (8 * k);
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_field(std::string_view text, std::size_t line) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("seeds line " + std::to_string(line) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

void write_grid(std::ostream& out, const GridShape& shape, std::span<const double> values) {
  if (values.size() != shape.size()) throw std::invalid_argument("payload size does not match grid shape");
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kGridFileVersion);
  put_le<std::uint64_t>(out, shape.nx());
  put_le<std::uint64_t>(out, shape.ny());
  put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(shape.h()));
  for (double v : values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw std::runtime_error("failed writing grid");
}

void write_grid_file(const std::filesystem::path& path, const GridShape& shape, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_grid(out, shape, values);
}

GridFile read_grid(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw std::runtime_error("not a grid file (bad magic)");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kGridFileVersion) throw std::runtime_error("unsupported grid file version " + std::to_string(version));
  const auto nx = get_le<std::uint64_t>(in);
  const auto ny = get_le<std::uint64_t>(in);
  const double h = std::bit_cast<double>(get_le<std::uint64_t>(in));
  GridShape shape = [&] {
    try {
      return GridShape(nx, ny, h);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("bad grid header: ") + e.what());
    }
  }();
  std::vector<double> values(shape.size());
  for (double& v : values) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
  if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error("grid file has trailing bytes");
  return {shape, std::move(values)};
}

GridFile read_grid_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_grid(in);
}

VelocityGrid read_velocity_file(const std::filesystem::path& path) {
  GridFile f = read_grid_file(path);
  return VelocityGrid(f.shape, std::move(f.values));
}

ArrivalGrid read_arrival_file(const std::filesystem::path& path) {
  GridFile f = read_grid_file(path);
  return ArrivalGrid(f.shape, std::move(f.values));
}

SeedSet read_seeds(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "i,j,t0") throw std::runtime_error("seeds file must start with header i,j,t0");
  SeedSet seeds;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
      throw std::runtime_error("seeds line " + std::to_string(line_no) + ": expected three fields");
    }
    seeds.push_back({parse_field<std::size_t>(row.substr(0, c1), line_no),
                     parse_field<std::size_t>(row.substr(c1 + 1, c2 - c1 - 1), line_no),
                     parse_field<double>(row.substr(c2 + 1), line_no)});
  }
  return seeds;
}

SeedSet read_seeds_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_seeds(in);
}

void write_seeds(std::ostream& out, const SeedSet& seeds) {
  out << "i,j,t0\n";
  for (const Seed& s : seeds) out << s.i << ',' << s.j << ',' << format_double(s.t0) << '\n';
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf.data(), ptr);
}

VelocityGrid make_constant(const GridShape& shape, double speed) {
  if (!(speed > 0.0) || !std::isfinite(speed)) throw std::invalid_argument("speed must be positive and finite");
  return VelocityGrid(shape, std::vector<double>(shape.size(), speed));
}

VelocityGrid make_checkerboard(const GridShape& shape, double slow, double fast, std::size_t cell) {
  if (!(slow > 0.0) || !(fast > 0.0) || !std::isfinite(slow) || !std::isfinite(fast)) {
    throw std::invalid_argument("checkerboard speeds must be positive and finite");
  }
  if (cell == 0) throw std::invalid_argument("checkerboard cell size must be at least 1");
  std::vector<double> values(shape.size());
  for (std::size_t j = 0; j < shape.ny(); ++j) {
    for (std::size_t i = 0; i < shape.nx(); ++i) {
      values[shape.index(i, j)] = ((i / cell + j / cell) % 2 == 0) ? slow : fast;
    }
  }
  return VelocityGrid(shape, std::move(values));
}

VelocityGrid make_lognormal(const GridShape& shape, double median, double sigma, std::uint64_t rng_seed) {
  if (!(median > 0.0) || !std::isfinite(median)) throw std::invalid_argument("lognormal median must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("lognormal sigma must be >= 0");
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values(shape.size());
  for (double& v : values) {
    const double z = normal(rng);
    v = sigma == 0.0 ? median : median * std::exp(sigma * z);
  }
  return VelocityGrid(shape, std::move(values));
}

}  // namespace eikonal
