#include "flowpet/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are unsupported");

namespace flowpet {

namespace {

constexpr char kFieldMagic[6] = {'P', 'D', 'E', 'F', '1', '\n'};

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

}  // namespace

void write_field(const std::string& path, const ScalarField& f) {
  std::ofstream os = open_out(path);
  os.write(kFieldMagic, sizeof kFieldMagic);
  write_u32(os, static_cast<std::uint32_t>(f.grid().nx));
  write_u32(os, static_cast<std::uint32_t>(f.grid().ny));
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.values().size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + path);
}

RawField read_field_raw(const std::string& path) {
  std::ifstream is = open_in(path);
  char magic[6];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kFieldMagic, sizeof magic) != 0)
    throw std::runtime_error("not a field file (bad magic): " + path);
  RawField r;
  r.nx = static_cast<int>(read_u32(is));
  r.ny = static_cast<int>(read_u32(is));
  if (!is || r.nx <= 0 || r.ny <= 0 || r.nx > (1 << 20) || r.ny > (1 << 20))
    throw std::runtime_error("field file has implausible dimensions: " + path);
  r.values.resize(static_cast<size_t>(r.nx) * static_cast<size_t>(r.ny));
  is.read(reinterpret_cast<char*>(r.values.data()),
          static_cast<std::streamsize>(r.values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated field file: " + path);
  return r;
}

ScalarField read_field(const std::string& path, const Grid& g) {
  RawField r = read_field_raw(path);
  if (r.nx != g.nx || r.ny != g.ny)
    throw std::runtime_error("field file dims do not match grid: " + path);
  ScalarField f(g, std::move(r.values));
  if (!f.all_finite()) throw std::runtime_error("field file has non-finite values: " + path);
  return f;
}

void write_field_csv(const std::string& path, const ScalarField& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.precision(17);
  const Grid& g = f.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) os << ',';
      os << f.at(i, j);
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

ScalarField read_field_csv(const std::string& path, const Grid& g) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  ScalarField f(g);
  std::string line;
  for (int j = 0; j < g.ny; ++j) {
    if (!std::getline(is, line)) throw std::runtime_error("truncated CSV: " + path);
    std::istringstream ls(line);
    std::string tok;
    for (int i = 0; i < g.nx; ++i) {
      if (!std::getline(ls, tok, ',')) throw std::runtime_error("short CSV row: " + path);
      f.at(i, j) = std::stod(tok);
    }
  }
  return f;
}

}  // namespace flowpet
