#include "flowpet/pet_io.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace flowpet {

namespace {

constexpr char kSinoMagic[6] = {'P', 'D', 'E', 'S', '1', '\n'};
constexpr char kProjMagic[6] = {'P', 'D', 'E', 'K', '1', '\n'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

std::string frame_path(const std::string& dir, const std::string& prefix, int t) {
  std::ostringstream name;
  name << prefix << '_';
  name.width(4);
  name.fill('0');
  name << t << ".sino";
  return (std::filesystem::path(dir) / name.str()).string();
}

}  // namespace

void write_sinogram(const std::string& path, const SinogramFrame& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(kSinoMagic, sizeof kSinoMagic);
  write_pod(os, static_cast<std::uint32_t>(f.n_angles));
  write_pod(os, static_cast<std::uint32_t>(f.n_bins));
  os.write(reinterpret_cast<const char*>(f.v.data()),
           static_cast<std::streamsize>(f.v.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + path);
}

SinogramFrame read_sinogram(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  char magic[6];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kSinoMagic, sizeof magic) != 0)
    throw std::runtime_error("not a sinogram file (bad magic): " + path);
  const int na = static_cast<int>(read_pod<std::uint32_t>(is));
  const int nb = static_cast<int>(read_pod<std::uint32_t>(is));
  if (!is || na <= 0 || nb <= 0 || na > (1 << 20) || nb > (1 << 20))
    throw std::runtime_error("sinogram file has implausible dimensions: " + path);
  SinogramFrame f(na, nb);
  is.read(reinterpret_cast<char*>(f.v.data()),
          static_cast<std::streamsize>(f.v.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated sinogram file: " + path);
  return f;
}

void write_sinogram_sequence(const std::string& dir, const std::string& prefix,
                             const SinogramSequence& seq) {
  std::filesystem::create_directories(dir);
  for (int t = 0; t < seq.n_frames(); ++t)
    write_sinogram(frame_path(dir, prefix, t), seq.frames[static_cast<size_t>(t)]);
  std::ofstream mf(std::filesystem::path(dir) / (prefix + "_manifest.txt"));
  if (!mf) throw std::runtime_error("cannot write sinogram manifest in " + dir);
  mf.precision(17);
  mf << "n_frames=" << seq.n_frames() << '\n'
     << "frame_duration=" << seq.frame_duration << '\n';
  if (seq.n_frames() > 0)
    mf << "n_angles=" << seq.frames[0].n_angles << '\n'
       << "n_bins=" << seq.frames[0].n_bins << '\n';
}

SinogramSequence read_sinogram_sequence(const std::string& dir, const std::string& prefix) {
  std::ifstream mf(std::filesystem::path(dir) / (prefix + "_manifest.txt"));
  if (!mf) throw std::runtime_error("missing sinogram manifest for " + prefix + " in " + dir);
  SinogramSequence seq;
  int n_frames = -1;
  std::string line;
  while (std::getline(mf, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "n_frames") n_frames = std::stoi(val);
    if (key == "frame_duration") seq.frame_duration = std::stod(val);
  }
  if (n_frames < 0) throw std::runtime_error("sinogram manifest lacks n_frames");
  for (int t = 0; t < n_frames; ++t) {
    seq.frames.push_back(read_sinogram(frame_path(dir, prefix, t)));
    seq.frames.back().frame_index = t;
  }
  return seq;
}

void write_projector(const std::string& path, const Projector& K) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(kProjMagic, sizeof kProjMagic);
  write_pod(os, static_cast<std::uint32_t>(K.n_angles));
  write_pod(os, static_cast<std::uint32_t>(K.n_bins));
  write_pod(os, static_cast<std::uint32_t>(K.grid.nx));
  write_pod(os, static_cast<std::uint32_t>(K.grid.ny));
  write_pod(os, K.grid.hx);
  write_pod(os, K.grid.hy);
  write_pod(os, K.bin_width);
  write_pod(os, static_cast<std::uint64_t>(K.nnz()));
  for (int r = 0; r < K.rays(); ++r) {
    for (std::int64_t k = K.row_ptr[static_cast<size_t>(r)];
         k < K.row_ptr[static_cast<size_t>(r) + 1]; ++k) {
      write_pod(os, static_cast<std::uint32_t>(r));
      write_pod(os, static_cast<std::uint32_t>(K.col[static_cast<size_t>(k)]));
      write_pod(os, K.weight[static_cast<size_t>(k)]);
    }
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

Projector read_projector(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  char magic[6];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kProjMagic, sizeof magic) != 0)
    throw std::runtime_error("not a projector file (bad magic): " + path);
  Projector K;
  K.n_angles = static_cast<int>(read_pod<std::uint32_t>(is));
  K.n_bins = static_cast<int>(read_pod<std::uint32_t>(is));
  K.grid.nx = static_cast<int>(read_pod<std::uint32_t>(is));
  K.grid.ny = static_cast<int>(read_pod<std::uint32_t>(is));
  K.grid.hx = read_pod<double>(is);
  K.grid.hy = read_pod<double>(is);
  K.grid.x0 = 0.5 * K.grid.hx;
  K.grid.y0 = 0.5 * K.grid.hy;
  K.bin_width = read_pod<double>(is);
  const auto nnz = read_pod<std::uint64_t>(is);
  if (!is) throw std::runtime_error("truncated projector file: " + path);
  K.row_ptr.assign(static_cast<size_t>(K.rays()) + 1, 0);
  K.col.reserve(nnz);
  K.weight.reserve(nnz);
  std::int64_t prev_row = -1;
  for (std::uint64_t k = 0; k < nnz; ++k) {
    const auto row = static_cast<std::int64_t>(read_pod<std::uint32_t>(is));
    const auto c = static_cast<std::int32_t>(read_pod<std::uint32_t>(is));
    const double w = read_pod<double>(is);
    if (!is) throw std::runtime_error("truncated projector file: " + path);
    if (row < prev_row || row >= K.rays() || c < 0 || c >= K.grid.cells() || !(w >= 0.0))
      throw std::runtime_error("corrupt projector file: " + path);
    for (std::int64_t r = prev_row + 1; r <= row; ++r)
      K.row_ptr[static_cast<size_t>(r)] = static_cast<std::int64_t>(k);
    prev_row = row;
    K.col.push_back(c);
    K.weight.push_back(w);
  }
  for (std::int64_t r = prev_row + 1; r <= K.rays(); ++r)
    K.row_ptr[static_cast<size_t>(r)] = static_cast<std::int64_t>(nnz);
  SinogramFrame ones(K.n_angles, K.n_bins, 1.0);
  K.sens = backproject(K, ones);
  return K;
}

}  // namespace flowpet
