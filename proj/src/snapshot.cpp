#include "pgv/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace pgv {

namespace {

constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(b.data(), 4);
}

void put_f64(std::ostream& os, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  os.write(b.data(), 8);
}

bool get_bytes(std::istream& is, char* dst, std::size_t n) {
  is.read(dst, static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(is.gcount()) == n;
}

std::uint32_t get_u32(std::istream& is) {
  std::array<unsigned char, 4> b{};
  if (!get_bytes(is, reinterpret_cast<char*>(b.data()), 4))
    throw std::runtime_error("PGVS: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  if (!get_bytes(is, reinterpret_cast<char*>(b.data()), 8))
    throw std::runtime_error("PGVS: truncated data");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

template <class Tag>
void put_block(std::ostream& os, const char* code, const SpectralField<Tag>& f) {
  os.write(code, 4);
  for (const Complex& c : f.coefficients()) {
    put_f64(os, c.real());
    put_f64(os, c.imag());
  }
}

template <class Tag>
SpectralField<Tag> get_block(std::istream& is, const ModeShape& shape) {
  SpectralField<Tag> f(shape);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    f[i] = Complex(re, im);
  }
  return f;
}

}  // namespace

void write_snapshot(std::ostream& os, const Model& model, const TemperatureField* temperature,
                    const VelocityField* velocity) {
  const ModelConfig& c = model.config();
  os.write("PGVS", 4);
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(c.resolution.nx));
  put_u32(os, static_cast<std::uint32_t>(c.resolution.ny));
  put_u32(os, static_cast<std::uint32_t>(c.resolution.nz_t));
  put_u32(os, static_cast<std::uint32_t>(c.resolution.nz_v));
  put_f64(os, c.domain.lx);
  put_f64(os, c.domain.ly);
  put_f64(os, c.physics.robin_alpha);
  if (temperature) put_block(os, "TEMP", *temperature);
  if (velocity) {
    put_block(os, "VEL1", velocity->v1);
    put_block(os, "VEL2", velocity->v2);
  }
}

void write_snapshot(const std::string& path, const Model& model,
                    const TemperatureField* temperature, const VelocityField* velocity) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot(os, model, temperature, velocity);
  if (!os) throw std::runtime_error("write failed: " + path);
}

Snapshot read_snapshot(std::istream& is) {
  char magic[4];
  if (!get_bytes(is, magic, 4) || std::memcmp(magic, "PGVS", 4) != 0)
    throw std::runtime_error("PGVS: bad magic");
  if (get_u32(is) != kVersion) throw std::runtime_error("PGVS: unsupported version");
  Snapshot s;
  s.nx = get_u32(is);
  s.ny = get_u32(is);
  s.nz_t = get_u32(is);
  s.nz_v = get_u32(is);
  s.lx = get_f64(is);
  s.ly = get_f64(is);
  s.robin_alpha = get_f64(is);
  const int kx = retained_wavenumber(static_cast<int>(s.nx));
  const int ky = retained_wavenumber(static_cast<int>(s.ny));
  const ModeShape t_shape{kx, ky, static_cast<int>(s.nz_t)};
  const ModeShape v_shape{kx, ky, static_cast<int>(s.nz_v)};

  std::optional<SpectralField<VelocityTag>> v1, v2;
  char code[4];
  while (true) {
    is.read(code, 4);
    if (is.gcount() == 0) break;
    if (is.gcount() != 4) throw std::runtime_error("PGVS: truncated block code");
    const std::string tag(code, 4);
    if (tag == "TEMP") {
      s.temperature = get_block<TemperatureTag>(is, t_shape);
    } else if (tag == "VEL1") {
      v1 = get_block<VelocityTag>(is, v_shape);
    } else if (tag == "VEL2") {
      v2 = get_block<VelocityTag>(is, v_shape);
    } else {
      throw std::runtime_error("PGVS: unknown block code '" + tag + "'");
    }
  }
  if (v1.has_value() != v2.has_value())
    throw std::runtime_error("PGVS: velocity needs both VEL1 and VEL2");
  if (v1) {
    VelocityField v;
    v.v1 = std::move(*v1);
    v.v2 = std::move(*v2);
    s.velocity = std::move(v);
  }
  return s;
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_snapshot(is);
}

}  // namespace pgv
