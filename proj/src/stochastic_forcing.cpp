#include "pgv/stochastic_forcing.hpp"

#include <cmath>
#include <numbers>

#include "pgv/errors.hpp"

namespace pgv {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}
}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

double philox_normal(std::uint64_t seed, std::uint32_t stream, std::uint32_t lane,
                     std::uint64_t index) {
  const auto out = philox4x32({static_cast<std::uint32_t>(index),
                               static_cast<std::uint32_t>(index >> 32), lane, stream},
                              {static_cast<std::uint32_t>(seed),
                               static_cast<std::uint32_t>(seed >> 32)});
  const double u1 = to_open_unit(out[0], out[1]);
  const double u2 = to_open_unit(out[2], out[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t member) {
  return splitmix64(splitmix64(seed) ^ (member * 0xD1B54A32D192ED03ull + 1));
}

WienerPath::WienerPath(std::uint64_t seed, double dt_w, std::int64_t offset)
    : seed_(seed), dt_w_(dt_w), offset_(offset) {
  if (!(dt_w > 0.0) || !std::isfinite(dt_w))
    throw InvalidArgument("WienerPath: dt_w must be positive");
}

double WienerPath::increment(std::size_t rank, std::int64_t j) const {
  return std::sqrt(dt_w_) * philox_normal(seed_, static_cast<std::uint32_t>(Stream::Wiener),
                                          static_cast<std::uint32_t>(rank),
                                          static_cast<std::uint64_t>(j + offset_));
}

double WienerPath::increment(std::size_t rank, std::int64_t j, int count) const {
  double s = 0.0;
  for (int i = 0; i < count; ++i) s += increment(rank, j + i);
  return s;
}

namespace {
std::int64_t grid_steps(double t, double dt_w, const char* what) {
  const double ratio = t / dt_w;
  const double r = std::round(ratio);
  if (!std::isfinite(ratio) || std::abs(ratio - r) > 1e-9 * std::max(1.0, std::abs(ratio)))
    throw InvalidArgument(std::string(what) + ": " + std::to_string(t) +
                          " is not a multiple of dt_w=" + std::to_string(dt_w));
  return static_cast<std::int64_t>(r);
}
}  // namespace

int WienerPath::steps_in(double dt) const {
  const std::int64_t n = grid_steps(dt, dt_w_, "time step");
  if (n < 1) throw InvalidArgument("time step must be positive");
  return static_cast<int>(n);
}

WienerPath wiener_shift(const WienerPath& path, double t) {
  return WienerPath(path.seed(), path.dt_w(),
                    path.offset() + grid_steps(t, path.dt_w(), "wiener_shift"));
}

NoiseOperator::NoiseOperator(const ModeTable& table, const NoiseConfig& config)
    : table_(&table), config_(config), g_(table.size(), 0.0) {
  if (!(config.sigma >= 0.0) || !std::isfinite(config.sigma))
    throw InvalidArgument("noise.sigma must be finite and >= 0");
  if (!(config.ou_alpha >= 0.0) || !std::isfinite(config.ou_alpha))
    throw InvalidArgument("noise.ou_alpha must be finite and >= 0");
  const bool unbounded = config.n_active <= 0;
  if (unbounded && config.decay_q < 1.0)
    throw InvalidArgument("noise.decay_q must be >= 1 when every mode is forced");
  const std::size_t n = unbounded ? table.size()
                                  : std::min<std::size_t>(table.size(), config.n_active);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t s = table.slot_at(r);
    const double g = config.sigma * std::pow(table.lambda(s), -config.decay_q);
    g_[s] = g;
    if (g > 0.0) active_.push_back(s);
    b0_ += g * g;
    s1_ += table.lambda(s) * g * g;
  }
}

void add_real_mode(const ModeTable& table, TemperatureField& t, std::size_t slot, double value) {
  constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  switch (table.half_plane(slot)) {
    case 0:
      t[slot] += value;
      break;
    case 1: {
      const Complex d(value * inv_sqrt2, 0.0);
      t[slot] += d;
      t[table.partner(slot)] += std::conj(d);
      break;
    }
    default: {
      const Complex d(0.0, value * inv_sqrt2);
      t[slot] += d;
      t[table.partner(slot)] += std::conj(d);
      break;
    }
  }
}

void NoiseOperator::add_forcing(const WienerPath& path, std::int64_t j, int count, double scale,
                                TemperatureField& out) const {
  for (std::size_t s : active_) {
    const double dw = path.increment(table_->rank_of(s), j, count);
    add_real_mode(*table_, out, s, scale * g_[s] * dw);
  }
}

OUState stationary_ou_sample(NormalStream& rng, const NoiseOperator& noise, double ou_alpha,
                             std::int64_t index) {
  const ModeTable& table = noise.table();
  if (!(ou_alpha >= 0.0) || !(table.lambda1() + ou_alpha > 0.0))
    throw InvalidArgument("stationary_ou_sample: need ou_alpha >= 0 and lambda1 + ou_alpha > 0");
  OUState z{TemperatureField(table.shape()), ou_alpha, index};
  for (std::size_t s : noise.active_slots()) {
    const double sd = noise.amplitude(s) / std::sqrt(2.0 * (table.lambda(s) + ou_alpha));
    add_real_mode(table, z.z, s, sd * rng());
  }
  return z;
}

void ou_step_inplace(OUState& z, const NoiseOperator& noise, const WienerPath& path, double dt) {
  const ModeTable& table = noise.table();
  const int count = path.steps_in(dt);
  noise.add_forcing(path, z.index, count, 1.0, z.z);
  for (std::size_t s = 0; s < z.z.size(); ++s)
    z.z[s] *= std::exp(-(table.lambda(s) + z.ou_alpha) * dt);
  z.index += count;
}

OUState ou_step(const OUState& z, const NoiseOperator& noise, const WienerPath& path, double dt) {
  OUState next = z;
  ou_step_inplace(next, noise, path, dt);
  return next;
}

double stationary_az2(const NoiseOperator& noise, double ou_alpha) {
  const ModeTable& table = noise.table();
  double s = 0.0;
  for (std::size_t slot : noise.active_slots()) {
    const double lam = table.lambda(slot), g = noise.amplitude(slot);
    s += lam * lam * g * g / (2.0 * (lam + ou_alpha));
  }
  return s;
}

std::vector<double> h0_inverse(const NoiseOperator& noise, std::size_t n_low) {
  const ModeTable& table = noise.table();
  if (n_low > table.size())
    throw InvalidArgument("h0_inverse: N exceeds the number of modes");
  std::vector<double> inv(table.size(), 0.0);
  for (std::size_t r = 0; r < n_low; ++r) {
    const std::size_t s = table.slot_at(r);
    const double g = noise.amplitude(s);
    if (!(g > 0.0))
      throw H0Degenerate("hypothesis H0 unsatisfiable: noise amplitude vanishes on mode " +
                         std::to_string(r + 1) + " <= N=" + std::to_string(n_low));
    inv[s] = 1.0 / g;
  }
  return inv;
}

}  // namespace pgv
