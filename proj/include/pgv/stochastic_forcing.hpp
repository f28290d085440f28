#ifndef PGV_STOCHASTIC_FORCING_HPP
#define PGV_STOCHASTIC_FORCING_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "pgv/field_algebra.hpp"
#include "pgv/spectral_basis.hpp"

namespace pgv {

/// Philox4x32-10 block function (Salmon et al. counter-based generator).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Standard normal from a Philox block (Box-Muller, cosine branch).
double philox_normal(std::uint64_t seed, std::uint32_t stream, std::uint32_t lane,
                     std::uint64_t index);

/// Seed for ensemble member `member`; distinct members get distinct streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t member);

/// Stream tags separating independent uses of one seed.
enum class Stream : std::uint32_t {
  Wiener = 0,
  Stationary = 1,
  Initial = 2,
  Tangent = 3,
  Sampling = 4,
};

/// Sequential normal draws backed by Philox: draw i of (seed, stream, lane)
/// is a pure function of its arguments.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, Stream stream, std::uint32_t lane = 0)
      : seed_(seed), stream_(static_cast<std::uint32_t>(stream)), lane_(lane) {}
  double operator()() { return philox_normal(seed_, stream_, lane_, counter_++); }
  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint32_t stream_;
  std::uint32_t lane_;
  std::uint64_t counter_ = 0;
};

/// Two-sided Brownian increments on a grid of spacing dt_w. The increment of
/// eigenmode rank n over [j dt_w, (j+1) dt_w) is a pure function of
/// (seed, n, j + offset), so the Wiener shift is an index offset.
class WienerPath {
 public:
  WienerPath(std::uint64_t seed, double dt_w, std::int64_t offset = 0);

  std::uint64_t seed() const { return seed_; }
  double dt_w() const { return dt_w_; }
  std::int64_t offset() const { return offset_; }

  double increment(std::size_t rank, std::int64_t j) const;
  /// Sum of `count` consecutive increments starting at j.
  double increment(std::size_t rank, std::int64_t j, int count) const;

  /// Number of grid steps in a duration; throws InvalidArgument when dt is
  /// not a positive integer multiple of dt_w.
  int steps_in(double dt) const;

 private:
  std::uint64_t seed_;
  double dt_w_;
  std::int64_t offset_;
};

/// theta_t: increment j of the result equals increment j + t/dt_w of `path`.
WienerPath wiener_shift(const WienerPath& path, double t);

struct NoiseConfig {
  double sigma = 0.1;
  double decay_q = 1.5;
  /// Number of forced eigenmodes; <= 0 means every retained mode.
  int n_active = 64;
  double ou_alpha = 0.0;
  double dt_w = 1e-3;
};

/// Diagonal Hilbert-Schmidt operator G e_n = g_n e_n with
/// g_n = sigma lambda_n^(-q) for the n_active lowest modes.
class NoiseOperator {
 public:
  NoiseOperator(const ModeTable& table, const NoiseConfig& config);

  const ModeTable& table() const { return *table_; }
  const NoiseConfig& config() const { return config_; }
  double amplitude(std::size_t slot) const { return g_[slot]; }
  const std::vector<double>& amplitudes() const { return g_; }
  /// Slots with nonzero amplitude, in rank order.
  const std::vector<std::size_t>& active_slots() const { return active_; }

  /// B0 = sum g_n^2 = ||G||^2_{L2(H,H)}
  double b0() const { return b0_; }
  /// S1 = sum lambda_n g_n^2
  double s1() const { return s1_; }

  /// out += scale * G (W(j + count) - W(j)).
  void add_forcing(const WienerPath& path, std::int64_t j, int count, double scale,
                   TemperatureField& out) const;

 private:
  const ModeTable* table_;
  NoiseConfig config_;
  std::vector<double> g_;
  std::vector<std::size_t> active_;
  double b0_ = 0.0;
  double s1_ = 0.0;
};

/// Adds `value` to the real eigen-coordinate of `slot`, keeping the
/// coefficient array Hermitian.
void add_real_mode(const ModeTable& table, TemperatureField& t, std::size_t slot, double value);

/// Damped Ornstein-Uhlenbeck state dZ = (-ou_alpha Z - A Z) dt + G dW.
struct OUState {
  TemperatureField z;
  double ou_alpha = 0.0;
  /// Path grid index of the current time.
  std::int64_t index = 0;
};

/// Exact stationary law: mode n ~ N(0, g_n^2 / (2 (lambda_n + ou_alpha))).
OUState stationary_ou_sample(NormalStream& rng, const NoiseOperator& noise, double ou_alpha,
                             std::int64_t index = 0);

/// Exponential Euler: Z' = exp(-(lambda + ou_alpha) dt) (Z + g dW).
OUState ou_step(const OUState& z, const NoiseOperator& noise, const WienerPath& path, double dt);
void ou_step_inplace(OUState& z, const NoiseOperator& noise, const WienerPath& path, double dt);

/// E|A Z|^2 under the stationary law.
double stationary_az2(const NoiseOperator& noise, double ou_alpha);

/// Diagonal right inverse of G on the N lowest modes (G g = P_N). Entries
/// are indexed by slot. Throws H0Degenerate when some g_n vanishes there.
std::vector<double> h0_inverse(const NoiseOperator& noise, std::size_t n_low);

}  // namespace pgv

#endif  // PGV_STOCHASTIC_FORCING_HPP
