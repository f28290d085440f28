#ifndef PGV_INTEGRATOR_HPP
#define PGV_INTEGRATOR_HPP
// Time stepping of dT + [A T + B(v(T), T)] dt = G dW.
//
// The canonical scheme steps h = T - Z, where Z is the damped OU process
// driven by the same path:
//   (1 + lambda dt) h' = h + dt (ou_alpha Z - B(v, h + Z)),
// followed by the exponential Euler OU step for Z. The direct exponential
// Euler scheme on T is kept as a cross-check.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "pgv/diagnostic_solver.hpp"
#include "pgv/field_algebra.hpp"
#include "pgv/model.hpp"
#include "pgv/stochastic_forcing.hpp"

namespace pgv {

enum class Scheme { ImexH, ExpEulerDirect };

const char* scheme_name(Scheme s);
/// Throws InvalidArgument on unknown names.
Scheme parse_scheme(const std::string& name);

struct IntegratorConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::ImexH;
  double f = 1.0;
  /// Feedback gain K of the coupled copy; 0 disables the control.
  double coupling_gain = 0.0;
  /// Number N of controlled low modes.
  std::size_t coupling_modes = 0;
};

/// |T| above this (or a non-finite norm) aborts the run.
inline constexpr double kBlowUpThreshold = 1e8;

/// Velocity and gradient of one temperature-like field on the physical grid.
struct GridFields {
  std::vector<double> v1, v2, w;
  std::vector<double> tx, ty, tz;
};

/// Per-trajectory scratch: diagnostic fields, grid buffers and FFT scratch.
/// Not shared between threads.
class Workspace {
 public:
  explicit Workspace(const Model& model);

  VelocityField vel;
  WField w;
  TemperatureField b;
  GridFields base;
  GridFields aux;
  std::vector<double> product;
  GridTransform::Scratch scratch;
};

/// Fills `g` with v(t), w(t) and grad t on the grid.
void evaluate_grid_fields(const Model& model, const TemperatureField& t, double f,
                          GridFields& g, Workspace& ws);

/// B(v, T) = (v . grad) T + w dT/dz, projected onto the temperature basis.
void nonlinear_term(const Model& model, const VelocityField& v, const WField& w,
                    const TemperatureField& t, TemperatureField& out, Workspace& ws);
TemperatureField nonlinear_term(const Model& model, const TemperatureField& t,
                                const DiagnosticState& diag);

/// phi_1(x) = (1 - e^{-x}) / x, with phi_1(0) = 1.
double phi1(double x);

/// One trajectory of the temperature equation on a fixed Wiener path.
///
/// step() = prepare() + commit(). Between the two, the workspace holds the
/// frozen base state at the pre-step temperature (velocity, gradients,
/// B(v, T)); coupled and tangent steps use it.
class Trajectory {
 public:
  /// With the h-scheme, z0 sets Z at the start (default Z = 0); with the
  /// direct scheme z0 is ignored.
  Trajectory(const Model& model, const NoiseOperator& noise, const IntegratorConfig& config,
             WienerPath path, TemperatureField t0, std::int64_t start_index = 0,
             std::optional<TemperatureField> z0 = std::nullopt);
  /// Copies the state; the copy gets its own workspace.
  Trajectory(const Trajectory& other);
  Trajectory(Trajectory&&) = default;
  Trajectory& operator=(const Trajectory&) = delete;

  const Model& model() const { return *model_; }
  const NoiseOperator& noise() const { return *noise_; }
  const IntegratorConfig& config() const { return config_; }
  const WienerPath& path() const { return path_; }

  /// Current T (h + Z for the h-scheme).
  const TemperatureField& temperature() const { return t_; }
  /// h-scheme components; for the direct scheme h() == temperature() and z() = 0.
  const TemperatureField& h() const;
  const TemperatureField& z() const { return z_.z; }
  std::int64_t index() const { return index_; }
  double time() const { return static_cast<double>(index_) * path_.dt_w(); }
  int substeps() const { return substeps_; }

  void step();
  void advance(int steps);

  void prepare();
  void commit();
  bool prepared() const { return prepared_; }
  Workspace& workspace() { return *ws_; }

 private:
  friend class TangentSystem;
  void check_finite() const;

  const Model* model_;
  const NoiseOperator* noise_;
  IntegratorConfig config_;
  WienerPath path_;
  int substeps_;
  std::int64_t index_;
  TemperatureField t_;
  TemperatureField h_;
  OUState z_;
  std::vector<double> implicit_;
  std::vector<double> decay_;
  std::vector<double> phi_;
  std::unique_ptr<Workspace> ws_;
  bool prepared_ = false;
};

/// The pair (T, T~) driven by one Wiener path, T~ with the extra drift
/// -K P_N (T~ - T). The difference r = T~ - T is stored and stepped
/// directly, which is algebraically the same scheme applied to T~ but keeps
/// small separations free of cancellation error.
class CoupledTrajectory {
 public:
  CoupledTrajectory(const Model& model, const NoiseOperator& noise,
                    const IntegratorConfig& config, WienerPath path, TemperatureField t0,
                    TemperatureField t0_tilde, std::int64_t start_index = 0,
                    std::optional<TemperatureField> z0 = std::nullopt);

  const Trajectory& base() const { return base_; }
  const TemperatureField& difference() const { return r_; }
  TemperatureField tilde() const { return base_.temperature() + r_; }
  /// Accumulated int |h|^2 dt with h = -K g P_N r, left-point rule.
  double control_cost() const { return cost_; }
  double time() const { return base_.time(); }

  void step();
  void advance(int steps);

 private:
  Trajectory base_;
  TemperatureField r_;
  TemperatureField rhs_;
  std::vector<double> r_factor_;
  std::vector<double> r_phi_;
  std::vector<double> ginv_;
  std::vector<double> xr_;
  double cost_ = 0.0;
};

/// d tangent vectors of the first-variation equation along a trajectory.
/// The update is the exact derivative of the discrete step map.
class TangentSystem {
 public:
  TangentSystem(const Model& model, std::vector<TemperatureField> vectors);

  std::size_t size() const { return chi_.size(); }
  const std::vector<TemperatureField>& vectors() const { return chi_; }
  std::vector<TemperatureField>& vectors() { return chi_; }

  /// Advances every vector one step using the base state frozen by
  /// base.prepare(); call before base.commit().
  void step(Trajectory& base);

  /// QR in the V inner product; returns log of |R_jj| (growth per vector)
  /// and leaves the vectors V-orthonormal.
  std::vector<double> reorthonormalize();

 private:
  const Model* model_;
  std::vector<TemperatureField> chi_;
  TemperatureField rhs_;
};

/// Tangent flow over `steps` steps of a fresh trajectory copy: returns the
/// base end state and the propagated vector. Used for derivative checks.
std::pair<TemperatureField, TemperatureField> tangent_flow(const Trajectory& start,
                                                           const TemperatureField& chi,
                                                           int steps);

}  // namespace pgv

#endif  // PGV_INTEGRATOR_HPP
