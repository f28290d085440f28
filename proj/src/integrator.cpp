#include "pgv/integrator.hpp"

#include <Eigen/QR>
#include <cmath>

#include "pgv/errors.hpp"

namespace pgv {

const char* scheme_name(Scheme s) {
  return s == Scheme::ImexH ? "imex-h" : "exp-euler-direct";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "imex-h") return Scheme::ImexH;
  if (name == "exp-euler-direct") return Scheme::ExpEulerDirect;
  throw InvalidArgument("unknown scheme '" + name + "'");
}

double phi1(double x) {
  if (std::abs(x) < 1e-5) return 1.0 - x / 2.0 + x * x / 6.0;
  return -std::expm1(-x) / x;
}

Workspace::Workspace(const Model& model)
    : vel(model.zero_velocity()), w(model.zero_w()), b(model.zero_temperature()) {
  const std::size_t n = model.grid().grid_size();
  for (GridFields* g : {&base, &aux})
    for (auto* v : {&g->v1, &g->v2, &g->w, &g->tx, &g->ty, &g->tz}) v->assign(n, 0.0);
  product.assign(n, 0.0);
}

void evaluate_grid_fields(const Model& model, const TemperatureField& t, double f,
                          GridFields& g, Workspace& ws) {
  const GridTransform& grid = model.grid();
  solve_velocity(model, t, f, ws.vel);
  vertical_velocity(model, ws.vel, ws.w);
  grid.to_grid(ws.vel.v1, g.v1, ws.scratch);
  grid.to_grid(ws.vel.v2, g.v2, ws.scratch);
  grid.to_grid(ws.w, g.w, ws.scratch);
  grid.to_grid(t, GridTransform::Op::Dx, g.tx, ws.scratch);
  grid.to_grid(t, GridTransform::Op::Dy, g.ty, ws.scratch);
  grid.to_grid(t, GridTransform::Op::Dz, g.tz, ws.scratch);
}

namespace {

// product = a.v . grad(b)
void advect(const GridFields& a, const GridFields& b, std::vector<double>& product) {
  for (std::size_t i = 0; i < product.size(); ++i)
    product[i] = a.v1[i] * b.tx[i] + a.v2[i] * b.ty[i] + a.w[i] * b.tz[i];
}

// product = u.grad(T) + v.grad(chi): the derivative of B along chi, with
// (v, T) in `base` and (u, chi) in `aux`.
void advect_linearized(const GridFields& base, const GridFields& aux,
                       std::vector<double>& product) {
  for (std::size_t i = 0; i < product.size(); ++i)
    product[i] = aux.v1[i] * base.tx[i] + aux.v2[i] * base.ty[i] + aux.w[i] * base.tz[i] +
                 base.v1[i] * aux.tx[i] + base.v2[i] * aux.ty[i] + base.w[i] * aux.tz[i];
}

// B(T + r) - B(T) = B(v_r, T) + B(v_T + v_r, r), exactly.
void advect_difference(const GridFields& base, const GridFields& aux,
                       std::vector<double>& product) {
  for (std::size_t i = 0; i < product.size(); ++i)
    product[i] = aux.v1[i] * base.tx[i] + aux.v2[i] * base.ty[i] + aux.w[i] * base.tz[i] +
                 (base.v1[i] + aux.v1[i]) * aux.tx[i] + (base.v2[i] + aux.v2[i]) * aux.ty[i] +
                 (base.w[i] + aux.w[i]) * aux.tz[i];
}

void require_shape(const ModeShape& got, const ModeShape& want, const char* what) {
  if (!(got == want)) throw InvalidArgument(std::string(what) + ": resolution mismatch");
}

}  // namespace

void nonlinear_term(const Model& model, const VelocityField& v, const WField& w,
                    const TemperatureField& t, TemperatureField& out, Workspace& ws) {
  require_shape(t.shape(), model.modes().shape(), "nonlinear_term temperature");
  require_shape(v.shape(), model.velocity_modes().shape(), "nonlinear_term velocity");
  require_shape(w.shape(), model.velocity_modes().shape(), "nonlinear_term w");
  require_shape(out.shape(), model.modes().shape(), "nonlinear_term output");
  const GridTransform& grid = model.grid();
  GridFields& g = ws.aux;
  grid.to_grid(v.v1, g.v1, ws.scratch);
  grid.to_grid(v.v2, g.v2, ws.scratch);
  grid.to_grid(w, g.w, ws.scratch);
  grid.to_grid(t, GridTransform::Op::Dx, g.tx, ws.scratch);
  grid.to_grid(t, GridTransform::Op::Dy, g.ty, ws.scratch);
  grid.to_grid(t, GridTransform::Op::Dz, g.tz, ws.scratch);
  advect(g, g, ws.product);
  grid.from_grid(ws.product, out, ws.scratch);
}

TemperatureField nonlinear_term(const Model& model, const TemperatureField& t,
                                const DiagnosticState& diag) {
  Workspace ws(model);
  TemperatureField out = model.zero_temperature();
  nonlinear_term(model, diag.v, diag.w, t, out, ws);
  return out;
}

Trajectory::Trajectory(const Model& model, const NoiseOperator& noise,
                       const IntegratorConfig& config, WienerPath path, TemperatureField t0,
                       std::int64_t start_index, std::optional<TemperatureField> z0)
    : model_(&model),
      noise_(&noise),
      config_(config),
      path_(path),
      substeps_(path.steps_in(config.dt)),
      index_(start_index),
      t_(std::move(t0)),
      ws_(std::make_unique<Workspace>(model)) {
  const ModeTable& table = model.modes();
  require_shape(t_.shape(), table.shape(), "Trajectory initial temperature");
  if (&noise.table() != &table && !(noise.table().shape() == table.shape()))
    throw InvalidArgument("Trajectory: noise and model use different mode tables");
  const double dt = config.dt;
  implicit_.resize(table.size());
  decay_.resize(table.size());
  phi_.resize(table.size());
  for (std::size_t s = 0; s < table.size(); ++s) {
    const double lam = table.lambda(s);
    implicit_[s] = 1.0 / (1.0 + lam * dt);
    decay_[s] = std::exp(-lam * dt);
    phi_[s] = phi1(lam * dt) * dt;
  }
  z_ = OUState{model.zero_temperature(), noise.config().ou_alpha, start_index};
  if (config.scheme == Scheme::ImexH) {
    if (z0) {
      require_shape(z0->shape(), table.shape(), "Trajectory initial Z");
      z_.z = std::move(*z0);
    }
    h_ = t_ - z_.z;
  }
  check_finite();
}

Trajectory::Trajectory(const Trajectory& o)
    : model_(o.model_),
      noise_(o.noise_),
      config_(o.config_),
      path_(o.path_),
      substeps_(o.substeps_),
      index_(o.index_),
      t_(o.t_),
      h_(o.h_),
      z_(o.z_),
      implicit_(o.implicit_),
      decay_(o.decay_),
      phi_(o.phi_),
      ws_(std::make_unique<Workspace>(*o.model_)) {}

const TemperatureField& Trajectory::h() const {
  return config_.scheme == Scheme::ImexH ? h_ : t_;
}

void Trajectory::prepare() {
  Workspace& ws = *ws_;
  evaluate_grid_fields(*model_, t_, config_.f, ws.base, ws);
  advect(ws.base, ws.base, ws.product);
  model_->grid().from_grid(ws.product, ws.b, ws.scratch);
  prepared_ = true;
}

void Trajectory::commit() {
  if (!prepared_) throw InvalidArgument("Trajectory::commit without prepare");
  const TemperatureField& b = ws_->b;
  const double dt = config_.dt;
  const std::size_t n = t_.size();
  if (config_.scheme == Scheme::ImexH) {
    const double alpha = z_.ou_alpha;
    for (std::size_t s = 0; s < n; ++s)
      h_[s] = (h_[s] + dt * (alpha * z_.z[s] - b[s])) * implicit_[s];
    ou_step_inplace(z_, *noise_, path_, dt);
    for (std::size_t s = 0; s < n; ++s) t_[s] = h_[s] + z_.z[s];
  } else {
    noise_->add_forcing(path_, index_, substeps_, 1.0, t_);
    for (std::size_t s = 0; s < n; ++s) t_[s] = decay_[s] * t_[s] - phi_[s] * b[s];
    z_.index += substeps_;
  }
  index_ += substeps_;
  prepared_ = false;
  check_finite();
}

void Trajectory::step() {
  prepare();
  commit();
}

void Trajectory::advance(int steps) {
  for (int i = 0; i < steps; ++i) step();
}

void Trajectory::check_finite() const {
  const double nh = norm_h(t_);
  if (!std::isfinite(nh) || nh > kBlowUpThreshold)
    throw BlowUp(time(), nh, norm_v(model_->modes(), t_));
}

CoupledTrajectory::CoupledTrajectory(const Model& model, const NoiseOperator& noise,
                                     const IntegratorConfig& config, WienerPath path,
                                     TemperatureField t0, TemperatureField t0_tilde,
                                     std::int64_t start_index, std::optional<TemperatureField> z0)
    : base_(model, noise, config, path, t0, start_index, std::move(z0)),
      r_(t0_tilde - t0),
      rhs_(model.zero_temperature()) {
  const ModeTable& table = model.modes();
  if (!(config.coupling_gain >= 0.0) || !std::isfinite(config.coupling_gain))
    throw InvalidArgument("coupling gain K must be finite and >= 0");
  if (config.coupling_modes > table.size())
    throw InvalidArgument("coupling cutoff N=" + std::to_string(config.coupling_modes) +
                          " exceeds " + std::to_string(table.size()) + " modes");
  const double dt = config.dt, k = config.coupling_gain;
  r_factor_.resize(table.size());
  r_phi_.resize(table.size());
  for (std::size_t s = 0; s < table.size(); ++s) {
    const double rate = table.lambda(s) + (table.rank_of(s) < config.coupling_modes ? k : 0.0);
    if (config.scheme == Scheme::ImexH) {
      r_factor_[s] = 1.0 / (1.0 + rate * dt);
    } else {
      r_factor_[s] = std::exp(-rate * dt);
      r_phi_[s] = phi1(rate * dt) * dt;
    }
  }
  if (k > 0.0 && config.coupling_modes > 0) ginv_ = h0_inverse(noise, config.coupling_modes);
  xr_.resize(table.size());
}

void CoupledTrajectory::step() {
  const Model& model = base_.model();
  const ModeTable& table = model.modes();
  const IntegratorConfig& cfg = base_.config();
  const double dt = cfg.dt;

  if (!ginv_.empty()) {
    real_coordinates(table, r_, xr_);
    double s2 = 0.0;
    for (std::size_t s = 0; s < xr_.size(); ++s) {
      const double h = xr_[s] * ginv_[s];
      s2 += h * h;
    }
    cost_ += dt * cfg.coupling_gain * cfg.coupling_gain * s2;
  }

  base_.prepare();
  Workspace& ws = base_.workspace();
  evaluate_grid_fields(model, r_, cfg.f, ws.aux, ws);
  advect_difference(ws.base, ws.aux, ws.product);
  model.grid().from_grid(ws.product, rhs_, ws.scratch);

  if (cfg.scheme == Scheme::ImexH) {
    r_.axpy(-dt, rhs_);
    scale_real_modes(table, r_factor_, r_);
  } else {
    scale_real_modes(table, r_factor_, r_);
    scale_real_modes(table, r_phi_, rhs_);
    r_ -= rhs_;
  }
  base_.commit();

  const double nr = norm_h(r_);
  if (!std::isfinite(nr) || nr > kBlowUpThreshold) {
    const TemperatureField tt = tilde();
    throw BlowUp(time(), norm_h(tt), norm_v(table, tt));
  }
}

void CoupledTrajectory::advance(int steps) {
  for (int i = 0; i < steps; ++i) step();
}

TangentSystem::TangentSystem(const Model& model, std::vector<TemperatureField> vectors)
    : model_(&model), chi_(std::move(vectors)), rhs_(model.zero_temperature()) {
  for (const auto& c : chi_) require_shape(c.shape(), model.modes().shape(), "TangentSystem");
}

void TangentSystem::step(Trajectory& base) {
  if (!base.prepared()) throw InvalidArgument("TangentSystem::step: base not prepared");
  Workspace& ws = base.workspace();
  const IntegratorConfig& cfg = base.config();
  const double dt = cfg.dt;
  for (TemperatureField& chi : chi_) {
    evaluate_grid_fields(*model_, chi, cfg.f, ws.aux, ws);
    advect_linearized(ws.base, ws.aux, ws.product);
    model_->grid().from_grid(ws.product, rhs_, ws.scratch);
    if (cfg.scheme == Scheme::ImexH) {
      for (std::size_t s = 0; s < chi.size(); ++s)
        chi[s] = (chi[s] - dt * rhs_[s]) * base.implicit_[s];
    } else {
      for (std::size_t s = 0; s < chi.size(); ++s)
        chi[s] = base.decay_[s] * chi[s] - base.phi_[s] * rhs_[s];
    }
  }
}

std::vector<double> TangentSystem::reorthonormalize() {
  const ModeTable& table = model_->modes();
  const Eigen::Index n = static_cast<Eigen::Index>(table.size());
  const Eigen::Index d = static_cast<Eigen::Index>(chi_.size());
  std::vector<double> sq(table.size());
  for (std::size_t s = 0; s < sq.size(); ++s) sq[s] = std::sqrt(table.lambda(s));

  Eigen::MatrixXd m(n, d);
  std::vector<double> x(table.size());
  for (Eigen::Index j = 0; j < d; ++j) {
    real_coordinates(table, chi_[j], x);
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = sq[i] * x[i];
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, d);

  std::vector<double> growth(chi_.size());
  for (Eigen::Index j = 0; j < d; ++j) {
    const double rjj = r(j, j);
    growth[j] = std::log(std::abs(rjj));
    const double sign = rjj < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index i = 0; i < n; ++i) x[i] = sign * q(i, j) / sq[i];
    from_real_coordinates(table, x, chi_[j]);
  }
  return growth;
}

std::pair<TemperatureField, TemperatureField> tangent_flow(const Trajectory& start,
                                                           const TemperatureField& chi,
                                                           int steps) {
  Trajectory traj(start);
  TangentSystem tangent(start.model(), {chi});
  for (int i = 0; i < steps; ++i) {
    traj.prepare();
    tangent.step(traj);
    traj.commit();
  }
  return {traj.temperature(), tangent.vectors().front()};
}

}  // namespace pgv
