#ifndef PGV_DIAGNOSTIC_SOLVER_HPP
#define PGV_DIAGNOSTIC_SOLVER_HPP

// Recovers (p_s, v, w) from the temperature. The momentum balance
//   grad p_s - int_{-1}^z grad T + f k x v + L1 v = 0
// is diagonal per horizontal wavevector. Its vertical mean forces the
// barotropic velocity to zero and fixes p_s = -int_{-1}^0 z T dz; each
// baroclinic cosine mode m >= 1 then solves
//   (lambda I + f J) v = i kappa <int_{-1}^z T, psi_m>,   J = [[0,-1],[1,0]].

#include "pgv/field_algebra.hpp"
#include "pgv/model.hpp"

namespace pgv {

struct DiagnosticState {
  SurfacePressure p_s;
  VelocityField v;
  WField w;
  /// Largest per-mode momentum residual relative to the largest forcing.
  double residual = 0.0;
};

SurfacePressure surface_pressure(const Model& model, const TemperatureField& t);

/// Velocity only (no residual or w); the hot path of the integrator.
void solve_velocity(const Model& model, const TemperatureField& t, double f, VelocityField& out);

/// Full diagnostic state with the given Coriolis parameter.
DiagnosticState velocity_from_temperature(const Model& model, const TemperatureField& t, double f);
inline DiagnosticState velocity_from_temperature(const Model& model, const TemperatureField& t) {
  return velocity_from_temperature(model, t, model.coriolis());
}

/// w = -int_{-1}^z div v, exact on the sine basis.
WField vertical_velocity(const Model& model, const VelocityField& v);
void vertical_velocity(const Model& model, const VelocityField& v, WField& out);

/// Momentum residual of a candidate (p_s, v) for temperature t, projected on
/// the constant mode and every retained cosine mode; relative to the largest
/// forcing coefficient.
double momentum_residual(const Model& model, const TemperatureField& t, const SurfacePressure& p_s,
                         const VelocityField& v, double f);

}  // namespace pgv

#endif  // PGV_DIAGNOSTIC_SOLVER_HPP
