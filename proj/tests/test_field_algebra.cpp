#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pgv/errors.hpp"
#include "pgv/field_algebra.hpp"
#include "pgv/model.hpp"
#include "pgv/stochastic_forcing.hpp"
#include "pgv/validation.hpp"
#include "test_util.hpp"

using namespace pgv;

namespace {

std::vector<double> gaussian_vector(std::size_t n, std::uint64_t seed) {
  NormalStream rng(seed, Stream::Sampling);
  std::vector<double> x(n);
  for (auto& v : x) v = rng();
  return x;
}

}  // namespace

TEST(RealCoordinates, RoundTripIsAnIsometryAndProducesRealFields) {
  const Model model(test::small_config(8, 4));
  const ModeTable& tab = model.modes();
  const auto x = gaussian_vector(tab.size(), 3);
  const TemperatureField t = from_real_coordinates(tab, x);
  EXPECT_LT(hermitian_defect(t), 1e-15);
  const auto y = real_coordinates(tab, t);
  double sx = 0.0, err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i] * x[i];
    err = std::max(err, std::abs(x[i] - y[i]));
  }
  EXPECT_LT(err, 1e-14);
  EXPECT_NEAR(norm_h(t), std::sqrt(sx), 1e-12 * std::sqrt(sx));
  double sv = 0.0;
  for (std::size_t s = 0; s < x.size(); ++s) sv += tab.lambda(s) * x[s] * x[s];
  EXPECT_NEAR(norm_v2(tab, t), sv, 1e-12 * sv);
}

TEST(RealCoordinates, ParsevalAgainstPhysicalGrid) {
  const Model model(test::small_config(8, 4));
  NormalStream rng(11, Stream::Sampling);
  const TemperatureField t = random_smooth_field(model.modes(), rng, 0.5);
  GridTransform::Scratch s;
  auto g = model.grid().make_grid();
  model.grid().to_grid(t, GridTransform::Op::Value, g, s);
  std::vector<double> sq(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) sq[i] = g[i] * g[i];
  const double n2 = norm_h(t) * norm_h(t);
  EXPECT_NEAR(model.grid().integrate(sq), n2, 1e-12 * n2);
}

TEST(RealCoordinates, ScaleRealModesMatchesCoordinateScaling) {
  const Model model(test::small_config(8, 4));
  const ModeTable& tab = model.modes();
  const auto x = gaussian_vector(tab.size(), 5);
  const auto d = gaussian_vector(tab.size(), 6);
  TemperatureField t = from_real_coordinates(tab, x);
  scale_real_modes(tab, d, t);
  const auto y = real_coordinates(tab, t);
  for (std::size_t s = 0; s < x.size(); ++s) EXPECT_NEAR(y[s], d[s] * x[s], 1e-13);
  EXPECT_LT(hermitian_defect(t), 1e-15);
}

TEST(ProjectLow, KeepsExactlyTheLowestRanksAndIsIdempotent) {
  const Model model(test::small_config(8, 4));
  const ModeTable& tab = model.modes();
  const auto x = gaussian_vector(tab.size(), 7);
  const TemperatureField t = from_real_coordinates(tab, x);
  const std::size_t n = 20;
  const TemperatureField p = project_low(tab, t, n);
  const auto y = real_coordinates(tab, p);
  for (std::size_t s = 0; s < tab.size(); ++s)
    EXPECT_DOUBLE_EQ(y[s], tab.rank_of(s) < n ? x[s] : 0.0);
  EXPECT_EQ(project_low(tab, p, n), p);
  EXPECT_NEAR(inner_h(p, t - p), 0.0, 1e-13);
  EXPECT_THROW(project_low(tab, t, tab.size() + 1), InvalidArgument);
}

TEST(CouplingMatrices, AgreeWithIndependentQuadratureAndClosedForms) {
  const Model model(test::small_config(8, 6));
  const CouplingMatrices& cm = model.coupling();
  const VerticalBasisT& bt = model.basis_t();
  const VerticalBasisV& bv = model.basis_v();
  for (int mt = 0; mt < cm.nz_t; ++mt) {
    const double ps = test::composite_gauss([&](double z) { return z * bt.value(mt, z); }, -1, 0);
    EXPECT_NEAR(cm.c_ps[mt], ps, 1e-12);
    for (int mv = 0; mv < cm.nz_v; ++mv) {
      // Nested rule for <int_{-1}^z phi, psi>.
      const double c = test::composite_gauss(
          [&](double z) {
            return test::composite_gauss([&](double s) { return bt.value(mt, s); }, -1, z, 8) *
                   bv.value(mv, z);
          },
          -1, 0, 32);
      EXPECT_NEAR(cm.int_tv(mv, mt), c, 1e-11) << mv << " " << mt;
    }
  }
  for (int m = 0; m < cm.nz_v; ++m) EXPECT_NEAR(cm.d_w[m], 1.0 / ((m + 1) * std::numbers::pi), 1e-15);
}

TEST(CouplingMatrices, RejectUnderResolvedQuadrature) {
  const VerticalBasisT bt(1.0, 8);
  const VerticalBasisV bv(8);
  const VerticalBasisW bw(8);
  VerticalQuadrature q = vertical_quadrature(18, 8);
  q.nodes.pop_back();
  q.weights.pop_back();
  EXPECT_THROW(coupling_matrices(bt, bv, bw, q), InvalidArgument);
}

TEST(Norms, DaNormWeightsByLambdaSquared) {
  const Model model(test::small_config(8, 4));
  const ModeTable& tab = model.modes();
  const auto x = gaussian_vector(tab.size(), 9);
  const TemperatureField t = from_real_coordinates(tab, x);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += tab.lambda(i) * tab.lambda(i) * x[i] * x[i];
  EXPECT_NEAR(norm_da(tab, t), std::sqrt(s), 1e-12 * std::sqrt(s));
  EXPECT_NEAR(norm_v(tab, t) * norm_v(tab, t), norm_v2(tab, t), 1e-12 * norm_v2(tab, t));
}
