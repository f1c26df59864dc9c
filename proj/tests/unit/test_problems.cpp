#include "thetafv/problems/diffusion.hpp"
#include "thetafv/problems/freefall.hpp"
#include "thetafv/problems/wave.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace thetafv;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

/// Dense -dH/dq by central differences, for comparison with the reported blocks.
Eigen::MatrixXd numeric_jacobian(const Problem& p, const Field& q, const Grid& g, double h) {
  const Eigen::Index n = q.rows();
  const Eigen::Index m = q.cols();
  Eigen::MatrixXd a(n * m, n * m);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      Field plus = q;
      Field minus = q;
      const double step = h * std::max(1.0, std::abs(q(j, k)));
      plus(j, k) += step;
      minus(j, k) -= step;
      const Field d = (p.spatial_operator(plus, g, 0.0) - p.spatial_operator(minus, g, 0.0)) / (2.0 * step);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index l = 0; l < m; ++l) a(i * m + l, j * m + k) = -d(i, l);
      }
    }
  }
  return a;
}

Field random_field(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Field q(n, m);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) q(j, k) = u(rng);
  }
  return q;
}

/// sum_j vol_j (H_j - S_j) + (F_N - F_0), relative to the largest flux.
double conservation_defect(const Problem& p, const Field& q, const Grid& g) {
  const Field h = p.spatial_operator(q, g, 0.0);
  const Field s = p.sources(q, g, 0.0);
  const Field f = p.face_fluxes(q, g, 0.0);
  const Eigen::Index n = g.size();
  double worst = 0.0;
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) total += g.volumes()(j) * (h(j, k) - s(j, k));
    const double boundary = -(f(n, k) - f(0, k));
    const double scale = f.col(k).cwiseAbs().maxCoeff();
    if (scale > 0.0) worst = std::max(worst, std::abs(total - boundary) / scale);
  }
  return worst;
}

}  // namespace

TEST_CASE("diffusion: constant temperature leaves only the source") {
  const DiffusionProblem p;
  const Grid g = build_grid(Geometry::Spherical, 1000.0, 1003.0, 180);
  const Field h = p.spatial_operator(Field::Constant(180, 1, 1.0), g, 0.0);
  for (Eigen::Index j = 0; j < 180; ++j) CHECK(h(j, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("diffusion: planar parabola is a steady state of the interior stencil") {
  const DiffusionProblem p;
  const Grid g = build_grid(Geometry::Planar, 0.0, 3.0, 180);
  Field t(180, 1);
  for (Eigen::Index j = 0; j < 180; ++j) t(j, 0) = p.steady_parabola(g, g.centers()(j));
  const Field h = p.spatial_operator(t, g, 0.0);
  CHECK(h.middleRows(1, 178).lpNorm<Eigen::Infinity>() <= 1e-8);
  // The half-cell boundary difference is one-sided: for a parabola it is off
  // by s dx / 4 in the flux, i.e. s / 4 in H.
  CHECK(h(0, 0) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(h(179, 0) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("diffusion: single hot cell") {
  const DiffusionProblem p(DiffusionParams{1.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  const Grid g = build_grid(Geometry::Planar, 0.0, 5.0, 5);
  Field t = Field::Zero(5, 1);
  t(2, 0) = 1.0;
  const Field h = p.spatial_operator(t, g, 0.0);
  CHECK(h(2, 0) == doctest::Approx(-2.0));
  CHECK(h(1, 0) == doctest::Approx(1.0));
  CHECK(h(3, 0) == doctest::Approx(1.0));
  CHECK(g.volumes().dot(h.col(0)) == doctest::Approx(0.0));
}

TEST_CASE("diffusion: Jacobian entries on a uniform planar grid") {
  const double nu = 1e-2;
  const DiffusionProblem p(DiffusionParams{nu, 1.0, 1.0, 1.0, 10.0, 10.0});
  const Grid g = build_grid(Geometry::Planar, 0.0, 1.0, 60);
  const auto jac = p.jacobian(p.initial_state(g), g, 0.0);
  const double dx = 1.0 / 60.0;
  for (Eigen::Index j = 1; j < 59; ++j) {
    CHECK(jac.lower[j](0, 0) == doctest::Approx(-nu / (dx * dx)).epsilon(1e-9));
    CHECK(jac.upper[j](0, 0) == doctest::Approx(-nu / (dx * dx)).epsilon(1e-9));
    CHECK(jac.diag[j](0, 0) == doctest::Approx(2.0 * nu / (dx * dx)).epsilon(1e-9));
  }
}

TEST_CASE("diffusion: row-sum identity D = -lower - upper") {
  const DiffusionProblem p;
  for (double stretch : {1.0, 1.05}) {
    const Grid g = build_grid(Geometry::Spherical, 1000.0, 1003.0, 180, stretch);
    const auto jac = p.jacobian(p.initial_state(g), g, 0.0);
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      const double d = jac.diag[j](0, 0);
      CHECK(std::abs(d + jac.lower[j](0, 0) + jac.upper[j](0, 0)) <= 1e-13 * d);
    }
  }
}

TEST_CASE("diffusion: Jacobian matches finite differences, including boundary rows") {
  const DiffusionProblem p;
  const Grid g = build_grid(Geometry::Spherical, 1000.0, 1003.0, 12, 1.1);
  const Field q = p.initial_state(g);
  const auto jac = p.jacobian(q, g, 0.0);
  const Eigen::MatrixXd a = numeric_jacobian(p, q, g, 1e-6);
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double scale = jac.diag[j](0, 0);
    CHECK(std::abs(a(j, j) - jac.diag[j](0, 0)) <= 1e-6 * scale);
    if (j > 0) CHECK(std::abs(a(j, j - 1) - jac.lower[j](0, 0)) <= 1e-6 * scale);
    if (j + 1 < g.size()) CHECK(std::abs(a(j, j + 1) - jac.upper[j](0, 0)) <= 1e-6 * scale);
  }
}

TEST_CASE("diffusion: references") {
  const DiffusionProblem p;
  const Grid g = build_grid(Geometry::Spherical, 1000.0, 1003.0, 180);
  CHECK(p.steady_parabola(g, 1001.5) == doctest::Approx(113.5));
  CHECK(p.analytic_reference(g, 0.0) == p.initial_state(g));
  CHECK_THROWS_AS(p.analytic_reference(g, 1.0), ReferenceUnavailable);

  // The parabola is the planar answer; the spherical stationary solve differs
  // by O(L / r), well below a percent of the peak.
  const auto oracle_t = oracle::stationary_diffusion(1000.0, 1003.0, 180, 1e-2, 1.0, 1.0, 1.0);
  const Field ref = p.analytic_reference(g, kInf);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < 180; ++j) worst = std::max(worst, std::abs(ref(j, 0) - oracle_t[j]));
  CHECK(worst <= 0.01 * 113.5);
}

TEST_CASE("diffusion: evaluating at the stationary solution gives a vanishing operator") {
  const DiffusionProblem p;
  const Grid g = build_grid(Geometry::Spherical, 1000.0, 1003.0, 180);
  const auto t = oracle::stationary_diffusion(1000.0, 1003.0, 180, 1e-2, 1.0, 1.0, 1.0);
  const Field q = Eigen::Map<const Eigen::VectorXd>(t.data(), 180);
  CHECK(p.spatial_operator(q, g, 0.0).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("wave: uniform density in planar geometry is steady") {
  for (auto order : {AdvectionOrder::FirstOrderUpwind, AdvectionOrder::ThirdOrderUpwindBiased}) {
    WaveParams params;
    params.order = order;
    params.amplitude = 0.0;
    const WaveProblem p(params);
    const Grid g = build_grid(Geometry::Planar, 100.0, 104.0, 200);
    CHECK(p.spatial_operator(Field::Ones(200, 1), g, 0.3).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("wave: rho ~ 1/r^2 is steady in spherical geometry") {
  WaveParams params;
  params.amplitude = 0.0;
  const WaveProblem p(params);
  const Grid g = build_grid(Geometry::Spherical, 100.0, 104.0, 200);
  Field steady(200, 1);
  steady.col(0) = cell_averages(g, [](double r) { return 100.0 * 100.0 / (r * r); });
  const Field h = p.spatial_operator(steady, g, 0.0);
  // away from the first-order boundary faces the residual is a truncation
  // error, tiny against the individual flux terms U rho / dx = 50
  CHECK(h.middleRows(2, 196).lpNorm<Eigen::Infinity>() <= 1e-4);
}

TEST_CASE("wave: first-order upwind Jacobian") {
  WaveParams params;
  params.order = AdvectionOrder::ThirdOrderUpwindBiased;  // the matrix is first order regardless
  const WaveProblem p(params);
  const Grid g = build_grid(Geometry::Planar, 100.0, 104.0, 200);
  const auto jac = p.jacobian(p.initial_state(g), g, 0.0);
  for (Eigen::Index j = 1; j < 199; ++j) {
    CHECK(jac.diag[j](0, 0) == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(jac.lower[j](0, 0) == doctest::Approx(-50.0).epsilon(1e-9));
    CHECK(jac.upper[j](0, 0) == 0.0);
  }
  WaveParams first = params;
  first.order = AdvectionOrder::FirstOrderUpwind;
  const WaveProblem p1(first);
  const Field q = p1.initial_state(g);
  const Eigen::MatrixXd a = numeric_jacobian(p1, q.topRows(200), g, 1e-6);
  for (Eigen::Index j = 1; j < 199; ++j) {
    CHECK(a(j, j) == doctest::Approx(jac.diag[j](0, 0)).epsilon(1e-6));
    CHECK(a(j, j - 1) == doctest::Approx(jac.lower[j](0, 0)).epsilon(1e-6));
  }
}

TEST_CASE("wave: reference at t = 0 is the initial profile; the pulse translates") {
  const WaveProblem p;
  const Grid g = build_grid(Geometry::Planar, 100.0, 104.0, 400);
  CHECK(p.analytic_reference(g, 0.0) == p.initial_state(g));
  CHECK(p.exact(g, 101.75, 0.5) == doctest::Approx(p.initial_profile(101.25)));
  CHECK(p.initial_profile(100.75) == doctest::Approx(1.5));
  CHECK(p.initial_profile(100.0) == 1.0);
  CHECK_THROWS_AS(p.analytic_reference(g, kInf), ReferenceUnavailable);
  CHECK_THROWS_AS(WaveProblem(WaveParams{0.0}), std::invalid_argument);
  CHECK(advection_order_from_string(to_string(AdvectionOrder::FirstOrderUpwind)) == AdvectionOrder::FirstOrderUpwind);
  CHECK_THROWS_AS(advection_order_from_string("fifth"), std::invalid_argument);
}

TEST_CASE("free fall: discrete hydrostatic balance is steady away from the inflow boundary") {
  const FreeFallProblem p;
  const Grid g = build_grid(Geometry::Planar, 1.0, 2.0, 40);
  const double dx = g.widths()(0);
  Field q(40, 3);
  q.col(FreeFallProblem::kRho).setOnes();
  q.col(FreeFallProblem::kMom).setZero();
  // face pressure averages make the momentum source -(p_{j+1} - p_{j-1}) / (2 dx) - g_j
  Eigen::VectorXd pres(40);
  auto grav = [&](Eigen::Index j) { return 1.0 / (g.centers()(j) * g.centers()(j)); };
  pres(0) = 100.0;
  pres(1) = pres(0) - 2.0 * dx * grav(0);
  for (Eigen::Index j = 1; j + 1 < 40; ++j) pres(j + 1) = pres(j - 1) - 2.0 * dx * grav(j);
  q.col(FreeFallProblem::kEint) = pres / (p.params().gamma - 1.0);
  const Field h = p.spatial_operator(q, g, 0.0);
  CHECK(h.topRows(39).lpNorm<Eigen::Infinity>() <= 1e-10 * pres(0));
}

TEST_CASE("free fall: continuity is steady on the free-fall profile") {
  const FreeFallProblem p;
  const Grid g = build_grid(Geometry::Spherical, 1.0, 100.0, 200, 1.02);
  const Field q = p.analytic_reference(g, kInf);
  const Field h = p.spatial_operator(q, g, 0.0);
  const Field f = p.face_fluxes(q, g, 0.0);
  for (Eigen::Index j = 5; j < 195; ++j) {
    const double scale = std::abs(f(j, FreeFallProblem::kRho)) / g.volumes()(j);
    CHECK(std::abs(h(j, FreeFallProblem::kRho)) <= 0.05 * scale);
  }
}

TEST_CASE("free fall: Jacobian diagonal is non-negative and close to finite differences in the upwind part") {
  const FreeFallProblem p;
  const Grid g = build_grid(Geometry::Spherical, 1.0, 100.0, 30, 1.1);
  const Field q = p.analytic_reference(g, kInf);
  const auto jac = p.jacobian(q, g, 0.0);
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    for (Eigen::Index k = 0; k < 3; ++k) CHECK(jac.diag[j](k, k) >= 0.0);
  }
  // gravity derivative is exact: d H_mom / d rho contains -GM / r^2
  const Eigen::MatrixXd a = numeric_jacobian(p, q, g, 1e-7);
  for (Eigen::Index j = 2; j < g.size() - 2; ++j) {
    const double r = g.centers()(j);
    // density derivative of the momentum equation: gravity plus the momentum
    // flux through the frozen-velocity faces, which the matrix also omits
    CHECK(std::isfinite(a(j * 3 + 1, j * 3)));
    CHECK(jac.diag[j](1, 0) == doctest::Approx(1.0 / (r * r)));
  }
}

TEST_CASE("free fall: boundary floors and admissibility") {
  const FreeFallProblem p;
  const Grid g = build_grid(Geometry::Spherical, 1.0, 100.0, 20);
  Field q = p.initial_state(g);
  q(3, FreeFallProblem::kEint) = -1.0;
  CHECK(p.apply_boundary_conditions(q, g) == 1);
  CHECK(q(3, FreeFallProblem::kEint) == doctest::Approx(p.energy_floor(g)));
  CHECK(p.admissible(q));
  q(5, FreeFallProblem::kRho) = 0.0;
  CHECK_FALSE(p.admissible(q));
  CHECK_THROWS_AS(p.analytic_reference(g, 1.0), ReferenceUnavailable);
  CHECK_THROWS_AS(FreeFallProblem(FreeFallParams{1.0}), std::invalid_argument);
}

TEST_CASE("free fall: reference obeys the power laws exactly") {
  const FreeFallProblem p;
  const Grid g = build_grid(Geometry::Spherical, 1.0, 100.0, 200, 1.02);
  const double rho3 = p.params().outer_density * std::pow(3.0 / 100.0, -1.5);
  const double rho30 = p.params().outer_density * std::pow(30.0 / 100.0, -1.5);
  CHECK(std::log(rho30 / rho3) / std::log(10.0) == doctest::Approx(-1.5));
  CHECK(p.free_fall_speed(4.0) == doctest::Approx(std::sqrt(0.5)));
  const Field q = p.analytic_reference(g, kInf);
  CHECK((q.col(FreeFallProblem::kRho).array() > 0.0).all());
}

TEST_CASE("conservation: interior fluxes telescope for every problem") {
  std::mt19937_64 rng(42);
  const DiffusionProblem diffusion;
  const WaveProblem wave;
  const FreeFallProblem freefall;
  for (int trial = 0; trial < 20; ++trial) {
    const Grid gd = build_grid(Geometry::Spherical, 1000.0, 1003.0, 50, 1.0 + 0.01 * trial);
    CHECK(conservation_defect(diffusion, random_field(rng, 50, 1, 0.0, 10.0), gd) <= 1e-10);
    const Grid gw = build_grid(Geometry::Spherical, 100.0, 104.0, 60, 1.0 + 0.005 * trial);
    CHECK(conservation_defect(wave, random_field(rng, 60, 1, 0.5, 1.5), gw) <= 1e-10);
    const Grid gf = build_grid(Geometry::Spherical, 1.0, 100.0, 80, 1.0 + 0.01 * trial);
    Field q = random_field(rng, 80, 3, 0.1, 2.0);
    q.col(FreeFallProblem::kMom) -= Eigen::VectorXd::Constant(80, 1.0);
    CHECK(conservation_defect(freefall, q, gf) <= 1e-10);
  }
}
