#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace hydrolim;
using namespace hydrolim::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using std::cos, std::sin;

constexpr double pi = std::numbers::pi;

namespace {

HorizontalField horizontal(const Grid& g, double (*fn)(double, double)) {
  std::vector<double> v(g.horizontal_size());
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) v[std::size_t(i) + std::size_t(g.nx()) * j] = fn(g.x(i), g.y(j));
  return HorizontalField::from_physical(g, v);
}

}  // namespace

TEST_CASE("Hydrostatic vertical velocity", "[cpe_solver]") {
  const Grid g(16);
  SECTION("barotropic flow has no wp") {
    CpeState s = CpeState::zero(g);
    s.sigma_p = horizontal(g, [](double x, double y) { return 0.3 * cos(pi * x) * sin(pi * y); });
    s.vp1 = sample(g, [](double x, double y, double) { return sin(pi * y) + cos(pi * x); }, Parity::even);
    CHECK(reconstruct_wp(s).max_abs_coeff() < 1e-16);
  }
  SECTION("baroclinic convergence") {
    CpeState s = CpeState::zero(g);
    s.vp1 = sample(g, [](double x, double, double z) { return sin(pi * x) * cos(pi * z); }, Parity::even);
    const auto expect = PhysicalField::sample(g, [](double x, double, double z) { return -cos(pi * x) * sin(pi * z); });
    const auto wp = reconstruct_wp(s);
    CHECK(wp.parity() == Parity::odd);
    CHECK(max_abs_diff(to_physical(wp), expect) < 1e-13);
  }
  SECTION("vanishes at the lid for any state") {
    for (unsigned seed = 1; seed <= 4; ++seed) {
      CpeState s = CpeState::zero(g);
      s.sigma_p = HorizontalField::from_kz0(random_field(g, 4, Parity::even, seed, 0.3));
      s.vp1 = random_field(g, 4, Parity::even, seed + 10);
      s.vp2 = random_field(g, 4, Parity::even, seed + 20);
      s.wp = reconstruct_wp(s);
      CHECK(s.wp.max_abs_coeff() > 1e-3);
      CHECK(verify::wp_at_lid(s) <= 1e-12);
    }
  }
}

TEST_CASE("Hydrostatic tendencies", "[cpe_solver]") {
  const Grid g(16);
  SECTION("zero state") {
    const auto t = cpe_rhs(CpeState::zero(g));
    CHECK(t.sigma_p.lift().max_abs_coeff() == 0.0);
    CHECK(t.v1.max_abs_coeff() == 0.0);
  }
  SECTION("uniform flow") {
    CpeState s = CpeState::zero(g);
    s.vp1.set_mode(0, 0, 0, 2.0);
    const auto t = cpe_rhs(s);
    CHECK(t.sigma_p.lift().max_abs_coeff() == 0.0);
    CHECK(t.v1.max_abs_coeff() < 1e-16);
    CHECK(t.v2.max_abs_coeff() < 1e-16);
  }
  SECTION("drift of cos(pi x)") {
    CpeState s = CpeState::zero(g);
    s.sigma_p = horizontal(g, [](double x, double) { return cos(pi * x); });
    s.vp1.set_mode(0, 0, 0, 1.0);
    const auto t = cpe_rhs(s);
    const auto expect = PhysicalField::sample(g, [](double x, double, double) { return pi * sin(pi * x); });
    CHECK(max_abs_diff(to_physical(t.sigma_p.lift()), expect) < 1e-13);
    // momentum feels -grad sp = pi sin(pi x)
    CHECK(max_abs_diff(to_physical(t.v1), expect) < 1e-13);
  }
  SECTION("density follows the vertical mean only") {
    CpeState s = CpeState::zero(g);
    s.sigma_p = horizontal(g, [](double x, double) { return cos(pi * x); });
    s.vp1 = sample(g, [](double x, double, double z) { return sin(pi * x) * cos(pi * z); }, Parity::even);
    s.wp = reconstruct_wp(s);
    CHECK(cpe_rhs(s).sigma_p.lift().max_abs_coeff() < 1e-15);
  }
}

TEST_CASE("Hydrostatic stepping", "[cpe_solver]") {
  const Grid g(16);
  StepperConfig cfg;
  cfg.dt = 1e-3;

  SECTION("zero state is a fixed point") {
    CpeState s = CpeState::zero(g);
    CpeIntegrator it(cfg);
    for (int i = 0; i < 10; ++i) it.advance(s);
    CHECK(s.sigma_p.lift().max_abs_coeff() == 0.0);
    CHECK(s.vp1.max_abs_coeff() == 0.0);
  }
  SECTION("constant density at rest is a fixed point") {
    CpeState s = CpeState::zero(g);
    s.sigma_p.at(0, 0) = 0.8;
    CpeIntegrator it(cfg);
    for (int i = 0; i < 10; ++i) it.advance(s);
    CHECK(s.sigma_p.at(0, 0) == complex(0.8));
    CHECK(l2_norm(s.sigma_p.lift()) == Catch::Approx(0.8 * std::sqrt(8.0)));
    CHECK(s.vp1.max_abs_coeff() == 0.0);
  }
  SECTION("lid condition and structure hold every step") {
    CpeState s = default_cpe_initial(g, 0.5);
    CpeIntegrator it(cfg);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      it.advance(s);
      worst = std::max(worst, verify::wp_at_lid(s));
    }
    CHECK(worst <= 1e-12);
    CHECK(l2_norm(derivative(s.sigma_p.lift(), Axis::z)) == 0.0);
    CHECK(l2_norm(project_parity(s.vp1, Parity::odd)) <= 1e-14 * l2_norm(s.vp1));
  }
  SECTION("barotropic data stays barotropic") {
    CpeState s = CpeState::zero(g);
    s.sigma_p = horizontal(g, [](double x, double y) { return 0.2 * cos(pi * x) + 0.1 * sin(pi * y); });
    s.vp1 = sample(g, [](double, double y, double) { return 0.3 * sin(pi * y); }, Parity::even);
    CpeIntegrator it(cfg);
    for (int i = 0; i < 30; ++i) it.advance(s);
    CHECK(l2_norm(vertical_fluctuation(s.vp1)) < 1e-15);
    CHECK(s.wp.max_abs_coeff() < 1e-16);
  }
  SECTION("non-finite input is reported") {
    CpeState s = CpeState::zero(g);
    s.sigma_p.at(1, 0) = complex(std::nan(""), 0.0);
    CHECK_THROWS_AS(step_cpe(s, cfg), DivergenceError);
  }
}

TEST_CASE("Manufactured hydrostatic solution converges at second order", "[cpe_solver]") {
  const double e1 = verify::manufactured_cpe_error(1e-2);
  const double e2 = verify::manufactured_cpe_error(5e-3);
  const double e3 = verify::manufactured_cpe_error(2.5e-3);
  CHECK(e1 < 1e-3);
  CHECK(std::log2(e1 / e2) >= 1.8);
  CHECK(std::log2(e2 / e3) >= 1.8);
}

TEST_CASE("A hydrostatic state has zero distance to itself", "[cpe_solver][diagnostics]") {
  const Grid g(16);
  const CpeState cpe = default_cpe_initial(g);
  const CfState cf{cpe.sigma_p.lift(), cpe.vp1, cpe.vp2, cpe.wp, 0.1, cpe.time};
  const auto d = delta_norms(cf, cpe, 0.0);
  CHECK(d.delta_sigma_l2 == 0.0);
  CHECK(d.delta_v_l2 == 0.0);
  CHECK(d.delta_v_h1 == 0.0);
  CHECK(d.delta_w_l2 == 0.0);
  CHECK(d.dz_sigma_h2 == 0.0);
  CHECK(d.avg_delta_sigma_l2 == 0.0);
  CHECK(d.fluct_delta_sigma_l2 == 0.0);
}
