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

TEST_CASE("Grid rejects odd or tiny sizes", "[grid]") {
  CHECK_THROWS_AS(Grid(3, 8, 8), InvalidInput);
  CHECK_THROWS_AS(Grid(8, 2, 8), InvalidInput);
  CHECK_THROWS_AS(Grid(8, 8, 7), InvalidInput);
  CHECK_NOTHROW(Grid(4, 6, 8));
}

TEST_CASE("to_spectral on known fields", "[spectral]") {
  const Grid g(8);

  SECTION("constant is the zeroth mode") {
    const auto f = sample(g, [](double, double, double) { return 3.0; });
    CHECK_THAT(f.coeff(0, 0, 0).real(), WithinAbs(3.0, 1e-15));
    CHECK(f.max_abs_coeff() == Catch::Approx(3.0));
    double others = 0.0;
    f.for_each_mode([&](std::size_t s, int kx, int ky, int kz) {
      if (kx || ky || kz) others = std::max(others, std::abs(f.coeffs()[s]));
    });
    CHECK(others < 1e-15);
  }

  SECTION("cos(pi z) has coefficients 1/2 at kz = +-1") {
    const auto f = sample(g, [](double, double, double z) { return cos(pi * z); });
    CHECK_THAT(f.coeff(0, 0, 1).real(), WithinAbs(0.5, 1e-15));
    CHECK_THAT(f.coeff(0, 0, -1).real(), WithinAbs(0.5, 1e-15));
  }

  SECTION("sin(pi x) cos(pi z) has four coefficients of magnitude 1/4") {
    const auto f = sample(g, [](double x, double, double z) { return sin(pi * x) * cos(pi * z); });
    int count = 0;
    for (int kx = -3; kx <= 3; ++kx)
      for (int ky = -3; ky <= 3; ++ky)
        for (int kz = -3; kz <= 3; ++kz) {
          const double m = std::abs(f.coeff(kx, ky, kz));
          if (m > 1e-14) {
            ++count;
            CHECK_THAT(m, WithinAbs(0.25, 1e-14));
            CHECK(std::abs(kx) == 1);
            CHECK(std::abs(kz) == 1);
            CHECK(ky == 0);
          }
        }
    CHECK(count == 4);
    // e^{i pi x} / (2i) * e^{i pi z} / 2
    CHECK_THAT(f.coeff(1, 0, 1).imag(), WithinAbs(-0.25, 1e-15));
  }

  SECTION("shape mismatch is rejected") {
    std::vector<double> wrong(100, 0.0);
    CHECK_THROWS_AS(to_spectral(g, wrong), InvalidInput);
  }
}

TEST_CASE("Transform round trip on random fields", "[spectral][property]") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const Grid g(8 + 2 * seed, 12, 16);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PhysicalField f(g);
    for (auto& v : f.values()) v = u(rng);
    const PhysicalField back = to_physical(to_spectral(f));
    CHECK(max_abs_diff(back, f) <= 1e-13 * f.max_abs());
  }
}

TEST_CASE("Spectral derivatives", "[spectral]") {
  const Grid g(16);
  SECTION("d_z sin(pi z) = pi cos(pi z)") {
    const auto f = sample(g, [](double, double, double z) { return sin(pi * z); }, Parity::odd);
    const auto d = derivative(f, Axis::z);
    CHECK(d.parity() == Parity::even);
    const auto expect = PhysicalField::sample(g, [](double, double, double z) { return pi * cos(pi * z); });
    CHECK(max_abs_diff(to_physical(d), expect) < 1e-13);
  }
  SECTION("d_x of a constant vanishes") {
    const auto f = sample(g, [](double, double, double) { return 2.5; });
    CHECK(derivative(f, Axis::x).max_abs_coeff() == 0.0);
  }
  SECTION("d_zz cos(pi z) = -pi^2 cos(pi z)") {
    const auto f = sample(g, [](double, double, double z) { return cos(pi * z); }, Parity::even);
    const auto d = derivative(f, Axis::z, 2);
    CHECK(d.parity() == Parity::even);
    const auto expect = PhysicalField::sample(g, [](double, double, double z) { return -pi * pi * cos(pi * z); });
    CHECK(max_abs_diff(to_physical(d), expect) < 1e-12);
  }
  SECTION("odd z-derivatives flip parity, even ones keep it") {
    const auto f = project_parity(random_field(g, 5, Parity::none, 7), Parity::even);
    const auto d1 = derivative(f, Axis::z);
    CHECK(d1.parity() == Parity::odd);
    CHECK(l2_norm(project_parity(d1, Parity::even)) <= 1e-14 * l2_norm(d1));
    const auto d2 = derivative(d1, Axis::z);
    CHECK(d2.parity() == Parity::even);
    CHECK(l2_norm(project_parity(d2, Parity::odd)) <= 1e-14 * l2_norm(d2));
  }
  SECTION("order must be positive") { CHECK_THROWS_AS(derivative(SpectralField(g), Axis::x, 0), InvalidInput); }
}

TEST_CASE("Sobolev norms", "[spectral]") {
  const Grid g(16);
  CHECK(hs_norm(SpectralField(g), 3) == 0.0);
  const auto c = sample(g, [](double, double, double z) { return cos(pi * z); });
  // int_{[0,2]^3} cos^2(pi z) = 4
  CHECK_THAT(hs_norm(c, 0), WithinRel(2.0, 1e-14));
  CHECK_THAT(hs_norm(c, 1), WithinRel(2.0 * std::sqrt(1.0 + pi * pi), 1e-14));
  CHECK_THAT(hs_norm(c, 1), WithinAbs(6.59382, 1e-5));

  SECTION("Parseval against equal-weight quadrature") {
    for (unsigned seed = 11; seed < 16; ++seed) {
      const auto f = random_field(g, 7, Parity::none, seed);
      CHECK_THAT(hs_norm(f, 0), WithinRel(to_physical(f).l2_norm(), 1e-12));
    }
  }
}

TEST_CASE("Parity projection", "[spectral]") {
  const Grid g(8);
  const auto c = sample(g, [](double, double, double z) { return cos(pi * z); });
  CHECK(project_parity(c, Parity::odd).max_abs_coeff() < 1e-16);
  CHECK(l2_norm(project_parity(c, Parity::even) - c) < 1e-15);

  const auto mixed = sample(g, [](double x, double, double z) { return sin(pi * z) + cos(pi * x); });
  const auto cx = sample(g, [](double x, double, double) { return cos(pi * x); });
  CHECK(l2_norm(project_parity(mixed, Parity::even) - cx) < 1e-15);

  SECTION("idempotent and complementary") {
    const auto f = random_field(g, 3, Parity::none, 3);
    const auto e = project_parity(f, Parity::even);
    const auto o = project_parity(f, Parity::odd);
    CHECK(e.parity() == Parity::even);
    CHECK(o.parity() == Parity::odd);
    CHECK(l2_norm(project_parity(e, Parity::even) - e) == 0.0);
    const auto sum = e + o;
    for (std::size_t i = 0; i < f.coeffs().size(); ++i) CHECK(std::abs(sum.coeffs()[i] - f.coeffs()[i]) < 1e-16);
  }
}

TEST_CASE("2/3-rule dealiasing", "[spectral]") {
  const Grid g(8);
  SpectralField f(g);
  f.set_mode(3, 0, 0, 1.0);
  f.set_mode(0, 0, 0, 2.0);
  f.set_mode(2, -2, 2, complex(0.5, 0.5));
  const auto d = dealias(f);
  CHECK(d.coeff(3, 0, 0) == complex(0.0));
  CHECK(d.coeff(0, 0, 0) == complex(2.0));
  CHECK(d.coeff(2, -2, 2) == complex(0.5, 0.5));
  const auto r = random_field(g, 4, Parity::none, 9);
  const auto once = dealias(r);
  const auto twice = dealias(once);
  CHECK(l2_norm(twice - once) == 0.0);
  CHECK(is_dealiased(once));
  CHECK_FALSE(is_dealiased(r));
}

TEST_CASE("Vertical average and fluctuation", "[spectral]") {
  const Grid g(8);
  const double a = 1.5, b = -0.7;
  const auto f = sample(g, [&](double, double, double z) { return a + b * cos(pi * z); }, Parity::even);
  const auto avg = vertical_average(f);
  CHECK_THAT(avg.coeff(0, 0, 0).real(), WithinAbs(a, 1e-15));
  CHECK(l2_norm(avg - sample(g, [&](double, double, double) { return a; })) < 1e-14);
  const auto fl = vertical_fluctuation(f);
  CHECK(l2_norm(fl - sample(g, [&](double, double, double z) { return b * cos(pi * z); })) < 1e-14);
  CHECK(l2_norm(vertical_average(fl)) < 1e-15);

  const auto sx = sample(g, [](double x, double, double) { return sin(pi * x); }, Parity::even);
  CHECK(l2_norm(vertical_average(sx) - sx) < 1e-15);

  CHECK_THROWS_AS(vertical_average(SpectralField(g, Parity::odd)), ContractViolation);

  SECTION("average of a z-derivative vanishes") {
    const auto r = random_field(g, 3, Parity::odd, 4);
    CHECK(l2_norm(vertical_average(derivative(r, Axis::z))) < 1e-14);
  }
}

TEST_CASE("Vertical integral", "[spectral]") {
  const Grid g(16);
  SECTION("cos(pi z) -> sin(pi z) / pi") {
    const auto f = sample(g, [](double, double, double z) { return cos(pi * z); }, Parity::even);
    const auto p = vertical_integral(f);
    CHECK(p.periodic.parity() == Parity::odd);
    CHECK(p.slope.max_abs_coeff() < 1e-15);
    const auto expect = PhysicalField::sample(g, [](double, double, double z) { return sin(pi * z) / pi; });
    CHECK(max_abs_diff(p.to_physical(), expect) < 1e-14);
  }
  SECTION("1 -> z on the grid points") {
    const auto f = sample(g, [](double, double, double) { return 1.0; }, Parity::even);
    const auto expect = PhysicalField::sample(g, [](double, double, double z) { return z; });
    CHECK(max_abs_diff(vertical_integral(f).to_physical(), expect) < 1e-14);
  }
  SECTION("pi cos(pi x) cos(pi z) -> cos(pi x) sin(pi z)") {
    const auto f = sample(g, [](double x, double, double z) { return pi * cos(pi * x) * cos(pi * z); });
    const auto expect = PhysicalField::sample(g, [](double x, double, double z) { return cos(pi * x) * sin(pi * z); });
    CHECK(max_abs_diff(vertical_integral(f).to_physical(), expect) < 1e-14);
  }
  SECTION("vanishes at z = 0 and differentiates back") {
    auto f = random_field(g, 5, Parity::even, 21);
    f -= kz0_part(f);
    const auto p = vertical_integral(f);
    const auto phys = p.to_physical();
    double at0 = 0.0;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) at0 = std::max(at0, std::abs(phys(i, j, 0)));
    CHECK(at0 < 1e-14);
    CHECK(rel_l2_diff(derivative(p.periodic, Axis::z), f) < 1e-13);
  }
}

TEST_CASE("Prolongation preserves band-limited fields", "[spectral]") {
  const Grid g(8), fine(16);
  const auto f = random_field(g, 3, Parity::even, 5);
  const auto p = prolong(f, fine);
  CHECK_THAT(l2_norm(p), WithinRel(l2_norm(f), 1e-14));
  const auto fp = to_physical(p);
  const auto cp = to_physical(f);
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i < 8; ++i) CHECK(std::abs(fp(2 * i, 2 * j, 2 * k) - cp(i, j, k)) < 1e-13);
}

TEST_CASE("Horizontal fields lift to z-independent fields", "[spectral]") {
  const Grid g(8);
  std::vector<double> vals(g.horizontal_size());
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) vals[i + 8 * j] = cos(pi * g.x(i)) + 0.5 * sin(pi * g.y(j));
  const auto h = HorizontalField::from_physical(g, vals);
  const auto lifted = h.lift();
  const auto expect = sample(g, [](double x, double y, double) { return cos(pi * x) + 0.5 * sin(pi * y); });
  CHECK(l2_norm(lifted - expect) < 1e-14);
  CHECK(l2_norm(derivative(lifted, Axis::z)) == 0.0);
  CHECK(l2_norm(h.derivative(Axis::x).lift() - derivative(expect, Axis::x)) < 1e-13);
}
