// SPDX-License-Identifier: Apache-2.0
#include "fdd/navier_stokes.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fdd;

namespace {

// Traction-like multiplier on interface k, component c, at arc length s.
double multiplier_at(const NsDiscretization& disc, const NsSolution& sol, int k, int c, double s) {
  const auto& basis = disc.interfaces()[k].basis;
  const auto xi = basis.eval_all(s);
  double v = 0.0;
  for (int m = 0; m < basis.size(); ++m)
    v += sol.lambda[k][c * basis.size() + m] * xi[m];
  return v;
}

} // namespace

TEST_CASE("problem validation") {
  NsProblem p = manufactured_case(MeshSize{4});
  CHECK_NOTHROW(p.validate());
  SUBCASE("odd multiplier count") {
    p.n_gamma[0] = 21;
    CHECK_THROWS_AS(p.validate(), Error);
  }
  SUBCASE("wrong number of interfaces") {
    p.n_gamma.pop_back();
    CHECK_THROWS_AS(p.validate(), Error);
  }
  SUBCASE("unknown side") {
    p.neumann_sides = {"north"};
    CHECK_THROWS_AS(p.validate(), Error);
  }
  SUBCASE("pin with a Neumann side") {
    p.pin_pressure = true;
    CHECK_THROWS_AS(p.validate(), Error);
  }
  SUBCASE("viscosity") {
    p.mu = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
  }
}

TEST_CASE("pressure pin") {
  NsDiscretization man(manufactured_case(MeshSize{4}));
  CHECK_THROWS_AS(man.pin_pressure(), Error);

  NsDiscretization cav(cavity_case(MeshSize{16}));
  REQUIRE(cav.pin().has_value());
  const PressurePin a = *cav.pin();
  const PressurePin b = cav.pin_pressure();
  CHECK(a.subdomain == b.subdomain);
  CHECK(a.dof == b.dof);
  // Nearest vertex to the origin belongs to the bottom-left subdomain and is the origin itself.
  const NsSubdomain& sub = cav.subdomains()[a.subdomain];
  const Point at = sub.pressure->dof_coords()[a.dof - sub.velocity_dofs()];
  CHECK(at.x == 0.0);
  CHECK(at.y == 0.0);
}

TEST_CASE("cavity set-up") {
  const NsProblem p = cavity_case(MeshSize{32});
  CHECK(p.reynolds() == doctest::Approx(500.0));
  CHECK(p.n_gamma == std::vector<int>{42, 18, 18, 14});
  CHECK(p.dirichlet({0.5, 1.0})[0] == 500.0);
  CHECK(p.dirichlet({0.5, 1.0})[1] == 0.0);
  CHECK(p.dirichlet({0.0, 1.0})[0] == 0.0);
  CHECK(p.dirichlet({1.0, 1.0})[0] == 0.0);
  CHECK(p.dirichlet({1.0, 0.5})[0] == 0.0);
  CHECK_THROWS_AS(cavity_case(MeshSize{8}), Error);

  const NsDiscretization d(p);
  CHECK(d.multiplier_dofs() == 92);
  CHECK(d.interfaces()[0].basis.fourier().n_omega() == 10);
  CHECK(d.interfaces()[3].basis.fourier().n_omega() == 3);
  CHECK(d.interfaces()[0].components == 2);
}

TEST_CASE("zero data gives the zero solution at once") {
  NsProblem p = manufactured_case(MeshSize{4});
  p.forcing = [](Point) { return std::array<double, 2>{0.0, 0.0}; };
  p.dirichlet = p.forcing;
  p.neumann = p.forcing;
  const NsSolution s = newton_solve(NsDiscretization(p));
  CHECK(s.log.iterations <= 1);
  for (const auto& v : s.state)
    CHECK(v.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("manufactured solution: constraint, convergence and Newton rate") {
  double prev = 0.0;
  for (int n : {4, 8}) {
    const NsDiscretization d(manufactured_case(MeshSize{n}));
    const NsSolution s = newton_solve(d);
    CAPTURE(n);
    CHECK(s.jump <= 1e-9);
    CHECK(s.log.residuals.back() < 1e-8);
    CHECK(s.log.iterations <= 4);
    const double e = manufactured_errors(d, s).combined();
    if (prev > 0.0)
      CHECK(e < prev / 3);
    prev = e;
    // Evaluation picks the subdomain containing the point.
    const auto u = evaluate_velocity(d, s, {0.3, 0.7});
    CHECK(u[0] == doctest::Approx(std::sin(std::numbers::pi * 0.7)).epsilon(0.02));
    CHECK(u[1] == doctest::Approx(std::exp(0.3)).epsilon(0.02));
  }
}

TEST_CASE("Newton converges quadratically") {
  // Re = 100 makes the cavity at h = 1/16 take several steps; the tail must be quadratic.
  NsProblem p = cavity_case(MeshSize{16});
  p.mu = 5.0;
  const NsSolution s = newton_solve(NsDiscretization(p));
  const auto& r = s.log.residuals;
  REQUIRE(r.size() >= 3);
  bool seen = false;
  for (std::size_t k = 1; k + 1 < r.size(); ++k)
    if (r[k] < 1e-2 * r[0] && r[k + 1] > 1e-13) {
      // r_{k+1} <= C r_k^2 with a modest C, measured relative to the initial residual.
      const double a = r[k] / r[0], b = r[k + 1] / r[0];
      CHECK(b <= 10.0 * a * a);
      seen = true;
    }
  CHECK(seen);
}

TEST_CASE("multiplier approximates the traction on the horizontal interface") {
  // Minus side is the top half, outward normal (0, -1): sigma n = (-du_x/dy, p - du_y/dy).
  // On y = 1/2, du_x/dy = pi cos(pi / 2) = 0 and du_y/dy = 0, so sigma n = (0, -x^2 / 2).
  double prev = 1e9;
  for (int n : {4, 8, 16}) {
    const NsDiscretization d(manufactured_case(MeshSize{n}));
    const NsSolution s = newton_solve(d);
    double err = 0.0;
    for (int k = 1; k < 50; ++k) {
      const double x = k / 50.0;
      err = std::max(err, std::abs(multiplier_at(d, s, 0, 0, x)));
      err = std::max(err, std::abs(multiplier_at(d, s, 0, 1, x) + 0.5 * x * x));
    }
    CAPTURE(n);
    MESSAGE("traction error " << err);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("eddy search") {
  const std::vector<EddyBox> box{{"A", Rect{0.2, 0.8, 0.2, 0.8}}};
  SUBCASE("isolated minimum") {
    const Point c{0.4321, 0.5678};
    const auto e = find_eddies([&](Point p) { return std::array<double, 2>{p.x - c.x, p.y - c.y}; }, box);
    REQUIRE(e.size() == 1);
    CHECK(e[0].center.x == doctest::Approx(c.x).epsilon(1e-4));
    CHECK(e[0].center.y == doctest::Approx(c.y).epsilon(1e-4));
    CHECK_FALSE(e[0].on_boundary);
    CHECK(e[0].speed < 1e-4);
  }
  SUBCASE("interior minimum beats a smaller value on the box edge") {
    const auto e = find_eddies(
        [](Point p) {
          const double bowl = 0.05 + std::hypot(p.x - 0.5, p.y - 0.5);
          return std::array<double, 2>{p.x <= 0.2 + 1e-12 ? 0.0 : bowl, 0.0};
        },
        box);
    CHECK(e[0].center.x == doctest::Approx(0.5).epsilon(1e-3));
    CHECK_FALSE(e[0].on_boundary);
  }
  SUBCASE("a flat field has no interior minimum and is flagged") {
    const auto e = find_eddies([](Point) { return std::array<double, 2>{1.0, 0.0}; }, box);
    CHECK(e[0].on_boundary);
  }
  CHECK_THROWS_AS(find_eddies([](Point) { return std::array<double, 2>{}; }, box, 0.0), Error);
  CHECK_THROWS_AS(find_eddies([](Point) { return std::array<double, 2>{}; }, {{"E", Rect{0.5, 0.5, 0, 1}}}), Error);
}
