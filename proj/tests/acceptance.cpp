// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include "fdd/harness.hpp"
#include "fdd/infsup.hpp"
#include "fdd/navier_stokes.hpp"
#include "fdd/poisson.hpp"
#include "fdd/quadrature.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace fdd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::vector<int> poisson_meshes{20, 28, 40, 56, 80};

PoissonCase poisson(int n, bool conforming, int n_gamma, int q = 4) {
  PoissonCase c;
  c.n = n;
  c.conforming = conforming;
  c.n_gamma = n_gamma;
  c.quadrature_nodes = q;
  return c;
}

std::vector<double> inverse(const std::vector<int>& n) {
  std::vector<double> h;
  for (int v : n)
    h.push_back(1.0 / v);
  return h;
}

// 1. Optimal H1 rate for P2/P2 with 13 multipliers.
Outcome optimal_rate() {
  Outcome o{true, ""};
  for (bool conforming : {true, false}) {
    std::vector<double> e;
    for (int n : poisson_meshes)
      e.push_back(solve_poisson(poisson(n, conforming, 13)).broken_h1);
    const double s = loglog_slope(inverse(poisson_meshes), e);
    o.pass = o.pass && s >= 1.85 && s <= 2.15;
    o.detail += fmt("%s slope %.3f (e %.3g -> %.3g); ", conforming ? "conforming" : "non-conforming", s, e.front(),
                    e.back());
  }
  return o;
}

// 2. Three multipliers cannot transmit the solution: the error stalls.
Outcome stagnation() {
  Outcome o{true, ""};
  for (bool conforming : {true, false}) {
    const double coarse = solve_poisson(poisson(poisson_meshes.front(), conforming, 3)).broken_h1;
    const double fine = solve_poisson(poisson(poisson_meshes.back(), conforming, 3)).broken_h1;
    o.pass = o.pass && fine >= 0.3 * coarse;
    o.detail += fmt("%s fine/coarse %.3f; ", conforming ? "conforming" : "non-conforming", fine / coarse);
  }
  return o;
}

// 3. P1 next to P2: each side keeps its own rate.
Outcome mixed_degree() {
  std::vector<double> e1, e2;
  for (int n : poisson_meshes) {
    PoissonCase c = poisson(n, false, 13);
    c.degree_left = Degree::P1;
    const PoissonResult r = solve_poisson(c);
    e1.push_back(r.subdomain_h1[0]);
    e2.push_back(r.subdomain_h1[1]);
  }
  const double s1 = loglog_slope(inverse(poisson_meshes), e1);
  const double s2 = loglog_slope(inverse(poisson_meshes), e2);
  return {s1 >= 0.85 && s1 <= 1.15 && s2 >= 1.7 && s2 <= 2.2, fmt("Omega_1 slope %.3f, Omega_2 slope %.3f", s1, s2)};
}

// 4. Under-integrated coupling degrades as modes are added; q = 4 does not.
Outcome quadrature() {
  auto err = [](int g, int q) { return solve_poisson(poisson(20, false, g, q)).broken_h1; };
  const double a13 = err(13, 2), a21 = err(21, 2);
  const double b13 = err(13, 4), b17 = err(17, 4), b21 = err(21, 4);
  const bool unstable = a21 > a13;
  const bool stable = b17 <= 1.05 * b13 && b21 <= 1.05 * b17;
  return {unstable && stable,
          fmt("q=2: e(13) %.4g, e(21) %.4g; q=4: e(13,17,21) %.4g %.4g %.4g", a13, a21, b13, b17, b21)};
}

// 5. Inf-sup plateau near sqrt(2) and its width in n_gamma.
Outcome infsup_plateau() {
  auto beta = [](int n, int g) {
    return beta_estimate(build_surrogate(make_poisson_problem(poisson(n, true, g)).graph, 0));
  };
  std::vector<int> gammas;
  for (int g = 1; g <= 45; g += 2)
    gammas.push_back(g);

  Outcome o{true, ""};
  double lo = 1e9, hi = 0.0;
  bool monotone = true;
  std::vector<int> widths;
  for (int n : {20, 40, 80}) {
    int width = 0;
    double prev = 1e9;
    for (int g : gammas) {
      const double b = beta(n, g);
      if (n == 40) {
        monotone = monotone && b <= prev * (1 + 1e-9);
        if (g >= 3 && g <= 9) {
          lo = std::min(lo, b);
          hi = std::max(hi, b);
        }
      }
      prev = b;
      if (b >= 1.0)
        width = g;
    }
    widths.push_back(width);
  }
  const bool plateau = lo >= 1.31 && hi <= 1.51;
  const bool growing = std::is_sorted(widths.begin(), widths.end());
  o.pass = plateau && monotone && growing;
  o.detail = fmt("h=1/40 beta in [%.5f, %.5f] for n_gamma 3..9, monotone %s, widths (1/20,1/40,1/80) = %d %d %d", lo,
                 hi, monotone ? "yes" : "no", widths[0], widths[1], widths[2]);
  return o;
}

// 6. Conditioning with and without orthonormalisation, conforming meshes. The
// non-conforming pair is reported for information only.
Outcome orthonormalisation() {
  Outcome o{true, ""};
  for (bool conforming : {true, false}) {
    PoissonCase c = poisson(20, conforming, 21);
    const PoissonResult ortho = solve_poisson(c);
    c.orthonormal = false;
    const PoissonResult raw = solve_poisson(c);
    const double k_o = condition_estimate(ortho.system), k_r = condition_estimate(raw.system);
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i < 2; ++i) {
      diff = std::max(diff, (ortho.solution.u[i] - raw.solution.u[i]).lpNorm<Eigen::Infinity>());
      scale = std::max(scale, ortho.solution.u[i].lpNorm<Eigen::Infinity>());
    }
    const double rel = diff / scale;
    if (conforming)
      o.pass = k_r >= 1e3 * k_o && rel <= 1e-8;
    o.detail += fmt("%s: kappa raw %.3g, orthonormal %.3g, ratio %.3g, u difference %.2g; ",
                    conforming ? "conforming" : "(info) non-conforming", k_r, k_o, k_r / k_o, rel);
  }
  return o;
}

// 7. Gram matrix of the mapped basis against an independent quadrature.
Outcome orthonormality() {
  const GaussRule g = gauss_legendre(16);
  double worst = 0.0;
  for (int n_omega = 0; n_omega <= 21; ++n_omega) {
    const MultiplierBasis b = MultiplierBasis::orthonormal(1.0, n_omega, {2000, SampleMass::gauss_legendre});
    const int n = b.size();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
    const double h = 1.0 / 64;
    for (int p = 0; p < 64; ++p)
      for (int k = 0; k < 16; ++k) {
        const auto v = b.eval_all(h * p + 0.5 * h * (g.nodes[k] + 1.0));
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            G(i, j) += 0.5 * h * g.weights[k] * v[i] * v[j];
      }
    worst = std::max(worst, (G - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-6, fmt("max |G - I| = %.3g over n_gamma 1..43", worst)};
}

// 8. Navier-Stokes manufactured solution.
Outcome ns_convergence() {
  const std::vector<int> levels{4, 8, 16};
  std::vector<double> e;
  int worst_newton = 0;
  for (int n : levels) {
    const NsDiscretization d(manufactured_case(MeshSize{n}, {22, 18, 18, 14}));
    const NsSolution s = newton_solve(d);
    worst_newton = std::max(worst_newton, s.log.iterations);
    e.push_back(manufactured_errors(d, s).combined());
  }
  const double s = loglog_slope(inverse(levels), e);
  return {s >= 1.8 && s <= 2.2 && worst_newton <= 8,
          fmt("slope %.3f (errors %.3g %.3g %.3g), at most %d Newton steps", s, e[0], e[1], e[2], worst_newton)};
}

// 9. Cavity eddy centres at h = 1/32.
Outcome cavity() {
  const NsDiscretization d(cavity_case(MeshSize{32}));
  const NsSolution s = newton_solve(d);
  const auto eddies = find_eddies([&](Point p) { return evaluate_velocity(d, s, p); }, cavity_eddy_boxes());
  const auto& ref = cavity_reference_centers();
  const std::array<double, 3> tol{5e-3, 1e-3, 1e-3};
  bool pass = d.multiplier_dofs() == 92;
  std::string detail = fmt("multipliers %d, Newton %d; ", d.multiplier_dofs(), s.log.iterations);
  for (std::size_t i = 0; i < eddies.size(); ++i) {
    const double dist = norm(eddies[i].center - ref.at(i).second);
    pass = pass && dist <= tol[i] && !eddies[i].on_boundary;
    detail += fmt("%s (%.6f, %.6f) off by %.2g; ", eddies[i].label.c_str(), eddies[i].center.x, eddies[i].center.y,
                  dist);
  }
  return {pass, detail};
}

// 10. Randomised invariants.
Outcome invariants() {
  std::mt19937 rng(20261016);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  double jump = 0.0, flip = 0.0, jac = 0.0, unity = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 * pick(2, 12);
    PoissonCase c = poisson(n, pick(0, 1) == 1, 2 * pick(0, std::min(6, n / 2)) + 1, pick(2, 6));
    c.degree_left = pick(0, 1) ? Degree::P2 : Degree::P1;
    c.degree_right = pick(0, 1) ? Degree::P2 : Degree::P1;
    c.orthonormal = pick(0, 1) == 1;
    const PoissonResult a = solve_poisson(c);
    jump = std::max(jump, jump_residual(a.system, a.solution.raw.head(a.system.primal_size)));
    c.flip_orientation = true;
    const PoissonResult b = solve_poisson(c);
    for (int i = 0; i < 2; ++i)
      flip = std::max(flip, (a.solution.u[i] - b.solution.u[i]).lpNorm<Eigen::Infinity>() /
                                a.solution.u[i].lpNorm<Eigen::Infinity>());
  }
  for (int trial = 0; trial < 8; ++trial) {
    const double x0 = real(-1, 1), y0 = real(-1, 1);
    auto mesh = std::make_shared<const Mesh>(Rect{x0, x0 + real(0.2, 2), y0, y0 + real(0.2, 2)}, pick(1, 5), pick(1, 5));
    const FunctionSpace v(mesh, Degree::P2, 2), p(mesh, Degree::P1);
    Vector u(v.dof_count()), d(v.dof_count());
    for (int i = 0; i < u.size(); ++i) {
      u[i] = real(-1, 1);
      d[i] = real(-1, 1);
    }
    const double mu = real(0.01, 2);
    auto residual = [&](const Vector& x) {
      const NsBlocks blk = assemble_ns_blocks(v, p, mu, x);
      return Vector(blk.diffusion * x + blk.convection * x);
    };
    const NsBlocks blk = assemble_ns_blocks(v, p, mu, u);
    const Vector jd = blk.diffusion * d + blk.convection_jacobian * d;
    const double eps = 1e-5;
    const Vector fd = (residual(u + eps * d) - residual(u - eps * d)) / (2 * eps);
    jac = std::max(jac, (fd - jd).norm() / jd.norm());
  }
  for (int trial = 0; trial < 20; ++trial) {
    const double L = real(0.2, 3);
    Mesh m(Rect{0, 0.5, 0, L}, pick(1, 4), pick(1, 40));
    const Segment seg({0.5, 0}, {0.5, L});
    m.tag_segment(seg, interface_tag(1));
    auto mesh = std::make_shared<const Mesh>(std::move(m));
    const FunctionSpace s(mesh, pick(0, 1) ? Degree::P2 : Degree::P1);
    const CouplingMatrix b =
        assemble_coupling(MultiplierBasis::raw(L, pick(0, 8)), s, interface_edge_partition(*mesh, interface_tag(1), seg),
                          pick(1, 8));
    unity = std::max(unity, std::abs((b.entries * Vector::Ones(s.dof_count()))(0) - L));
  }
  const bool pass = jump <= 1e-9 && flip <= 1e-9 && jac <= 1e-6 && unity <= 1e-12;
  return {pass, fmt("jump %.2g, flip %.2g, Jacobian vs FD %.2g, |row sum - L| %.2g", jump, flip, jac, unity)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s; // runtime limit, 0 for none
  std::function<Outcome()> run;
};

} // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "poisson optimal convergence", 120, optimal_rate},
      {2, "stagnation with three multipliers", 0, stagnation},
      {3, "mixed-degree rates", 0, mixed_degree},
      {4, "interface quadrature instability", 0, quadrature},
      {5, "inf-sup plateau", 0, infsup_plateau},
      {6, "orthonormalisation and conditioning", 0, orthonormalisation},
      {7, "orthonormality of the mapped basis", 0, orthonormality},
      {8, "navier-stokes manufactured convergence", 600, ns_convergence},
      {9, "cavity eddy centres", 900, cavity},
      {10, "invariant properties", 60, invariants},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt("over the %.0f s budget; ", c.budget_s);
    }
    failed += !o.pass;
    std::printf("%s criterion %d (%s): %s[%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.empty() ? "" : (o.detail + " ").c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
