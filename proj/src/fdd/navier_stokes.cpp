// SPDX-License-Identifier: Apache-2.0
#include "fdd/navier_stokes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fdd {

namespace {

const std::array<std::string, 4> kSides{"left", "right", "bottom", "top"};

std::string boundary_tag(const std::string& side) { return "boundary:" + side; }

Rect bounding_rect(const NsLayout& layout) {
  Rect r = layout.subdomains.front().rect;
  for (const auto& s : layout.subdomains) {
    r.x0 = std::min(r.x0, s.rect.x0);
    r.x1 = std::max(r.x1, s.rect.x1);
    r.y0 = std::min(r.y0, s.rect.y0);
    r.y1 = std::max(r.y1, s.rect.y1);
  }
  return r;
}

Segment side_segment(const Rect& r, const std::string& side) {
  if (side == "left")
    return Segment({r.x0, r.y0}, {r.x0, r.y1});
  if (side == "right")
    return Segment({r.x1, r.y0}, {r.x1, r.y1});
  if (side == "bottom")
    return Segment({r.x0, r.y0}, {r.x1, r.y0});
  return Segment({r.x0, r.y1}, {r.x1, r.y1});
}

int n_omega_for_pair(int n_gamma) {
  if (n_gamma < 2 || n_gamma % 2 != 0 || (n_gamma / 2) % 2 == 0)
    throw Error("vector multiplier count must be 2 (2 n_omega + 1), got " + std::to_string(n_gamma));
  return (n_gamma / 2 - 1) / 2;
}

} // namespace

void NsProblem::validate() const {
  if (!(mu > 0.0))
    throw Error("viscosity must be positive");
  if (layout.subdomains.empty())
    throw Error("Navier-Stokes layout has no subdomains");
  if (n_gamma.size() != layout.interfaces.size())
    throw Error("expected " + std::to_string(layout.interfaces.size()) + " multiplier counts, got " +
                std::to_string(n_gamma.size()));
  for (int n : n_gamma)
    n_omega_for_pair(n);
  for (const auto& s : neumann_sides)
    if (std::find(kSides.begin(), kSides.end(), s) == kSides.end())
      throw Error("unknown boundary side '" + s + "'");
  if (pin_pressure && !neumann_sides.empty())
    throw Error("pressure pin requires a pure Dirichlet problem (Gamma_N is not empty)");
}

NsDiscretization::NsDiscretization(const NsProblem& problem) : problem_(problem) {
  problem_.validate();
  const Rect domain = bounding_rect(problem_.layout);
  auto meshes = ns_mesh_family(problem_.h, problem_.layout);
  for (auto& m : meshes)
    for (const auto& side : kSides)
      m.tag_segment(side_segment(domain, side), boundary_tag(side));

  for (auto& m : meshes) {
    NsSubdomain sub;
    sub.mesh = std::make_shared<const Mesh>(std::move(m));
    for (const auto& e : sub.mesh->boundary_edges())
      if (e.tag.rfind("interface:", 0) != 0 && e.tag.rfind("boundary:", 0) != 0)
        throw Error("subdomain boundary edge lies neither on an interface nor on the outer boundary");
    sub.velocity = std::make_shared<const FunctionSpace>(sub.mesh, Degree::P2, 2);
    sub.pressure = std::make_shared<const FunctionSpace>(sub.mesh, Degree::P1, 1);
    const int n = sub.velocity->scalar_dof_count();

    sub.load = assemble_load(*sub.velocity, problem_.forcing);
    for (const auto& side : problem_.neumann_sides)
      if (sub.mesh->has_tag(boundary_tag(side)))
        sub.load += assemble_boundary_load(*sub.velocity, boundary_tag(side), problem_.neumann);

    for (const auto& e : sub.mesh->boundary_edges()) {
      if (e.tag.rfind("boundary:", 0) != 0)
        continue;
      const std::string side = e.tag.substr(9);
      if (std::find(problem_.neumann_sides.begin(), problem_.neumann_sides.end(), side) !=
          problem_.neumann_sides.end())
        continue;
      for (int dof : sub.velocity->edge_dofs(e.vertices[0], e.vertices[1])) {
        const auto g = problem_.dirichlet(sub.velocity->dof_coords()[dof]);
        sub.bc.add(dof, g[0]);
        sub.bc.add(n + dof, g[1]);
      }
    }
    const NsBlocks blocks =
        assemble_ns_blocks(*sub.velocity, *sub.pressure, problem_.mu, Vector::Zero(sub.velocity_dofs()));
    sub.diffusion = blocks.diffusion;
    sub.divergence = blocks.divergence;
    subs_.push_back(std::move(sub));
  }

  for (std::size_t k = 0; k < problem_.layout.interfaces.size(); ++k) {
    const auto& itf = problem_.layout.interfaces[k];
    const int n_omega = n_omega_for_pair(problem_.n_gamma[k]);
    const double L = itf.segment.length();
    InterfaceSpec spec{itf.segment,
                       problem_.orthonormal ? MultiplierBasis::orthonormal(L, n_omega)
                                            : MultiplierBasis::raw(L, n_omega),
                       {},
                       {},
                       2};
    const std::string tag = interface_tag(static_cast<int>(k) + 1);
    for (int id : itf.minus)
      spec.minus.push_back({id, interface_edge_partition(*subs_[id].mesh, tag, itf.segment)});
    for (int id : itf.plus)
      spec.plus.push_back({id, interface_edge_partition(*subs_[id].mesh, tag, itf.segment)});
    interfaces_.push_back(std::move(spec));
  }

  if (problem_.pin_pressure)
    pin_pressure();
}

PressurePin NsDiscretization::pin_pressure() {
  if (!problem_.neumann_sides.empty())
    throw Error("pressure pin requires a pure Dirichlet problem (Gamma_N is not empty)");
  if (pin_)
    return *pin_;
  PressurePin best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(subs_.size()); ++i) {
    const auto& coords = subs_[i].pressure->dof_coords();
    for (int j = 0; j < static_cast<int>(coords.size()); ++j) {
      const double d = norm(coords[j]);
      if (d < best_dist) {
        best_dist = d;
        best = {i, subs_[i].velocity_dofs() + j};
      }
    }
  }
  subs_[best.subdomain].bc.add(best.dof, 0.0);
  pin_ = best;
  return best;
}

int NsDiscretization::velocity_dofs() const {
  int n = 0;
  for (const auto& s : subs_)
    n += s.velocity_dofs();
  return n;
}

int NsDiscretization::pressure_dofs() const {
  int n = 0;
  for (const auto& s : subs_)
    n += s.pressure_dofs();
  return n;
}

int NsDiscretization::multiplier_dofs() const {
  int n = 0;
  for (const auto& i : interfaces_)
    n += i.multiplier_count();
  return n;
}

namespace {

// Block [[a, -D^T], [-D, 0]] of one subdomain.
SparseMatrix oseen_block(const SparseMatrix& a, const SparseMatrix& d) {
  const int nv = static_cast<int>(a.rows()), np = static_cast<int>(d.rows());
  Triplets t;
  t.reserve(a.nonZeros() + 2 * d.nonZeros());
  for (int col = 0; col < a.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(a, col); it; ++it)
      t.emplace_back(it.row(), it.col(), it.value());
  for (int col = 0; col < d.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(d, col); it; ++it) {
      t.emplace_back(nv + it.row(), it.col(), -it.value());
      t.emplace_back(it.col(), nv + it.row(), -it.value());
    }
  SparseMatrix m(nv + np, nv + np);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Local residual [A u + C(u) u - D^T p - F; -D u] without the multiplier term.
Vector local_residual(const NsSubdomain& sub, const SparseMatrix& convection, const Vector& state) {
  const int nv = sub.velocity_dofs();
  const Vector u = state.head(nv), p = state.tail(sub.pressure_dofs());
  Vector r(sub.dof_count());
  r.head(nv) = sub.diffusion * u + convection * u - sub.divergence.transpose() * p - sub.load;
  r.tail(sub.pressure_dofs()) = -(sub.divergence * u);
  return r;
}

} // namespace

PartitionGraph NsDiscretization::linearised_graph(const std::vector<Vector>* state) const {
  PartitionGraph g;
  for (std::size_t i = 0; i < subs_.size(); ++i) {
    const auto& sub = subs_[i];
    SubdomainOperator op;
    op.trace_space = sub.velocity;
    op.dof_count = sub.dof_count();
    if (!state) {
      op.matrix = oseen_block(sub.diffusion, sub.divergence);
      op.rhs = Vector::Zero(sub.dof_count());
      op.rhs.head(sub.velocity_dofs()) = sub.load;
      op.bc = sub.bc;
    } else {
      const Vector& x = (*state)[i];
      const NsBlocks blocks =
          assemble_ns_blocks(*sub.velocity, *sub.pressure, problem_.mu, x.head(sub.velocity_dofs()));
      op.matrix = oseen_block(SparseMatrix(sub.diffusion + blocks.convection_jacobian), sub.divergence);
      op.rhs = -local_residual(sub, blocks.convection, x);
      for (const auto& [dof, value] : sub.bc.values())
        op.bc.add(dof, 0.0);
    }
    g.subdomains.push_back(std::move(op));
  }
  g.interfaces = interfaces_;
  g.quadrature_nodes = problem_.quadrature_nodes;
  return g;
}

namespace {

Vector flatten(const std::vector<Vector>& parts) {
  Eigen::Index n = 0;
  for (const auto& p : parts)
    n += p.size();
  Vector out(n);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

} // namespace

double NsDiscretization::residual_norm(const std::vector<Vector>& state, const std::vector<Vector>& lambda,
                                       const SaddleSystem& layout) const {
  const Vector u = flatten(state);
  const Vector lam = flatten(lambda);
  if (u.size() != layout.primal_size || lam.size() != layout.multiplier_size)
    throw Error("state does not match the saddle layout");
  const Vector bt_lambda = layout.coupling.transpose() * lam;
  double r = 0.0;
  for (std::size_t i = 0; i < subs_.size(); ++i) {
    const auto& sub = subs_[i];
    const NsBlocks blocks = assemble_ns_blocks(*sub.velocity, *sub.pressure, problem_.mu,
                                               state[i].head(sub.velocity_dofs()));
    const Vector ri = local_residual(sub, blocks.convection, state[i]) +
                      bt_lambda.segment(layout.subdomain_offsets[i], sub.dof_count());
    for (int k = 0; k < ri.size(); ++k)
      if (!layout.constrained[layout.subdomain_offsets[i] + k])
        r = std::max(r, std::abs(ri[k]));
  }
  if (layout.multiplier_size > 0)
    r = std::max(r, (layout.coupling * u).lpNorm<Eigen::Infinity>());
  return r;
}

NsSolution newton_solve(const NsDiscretization& disc, double tol, int max_iter) {
  if (!(tol > 0.0) || max_iter < 0)
    throw Error("Newton needs tol > 0 and max_iter >= 0");
  NsSolution out;
  SaddleSystem sys = build_saddle(disc.linearised_graph(nullptr));
  SolutionField sol = solve(sys);
  out.state = sol.u;
  out.lambda = sol.lambda;
  out.system_size = sys.size();
  double r = disc.residual_norm(out.state, out.lambda, sys);
  out.log.residuals.push_back(r);

  auto history = [&] {
    std::ostringstream s;
    s.precision(3);
    for (double v : out.log.residuals)
      s << ' ' << std::scientific << v;
    return s.str();
  };
  while (r > tol) {
    if (out.log.iterations >= max_iter)
      throw Error("Newton did not converge in " + std::to_string(max_iter) + " iterations; residuals:" + history());
    PartitionGraph g = disc.linearised_graph(&out.state);
    g.constraint_rhs = -(sys.coupling * flatten(out.state));
    sys = build_saddle(g);
    sol = solve(sys);
    for (std::size_t i = 0; i < out.state.size(); ++i)
      out.state[i] += sol.u[i];
    out.lambda = sol.lambda;
    ++out.log.iterations;
    r = disc.residual_norm(out.state, out.lambda, sys);
    out.log.residuals.push_back(r);
    if (!std::isfinite(r))
      throw Error("Newton diverged; residuals:" + history());
  }
  out.jump = jump_residual(sys, flatten(out.state));
  return out;
}

std::array<double, 2> NsManufactured::velocity(Point p) {
  return {std::sin(std::numbers::pi * p.y), std::exp(p.x)};
}

double NsManufactured::pressure(Point p) { return -0.5 * p.x * p.x; }

std::array<double, 2> NsManufactured::forcing(Point p, double mu) {
  const double pi = std::numbers::pi;
  const double ex = std::exp(p.x);
  return {mu * pi * pi * std::sin(pi * p.y) + ex * pi * std::cos(pi * p.y) - p.x,
          -mu * ex + std::sin(pi * p.y) * ex};
}

std::array<double, 2> NsManufactured::traction_right(Point p, double mu) {
  // (mu grad u - p I) n with n = (1, 0).
  return {0.5 * p.x * p.x, mu * std::exp(p.x)};
}

NsProblem manufactured_case(MeshSize h, std::vector<int> n_gamma, double mu) {
  NsProblem p;
  p.mu = mu;
  p.h = h;
  p.n_gamma = std::move(n_gamma);
  p.forcing = [mu](Point x) { return NsManufactured::forcing(x, mu); };
  p.dirichlet = NsManufactured::velocity;
  p.neumann = [mu](Point x) { return NsManufactured::traction_right(x, mu); };
  p.neumann_sides = {"right"};
  return p;
}

NsProblem cavity_case(MeshSize h) {
  if (h.denominator != 16 && h.denominator != 32 && h.denominator != 64 && h.denominator != 128)
    throw Error("cavity mesh size must be one of 1/16, 1/32, 1/64, 1/128");
  NsProblem p;
  p.mu = 1.0;
  p.lid_velocity = 500.0;
  p.h = h;
  p.n_gamma = {42, 18, 18, 14};
  const double U = p.lid_velocity;
  p.dirichlet = [U](Point x) {
    const bool lid = std::abs(x.y - 1.0) <= 1e-12 && x.x > 1e-12 && x.x < 1.0 - 1e-12;
    return lid ? std::array<double, 2>{U, 0.0} : std::array<double, 2>{0.0, 0.0};
  };
  p.pin_pressure = true;
  return p;
}

NsErrors manufactured_errors(const NsDiscretization& disc, const NsSolution& sol) {
  const ExactScalar ux{[](Point p) { return NsManufactured::velocity(p)[0]; },
                       [](Point p) {
                         return std::array<double, 2>{0.0, std::numbers::pi * std::cos(std::numbers::pi * p.y)};
                       }};
  const ExactScalar uy{[](Point p) { return NsManufactured::velocity(p)[1]; },
                       [](Point p) { return std::array<double, 2>{std::exp(p.x), 0.0}; }};
  const ExactScalar pr{NsManufactured::pressure, [](Point p) { return std::array<double, 2>{-p.x, 0.0}; }};
  double v = 0.0, q = 0.0;
  for (std::size_t i = 0; i < disc.subdomains().size(); ++i) {
    const auto& sub = disc.subdomains()[i];
    const Vector& x = sol.state[i];
    for (int c = 0; c < 2; ++c) {
      const auto e = subdomain_error(*sub.velocity, x.head(sub.velocity_dofs()), c == 0 ? ux : uy, c);
      v += e.l2_sq + e.h1_semi_sq;
    }
    q += subdomain_error(*sub.pressure, x.tail(sub.pressure_dofs()), pr).l2_sq;
  }
  return {std::sqrt(v), std::sqrt(q)};
}

std::array<double, 2> evaluate_velocity(const NsDiscretization& disc, const NsSolution& sol, Point p) {
  for (std::size_t i = 0; i < disc.subdomains().size(); ++i) {
    const auto& sub = disc.subdomains()[i];
    if (const auto loc = sub.mesh->locate(p)) {
      const Vector& x = sol.state[i];
      return {sub.velocity->evaluate(x, *loc, 0), sub.velocity->evaluate(x, *loc, 1)};
    }
  }
  throw Error("point outside the Navier-Stokes domain");
}

const std::vector<EddyBox>& cavity_eddy_boxes() {
  static const std::vector<EddyBox> boxes{
      {"E1", {0.3, 0.8, 0.3, 0.8}},
      // 0.02 off the walls, where the corner eddies of the next generation sit
      {"E2", {0.75, 0.98, 0.02, 0.25}},
      {"E3", {0.02, 0.25, 0.02, 0.25}},
  };
  return boxes;
}

const std::vector<std::pair<std::string, Point>>& cavity_reference_centers() {
  static const std::vector<std::pair<std::string, Point>> ref{
      {"E1", {0.545907, 0.593810}},
      {"E2", {0.879935, 0.121555}},
      {"E3", {0.059761, 0.053354}},
  };
  return ref;
}

namespace {

struct GridMin {
  Point at;
  double speed = std::numeric_limits<double>::infinity();
};

// Smallest non-flat local minimum at an interior grid point, or the overall
// minimum when there is none. Walls inside a box have |u| = 0 and are skipped.
GridMin grid_min(const std::function<std::array<double, 2>(Point)>& velocity, const Rect& box, double step) {
  const int nx = std::max(1, static_cast<int>(std::lround(box.width() / step)));
  const int ny = std::max(1, static_cast<int>(std::lround(box.height() / step)));
  std::vector<double> speed(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  auto at = [&](int i, int j) { return Point{box.x0 + box.width() * i / nx, box.y0 + box.height() * j / ny}; };
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(j * (nx + 1) + i); };
  GridMin overall;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const auto u = velocity(at(i, j));
      speed[idx(i, j)] = std::hypot(u[0], u[1]);
      if (speed[idx(i, j)] < overall.speed)
        overall = {at(i, j), speed[idx(i, j)]};
    }
  GridMin interior;
  for (int j = 1; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const double s = speed[idx(i, j)];
      if (!(s < interior.speed))
        continue;
      bool lowest = true, flat = true;
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const double t = speed[idx(i + di, j + dj)];
          lowest = lowest && s <= t;
          flat = flat && s == t;
        }
      if (lowest && !flat)
        interior = {at(i, j), s};
    }
  return std::isfinite(interior.speed) ? interior : overall;
}

} // namespace

std::vector<Eddy> find_eddies(const std::function<std::array<double, 2>(Point)>& velocity,
                              const std::vector<EddyBox>& boxes, double step) {
  if (!(step > 0.0))
    throw Error("eddy search step must be positive");
  std::vector<Eddy> out;
  for (const auto& b : boxes) {
    if (!(b.box.width() > 0.0) || !(b.box.height() > 0.0))
      throw Error("eddy search box " + b.label + " is empty");
    const GridMin coarse = grid_min(velocity, b.box, step);
    const Rect local{std::max(b.box.x0, coarse.at.x - step), std::min(b.box.x1, coarse.at.x + step),
                     std::max(b.box.y0, coarse.at.y - step), std::min(b.box.y1, coarse.at.y + step)};
    const GridMin fine = grid_min(velocity, local, step / 100.0);
    const GridMin& best = fine.speed <= coarse.speed ? fine : coarse;
    const double tol = step / 200.0;
    const bool edge = std::abs(best.at.x - b.box.x0) <= tol || std::abs(best.at.x - b.box.x1) <= tol ||
                      std::abs(best.at.y - b.box.y0) <= tol || std::abs(best.at.y - b.box.y1) <= tol;
    out.push_back({b.label, best.at, best.speed, edge});
  }
  return out;
}

} // namespace fdd
