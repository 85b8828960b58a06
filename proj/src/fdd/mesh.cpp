// SPDX-License-Identifier: Apache-2.0
#include "fdd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fdd {

Mesh::Mesh(Rect rect, int nx, int ny) : rect_(rect), nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1)
    throw Error("structured mesh needs nx, ny >= 1 (got " + std::to_string(nx) + ", " +
                std::to_string(ny) + ")");
  if (!(rect.width() > 0.0) || !(rect.height() > 0.0))
    throw Error("structured mesh needs a rectangle with positive area");

  vertices_.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    // Exact endpoints so that neighbouring meshes agree bitwise on shared sides.
    const double y = j == ny ? rect.y1 : rect.y0 + rect.height() * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? rect.x1 : rect.x0 + rect.width() * i / nx;
      vertices_.push_back({x, y});
    }
  }

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  triangles_.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      triangles_.push_back({v00, v10, v11});
      triangles_.push_back({v00, v11, v01});
    }
  }

  auto cell = [nx](int i, int j) { return 2 * (j * nx + i); };
  for (int i = 0; i < nx; ++i)
    boundary_edges_.push_back({{vid(i, 0), vid(i + 1, 0)}, "bottom", cell(i, 0)});
  for (int j = 0; j < ny; ++j)
    boundary_edges_.push_back({{vid(nx, j), vid(nx, j + 1)}, "right", cell(nx - 1, j)});
  for (int i = nx - 1; i >= 0; --i)
    boundary_edges_.push_back({{vid(i + 1, ny), vid(i, ny)}, "top", cell(i, ny - 1) + 1});
  for (int j = ny - 1; j >= 0; --j)
    boundary_edges_.push_back({{vid(0, j + 1), vid(0, j)}, "left", cell(0, j) + 1});
}

double Mesh::signed_area(int triangle) const {
  const auto& t = triangles_.at(triangle);
  const Point a = vertices_[t[0]], b = vertices_[t[1]], c = vertices_[t[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

bool Mesh::has_tag(const std::string& tag) const {
  return std::any_of(boundary_edges_.begin(), boundary_edges_.end(),
                     [&](const BoundaryEdge& e) { return e.tag == tag; });
}

int Mesh::tag_segment(const Segment& segment, const std::string& tag) {
  const double tol = 1e-12 * std::max(1.0, segment.length());
  int count = 0;
  for (auto& edge : boundary_edges_) {
    if (segment.contains(vertices_[edge.vertices[0]], tol) &&
        segment.contains(vertices_[edge.vertices[1]], tol)) {
      edge.tag = tag;
      ++count;
    }
  }
  return count;
}

std::optional<Location> Mesh::locate(Point p) const {
  const double tol = 1e-12;
  if (!rect_.contains(p, tol))
    return std::nullopt;
  const double u = (p.x - rect_.x0) / rect_.width() * nx_;
  const double v = (p.y - rect_.y0) / rect_.height() * ny_;
  const int i = std::clamp(static_cast<int>(std::floor(u)), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor(v)), 0, ny_ - 1);
  const double fu = u - i, fv = v - j;

  Location loc;
  if (fv <= fu) {
    // lower-right triangle (v00, v10, v11)
    loc.triangle = 2 * (j * nx_ + i);
    loc.bary = {1.0 - fu, fu - fv, fv};
  } else {
    // upper-left triangle (v00, v11, v01)
    loc.triangle = 2 * (j * nx_ + i) + 1;
    loc.bary = {1.0 - fv, fu, fv - fu};
  }
  return loc;
}

Mesh structured_rect_mesh(Rect rect, int nx, int ny) { return Mesh(rect, nx, ny); }

void MeshFamilySpec::validate() const {
  if (n < 1)
    throw Error("mesh family parameter N must be positive");
  if (problem == MeshProblem::poisson_two_domain && n % 2 != 0)
    throw Error("two-domain Poisson family needs even N (got " + std::to_string(n) + ")");
  if (problem == MeshProblem::ns_five_domain && n % 2 != 0)
    throw Error("Navier-Stokes family needs 1/h divisible by 2 (got " + std::to_string(n) + ")");
}

std::pair<Mesh, Mesh> poisson_mesh_pair(int n, bool conforming) {
  MeshFamilySpec{MeshProblem::poisson_two_domain, n}.validate();
  Mesh left({0.0, 0.5, 0.0, 1.0}, n / 2, n);
  Mesh right({0.5, 1.0, 0.0, 1.0}, n / 2, conforming ? n : n + 1);
  const Segment gamma({0.5, 0.0}, {0.5, 1.0});
  left.tag_segment(gamma, interface_tag(1));
  right.tag_segment(gamma, interface_tag(1));
  return {std::move(left), std::move(right)};
}

const NsLayout& default_ns_layout() {
  static const NsLayout layout = [] {
    NsLayout l;
    l.subdomains = {
        {{0.0, 1.0, 0.5, 1.0}, 1},     // 1: top half
        {{0.0, 0.25, 0.0, 0.5}, 2},    // 2: bottom-left corner
        {{0.25, 0.5, 0.0, 0.5}, 1, 3}, // 3: middle-left
        {{0.75, 1.0, 0.0, 0.5}, 2},    // 4: bottom-right corner
        {{0.5, 0.75, 0.0, 0.5}, 1, 3}, // 5: middle-right
    };
    // Subdomain indices are 0-based here. Three extra cells in the middle strips
    // keep the traces on every interface distinct from their neighbours at h = 1/4.
    l.interfaces = {
        {Segment({0.0, 0.5}, {1.0, 0.5}), {0}, {1, 2, 3, 4}},
        {Segment({0.25, 0.0}, {0.25, 0.5}), {1}, {2}},
        {Segment({0.75, 0.0}, {0.75, 0.5}), {4}, {3}},
        {Segment({0.5, 0.0}, {0.5, 0.5}), {2}, {4}},
    };
    return l;
  }();
  return layout;
}

std::vector<Mesh> ns_mesh_family(MeshSize h, const NsLayout& layout) {
  MeshFamilySpec{MeshProblem::ns_five_domain, h.denominator}.validate();
  std::vector<Mesh> meshes;
  meshes.reserve(layout.subdomains.size());
  for (const auto& sub : layout.subdomains) {
    const int per_unit = h.denominator * sub.refinement;
    const int nx = std::max(1, static_cast<int>(std::lround(sub.rect.width() * per_unit))) + sub.extra_cells;
    const int ny = std::max(1, static_cast<int>(std::lround(sub.rect.height() * per_unit))) + sub.extra_cells;
    meshes.emplace_back(sub.rect, nx, ny);
  }
  for (std::size_t k = 0; k < layout.interfaces.size(); ++k) {
    const auto& itf = layout.interfaces[k];
    for (auto ids : {itf.minus, itf.plus})
      for (int id : ids)
        if (meshes.at(id).tag_segment(itf.segment, interface_tag(static_cast<int>(k) + 1)) == 0)
          throw Error("interface " + std::to_string(k + 1) + " does not touch subdomain " +
                      std::to_string(id + 1));
  }
  return meshes;
}

namespace {

std::vector<InterfaceEdge> partition_impl(const Mesh& mesh, const std::string& tag,
                                          const Segment* segment) {
  std::vector<const BoundaryEdge*> tagged;
  for (const auto& e : mesh.boundary_edges())
    if (e.tag == tag)
      tagged.push_back(&e);
  if (tagged.empty())
    throw Error("no boundary edges tagged '" + tag + "'");

  const auto& vs = mesh.vertices();
  Point origin = vs[tagged.front()->vertices[0]];
  Point far = origin;
  for (const auto* e : tagged)
    for (int v : e->vertices) {
      origin = std::min(origin, vs[v]);
      far = std::max(far, vs[v]);
    }
  const Segment chain(origin, far);
  const Segment& ref = segment ? *segment : chain;

  std::vector<InterfaceEdge> edges;
  edges.reserve(tagged.size());
  for (const auto* e : tagged) {
    if (!chain.contains(vs[e->vertices[0]], 1e-12) || !chain.contains(vs[e->vertices[1]], 1e-12))
      throw Error("edges tagged '" + tag + "' are not collinear");
    InterfaceEdge ie;
    ie.triangle = e->triangle;
    ie.vertices = e->vertices;
    double s0 = ref.arc_length(vs[ie.vertices[0]]);
    double s1 = ref.arc_length(vs[ie.vertices[1]]);
    if (s1 < s0) {
      std::swap(ie.vertices[0], ie.vertices[1]);
      std::swap(s0, s1);
    }
    ie.s0 = s0;
    ie.s1 = s1;
    edges.push_back(ie);
  }
  std::sort(edges.begin(), edges.end(),
            [](const InterfaceEdge& a, const InterfaceEdge& b) { return a.s0 < b.s0; });
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (edges[k].vertices[0] != edges[k - 1].vertices[1])
      throw Error("edges tagged '" + tag + "' are not contiguous");
  // Snap shared endpoints so that consecutive spans agree exactly.
  for (std::size_t k = 1; k < edges.size(); ++k)
    edges[k].s0 = edges[k - 1].s1;
  return edges;
}

} // namespace

std::vector<InterfaceEdge> interface_edge_partition(const Mesh& mesh, const std::string& tag,
                                                    const Segment& segment) {
  return partition_impl(mesh, tag, &segment);
}

std::vector<InterfaceEdge> interface_edge_partition(const Mesh& mesh, const std::string& tag) {
  return partition_impl(mesh, tag, nullptr);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << "vertices " << mesh.vertex_count() << " triangles " << mesh.triangle_count() << '\n';
  out.precision(17);
  for (const auto& p : mesh.vertices())
    out << p.x << ' ' << p.y << '\n';
  for (const auto& t : mesh.triangles())
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

} // namespace fdd
