// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fdd/geometry.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fdd {

struct BoundaryEdge {
  std::array<int, 2> vertices;
  std::string tag;
  int triangle = -1;
};

/// Barycentric location of a point inside a triangle.
struct Location {
  int triangle = -1;
  std::array<double, 3> bary{};
};

/// Structured triangulation of an axis-aligned rectangle.
///
/// Every cell of the nx x ny grid is split along its lower-left to upper-right
/// diagonal. Vertex (i, j) has index j * (nx + 1) + i; cell (i, j) owns the
/// triangles 2 * (j * nx + i) (lower-right) and 2 * (j * nx + i) + 1 (upper-left),
/// both counterclockwise.
class Mesh {
public:
  Mesh(Rect rect, int nx, int ny);

  const Rect& rect() const { return rect_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }

  double signed_area(int triangle) const;
  bool has_tag(const std::string& tag) const;

  /// Retag every boundary edge lying on `segment`. Returns the number retagged.
  int tag_segment(const Segment& segment, const std::string& tag);

  /// Triangle containing `p` (closed), with barycentric coordinates.
  std::optional<Location> locate(Point p) const;

private:
  Rect rect_;
  int nx_;
  int ny_;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
};

Mesh structured_rect_mesh(Rect rect, int nx, int ny);

/// Mesh size h = 1 / denominator, kept exact for reproducible family generation.
struct MeshSize {
  int denominator = 1;
  double value() const { return 1.0 / denominator; }
};

enum class MeshProblem { poisson_two_domain, ns_five_domain };

struct MeshFamilySpec {
  MeshProblem problem = MeshProblem::poisson_two_domain;
  int n = 20;
  void validate() const;
};

inline std::string interface_tag(int index) { return "interface:" + std::to_string(index); }

/// Omega_1 = (0,0.5)x(0,1) and Omega_2 = (0.5,1)x(0,1); the shared side x=0.5 is
/// tagged interface:1 in both meshes. Non-conforming adds one row of cells in Omega_2.
std::pair<Mesh, Mesh> poisson_mesh_pair(int n, bool conforming);

struct NsSubdomainLayout {
  Rect rect;
  int refinement = 1; // mesh size is h / refinement
  int extra_cells = 0; // added in both directions; makes the mesh approximately, not exactly, h
};

struct NsInterfaceLayout {
  Segment segment;
  std::vector<int> minus; // subdomains whose trace enters the jump with a minus sign
  std::vector<int> plus;
};

/// Five-subdomain partition of the unit square used by the Navier-Stokes studies.
struct NsLayout {
  std::vector<NsSubdomainLayout> subdomains;
  std::vector<NsInterfaceLayout> interfaces;
};

const NsLayout& default_ns_layout();

/// Meshes of the five subdomains at mesh size h; interface edges tagged interface:k (1-based).
std::vector<Mesh> ns_mesh_family(MeshSize h, const NsLayout& layout = default_ns_layout());

struct InterfaceEdge {
  std::array<int, 2> vertices; // ordered by increasing arc length
  int triangle = -1;
  double s0 = 0.0;
  double s1 = 0.0;
};

/// Edges tagged `tag`, sorted by arc length measured along `segment`.
/// Consecutive edges share their endpoint exactly; throws if the tag is absent
/// or the tagged edges are not a contiguous chain.
std::vector<InterfaceEdge> interface_edge_partition(const Mesh& mesh, const std::string& tag,
                                                    const Segment& segment);

/// Same, with the arc-length origin at the smaller endpoint of the tagged chain.
std::vector<InterfaceEdge> interface_edge_partition(const Mesh& mesh, const std::string& tag);

/// Plain-text dump: `vertices <n> triangles <m>`, then `x y` lines, then `i j k` lines.
void write_mesh(std::ostream& out, const Mesh& mesh);

} // namespace fdd
