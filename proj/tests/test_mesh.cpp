// SPDX-License-Identifier: Apache-2.0
#include "fdd/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace fdd;

namespace {

double total_area(const Mesh& m) {
  double a = 0.0;
  for (int t = 0; t < static_cast<int>(m.triangle_count()); ++t)
    a += m.signed_area(t);
  return a;
}

} // namespace

TEST_CASE("structured mesh counts") {
  const Mesh a({0, 1, 0, 1}, 1, 1);
  CHECK(a.vertex_count() == 4);
  CHECK(a.triangle_count() == 2);
  const Mesh b({0, 1, 0, 1}, 20, 20);
  CHECK(b.vertex_count() == 441);
  CHECK(b.triangle_count() == 800);
  const Mesh c({0, 0.5, 0, 1}, 10, 21);
  CHECK(c.vertex_count() == 242);
  CHECK(c.triangle_count() == 420);
}

TEST_CASE("non-positive subdivisions are rejected") {
  CHECK_THROWS_AS(Mesh({0, 1, 0, 1}, 0, 3), Error);
  CHECK_THROWS_AS(Mesh({0, 1, 0, 1}, 3, -1), Error);
}

TEST_CASE("triangles are counterclockwise and tile the rectangle") {
  for (auto [nx, ny] : {std::pair{1, 1}, {3, 7}, {20, 21}}) {
    const Mesh m({0.25, 0.75, -1.0, 2.0}, nx, ny);
    for (int t = 0; t < static_cast<int>(m.triangle_count()); ++t)
      CHECK(m.signed_area(t) > 0.0);
    CHECK(total_area(m) == doctest::Approx(m.rect().area()).epsilon(1e-12));
  }
}

TEST_CASE("boundary edges carry side tags") {
  const Mesh m({0, 1, 0, 1}, 4, 3);
  CHECK(m.boundary_edges().size() == 2 * (4 + 3));
  for (const char* side : {"left", "right", "bottom", "top"})
    CHECK(m.has_tag(side));
}

TEST_CASE("Poisson mesh pair") {
  SUBCASE("conforming N=20") {
    auto [l, r] = poisson_mesh_pair(20, true);
    CHECK(l.nx() == 10);
    CHECK(l.ny() == 20);
    CHECK(r.ny() == 20);
  }
  SUBCASE("non-conforming N=20 adds a row in Omega_2") {
    auto [l, r] = poisson_mesh_pair(20, false);
    CHECK(l.ny() == 20);
    CHECK(r.ny() == 21);
    // N + 1 vs N + 2 interface vertices, and the sets differ.
    std::set<double> yl, yr;
    for (const auto& e : interface_edge_partition(l, interface_tag(1)))
      for (int v : e.vertices)
        yl.insert(l.vertices()[v].y);
    for (const auto& e : interface_edge_partition(r, interface_tag(1)))
      for (int v : e.vertices)
        yr.insert(r.vertices()[v].y);
    CHECK(yl.size() == 21);
    CHECK(yr.size() == 22);
    CHECK(yl != yr);
  }
  SUBCASE("N=2 minimal case") {
    auto [l, r] = poisson_mesh_pair(2, true);
    CHECK(l.nx() == 1);
    CHECK(l.ny() == 2);
    CHECK(l.triangle_count() == 4);
    CHECK(r.triangle_count() == 4);
  }
  CHECK_THROWS_AS(poisson_mesh_pair(21, true), Error);
  CHECK_THROWS_AS(poisson_mesh_pair(0, true), Error);
}

TEST_CASE("interface edge partition") {
  SUBCASE("1x2 cells") {
    Mesh m({0, 0.5, 0, 1}, 1, 2);
    m.tag_segment(Segment({0.5, 0}, {0.5, 1}), interface_tag(1));
    const auto p = interface_edge_partition(m, interface_tag(1));
    REQUIRE(p.size() == 2);
    CHECK(p[0].s0 == 0.0);
    CHECK(p[0].s1 == doctest::Approx(0.5));
    CHECK(p[1].s0 == p[0].s1);
    CHECK(p[1].s1 == doctest::Approx(1.0));
  }
  SUBCASE("N=20 Omega_1 spans tile [0, 1]") {
    auto [l, r] = poisson_mesh_pair(20, false);
    for (const Mesh* m : {&l, &r}) {
      const auto p = interface_edge_partition(*m, interface_tag(1));
      double sum = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        sum += p[i].s1 - p[i].s0;
        if (i > 0)
          CHECK(p[i].s0 == p[i - 1].s1);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(interface_edge_partition(l, interface_tag(1)).size() == 20);
  }
  SUBCASE("missing tag") {
    const Mesh m({0, 1, 0, 1}, 2, 2);
    CHECK_THROWS_AS(interface_edge_partition(m, interface_tag(1)), Error);
  }
}

TEST_CASE("Navier-Stokes mesh family") {
  const auto& layout = default_ns_layout();
  REQUIRE(layout.subdomains.size() == 5);
  REQUIRE(layout.interfaces.size() == 4);
  double area = 0.0;
  for (const auto& s : layout.subdomains)
    area += s.rect.area();
  CHECK(area == doctest::Approx(1.0));

  SUBCASE("h=1/16: corner subdomains at h/2, all meshes valid") {
    const auto meshes = ns_mesh_family(MeshSize{16});
    for (int i : {1, 3}) {
      const Mesh& m = meshes[i];
      CHECK(m.rect().width() / m.nx() == doctest::Approx(1.0 / 32));
      CHECK(m.rect().height() / m.ny() == doctest::Approx(1.0 / 32));
    }
    CHECK(meshes[0].rect().width() / meshes[0].nx() == doctest::Approx(1.0 / 16));
    for (const auto& m : meshes) {
      CHECK(total_area(m) == doctest::Approx(m.rect().area()).epsilon(1e-12));
      for (int t = 0; t < static_cast<int>(m.triangle_count()); ++t)
        CHECK(m.signed_area(t) > 0.0);
    }
  }
  SUBCASE("h=1/4 triangle count") {
    const auto meshes = ns_mesh_family(MeshSize{4});
    std::size_t tri = 0, expected = 0;
    for (const auto& m : meshes) {
      tri += m.triangle_count();
      expected += 2 * m.nx() * m.ny();
    }
    CHECK(tri == expected);
  }
  SUBCASE("every interface is tagged on every listed subdomain") {
    const auto meshes = ns_mesh_family(MeshSize{8});
    for (std::size_t k = 0; k < layout.interfaces.size(); ++k)
      for (auto ids : {layout.interfaces[k].minus, layout.interfaces[k].plus})
        for (int id : ids)
          CHECK(meshes[id].has_tag(interface_tag(static_cast<int>(k) + 1)));
  }
  CHECK_THROWS_AS(ns_mesh_family(MeshSize{3}), Error);
  CHECK_THROWS_AS(ns_mesh_family(MeshSize{0}), Error);
}

TEST_CASE("point location") {
  const Mesh m({0, 1, 0, 1}, 3, 3);
  const auto loc = m.locate({0.3, 0.8});
  REQUIRE(loc.has_value());
  double s = 0.0;
  for (double b : loc->bary) {
    CHECK(b >= -1e-14);
    s += b;
  }
  CHECK(s == doctest::Approx(1.0));
  CHECK_FALSE(m.locate({1.5, 0.5}).has_value());
}
