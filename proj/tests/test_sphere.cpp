#include <doctest.h>

#include <array>
#include <sstream>
#include <stdexcept>

#include "plaq/sphere.hpp"

using namespace plaq;

namespace {

TopologyReport full_report(const PlaquetteComplex& s, int rays = 200) {
  TopologyReport r = verify_topology(s);
  if (r.is_closed_manifold) {
    r.origin_inside = origin_inside(s);
    r.star_shaped_ray_checks_passed = star_shape_probe(s, rays);
  }
  finalize_verdict(r);
  return r;
}

PlaquetteComplex of(int d, std::initializer_list<Site> sites) {
  const std::vector<Site> v(sites);
  return boundary_of_sites(d, v);
}

}  // namespace

TEST_SUITE("sphere") {
  TEST_CASE("unit cube") {
    const auto s = of(3, {origin(3)});
    CHECK(s.size() == 6);
    const auto r = full_report(s);
    CHECK(r.n_vertices() == 8);
    CHECK(r.n_edges() == 12);
    CHECK(r.n_faces() == 6);
    CHECK(r.euler_characteristic == 2);
    CHECK(r.euler_from_corners == 2);
    CHECK(r.is_closed_manifold);
    CHECK(r.is_connected);
    CHECK(r.origin_inside == true);
    CHECK(r.star_shaped_ray_checks_passed == true);
    CHECK(r.verdict_sphere == SphereVerdict::verified);
    CHECK(sphere_radius_twice(s) == 3);
  }

  TEST_CASE("unit square is a circuit") {
    const auto r = full_report(of(2, {origin(2)}));
    CHECK(r.n_vertices() == 4);
    CHECK(r.n_edges() == 4);
    CHECK(r.euler_characteristic == 0);
    CHECK(r.verdict_sphere == SphereVerdict::verified);
  }

  TEST_CASE("two disjoint cubes are not connected") {
    const auto r = full_report(of(3, {origin(3), make_site({3, 0, 0})}));
    CHECK(r.is_closed_manifold);
    CHECK_FALSE(r.is_connected);
    CHECK(r.euler_characteristic == 4);
    CHECK(r.verdict_sphere == SphereVerdict::failed);
  }

  TEST_CASE("ring of eight cubes is a torus") {
    std::vector<Site> ring;
    for (int x = -1; x <= 1; ++x) {
      for (int y = -1; y <= 1; ++y) {
        if (x || y) ring.push_back(make_site({x, y, 0}));
      }
    }
    const auto s = boundary_of_sites(3, ring);
    const auto r = verify_topology(s);
    CHECK(r.is_closed_manifold);
    CHECK(r.is_connected);
    CHECK(r.euler_characteristic == 0);
    CHECK(r.verdict_sphere == SphereVerdict::failed);
    // A ray through the hole along the axis misses; a slanted one crosses twice.
    const std::array<std::int64_t, 3> up{0, 0, 1};
    CHECK(ray_crossings(s, up) == 0);
    const std::array<std::int64_t, 3> slant{5, 3, 1};
    CHECK(ray_crossings(s, slant) == 2);
    CHECK_FALSE(origin_inside(s));
  }

  TEST_CASE("cube away from the origin") {
    const auto s = of(3, {make_site({5, 5, 5})});
    const auto r = full_report(s);
    CHECK(r.euler_characteristic == 2);
    CHECK(r.origin_inside == false);
    CHECK(r.verdict_sphere == SphereVerdict::failed);
  }

  TEST_CASE("cubes sharing an edge are not a manifold") {
    const auto r = verify_topology(of(3, {origin(3), make_site({1, 1, 0})}));
    CHECK_FALSE(r.ridges_ok);
    CHECK_FALSE(r.is_closed_manifold);
    CHECK(r.verdict_sphere == SphereVerdict::failed);
  }

  TEST_CASE("cubes sharing a vertex have a pinched link") {
    const auto r = verify_topology(of(3, {origin(3), make_site({1, 1, 1})}));
    CHECK(r.ridges_ok);
    CHECK_FALSE(r.vertex_links_ok);
    CHECK(r.verdict_sphere == SphereVerdict::failed);
  }

  TEST_CASE("squares sharing a corner are not a circuit") {
    const auto r = verify_topology(of(2, {origin(2), make_site({1, 1})}));
    CHECK_FALSE(r.ridges_ok);
    CHECK(r.verdict_sphere == SphereVerdict::failed);
  }

  TEST_CASE("higher dimensions stop at necessary conditions") {
    CHECK(sphere_euler_characteristic(2) == 0);
    CHECK(sphere_euler_characteristic(3) == 2);
    CHECK(sphere_euler_characteristic(4) == 0);
    CHECK(sphere_euler_characteristic(5) == 2);
    const auto s4 = of(4, {origin(4)});
    CHECK(s4.size() == 8);
    const auto r4 = full_report(s4, 50);
    CHECK(r4.euler_characteristic == 0);
    CHECK(r4.cell_counts == std::vector<std::int64_t>{16, 32, 24, 8});
    CHECK(r4.verdict_sphere == SphereVerdict::necessary_conditions_only);
    const auto r5 = full_report(of(5, {origin(5), make_site({1, 0, 0, 0, 0})}), 50);
    CHECK(r5.euler_characteristic == 2);
    CHECK(r5.verdict_sphere == SphereVerdict::necessary_conditions_only);
  }

  TEST_CASE("rays touching a facet boundary are reported") {
    const auto s = of(3, {origin(3)});
    const std::array<std::int64_t, 3> axis{1, 0, 0};
    CHECK(ray_crossings(s, axis) == 1);
    const std::array<std::int64_t, 3> edge{1, 1, 0};
    CHECK_FALSE(ray_crossings(s, edge).has_value());
  }

  TEST_CASE("random clusters give verified spheres") {
    for (int d : {2, 3}) {
      for (std::uint64_t t = 0; t < 150; ++t) {
        const BondConfig cfg = derive_trial_config(21, t, d == 2 ? 0.2 : 0.1);
        const auto res = grow_good_cluster(cfg, d, 60);
        REQUIRE_FALSE(res.escaped);
        const auto a = analyze_sphere(res, cfg, 100);
        CHECK(a.report.verdict_sphere == SphereVerdict::verified);
        CHECK(a.report.all_unoccupied == true);
        CHECK(a.radius <= a.cluster_radius + 1.5);
        if (a.report.euler_from_corners) CHECK(*a.report.euler_from_corners == a.report.euler_characteristic);
      }
    }
  }

  TEST_CASE("occupied boundary plaquettes are detected") {
    const auto s = of(2, {origin(2)});
    CHECK(verify_unoccupied(s, BondConfig(0.0, 1)));
    CHECK_FALSE(verify_unoccupied(s, explicit_config({Bond{origin(2), 0}})));
  }

  TEST_CASE("boundary needs a finished closed cluster") {
    const auto escaped = grow_good_cluster(BondConfig(1.0, 1), 3, 3);
    CHECK_THROWS_AS(build_boundary(escaped), std::invalid_argument);
    const std::vector<Site> gap{origin(2), make_site({2, 0})};
    CHECK_THROWS_AS(build_boundary(make_cluster(2, gap)), std::invalid_argument);
  }

  TEST_CASE("OFF export of the unit cube") {
    const auto s = of(3, {origin(3)});
    std::ostringstream out;
    write_off(s, out);
    std::istringstream in(out.str());
    std::string magic;
    int nv = 0, nf = 0, ne = -1;
    in >> magic >> nv >> nf >> ne;
    CHECK(magic == "OFF");
    CHECK(nv == 8);
    CHECK(nf == 6);
    CHECK(ne == 0);
    std::vector<std::array<double, 3>> v(static_cast<std::size_t>(nv));
    for (auto& p : v) {
      in >> p[0] >> p[1] >> p[2];
      for (double c : p) CHECK(std::abs(c) == 0.5);
    }
    for (int f = 0; f < nf; ++f) {
      int k = 0;
      std::array<int, 4> idx{};
      in >> k;
      REQUIRE(k == 4);
      for (int& i : idx) in >> i;
      const auto& a = v[static_cast<std::size_t>(idx[0])];
      const auto& b = v[static_cast<std::size_t>(idx[1])];
      const auto& c = v[static_cast<std::size_t>(idx[2])];
      const std::array<double, 3> u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
      const std::array<double, 3> w{c[0] - b[0], c[1] - b[1], c[2] - b[2]};
      const std::array<double, 3> n{u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]};
      double centre_dot = 0;
      for (int i = 0; i < 3; ++i) {
        double centre = 0;
        for (int j : idx) centre += v[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] / 4;
        centre_dot += centre * n[static_cast<std::size_t>(i)];
      }
      CHECK(centre_dot > 0);  // wound outward
    }
    std::ostringstream bad;
    CHECK_THROWS(write_off(of(2, {origin(2)}), bad));
  }
}
