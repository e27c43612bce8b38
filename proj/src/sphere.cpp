#include "plaq/sphere.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace plaq {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

// All faces of a cell: every even coordinate either stays or moves by ±1.
void for_each_face(const Cell& c, const auto& visit) {
  std::vector<int> free_axes;
  for (int i = 0; i < c.dim; ++i) {
    if (c.twice[idx(i)] % 2 == 0) free_axes.push_back(i);
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < free_axes.size(); ++i) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    Cell f = c;
    std::size_t rest = code;
    for (int axis : free_axes) {
      const auto choice = static_cast<int>(rest % 3);
      rest /= 3;
      f.twice[idx(axis)] += choice == 0 ? 0 : (choice == 1 ? -1 : 1);
    }
    visit(f);
  }
}

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::int64_t kRayComponentLimit = std::int64_t{1} << 20;
constexpr int kRayRetries = 64;

std::vector<std::int64_t> random_direction(int d, std::uint64_t& state) {
  std::vector<std::int64_t> dir(idx(d));
  for (auto& v : dir) {
    do {
      v = static_cast<std::int64_t>(splitmix(state) % static_cast<std::uint64_t>(2 * kRayComponentLimit + 1)) -
          kRayComponentLimit;
    } while (v == 0);
  }
  return dir;
}

// Crossing count along a fresh non-degenerate ray.
std::int64_t crossings_on_random_ray(const PlaquetteComplex& s, std::uint64_t& state) {
  for (int attempt = 0; attempt < kRayRetries; ++attempt) {
    const auto dir = random_direction(s.dim(), state);
    if (auto n = ray_crossings(s, dir)) return *n;
  }
  throw std::runtime_error("no non-degenerate ray found after bounded retries");
}

void require_closed(const PlaquetteComplex& s) {
  if (s.empty() || !s.every_ridge_in_two_facets()) {
    throw std::invalid_argument("ray tests require a nonempty closed complex");
  }
}

}  // namespace

int cell_dimension(const Cell& c) {
  int k = 0;
  for (int i = 0; i < c.dim; ++i) k += c.twice[idx(i)] % 2 == 0;
  return k;
}

PlaquetteComplex::PlaquetteComplex(int d, std::vector<Plaquette> plaquettes, std::vector<std::int8_t> outward)
    : d_(d) {
  check_dim(d);
  if (!outward.empty() && outward.size() != plaquettes.size()) {
    throw std::invalid_argument("orientation list does not match plaquette list");
  }
  // Sort facets (with their orientation) for a reproducible layout.
  std::vector<std::size_t> order(plaquettes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return plaquettes[a] < plaquettes[b]; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && plaquettes[order[i]] == plaquettes[order[i - 1]]) continue;
    plaquettes_.push_back(plaquettes[order[i]]);
    if (!outward.empty()) outward_.push_back(outward[order[i]]);
  }

  std::vector<std::unordered_map<Cell, std::uint32_t, HalfPointHash>> seen(idx(d));
  for (const auto& pi : plaquettes_) {
    for_each_face(plaquette_center(pi), [&](const Cell& f) { seen[idx(cell_dimension(f))].emplace(f, 0); });
  }
  cells_.resize(idx(d));
  for (int k = 0; k < d; ++k) {
    auto& list = cells_[idx(k)];
    list.reserve(seen[idx(k)].size());
    for (const auto& [cell, unused] : seen[idx(k)]) list.push_back(cell);
    std::sort(list.begin(), list.end());
    for (std::uint32_t i = 0; i < list.size(); ++i) seen[idx(k)][list[i]] = i;
  }

  const auto& ridge_index = seen[idx(d - 2)];
  ridge_facets_.assign(cells_[idx(d - 2)].size(), {});
  facet_ridges_.assign(plaquettes_.size(), {});
  for (std::uint32_t f = 0; f < plaquettes_.size(); ++f) {
    const Cell c = plaquette_center(plaquettes_[f]);
    for (int i = 0; i < d; ++i) {
      if (c.twice[idx(i)] % 2 != 0) continue;
      for (int sign : {-1, 1}) {
        Cell r = c;
        r.twice[idx(i)] += sign;
        const auto ri = ridge_index.at(r);
        facet_ridges_[f].push_back(ri);
        ridge_facets_[ri].push_back(f);
      }
    }
  }
}

bool PlaquetteComplex::every_ridge_in_two_facets() const {
  return std::all_of(ridge_facets_.begin(), ridge_facets_.end(), [](const auto& v) { return v.size() == 2; });
}

std::string to_string(SphereVerdict v) {
  switch (v) {
    case SphereVerdict::verified:
      return "verified";
    case SphereVerdict::necessary_conditions_only:
      return "necessary-conditions-only";
    case SphereVerdict::failed:
      return "failed";
  }
  return "failed";
}

std::int64_t sphere_euler_characteristic(int d) { return (d - 1) % 2 == 0 ? 2 : 0; }

PlaquetteComplex boundary_of_sites(int d, std::span<const Site> sites) {
  check_dim(d);
  SiteSet members(sites.begin(), sites.end());
  std::vector<Plaquette> plaquettes;
  std::vector<std::int8_t> outward;
  for (const auto& x : sites) {
    for (int k = 0; k < 2 * d; ++k) {
      const Site y = neighbor(x, k);
      if (members.contains(y)) continue;
      const bool plus = k % 2 == 1;
      plaquettes.push_back(dual_plaquette(plus ? Bond{x, k / 2} : Bond{y, k / 2}));
      outward.push_back(plus ? 1 : -1);
    }
  }
  return PlaquetteComplex(d, std::move(plaquettes), std::move(outward));
}

PlaquetteComplex build_boundary(const ClusterResult& res) {
  if (res.escaped) throw std::invalid_argument("cannot build a boundary for an escaped cluster");
  if (!res.contains(origin(res.d))) throw std::invalid_argument("cluster does not contain the origin");
  if (!check_downward_closed(res)) throw std::invalid_argument("cluster is not downward closed");
  return boundary_of_sites(res.d, res.sites);
}

TopologyReport verify_topology(const PlaquetteComplex& s) {
  if (s.empty()) throw std::invalid_argument("verify_topology requires a nonempty complex");
  const int d = s.dim();
  TopologyReport rep;
  rep.d = d;
  for (int k = 0; k < d; ++k) {
    const auto n = static_cast<std::int64_t>(s.cells()[idx(k)].size());
    rep.cell_counts.push_back(n);
    rep.euler_characteristic += (k % 2 == 0 ? n : -n);
  }

  rep.ridges_ok = s.every_ridge_in_two_facets();

  // Facet connectivity through shared ridges.
  UnionFind facets(s.size());
  for (const auto& inc : s.ridge_facets()) {
    for (std::size_t j = 1; j < inc.size(); ++j) facets.unite(inc[0], inc[j]);
  }
  std::size_t components = 0;
  for (std::size_t f = 0; f < s.size(); ++f) components += facets.find(f) == f;
  rep.is_connected = components == 1;

  // Vertex links: around each vertex, the facets must form one class under
  // "share a ridge through that vertex". In d = 2 ridges are vertices and
  // this is implied by the ridge check.
  rep.vertex_links_ok = true;
  if (d >= 3) {
    const auto& ridges = s.cells()[idx(d - 2)];
    std::unordered_map<Cell, std::vector<std::pair<std::uint32_t, std::uint32_t>>, HalfPointHash> star;
    for (std::uint32_t r = 0; r < ridges.size(); ++r) {
      for_each_face(ridges[r], [&](const Cell& v) {
        if (cell_dimension(v) != 0) return;
        for (auto f : s.ridge_facets()[r]) star[v].emplace_back(r, f);
      });
    }
    for (auto& [vertex, incidences] : star) {
      std::vector<std::uint32_t> local;
      for (const auto& [r, f] : incidences) local.push_back(f);
      std::sort(local.begin(), local.end());
      local.erase(std::unique(local.begin(), local.end()), local.end());
      UnionFind uf(local.size());
      std::map<std::uint32_t, std::size_t> first_at_ridge;
      for (const auto& [r, f] : incidences) {
        const auto li = static_cast<std::size_t>(std::lower_bound(local.begin(), local.end(), f) - local.begin());
        auto [it, inserted] = first_at_ridge.emplace(r, li);
        if (!inserted) uf.unite(it->second, li);
      }
      std::size_t link_components = 0;
      for (std::size_t i = 0; i < local.size(); ++i) link_components += uf.find(i) == i;
      if (link_components != 1) {
        rep.vertex_links_ok = false;
        break;
      }
    }
  }
  rep.is_closed_manifold = rep.ridges_ok && rep.vertex_links_ok;

  if (d <= 3) {
    std::unordered_map<HalfPoint, int, HalfPointHash> corners;
    std::unordered_map<HalfPoint, std::unordered_map<HalfPoint, int, HalfPointHash>, HalfPointHash> edges;
    std::int64_t n_edges = 0;
    for (const auto& pi : s.plaquettes()) {
      const auto cs = plaquette_corners(pi);
      for (const auto& c : cs) corners.emplace(c, 0);
      for (std::size_t i = 0; i < cs.size(); ++i) {
        for (std::size_t j = i + 1; j < cs.size(); ++j) {
          int differing = 0;
          for (int a = 0; a < d; ++a) differing += cs[i].twice[idx(a)] != cs[j].twice[idx(a)];
          if (differing != 1) continue;
          const auto& lo = std::min(cs[i], cs[j]);
          const auto& hi = std::max(cs[i], cs[j]);
          if (edges[lo].emplace(hi, 0).second) ++n_edges;
        }
      }
    }
    std::int64_t chi = static_cast<std::int64_t>(corners.size()) - n_edges;
    if (d == 3) chi += static_cast<std::int64_t>(s.size());
    rep.euler_from_corners = chi;
  }

  const bool chi_ok = rep.euler_characteristic == sphere_euler_characteristic(d) &&
                      (!rep.euler_from_corners || *rep.euler_from_corners == rep.euler_characteristic);
  if (rep.is_connected && rep.is_closed_manifold && chi_ok) {
    rep.verdict_sphere = d <= 3 ? SphereVerdict::verified : SphereVerdict::necessary_conditions_only;
  } else {
    rep.verdict_sphere = SphereVerdict::failed;
  }
  return rep;
}

std::optional<std::int64_t> ray_crossings(const PlaquetteComplex& s, std::span<const std::int64_t> dir) {
  const int d = s.dim();
  if (static_cast<int>(dir.size()) != d) throw std::invalid_argument("ray direction has wrong dimension");
  std::int64_t hits = 0;
  for (const auto& pi : s.plaquettes()) {
    const Bond& e = pi.dual;
    const int a = e.axis;
    const std::int64_t va = dir[idx(a)];
    // The facet lies in the hyperplane x_a = n/2 with n odd, so the ray meets
    // it at t = n / (2 v_a) when that is positive.
    const std::int64_t n = 2 * static_cast<std::int64_t>(e.base[a]) + 1;
    if (va == 0 || (n > 0) != (va > 0)) continue;
    const std::int64_t sign = va > 0 ? 1 : -1;
    const std::int64_t mag = va * sign;
    bool inside = true;
    bool touches = false;
    for (int i = 0; i < d && inside; ++i) {
      if (i == a) continue;
      // Compare t·v_i with b_i ± 1/2 after scaling by 2|v_a|.
      const __int128 x = static_cast<__int128>(n) * dir[idx(i)] * sign;
      const __int128 lo = static_cast<__int128>(2 * static_cast<std::int64_t>(e.base[i]) - 1) * mag;
      const __int128 hi = static_cast<__int128>(2 * static_cast<std::int64_t>(e.base[i]) + 1) * mag;
      if (x < lo || x > hi) inside = false;
      else if (x == lo || x == hi) touches = true;
    }
    if (!inside) continue;
    if (touches) return std::nullopt;
    ++hits;
  }
  return hits;
}

bool origin_inside(const PlaquetteComplex& s, std::uint64_t ray_seed) {
  require_closed(s);
  std::uint64_t state = ray_seed;
  return crossings_on_random_ray(s, state) % 2 == 1;
}

bool star_shape_probe(const PlaquetteComplex& s, int n_rays, std::uint64_t ray_seed) {
  require_closed(s);
  std::uint64_t state = ray_seed ^ 0xa5a5a5a5a5a5a5a5ULL;
  for (int i = 0; i < n_rays; ++i) {
    if (crossings_on_random_ray(s, state) != 1) return false;
  }
  return true;
}

bool verify_unoccupied(const PlaquetteComplex& s, const BondConfig& cfg) {
  return std::none_of(s.plaquettes().begin(), s.plaquettes().end(),
                      [&](const Plaquette& pi) { return plaquette_state(cfg, pi) == BondStateValue::occupied; });
}

std::int64_t sphere_radius_twice(const PlaquetteComplex& s) {
  std::int64_t best = 0;
  for (const auto& pi : s.plaquettes()) {
    // The farthest corner moves each free coordinate away from zero.
    const Cell c = plaquette_center(pi);
    std::int64_t n = 0;
    for (int i = 0; i < c.dim; ++i) {
      const auto v = std::abs(c.twice[idx(i)]);
      n += v % 2 == 0 ? v + 1 : v;
    }
    best = std::max(best, n);
  }
  return best;
}

double sphere_radius(const PlaquetteComplex& s) { return static_cast<double>(sphere_radius_twice(s)) / 2.0; }

void finalize_verdict(TopologyReport& report) {
  if (report.verdict_sphere == SphereVerdict::failed) return;
  for (const auto& check : {report.origin_inside, report.all_unoccupied, report.star_shaped_ray_checks_passed}) {
    if (check && !*check) {
      report.verdict_sphere = SphereVerdict::failed;
      return;
    }
  }
}

SphereAnalysis analyze_sphere(const ClusterResult& res, const BondConfig& cfg, int n_rays, std::uint64_t ray_seed) {
  SphereAnalysis out;
  out.complex = build_boundary(res);
  out.report = verify_topology(out.complex);
  out.cluster_radius = res.radius;
  out.radius = sphere_radius(out.complex);
  out.report.all_unoccupied = verify_unoccupied(out.complex, cfg);
  if (out.report.is_closed_manifold) {
    out.report.origin_inside = origin_inside(out.complex, ray_seed);
    if (n_rays > 0) out.report.star_shaped_ray_checks_passed = star_shape_probe(out.complex, n_rays, ray_seed);
  } else {
    out.report.origin_inside = false;
  }
  finalize_verdict(out.report);
  return out;
}

void write_off(const PlaquetteComplex& s, std::ostream& out) {
  if (s.dim() != 3) throw std::invalid_argument("OFF export needs a three-dimensional complex");
  const auto& vertices = s.cells()[0];
  auto vertex_id = [&](const HalfPoint& v) {
    return std::lower_bound(vertices.begin(), vertices.end(), v) - vertices.begin();
  };
  out << "OFF\n" << vertices.size() << ' ' << s.size() << " 0\n";
  for (const auto& v : vertices) {
    for (int i = 0; i < 3; ++i) {
      const auto t = v.twice[idx(i)];
      // t is odd: print t/2 exactly with one decimal place.
      const std::int64_t mag = t < 0 ? -t : t;
      out << (i ? " " : "") << (t < 0 ? "-" : "") << mag / 2 << ".5";
    }
    out << '\n';
  }
  for (std::size_t f = 0; f < s.size(); ++f) {
    const Plaquette& pi = s.plaquettes()[f];
    const int a = pi.dual.axis;
    const int i = a == 0 ? 1 : 0;
    const int j = a == 2 ? 1 : 2;
    const Cell c = plaquette_center(pi);
    std::array<HalfPoint, 4> quad;
    const int di[4] = {-1, 1, 1, -1};
    const int dj[4] = {-1, -1, 1, 1};
    for (int q = 0; q < 4; ++q) {
      quad[idx(q)] = c;
      quad[idx(q)].twice[idx(i)] += di[q];
      quad[idx(q)].twice[idx(j)] += dj[q];
    }
    // (i, j) counter-clockwise has normal e_i x e_j, which is -e_1 for a = 1.
    const int natural = a == 1 ? -1 : 1;
    const int want = s.outward().empty() ? natural : s.outward()[f];
    if (natural != want) std::swap(quad[1], quad[3]);
    out << 4;
    for (const auto& v : quad) out << ' ' << vertex_id(v);
    out << '\n';
  }
}

}  // namespace plaq
