#pragma once

// Boundary plaquette sets of finite site sets and a combinatorial check that
// such a set is a sphere around the origin.
//
// Every cell of the complex generated by a set of plaquettes is a face of the
// half-shifted cubic lattice and is identified by its centre in doubled
// coordinates: a coordinate is even where the cell extends along that axis
// and odd where the cell is pinned, so a k-cell has exactly k even
// coordinates. Plaquettes are the (d-1)-cells (facets), their faces with one
// more pinned axis are the ridges.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plaq/good_cluster.hpp"
#include "plaq/lattice.hpp"
#include "plaq/sampler.hpp"

namespace plaq {

using Cell = HalfPoint;

int cell_dimension(const Cell& c);

class PlaquetteComplex {
 public:
  PlaquetteComplex() = default;

  /// `outward` is optional; when given, entry i is +1 if the outer side of
  /// plaquette i is the +axis side of its dual bond and -1 otherwise.
  PlaquetteComplex(int d, std::vector<Plaquette> plaquettes, std::vector<std::int8_t> outward = {});

  int dim() const { return d_; }
  std::size_t size() const { return plaquettes_.size(); }
  bool empty() const { return plaquettes_.empty(); }
  const std::vector<Plaquette>& plaquettes() const { return plaquettes_; }
  const std::vector<std::int8_t>& outward() const { return outward_; }

  /// cells()[k] lists the distinct k-cells, sorted, for k = 0 .. d-1.
  const std::vector<std::vector<Cell>>& cells() const { return cells_; }
  /// Facet indices incident to each ridge, ridges in cells()[d-2] order.
  const std::vector<std::vector<std::uint32_t>>& ridge_facets() const { return ridge_facets_; }
  /// Ridge indices of each facet.
  const std::vector<std::vector<std::uint32_t>>& facet_ridges() const { return facet_ridges_; }

  bool every_ridge_in_two_facets() const;

 private:
  int d_ = 0;
  std::vector<Plaquette> plaquettes_;
  std::vector<std::int8_t> outward_;
  std::vector<std::vector<Cell>> cells_;
  std::vector<std::vector<std::uint32_t>> ridge_facets_;
  std::vector<std::vector<std::uint32_t>> facet_ridges_;
};

enum class SphereVerdict { verified, necessary_conditions_only, failed };
std::string to_string(SphereVerdict v);

struct TopologyReport {
  int d = 0;
  /// cell_counts[k] = number of k-cells, k = 0 .. d-1.
  std::vector<std::int64_t> cell_counts;
  std::int64_t euler_characteristic = 0;
  /// V - E (+ F) recomputed from explicit facet corners; set for d = 2, 3.
  std::optional<std::int64_t> euler_from_corners;
  bool ridges_ok = false;
  bool vertex_links_ok = false;
  bool is_closed_manifold = false;
  bool is_connected = false;
  std::optional<bool> origin_inside;
  std::optional<bool> all_unoccupied;
  std::optional<bool> star_shaped_ray_checks_passed;
  SphereVerdict verdict_sphere = SphereVerdict::failed;

  std::int64_t n_vertices() const { return cell_counts.empty() ? 0 : cell_counts[0]; }
  std::int64_t n_edges() const { return cell_counts.size() > 1 ? cell_counts[1] : 0; }
  std::int64_t n_faces() const { return cell_counts.size() > 2 ? cell_counts[2] : 0; }
};

/// 1 + (-1)^(d-1), the Euler characteristic of the (d-1)-sphere.
std::int64_t sphere_euler_characteristic(int d);

/// Plaquettes dual to bonds with exactly one endpoint in `sites`; no
/// preconditions on the set.
PlaquetteComplex boundary_of_sites(int d, std::span<const Site> sites);

/// The boundary set of a finished, downward-closed cluster containing 0.
/// Throws std::invalid_argument for escaped or non-closed clusters.
PlaquetteComplex build_boundary(const ClusterResult& res);

/// Cell counts, Euler characteristic, manifold and connectivity checks, and
/// a verdict from those alone. Occupancy and ray fields stay unset.
TopologyReport verify_topology(const PlaquetteComplex& s);

/// Number of facets met by the ray {t·dir : t > 0}, or nullopt when the ray
/// touches a facet boundary.
std::optional<std::int64_t> ray_crossings(const PlaquetteComplex& s, std::span<const std::int64_t> dir);

/// Odd ray-crossing parity from the origin. Requires a closed manifold.
bool origin_inside(const PlaquetteComplex& s, std::uint64_t ray_seed = 0x5eed);

/// Every one of n_rays random rays from 0 meets the complex exactly once.
bool star_shape_probe(const PlaquetteComplex& s, int n_rays, std::uint64_t ray_seed = 0x5eed);

bool verify_unoccupied(const PlaquetteComplex& s, const BondConfig& cfg);

/// max ‖x‖₁ over facet corners, in doubled units (always an integer).
std::int64_t sphere_radius_twice(const PlaquetteComplex& s);
double sphere_radius(const PlaquetteComplex& s);

/// Folds the optional checks into the verdict: a verified (or
/// necessary-conditions-only) verdict survives only if each check that was
/// run came out true.
void finalize_verdict(TopologyReport& report);

struct SphereAnalysis {
  PlaquetteComplex complex;
  TopologyReport report;
  std::int64_t cluster_radius = 0;
  double radius = 0.0;
};

/// build_boundary followed by every check, with n_rays star-shape probes.
SphereAnalysis analyze_sphere(const ClusterResult& res, const BondConfig& cfg, int n_rays,
                              std::uint64_t ray_seed = 0x5eed);

/// ASCII OFF mesh of a d = 3 complex, faces wound outward when the
/// orientation is known.
void write_off(const PlaquetteComplex& s, std::ostream& out);

}  // namespace plaq
