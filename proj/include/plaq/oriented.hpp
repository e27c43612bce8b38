#pragma once

// Admissible and oriented reachability, finite-box crossing estimates and
// pseudo-critical points, the planar directed-dual duality, annulus circuits,
// and the renormalization skeleton used for oriented percolation in cones.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plaq/good_cluster.hpp"
#include "plaq/lattice.hpp"
#include "plaq/mc.hpp"
#include "plaq/sampler.hpp"

namespace plaq {

// ---------------------------------------------------------------------------
// Regions

enum class RegionKind { all, halfspace_hplus, orthant_k, cone };

struct Box {
  Site lo;
  Site hi;
  bool contains(const Site& x) const;
};

Box cube_box(int d, std::int32_t lo, std::int32_t hi);

/// A region of Z^d: one of the half-space H_+ (s >= 1), the orthant K
/// (all coordinates >= 0), a cone K_{a,b}, or everything, optionally cut
/// down to a box.
struct RegionSpec {
  RegionKind kind = RegionKind::all;
  Cone cone{};
  std::optional<Box> bounds;

  static RegionSpec everything() { return {}; }
  static RegionSpec hplus() { return {RegionKind::halfspace_hplus, {}, std::nullopt}; }
  static RegionSpec orthant() { return {RegionKind::orthant_k, {}, std::nullopt}; }
  static RegionSpec in_cone(Cone c) { return {RegionKind::cone, c, std::nullopt}; }
  static RegionSpec box(Box b) { return {RegionKind::all, {}, b}; }
  RegionSpec within(Box b) const {
    RegionSpec r = *this;
    r.bounds = b;
    return r;
  }
};

bool region_contains(const RegionSpec& region, const Site& x);

using SitePredicate = std::function<bool(const Site&)>;

/// No cap: the region must then be bounded.
inline constexpr std::int64_t kNoCap = -1;

/// Sites reachable from `source` by admissible paths inside the region (the
/// source itself is always allowed): steps that lower s(x) are free, steps
/// that raise it need an occupied bond. `step_cap` bounds ‖x - source‖_∞.
SiteSet admissible_reach_set(const BondConfig& cfg, const Site& source, const RegionSpec& region,
                             std::int64_t step_cap = kNoCap);
bool admissible_reach(const BondConfig& cfg, const Site& source, const RegionSpec& region,
                      const SitePredicate& targets, std::int64_t step_cap = kNoCap);

/// Same for oriented occupied paths: only +e_i steps across occupied bonds.
SiteSet oriented_reach_set(const BondConfig& cfg, const Site& source, const RegionSpec& region,
                           std::int64_t step_cap = kNoCap);
bool oriented_reach(const BondConfig& cfg, const Site& source, const RegionSpec& region,
                    const SitePredicate& targets, std::int64_t step_cap = kNoCap);

struct RadiusEstimate {
  std::int64_t value = 0;
  bool censored = false;
};

/// Largest n <= n_max with 0 reaching n·e admissibly inside the region
/// (default: the box [-n_max, n_max]^d); censored when n = n_max.
RadiusEstimate estimate_R(const BondConfig& cfg, int d, std::int64_t n_max,
                          const std::optional<RegionSpec>& region = std::nullopt);

// ---------------------------------------------------------------------------
// Crossing probabilities and pseudo-critical points

enum class Variant { good, admissible, admissible_h, admissible_k, oriented_occ };
std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

/// The finite-size event of each variant, for a box of size L:
///   good         good path from 0 to ℓ1 norm L
///   admissible   admissible path from 0 to L·e inside [-L, L]^d
///   admissible_h the same inside ([-L, L]^d ∩ H_+) ∪ {0}
///   admissible_k the same inside [0, L]^d
///   oriented_occ oriented occupied path from 0 to the plane s(x) = L inside [0, L]^d
/// The three admissible regions are nested, so their events are too.
struct VariantGeometry {
  Variant variant;
  int d;
  std::int64_t L;
  RegionSpec region;
  SitePredicate is_target;
};

VariantGeometry variant_geometry(Variant v, int d, std::int64_t L);

struct CrossingEstimate {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double estimate = 0.0;
  Interval wilson;
};

/// Fraction of trials whose event occurs at density p, by direct search.
CrossingEstimate crossing_probability(Variant v, int d, double p, std::int64_t L, std::uint64_t trials,
                                      std::uint64_t master_seed, int threads = 0);

/// For each trial, the infimum of the densities at which its event occurs
/// (a minimax path value over the bond uniforms). The event occurs at p
/// exactly when p exceeds this value.
std::vector<double> crossing_thresholds(Variant v, int d, std::int64_t L, std::uint64_t trials,
                                        std::uint64_t master_seed, int threads = 0);

struct CriticalEstimate {
  Variant variant = Variant::good;
  int d = 0;
  std::vector<std::int64_t> L_list;
  std::vector<double> p_hat;
  /// Order-statistic 99% interval for the density at which the crossing
  /// probability is 1/2.
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  /// Final bisection bracket width for each L.
  std::vector<double> bracket_width;
  std::uint64_t trials = 0;
  double tolerance = 0.0;
  /// Set when the direct search disagrees with the threshold route at the
  /// bracket ends (only evaluated with cross_check).
  bool non_monotone = false;
};

struct CriticalOptions {
  int threads = 0;
  /// Re-evaluate the crossing probability at both bracket ends by direct
  /// search and compare with the threshold route.
  bool cross_check = false;
};

CriticalEstimate estimate_critical(Variant v, int d, const std::vector<std::int64_t>& L_list, std::uint64_t trials,
                                   double tol, std::uint64_t master_seed, const CriticalOptions& opts = {});

// ---------------------------------------------------------------------------
// Planar duality

/// Primal sites T = {0} ∪ {x : s(x) >= 1, x_1 <= nx, x_2 <= ny}; an escape
/// reaches a target site (x_1 = nx or x_2 = ny). Dual site (i, j) stands for
/// (i + ½, j + ½). A dual bond is open when its primal bond is unoccupied;
/// horizontal dual bonds point right, vertical ones point down. Bonds joining
/// a site of T at s = 1 to a site at s = 0 other than the origin lie on the
/// boundary of H_+ and their dual bonds are always open.
struct DualWindow {
  int nx = 0;
  int ny = 0;
  std::vector<Site> sites;
  std::vector<Bond> random_bonds;
  std::vector<Bond> wall_bonds;

  bool in_window(const Site& x) const;
  bool is_target(const Site& x) const;
};

DualWindow make_dual_window(int nx, int ny);

using DualSite = std::pair<std::int32_t, std::int32_t>;
/// The directed dual bond crossing a primal bond of Z^2.
std::pair<DualSite, DualSite> dual_arc(const Bond& e);

bool primal_escape(const BondConfig& cfg, const DualWindow& w);
bool dual2d_blocking(const BondConfig& cfg, const DualWindow& w);

struct DualityReport {
  std::uint64_t configs = 0;
  std::uint64_t escapes = 0;
  std::uint64_t blockings = 0;
  std::uint64_t both = 0;
  std::uint64_t neither = 0;
  bool exhaustive = false;

  bool exact() const { return both == 0 && neither == 0; }
};

/// All 2^m states of the window's m random bonds.
DualityReport dual2d_exhaustive(const DualWindow& w);
DualityReport dual2d_monte_carlo(const DualWindow& w, double p, std::uint64_t trials, std::uint64_t master_seed,
                                 int threads = 0);

/// Directed open dual path from (0, n) to (n, 0) (dual indices) inside
/// B(n) \ B(n/3), B(k) = [0, k]^2.
bool annulus_circuit(const BondConfig& cfg, int n);

// ---------------------------------------------------------------------------
// Renormalization skeleton in a planar cone

struct SkeletonSpec {
  Rational a{0};
  std::optional<Rational> b;
  Rational r{1, 2};
  Rational s{2};
  std::int64_t alpha = 1;
  std::int64_t beta = 1;
  int extent = 10;
  /// Largest x_1 examined when looking for the base site.
  std::int64_t search_bound = 256;
};

struct Skeleton {
  SkeletonSpec spec;
  Site v;
  Site R;
  Site S;
  /// Bonds of the three-segment oriented subgraph π, based at 0.
  std::vector<Bond> pi;
  /// v + iR + jS for 0 <= i, j < extent, row-major in (i, j).
  std::vector<Site> sites;
  bool all_in_cone = false;
  bool pairwise_disjoint = false;
  std::uint64_t pairs_checked = 0;
};

/// Smallest alpha, then smallest beta, with s1/r1 < beta/alpha < s2/r2.
/// Requires 0 < r < s.
std::pair<std::int64_t, std::int64_t> skeleton_ratio(const Rational& r, const Rational& s);

/// Throws std::invalid_argument when a < r < s < b or
/// s1/r1 < beta/alpha < s2/r2 fails, and std::runtime_error when no base
/// site is found within the search bound.
Skeleton renormalization_skeleton(const SkeletonSpec& spec);

/// Mean fraction of black sites v_{i,j} (every bond of v_{i,j} + π occupied).
double black_site_density(const Skeleton& sk, double p, std::uint64_t trials, std::uint64_t master_seed,
                          int threads = 0);

}  // namespace plaq
