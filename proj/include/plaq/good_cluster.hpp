#pragma once

// The good-path cluster K: sites reachable from the origin by self-avoiding
// paths whose every norm-increasing step crosses an occupied bond.

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "plaq/lattice.hpp"
#include "plaq/sampler.hpp"

namespace plaq {

using SiteSet = std::unordered_set<Site, SiteHash>;

struct ClusterResult {
  int d = 0;
  /// Sites ordered by ℓ1 norm, then lexicographically.
  std::vector<Site> sites;
  SiteSet members;
  bool escaped = false;
  std::int64_t radius = 0;
  std::int64_t r_max = 0;

  bool contains(const Site& x) const { return members.contains(x); }
};

/// Builds a ClusterResult from an arbitrary site set (used for synthetic
/// inputs); no closure or goodness is implied.
ClusterResult make_cluster(int d, std::span<const Site> sites, std::int64_t r_max = 0);

/// Throws std::invalid_argument on non-adjacent consecutive sites or a
/// repeated site.
bool is_good_path(const BondConfig& cfg, std::span<const Site> path);

/// Closure of the step relation from the origin: a step toward the origin is
/// always allowed, any other step needs an occupied bond. Sites at norm
/// r_max are kept but not expanded outward, and their presence sets
/// `escaped`. Without an escape the result is exactly K.
ClusterResult grow_good_cluster(const BondConfig& cfg, int d, std::int64_t r_max);

bool check_downward_closed(const ClusterResult& res);

/// Number of good self-avoiding paths from 0 with at most k_max steps that end
/// at ℓ1 norm exactly r.
std::uint64_t count_good_paths(const BondConfig& cfg, int d, int r, int k_max);

/// Σ p^A over all self-avoiding paths of length <= k_max ending at norm r,
/// A being the number of away steps; this is E_p of the truncated count.
double expected_good_paths_truncated(double p, int d, int r, int k_max);

/// Σ_{B=0}^{⌊(k_max-r)/2⌋} σ(2B+r) p^(B+r) with exact σ.
double path_count_bound(double p, int d, int r, int k_max);

}  // namespace plaq
