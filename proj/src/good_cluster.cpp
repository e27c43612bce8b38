#include "plaq/good_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "plaq/saw.hpp"

namespace plaq {

namespace {

void check_cap(int d, int k_max) {
  if (k_max > saw_length_cap(d)) {
    throw std::out_of_range("k_max " + std::to_string(k_max) + " exceeds the enumeration cap " +
                            std::to_string(saw_length_cap(d)) + " for d=" + std::to_string(d));
  }
}

}  // namespace

ClusterResult make_cluster(int d, std::span<const Site> sites, std::int64_t r_max) {
  check_dim(d);
  ClusterResult res;
  res.d = d;
  res.r_max = r_max;
  res.sites.assign(sites.begin(), sites.end());
  std::sort(res.sites.begin(), res.sites.end(), norm_lex_less);
  res.sites.erase(std::unique(res.sites.begin(), res.sites.end()), res.sites.end());
  res.members.insert(res.sites.begin(), res.sites.end());
  res.radius = res.sites.empty() ? 0 : rad_of(std::span<const Site>(res.sites));
  res.escaped = r_max > 0 && res.radius >= r_max;
  return res;
}

bool is_good_path(const BondConfig& cfg, std::span<const Site> path) {
  SiteSet seen;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!seen.insert(path[i]).second) {
      throw std::invalid_argument("path repeats site " + to_string(path[i]));
    }
    if (i == 0) continue;
    const Bond e = bond_between(path[i - 1], path[i]);
    if (l1_norm(path[i]) > l1_norm(path[i - 1]) && !cfg.occupied(e)) return false;
  }
  return true;
}

ClusterResult grow_good_cluster(const BondConfig& cfg, int d, std::int64_t r_max) {
  check_dim(d);
  if (r_max < 1) throw std::invalid_argument("grow_good_cluster requires r_max >= 1");
  ClusterResult res;
  res.d = d;
  res.r_max = r_max;
  const Site start = origin(d);
  res.members.insert(start);
  res.sites.push_back(start);
  std::deque<Site> queue{start};
  while (!queue.empty()) {
    const Site v = queue.front();
    queue.pop_front();
    const auto nv = l1_norm(v);
    for (int k = 0; k < 2 * d; ++k) {
      const Site w = neighbor(v, k);
      const auto nw = l1_norm(w);
      if (nw > nv) {
        if (nv >= r_max) continue;
        // Away step: the bond joins v and w, canonical base is the lower one.
        const Bond e = (k % 2 == 0) ? Bond{w, k / 2} : Bond{v, k / 2};
        if (!cfg.occupied(e)) continue;
      }
      if (res.members.insert(w).second) {
        res.sites.push_back(w);
        queue.push_back(w);
        if (nw >= r_max) res.escaped = true;
      }
    }
  }
  std::sort(res.sites.begin(), res.sites.end(), norm_lex_less);
  res.radius = l1_norm(res.sites.back());
  return res;
}

bool check_downward_closed(const ClusterResult& res) {
  for (const auto& x : res.sites) {
    for (int i = 0; i < x.dim; ++i) {
      if (x[i] == 0) continue;
      Site y = x;
      y[i] += x[i] > 0 ? -1 : 1;
      if (!res.contains(y)) return false;
    }
  }
  return true;
}

std::uint64_t count_good_paths(const BondConfig& cfg, int d, int r, int k_max) {
  check_dim(d);
  if (r < 1 || k_max < r) throw std::invalid_argument("count_good_paths requires 1 <= r <= k_max");
  std::uint64_t count = 0;
  std::vector<Site> path{origin(d)};
  auto on_path = [&](const Site& s) { return std::find(path.begin(), path.end(), s) != path.end(); };
  auto descend = [&](auto&& self) -> void {
    const Site v = path.back();
    const auto nv = l1_norm(v);
    const int remaining = k_max - static_cast<int>(path.size()) + 1;
    for (int k = 0; k < 2 * d; ++k) {
      const Site w = neighbor(v, k);
      const auto nw = l1_norm(w);
      // An endpoint at norm r needs at least |nw - r| further steps.
      if (std::abs(nw - r) > remaining - 1) continue;
      if (on_path(w)) continue;
      if (nw > nv) {
        const Bond e = (k % 2 == 0) ? Bond{w, k / 2} : Bond{v, k / 2};
        if (!cfg.occupied(e)) continue;
      }
      if (nw == r) ++count;
      path.push_back(w);
      if (remaining > 1) self(self);
      path.pop_back();
    }
  };
  descend(descend);
  return count;
}

double expected_good_paths_truncated(double p, int d, int r, int k_max) {
  check_cap(d, k_max);
  if (r < 1 || k_max < r) throw std::invalid_argument("requires 1 <= r <= k_max");
  // by_away[A] counts paths with A away steps ending at norm r.
  std::vector<std::uint64_t> by_away(static_cast<std::size_t>(k_max) + 1, 0);
  for_each_saw(d, k_max, [&](std::span<const Site> walk) {
    const int len = static_cast<int>(walk.size()) - 1;
    const auto n = l1_norm(walk.back());
    if (std::abs(n - r) > k_max - len) return false;
    if (n == r) {
      // A - B = r and A + B = len.
      by_away[static_cast<std::size_t>((len + r) / 2)] += 1;
    }
    return true;
  });
  double total = 0.0;
  for (std::size_t a = 0; a < by_away.size(); ++a) {
    if (by_away[a]) total += static_cast<double>(by_away[a]) * std::pow(p, static_cast<double>(a));
  }
  return total;
}

double path_count_bound(double p, int d, int r, int k_max) {
  check_cap(d, k_max);
  if (r < 1 || k_max < r) throw std::invalid_argument("requires 1 <= r <= k_max");
  double total = 0.0;
  for (int b = 0; 2 * b + r <= k_max; ++b) {
    const double sigma = count_saw(d, 2 * b + r).count.convert_to<double>();
    total += sigma * std::pow(p, static_cast<double>(b + r));
  }
  return total;
}

}  // namespace plaq
