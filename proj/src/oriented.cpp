#include "plaq/oriented.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "plaq/parallel.hpp"

namespace plaq {

// ---------------------------------------------------------------------------
// Regions

bool Box::contains(const Site& x) const {
  for (int i = 0; i < x.dim; ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  }
  return true;
}

Box cube_box(int d, std::int32_t lo, std::int32_t hi) {
  check_dim(d);
  Box b{origin(d), origin(d)};
  for (int i = 0; i < d; ++i) {
    b.lo[i] = lo;
    b.hi[i] = hi;
  }
  return b;
}

bool region_contains(const RegionSpec& region, const Site& x) {
  if (region.bounds && !region.bounds->contains(x)) return false;
  switch (region.kind) {
    case RegionKind::all:
      return true;
    case RegionKind::halfspace_hplus:
      return s_sum(x) >= 1;
    case RegionKind::orthant_k:
      for (int i = 0; i < x.dim; ++i) {
        if (x[i] < 0) return false;
      }
      return true;
    case RegionKind::cone:
      return in_cone(x, region.cone);
  }
  return false;
}

namespace {

enum class StepRule { admissible, oriented };

bool region_bounded(const RegionSpec& region) { return region.bounds.has_value(); }

std::int64_t linf_distance(const Site& a, const Site& b) { return linf_norm(a - b); }

// Breadth-first closure of the step relation. Admissible: a -e_i step lowers
// s and is free, a +e_i step needs its bond occupied. Oriented: only +e_i
// steps, always across occupied bonds.
template <class Visit>
void reach_search(const BondConfig& cfg, const Site& source, const RegionSpec& region, std::int64_t step_cap,
                  StepRule rule, Visit&& visit) {
  check_dim(source.dim);
  if (step_cap < 0 && !region_bounded(region)) {
    throw std::invalid_argument("reachability in an unbounded region needs a step cap");
  }
  SiteSet seen{source};
  std::deque<Site> queue{source};
  if (!visit(source)) return;
  const int d = source.dim;
  while (!queue.empty()) {
    const Site x = queue.front();
    queue.pop_front();
    for (int k = 0; k < 2 * d; ++k) {
      const bool up = k % 2 == 1;
      if (rule == StepRule::oriented && !up) continue;
      const Site y = neighbor(x, k);
      if (step_cap >= 0 && linf_distance(y, source) > step_cap) continue;
      if (!region_contains(region, y) || seen.contains(y)) continue;
      if (up && !cfg.occupied(Bond{x, k / 2})) continue;
      seen.insert(y);
      if (!visit(y)) return;
      queue.push_back(y);
    }
  }
}

SiteSet reach_set(const BondConfig& cfg, const Site& source, const RegionSpec& region, std::int64_t step_cap,
                  StepRule rule) {
  SiteSet out;
  reach_search(cfg, source, region, step_cap, rule, [&](const Site& x) {
    out.insert(x);
    return true;
  });
  return out;
}

bool reach_any(const BondConfig& cfg, const Site& source, const RegionSpec& region, const SitePredicate& targets,
               std::int64_t step_cap, StepRule rule) {
  bool hit = false;
  reach_search(cfg, source, region, step_cap, rule, [&](const Site& x) {
    hit = targets(x);
    return !hit;
  });
  return hit;
}

}  // namespace

SiteSet admissible_reach_set(const BondConfig& cfg, const Site& source, const RegionSpec& region,
                             std::int64_t step_cap) {
  return reach_set(cfg, source, region, step_cap, StepRule::admissible);
}

bool admissible_reach(const BondConfig& cfg, const Site& source, const RegionSpec& region,
                      const SitePredicate& targets, std::int64_t step_cap) {
  return reach_any(cfg, source, region, targets, step_cap, StepRule::admissible);
}

SiteSet oriented_reach_set(const BondConfig& cfg, const Site& source, const RegionSpec& region,
                           std::int64_t step_cap) {
  return reach_set(cfg, source, region, step_cap, StepRule::oriented);
}

bool oriented_reach(const BondConfig& cfg, const Site& source, const RegionSpec& region,
                    const SitePredicate& targets, std::int64_t step_cap) {
  return reach_any(cfg, source, region, targets, step_cap, StepRule::oriented);
}

RadiusEstimate estimate_R(const BondConfig& cfg, int d, std::int64_t n_max, const std::optional<RegionSpec>& region) {
  check_dim(d);
  if (n_max < 1) throw std::invalid_argument("estimate_R requires n_max >= 1");
  const auto n32 = static_cast<std::int32_t>(n_max);
  const RegionSpec reg = region ? *region : RegionSpec::box(cube_box(d, -n32, n32));
  const std::int64_t cap = region_bounded(reg) ? kNoCap : n_max;
  const SiteSet reached = admissible_reach_set(cfg, origin(d), reg, cap);
  RadiusEstimate out;
  for (std::int64_t n = n_max; n >= 1; --n) {
    Site target = origin(d);
    for (int i = 0; i < d; ++i) target[i] = static_cast<std::int32_t>(n);
    if (reached.contains(target)) {
      out.value = n;
      break;
    }
  }
  out.censored = out.value == n_max;
  return out;
}

// ---------------------------------------------------------------------------
// Variants

std::string to_string(Variant v) {
  switch (v) {
    case Variant::good:
      return "good";
    case Variant::admissible:
      return "adm";
    case Variant::admissible_h:
      return "admH";
    case Variant::admissible_k:
      return "admK";
    case Variant::oriented_occ:
      return "oriented";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "good") return Variant::good;
  if (s == "adm" || s == "admissible") return Variant::admissible;
  if (s == "admH" || s == "admissibleH") return Variant::admissible_h;
  if (s == "admK" || s == "admissibleK") return Variant::admissible_k;
  if (s == "oriented" || s == "orientedOcc") return Variant::oriented_occ;
  throw std::invalid_argument("variant must be one of good|adm|admH|admK|oriented, got '" + s + "'");
}

namespace {

void check_box_size(std::int64_t L) {
  if (L < 4) throw std::invalid_argument("box size L must be >= 4");
  if (L > (1 << 20)) throw std::invalid_argument("box size L too large");
}

Site diagonal(int d, std::int64_t n) {
  Site x = origin(d);
  for (int i = 0; i < d; ++i) x[i] = static_cast<std::int32_t>(n);
  return x;
}

}  // namespace

VariantGeometry variant_geometry(Variant v, int d, std::int64_t L) {
  check_dim(d);
  check_box_size(L);
  const auto l = static_cast<std::int32_t>(L);
  VariantGeometry g{v, d, L, {}, {}};
  const Site corner = diagonal(d, L);
  switch (v) {
    case Variant::good:
      g.region = RegionSpec::box(cube_box(d, -l, l));
      g.is_target = [L](const Site& x) { return l1_norm(x) >= L; };
      break;
    case Variant::admissible:
      g.region = RegionSpec::box(cube_box(d, -l, l));
      g.is_target = [corner](const Site& x) { return x == corner; };
      break;
    case Variant::admissible_h:
      g.region = RegionSpec::hplus().within(cube_box(d, -l, l));
      g.is_target = [corner](const Site& x) { return x == corner; };
      break;
    case Variant::admissible_k:
      g.region = RegionSpec::orthant().within(cube_box(d, 0, l));
      g.is_target = [corner](const Site& x) { return x == corner; };
      break;
    case Variant::oriented_occ:
      g.region = RegionSpec::orthant().within(cube_box(d, 0, l));
      g.is_target = [L](const Site& x) { return s_sum(x) >= L; };
      break;
  }
  return g;
}

namespace {

bool crossing_event(const BondConfig& cfg, const VariantGeometry& g) {
  switch (g.variant) {
    case Variant::good:
      return grow_good_cluster(cfg, g.d, g.L).escaped;
    case Variant::admissible:
    case Variant::admissible_h:  // the origin is the designated start outside H_+
    case Variant::admissible_k:
      return admissible_reach(cfg, origin(g.d), g.region, g.is_target);
    case Variant::oriented_occ:
      return oriented_reach(cfg, origin(g.d), g.region, g.is_target);
  }
  return false;
}

// Minimax search on a dense box. The value of a walk is the largest bond
// uniform over its non-free steps (-1 if none), and the threshold is the
// least value over walks from 0 to a target, so the event occurs at p
// exactly when threshold < p.
class ThresholdSearch {
 public:
  ThresholdSearch(Variant v, int d, std::int64_t L) : v_(v), d_(d), L_(L) {
    const auto l = static_cast<std::int32_t>(L);
    lo_ = (v == Variant::admissible_k || v == Variant::oriented_occ) ? 0 : -l;
    const std::int64_t side = std::int64_t{l} - lo_ + 1;
    std::int64_t size = 1;
    for (int i = 0; i < d; ++i) {
      stride_[static_cast<std::size_t>(i)] = size;
      size *= side;
    }
    if (size > (std::int64_t{1} << 31)) throw std::invalid_argument("box too large for the threshold search");
    side_ = side;
    size_ = static_cast<std::size_t>(size);
  }

  double run(const BondConfig& cfg) const {
    Workspace& ws = workspace();
    ws.prepare(size_);
    const std::uint32_t gen = ws.next_generation();
    const auto idx0 = index_of(origin(d_));
    auto relax = [&](std::uint32_t i, double key) {
      if (ws.stamp[i] == gen && ws.best[i] <= key) return;
      ws.stamp[i] = gen;
      ws.best[i] = key;
      ws.heap.push({key, i});
    };
    ws.heap = {};
    relax(idx0, -1.0);
    while (!ws.heap.empty()) {
      const auto [key, i] = ws.heap.top();
      ws.heap.pop();
      if (ws.best[i] < key || ws.done[i] == gen) continue;
      ws.done[i] = gen;
      const Site x = site_of(i);
      if (is_target(x)) return key;
      for (int k = 0; k < 2 * d_; ++k) {
        const int axis = k / 2;
        const bool up = k % 2 == 1;
        if (v_ == Variant::oriented_occ && !up) continue;
        const Site y = neighbor(x, k);
        if (!inside(y)) continue;
        bool free_step;
        if (v_ == Variant::good) {
          free_step = std::abs(std::int64_t{y[axis]}) < std::abs(std::int64_t{x[axis]});
        } else {
          free_step = !up;
        }
        const Bond e = up ? Bond{x, axis} : Bond{y, axis};
        const double cost = free_step ? key : std::max(key, cfg.uniform(e));
        relax(index_of(y), cost);
      }
    }
    return std::numeric_limits<double>::infinity();
  }

 private:
  struct Entry {
    double key;
    std::uint32_t index;
    bool operator>(const Entry& o) const { return key > o.key || (key == o.key && index > o.index); }
  };

  struct Workspace {
    std::vector<double> best;
    std::vector<std::uint32_t> stamp;
    std::vector<std::uint32_t> done;
    std::uint32_t generation = 0;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

    void prepare(std::size_t n) {
      if (best.size() < n) {
        best.assign(n, 0.0);
        stamp.assign(n, 0);
        done.assign(n, 0);
        generation = 0;
      }
    }
    std::uint32_t next_generation() {
      if (++generation == 0) {
        std::fill(stamp.begin(), stamp.end(), 0);
        std::fill(done.begin(), done.end(), 0);
        generation = 1;
      }
      return generation;
    }
  };

  static Workspace& workspace() {
    thread_local Workspace ws;
    return ws;
  }

  std::uint32_t index_of(const Site& x) const {
    std::int64_t i = 0;
    for (int a = 0; a < d_; ++a) i += (std::int64_t{x[a]} - lo_) * stride_[static_cast<std::size_t>(a)];
    return static_cast<std::uint32_t>(i);
  }

  Site site_of(std::uint32_t i) const {
    Site x = origin(d_);
    std::int64_t rest = i;
    for (int a = 0; a < d_; ++a) {
      x[a] = static_cast<std::int32_t>(rest % side_ + lo_);
      rest /= side_;
    }
    return x;
  }

  bool inside(const Site& y) const {
    for (int a = 0; a < d_; ++a) {
      if (y[a] < lo_ || y[a] > L_) return false;
    }
    switch (v_) {
      case Variant::good:
        return l1_norm(y) <= L_;
      case Variant::admissible_h:
        return s_sum(y) >= 1 || y == origin(d_);
      default:
        return true;
    }
  }

  bool is_target(const Site& x) const {
    switch (v_) {
      case Variant::good:
        return l1_norm(x) >= L_;
      case Variant::oriented_occ:
        return s_sum(x) >= L_;
      default:
        for (int a = 0; a < d_; ++a) {
          if (x[a] != L_) return false;
        }
        return true;
    }
  }

  Variant v_;
  int d_;
  std::int64_t L_;
  std::int32_t lo_ = 0;
  std::int64_t side_ = 0;
  std::size_t size_ = 0;
  std::array<std::int64_t, kMaxDim> stride_{};
};

std::uint64_t count_below(const std::vector<double>& sorted, double p) {
  return static_cast<std::uint64_t>(std::lower_bound(sorted.begin(), sorted.end(), p) - sorted.begin());
}

}  // namespace

CrossingEstimate crossing_probability(Variant v, int d, double p, std::int64_t L, std::uint64_t trials,
                                      std::uint64_t master_seed, int threads) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (trials < 1) throw std::invalid_argument("crossing_probability needs at least one trial");
  const VariantGeometry g = variant_geometry(v, d, L);
  const auto hits = map_trials(trials, threads, [&](std::uint64_t i) -> std::uint8_t {
    return crossing_event(derive_trial_config(master_seed, i, p), g) ? 1 : 0;
  });
  CrossingEstimate out;
  out.trials = trials;
  out.hits = static_cast<std::uint64_t>(std::count(hits.begin(), hits.end(), std::uint8_t{1}));
  out.estimate = static_cast<double>(out.hits) / static_cast<double>(trials);
  out.wilson = wilson_interval(out.hits, trials);
  return out;
}

std::vector<double> crossing_thresholds(Variant v, int d, std::int64_t L, std::uint64_t trials,
                                        std::uint64_t master_seed, int threads) {
  check_dim(d);
  check_box_size(L);
  const ThresholdSearch search(v, d, L);
  return map_trials(trials, threads, [&](std::uint64_t i) {
    // The bond uniforms do not depend on p; any p gives the same thresholds.
    return search.run(derive_trial_config(master_seed, i, 0.0));
  });
}

CriticalEstimate estimate_critical(Variant v, int d, const std::vector<std::int64_t>& L_list, std::uint64_t trials,
                                   double tol, std::uint64_t master_seed, const CriticalOptions& opts) {
  check_dim(d);
  if (!(tol >= 1e-3)) throw std::invalid_argument("estimate_critical requires tol >= 1e-3");
  if (L_list.empty()) throw std::invalid_argument("estimate_critical needs at least one box size");
  if (trials < 1) throw std::invalid_argument("estimate_critical needs at least one trial");
  for (auto L : L_list) check_box_size(L);

  CriticalEstimate est;
  est.variant = v;
  est.d = d;
  est.L_list = L_list;
  est.trials = trials;
  est.tolerance = tol;
  const double n = static_cast<double>(trials);
  for (auto L : L_list) {
    auto t = crossing_thresholds(v, d, L, trials, master_seed, opts.threads);
    std::sort(t.begin(), t.end());
    // Empirical crossing probability at p is #{t_i < p} / n; bisect it at 1/2.
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (2 * count_below(t, mid) >= trials) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    est.p_hat.push_back(0.5 * (lo + hi));
    est.bracket_width.push_back(hi - lo);

    // Distribution-free interval for the median threshold.
    const double half = 0.5 * kZ99 * std::sqrt(n);
    const auto rank_lo = static_cast<std::int64_t>(std::floor(n / 2 - half));
    const auto rank_hi = static_cast<std::int64_t>(std::ceil(n / 2 + half)) + 1;
    auto at_rank = [&](std::int64_t r) {
      r = std::clamp<std::int64_t>(r, 1, static_cast<std::int64_t>(trials));
      return std::clamp(t[static_cast<std::size_t>(r - 1)], 0.0, 1.0);
    };
    est.ci_lo.push_back(rank_lo < 1 ? 0.0 : at_rank(rank_lo));
    est.ci_hi.push_back(rank_hi > static_cast<std::int64_t>(trials) ? 1.0 : at_rank(rank_hi));

    if (opts.cross_check) {
      const auto at_lo = crossing_probability(v, d, lo, L, trials, master_seed, opts.threads);
      const auto at_hi = crossing_probability(v, d, hi, L, trials, master_seed, opts.threads);
      if (at_lo.hits != count_below(t, lo) || at_hi.hits != count_below(t, hi) || at_lo.hits > at_hi.hits) {
        est.non_monotone = true;
      }
    }
  }
  return est;
}

// ---------------------------------------------------------------------------
// Planar duality

bool DualWindow::in_window(const Site& x) const {
  if (x.dim != 2) return false;
  if (x == origin(2)) return true;
  return s_sum(x) >= 1 && x[0] <= nx && x[1] <= ny;
}

bool DualWindow::is_target(const Site& x) const { return in_window(x) && x != origin(2) && (x[0] == nx || x[1] == ny); }

DualWindow make_dual_window(int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("dual window sizes must be >= 1");
  if (nx > 64 || ny > 64) throw std::invalid_argument("dual window sizes must be <= 64");
  DualWindow w;
  w.nx = nx;
  w.ny = ny;
  for (int x = -ny; x <= nx; ++x) {
    for (int y = -nx; y <= ny; ++y) {
      const Site s = make_site({x, y});
      if (w.in_window(s)) w.sites.push_back(s);
    }
  }
  std::sort(w.sites.begin(), w.sites.end());
  const Site o = origin(2);
  for (const Site& x : w.sites) {
    for (int axis = 0; axis < 2; ++axis) {
      const Bond e{x, axis};
      const Site y = e.head();
      if (w.in_window(y)) {
        if (!(w.is_target(x) && w.is_target(y))) w.random_bonds.push_back(e);
      }
    }
    if (x != o && s_sum(x) == 1) {
      for (int k = 0; k < 4; k += 2) {
        const Site y = neighbor(x, k);
        if (y != o) w.wall_bonds.push_back(bond_between(x, y));
      }
    }
  }
  std::sort(w.random_bonds.begin(), w.random_bonds.end());
  std::sort(w.wall_bonds.begin(), w.wall_bonds.end());
  return w;
}

std::pair<DualSite, DualSite> dual_arc(const Bond& e) {
  if (e.base.dim != 2) throw std::invalid_argument("dual arcs are planar");
  const std::int32_t x = e.base[0];
  const std::int32_t y = e.base[1];
  if (e.axis == 1) return {{x - 1, y}, {x, y}};
  return {{x, y}, {x, y - 1}};
}

namespace {

// Bond states of the window's random bonds, one byte per bond.
using WindowState = std::vector<std::uint8_t>;

WindowState window_state(const BondConfig& cfg, const DualWindow& w) {
  WindowState st(w.random_bonds.size());
  for (std::size_t i = 0; i < st.size(); ++i) st[i] = cfg.occupied(w.random_bonds[i]) ? 1 : 0;
  return st;
}

struct WindowIndex {
  std::unordered_map<Bond, std::size_t, BondHash> bond;
  explicit WindowIndex(const DualWindow& w) {
    for (std::size_t i = 0; i < w.random_bonds.size(); ++i) bond.emplace(w.random_bonds[i], i);
  }
};

bool primal_escape_state(const DualWindow& w, const WindowIndex& idx, const WindowState& st) {
  SiteSet seen{origin(2)};
  std::deque<Site> queue{origin(2)};
  while (!queue.empty()) {
    const Site x = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const Site y = neighbor(x, k);
      if (!w.in_window(y) || seen.contains(y)) continue;
      if (k % 2 == 1) {
        const auto it = idx.bond.find(bond_between(x, y));
        if (it == idx.bond.end() || !st[it->second]) continue;
      }
      if (w.is_target(y)) return true;
      seen.insert(y);
      queue.push_back(y);
    }
  }
  return false;
}

struct PairHash {
  std::size_t operator()(const DualSite& s) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t(std::uint32_t(s.first)) << 32) | std::uint32_t(s.second));
  }
};

bool on_dplus(const DualSite& s) { return s.first + s.second == -1 && s.first <= -1; }
bool on_dminus(const DualSite& s) { return s.first + s.second == -1 && s.first >= 0; }

bool dual_blocking_state(const DualWindow& w, const WindowState& st) {
  std::unordered_map<DualSite, std::vector<DualSite>, PairHash> out;
  auto add = [&](const Bond& e) {
    const auto [a, b] = dual_arc(e);
    out[a].push_back(b);
  };
  for (std::size_t i = 0; i < w.random_bonds.size(); ++i) {
    if (!st[i]) add(w.random_bonds[i]);
  }
  for (const Bond& e : w.wall_bonds) add(e);
  std::unordered_map<DualSite, bool, PairHash> seen;
  std::deque<DualSite> queue;
  for (const auto& [a, _] : out) {
    if (on_dplus(a)) {
      seen[a] = true;
      queue.push_back(a);
    }
  }
  while (!queue.empty()) {
    const DualSite a = queue.front();
    queue.pop_front();
    if (on_dminus(a)) return true;
    const auto it = out.find(a);
    if (it == out.end()) continue;
    for (const DualSite& b : it->second) {
      if (seen.emplace(b, true).second) queue.push_back(b);
    }
  }
  return false;
}

void tally(DualityReport& r, bool escape, bool block) {
  ++r.configs;
  r.escapes += escape;
  r.blockings += block;
  r.both += escape && block;
  r.neither += !escape && !block;
}

}  // namespace

bool primal_escape(const BondConfig& cfg, const DualWindow& w) {
  return primal_escape_state(w, WindowIndex(w), window_state(cfg, w));
}

bool dual2d_blocking(const BondConfig& cfg, const DualWindow& w) { return dual_blocking_state(w, window_state(cfg, w)); }

DualityReport dual2d_exhaustive(const DualWindow& w) {
  const std::size_t m = w.random_bonds.size();
  if (m > 24) throw std::invalid_argument("window has too many bonds for exhaustive enumeration");
  const WindowIndex idx(w);
  DualityReport r;
  r.exhaustive = true;
  WindowState st(m);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    for (std::size_t i = 0; i < m; ++i) st[i] = (mask >> i) & 1U;
    tally(r, primal_escape_state(w, idx, st), dual_blocking_state(w, st));
  }
  return r;
}

DualityReport dual2d_monte_carlo(const DualWindow& w, double p, std::uint64_t trials, std::uint64_t master_seed,
                                 int threads) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  const WindowIndex idx(w);
  const auto codes = map_trials(trials, threads, [&](std::uint64_t i) -> std::uint8_t {
    const WindowState st = window_state(derive_trial_config(master_seed, i, p), w);
    return static_cast<std::uint8_t>((primal_escape_state(w, idx, st) ? 1 : 0) | (dual_blocking_state(w, st) ? 2 : 0));
  });
  DualityReport r;
  for (auto c : codes) tally(r, c & 1, c & 2);
  return r;
}

bool annulus_circuit(const BondConfig& cfg, int n) {
  if (n < 3) throw std::invalid_argument("annulus_circuit requires n >= 3");
  auto in_region = [n](int i, int j) {
    if (i < 0 || j < 0 || i > n || j > n) return false;
    return !(3 * i <= n && 3 * j <= n);
  };
  const auto side = static_cast<std::size_t>(n + 1);
  std::vector<std::uint8_t> seen(side * side, 0);
  auto at = [&](int i, int j) -> std::uint8_t& { return seen[static_cast<std::size_t>(i) * side + static_cast<std::size_t>(j)]; };
  std::deque<DualSite> queue{{0, n}};
  at(0, n) = 1;
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    if (i == n && j == 0) return true;
    // Right: crosses the primal bond (i+1, j)-(i+1, j+1).
    if (in_region(i + 1, j) && !at(i + 1, j) && !cfg.occupied(Bond{make_site({i + 1, j}), 1})) {
      at(i + 1, j) = 1;
      queue.push_back({i + 1, j});
    }
    // Down: crosses the primal bond (i, j)-(i+1, j).
    if (in_region(i, j - 1) && !at(i, j - 1) && !cfg.occupied(Bond{make_site({i, j}), 0})) {
      at(i, j - 1) = 1;
      queue.push_back({i, j - 1});
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Renormalization skeleton

namespace {

using i128 = __int128;

std::vector<Bond> horizontal(std::int32_t x0, std::int32_t x1, std::int32_t y) {
  std::vector<Bond> out;
  for (std::int32_t x = x0; x < x1; ++x) out.push_back(Bond{make_site({x, y}), 0});
  return out;
}

std::vector<Bond> vertical(std::int32_t x, std::int32_t y0, std::int32_t y1) {
  std::vector<Bond> out;
  for (std::int32_t y = y0; y < y1; ++y) out.push_back(Bond{make_site({x, y}), 1});
  return out;
}

std::vector<Bond> translate(const std::vector<Bond>& pi, const Site& v) {
  std::vector<Bond> out;
  out.reserve(pi.size());
  for (const Bond& e : pi) out.push_back(Bond{e.base + v, e.axis});
  std::sort(out.begin(), out.end());
  return out;
}

bool bonds_in_cone(const std::vector<Bond>& bonds, const Cone& cone) {
  return std::all_of(bonds.begin(), bonds.end(),
                     [&](const Bond& e) { return in_cone(e.base, cone) && in_cone(e.head(), cone); });
}

// Sites of the cone component that reaches x_1 = far, within x_1 <= far.
// For large `far` this is the infinite component near the apex.
SiteSet far_component(const Cone& cone, std::int32_t far) {
  auto y_range = [&](std::int32_t x) {
    const std::int64_t lo = (std::int64_t{cone.a.num} * x + cone.a.den - 1) / cone.a.den;
    std::int64_t hi;
    if (cone.b) {
      hi = (std::int64_t{cone.b->num} * x) / cone.b->den;
    } else {
      hi = lo + 2 * std::int64_t{far};
    }
    return std::pair<std::int64_t, std::int64_t>{lo, hi};
  };
  auto inside = [&](const Site& s) {
    if (s[0] < 0 || s[0] > far) return false;
    const auto [lo, hi] = y_range(s[0]);
    return s[1] >= lo && s[1] <= hi && in_cone(s, cone);
  };
  SiteSet seen;
  std::deque<Site> queue;
  const auto [lo, hi] = y_range(far);
  for (std::int64_t y = lo; y <= hi; ++y) {
    const Site s = make_site({far, static_cast<std::int32_t>(y)});
    if (inside(s) && seen.insert(s).second) queue.push_back(s);
  }
  while (!queue.empty()) {
    const Site x = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const Site y = neighbor(x, k);
      if (inside(y) && seen.insert(y).second) queue.push_back(y);
    }
  }
  return seen;
}

}  // namespace

std::pair<std::int64_t, std::int64_t> skeleton_ratio(const Rational& r, const Rational& s) {
  if (r.num <= 0 || !(r < s)) throw std::invalid_argument("skeleton_ratio requires 0 < r < s");
  const i128 r1 = r.den, r2 = r.num, s1 = s.den, s2 = s.num;
  for (std::int64_t alpha = 1; alpha <= (1 << 20); ++alpha) {
    // Least beta with beta r1 > alpha s1.
    const i128 beta = (i128{alpha} * s1) / r1 + 1;
    if (beta * r2 < i128{alpha} * s2) return {alpha, static_cast<std::int64_t>(beta)};
  }
  throw std::invalid_argument("no beta/alpha with a small enough denominator");
}

Skeleton renormalization_skeleton(const SkeletonSpec& spec) {
  const Cone cone = make_cone(spec.a, spec.b);
  const Rational r = spec.r;
  const Rational s = spec.s;
  if (r.num <= 0 || s.num <= 0) throw std::invalid_argument("skeleton requires r, s > 0");
  if (!(spec.a < r)) throw std::invalid_argument("skeleton requires a < r");
  if (!(r < s)) throw std::invalid_argument("skeleton requires r < s");
  if (spec.b && !(s < *spec.b)) throw std::invalid_argument("skeleton requires s < b");
  if (spec.alpha < 1 || spec.beta < 1) throw std::invalid_argument("skeleton requires positive alpha, beta");
  if (spec.extent < 1) throw std::invalid_argument("skeleton requires extent >= 1");
  const std::int64_t r1 = r.den, r2 = r.num, s1 = s.den, s2 = s.num;
  if (!(i128{s1} * spec.alpha < i128{spec.beta} * r1 && i128{spec.beta} * r2 < i128{spec.alpha} * s2)) {
    throw std::invalid_argument("skeleton requires s1/r1 < beta/alpha < s2/r2");
  }
  const i128 span = std::max(i128{spec.beta} * r1, i128{spec.alpha} * s2) * (spec.extent + 1);
  if (span + spec.search_bound > (1 << 24)) throw std::invalid_argument("skeleton too large");

  Skeleton sk;
  sk.spec = spec;
  sk.R = make_site({static_cast<std::int32_t>(spec.beta * r1), static_cast<std::int32_t>(spec.beta * r2)});
  sk.S = make_site({static_cast<std::int32_t>(spec.alpha * s1), static_cast<std::int32_t>(spec.alpha * s2)});
  for (const auto& part : {horizontal(0, sk.S[0], 0), vertical(sk.S[0], 0, sk.S[1]), horizontal(sk.S[0], sk.R[0], sk.R[1])}) {
    sk.pi.insert(sk.pi.end(), part.begin(), part.end());
  }
  std::sort(sk.pi.begin(), sk.pi.end());
  sk.pi.erase(std::unique(sk.pi.begin(), sk.pi.end()), sk.pi.end());

  const std::int32_t reach = std::max({sk.S[0], sk.R[0], std::int32_t{1}});
  const auto far = static_cast<std::int32_t>(spec.search_bound + 2 * reach);
  const SiteSet component = far_component(cone, far);
  auto fits = [&](const Site& v) {
    for (const Bond& e : sk.pi) {
      if (!component.contains(e.base + v) || !component.contains(e.head() + v)) return false;
    }
    return true;
  };
  std::optional<Site> base;
  for (std::int32_t x = 0; x <= spec.search_bound && !base; ++x) {
    std::vector<Site> column;
    for (const Site& c : component) {
      if (c[0] == x) column.push_back(c);
    }
    std::sort(column.begin(), column.end());
    for (const Site& c : column) {
      if (fits(c)) {
        base = c;
        break;
      }
    }
  }
  if (!base) throw std::runtime_error("no skeleton base site within the search bound");
  sk.v = *base;

  std::vector<std::vector<Bond>> copies;
  for (int i = 0; i < spec.extent; ++i) {
    for (int j = 0; j < spec.extent; ++j) {
      const Site vij = sk.v + i * sk.R + j * sk.S;
      sk.sites.push_back(vij);
      copies.push_back(translate(sk.pi, vij));
    }
  }
  sk.all_in_cone = std::all_of(copies.begin(), copies.end(), [&](const auto& c) { return bonds_in_cone(c, cone); });
  sk.pairwise_disjoint = true;
  for (std::size_t i = 0; i < copies.size(); ++i) {
    for (std::size_t j = i + 1; j < copies.size(); ++j) {
      ++sk.pairs_checked;
      std::vector<Bond> common;
      std::set_intersection(copies[i].begin(), copies[i].end(), copies[j].begin(), copies[j].end(),
                            std::back_inserter(common));
      if (!common.empty()) sk.pairwise_disjoint = false;
    }
  }
  return sk;
}

double black_site_density(const Skeleton& sk, double p, std::uint64_t trials, std::uint64_t master_seed, int threads) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (trials < 1 || sk.sites.empty()) return 0.0;
  const auto counts = map_trials(trials, threads, [&](std::uint64_t t) -> std::uint64_t {
    const BondConfig cfg = derive_trial_config(master_seed, t, p);
    std::uint64_t black = 0;
    for (const Site& v : sk.sites) {
      bool all_open = true;
      for (const Bond& e : sk.pi) {
        if (!cfg.occupied(Bond{e.base + v, e.axis})) {
          all_open = false;
          break;
        }
      }
      black += all_open;
    }
    return black;
  });
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return static_cast<double>(total) / (static_cast<double>(trials) * static_cast<double>(sk.sites.size()));
}

}  // namespace plaq
