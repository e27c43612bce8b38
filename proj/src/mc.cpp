#include "plaq/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "plaq/good_cluster.hpp"
#include "plaq/parallel.hpp"
#include "plaq/sampler.hpp"
#include "plaq/sphere.hpp"

namespace plaq {

namespace {

constexpr std::int64_t kEscaped = std::numeric_limits<std::int64_t>::max();

}  // namespace

Interval wilson_interval(std::uint64_t hits, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  if (hits > n) throw std::invalid_argument("wilson_interval: hits exceed trials");
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
  // Pin the interval to the estimate at the extremes, where rounding could
  // otherwise leave it a few ulps inside.
  double lo = hits == 0 ? 0.0 : std::max(0.0, center - half);
  double hi = hits == n ? 1.0 : std::min(1.0, center + half);
  lo = std::min(lo, phat);
  hi = std::max(hi, phat);
  return {lo, hi};
}

std::string to_string(TailTarget t) { return t == TailTarget::cluster_radius ? "cluster" : "sphere"; }

TailTarget parse_tail_target(const std::string& s) {
  if (s == "cluster") return TailTarget::cluster_radius;
  if (s == "sphere") return TailTarget::sphere_radius;
  throw std::invalid_argument("target must be 'cluster' or 'sphere', got '" + s + "'");
}

std::vector<std::int64_t> tail_radii_twice(double p, int d, std::uint64_t trials, std::uint64_t master_seed,
                                           TailTarget target, std::int64_t r_max, int threads) {
  check_dim(d);
  return map_trials(trials, threads, [&](std::uint64_t i) -> std::int64_t {
    const BondConfig cfg = derive_trial_config(master_seed, i, p);
    const ClusterResult res = grow_good_cluster(cfg, d, r_max);
    if (res.escaped) return kEscaped;
    if (target == TailTarget::cluster_radius) return 2 * res.radius;
    return sphere_radius_twice(build_boundary(res));
  });
}

TailCurve make_tail_curve(double p, int d, TailTarget target, const std::vector<int>& r_values, std::int64_t r_max,
                          const std::vector<std::int64_t>& radii_twice) {
  TailCurve t;
  t.p = p;
  t.d = d;
  t.target = target;
  t.r_values = r_values;
  t.r_max = r_max;
  t.trials = radii_twice.size();
  t.escaped = static_cast<std::uint64_t>(std::count(radii_twice.begin(), radii_twice.end(), kEscaped));
  for (int r : r_values) {
    const auto hits = static_cast<std::uint64_t>(
        std::count_if(radii_twice.begin(), radii_twice.end(), [&](std::int64_t x) { return x >= 2 * std::int64_t{r}; }));
    const auto ci = wilson_interval(hits, t.trials);
    t.hits.push_back(hits);
    t.estimate.push_back(t.trials ? static_cast<double>(hits) / static_cast<double>(t.trials) : 0.0);
    t.wilson_lo.push_back(ci.lo);
    t.wilson_hi.push_back(ci.hi);
  }
  return t;
}

TailCurve tail_curve(double p, int d, const std::vector<int>& r_values, std::uint64_t trials,
                     std::uint64_t master_seed, TailTarget target, const TailOptions& opts) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (trials < 1) throw std::invalid_argument("tail_curve needs at least one trial");
  if (r_values.empty()) throw std::invalid_argument("tail_curve needs at least one radius");
  const int r_top = *std::max_element(r_values.begin(), r_values.end());
  const std::int64_t r_max = opts.r_max > 0 ? opts.r_max : std::max<std::int64_t>(4 * std::int64_t{r_top}, 1);
  if (r_max <= r_top) throw std::invalid_argument("r_max must exceed the largest requested radius");
  const auto radii = tail_radii_twice(p, d, trials, master_seed, target, r_max, opts.threads);
  return make_tail_curve(p, d, target, r_values, r_max, radii);
}

bool explicit_bound_regime(double p, int d) {
  const double m = 2.0 * d - 1.0;
  return p >= 0.0 && p * m * m < 1.0;
}

BoundCurve theoretical_bound(double p, int d, const std::vector<int>& r_values) {
  check_dim(d);
  if (!explicit_bound_regime(p, d)) {
    throw std::domain_error("explicit bound requires p < (2d-1)^-2 = 1/" + std::to_string((2 * d - 1) * (2 * d - 1)));
  }
  const double m = 2.0 * d - 1.0;
  BoundCurve b;
  b.p = p;
  b.d = d;
  b.alpha = p * m;
  b.c_prime = 2.0 / (1.0 - p * m * m);
  b.r_values = r_values;
  for (int r : r_values) b.values.push_back(r == 0 ? b.c_prime : b.c_prime * std::pow(b.alpha, r));
  return b;
}

std::vector<int> compare_tail(const TailCurve& t, const BoundCurve& b) {
  if (t.p != b.p || t.d != b.d || t.r_values != b.r_values) {
    throw std::invalid_argument("tail and bound curves have different parameters");
  }
  std::vector<int> violations;
  for (std::size_t i = 0; i < t.r_values.size(); ++i) {
    if (t.wilson_lo[i] > b.values[i]) violations.push_back(t.r_values[i]);
  }
  return violations;
}

TailCurve entanglement_radius_tail(double p, const std::vector<int>& r_values, std::uint64_t trials,
                                   std::uint64_t master_seed, const TailOptions& opts) {
  return tail_curve(p, 3, r_values, trials, master_seed, TailTarget::sphere_radius, opts);
}

std::optional<double> fit_log_slope(const TailCurve& t) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.r_values.size(); ++i) {
    if (t.estimate[i] <= 0.0) continue;
    const double x = t.r_values[i];
    const double y = std::log(t.estimate[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

bool slope_consistent(const TailCurve& t, double mu_hat, double slack) {
  const auto slope = fit_log_slope(t);
  if (!slope) return false;
  return *slope <= std::log(mu_hat * t.p) + slack;
}

}  // namespace plaq
