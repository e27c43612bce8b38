#pragma once

// Monte Carlo tail estimates for the cluster radius rad K and the sphere
// radius rad[S], the explicit exponential bound they are compared with, and
// binomial confidence intervals.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace plaq {

/// Two-sided 99% standard normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for hits successes in n trials.
Interval wilson_interval(std::uint64_t hits, std::uint64_t n, double z = kZ99);

enum class TailTarget { cluster_radius, sphere_radius };
std::string to_string(TailTarget t);
TailTarget parse_tail_target(const std::string& s);

struct TailCurve {
  double p = 0.0;
  int d = 0;
  TailTarget target = TailTarget::cluster_radius;
  std::vector<int> r_values;
  std::uint64_t trials = 0;
  std::int64_t r_max = 0;
  /// Trials whose growth hit r_max; they count toward every tail event.
  std::uint64_t escaped = 0;
  std::vector<std::uint64_t> hits;
  std::vector<double> estimate;
  std::vector<double> wilson_lo;
  std::vector<double> wilson_hi;
};

struct BoundCurve {
  double p = 0.0;
  int d = 0;
  double alpha = 0.0;
  double c_prime = 0.0;
  std::vector<int> r_values;
  std::vector<double> values;
};

struct TailOptions {
  /// Growth cutoff; 0 means 4 x max(r_values).
  std::int64_t r_max = 0;
  /// 0 means available parallelism.
  int threads = 0;
};

/// Per-trial radius in doubled units (exact for rad[S]); escaped trials are
/// reported as INT64_MAX.
std::vector<std::int64_t> tail_radii_twice(double p, int d, std::uint64_t trials, std::uint64_t master_seed,
                                           TailTarget target, std::int64_t r_max, int threads);

TailCurve tail_curve(double p, int d, const std::vector<int>& r_values, std::uint64_t trials,
                     std::uint64_t master_seed, TailTarget target, const TailOptions& opts = {});

/// Aggregates precomputed radii into a curve.
TailCurve make_tail_curve(double p, int d, TailTarget target, const std::vector<int>& r_values, std::int64_t r_max,
                          const std::vector<std::int64_t>& radii_twice);

/// True when p < (2d-1)^-2, the regime with explicit constants.
bool explicit_bound_regime(double p, int d);

/// α = p(2d-1), C' = 2 / (1 - p(2d-1)^2), values[r] = C' α^r. Throws
/// std::domain_error outside the explicit regime.
BoundCurve theoretical_bound(double p, int d, const std::vector<int>& r_values);

/// The r at which wilson_lo exceeds the bound.
std::vector<int> compare_tail(const TailCurve& t, const BoundCurve& b);

/// rad[S] tail at d = 3; a stochastic upper bound for the radius of the
/// 1-entanglement cluster at the origin.
TailCurve entanglement_radius_tail(double p, const std::vector<int>& r_values, std::uint64_t trials,
                                   std::uint64_t master_seed, const TailOptions& opts = {});

/// Least-squares slope of log(estimate) against r over the points with a
/// nonzero estimate; nullopt with fewer than two such points.
std::optional<double> fit_log_slope(const TailCurve& t);

/// Slope-only consistency outside the explicit regime: fitted slope <=
/// log(mu_hat p) + slack.
bool slope_consistent(const TailCurve& t, double mu_hat, double slack = 0.05);

}  // namespace plaq
