#pragma once

// Exact self-avoiding walk counts σ(k) on Z^d and the finite-k bounds on the
// connective constant μ_d that follow from them.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>

#include "plaq/lattice.hpp"

namespace plaq {

using BigInt = boost::multiprecision::cpp_int;

struct SawCount {
  int d = 0;
  int k = 0;
  BigInt count;
};

/// Default enumeration cap: 16 steps in d=2, 12 in d=3, 8 beyond.
int saw_length_cap(int d);

struct SawOptions {
  /// Overrides saw_length_cap when positive.
  int k_cap = 0;
  /// Enumerate only walks whose first step is +e_1 and multiply by 2d.
  bool fold_first_step = false;
  /// Worker threads over first-step subtrees (0 = hardware concurrency).
  int threads = 1;
};

/// σ(k) by depth-first enumeration. Throws std::out_of_range past the cap.
SawCount count_saw(int d, int k, const SawOptions& opts = {});

/// 2d (2d-1)^(k-1), the number of non-reversing walks of length k.
BigInt saw_upper_bound(int d, int k);

/// σ(k)^(1/k), an upper bound on μ_d by submultiplicativity.
double mu_upper_estimate(int d, int k, const SawOptions& opts = {});

/// σ^(1/k) for a known count.
double mu_from_count(const BigInt& sigma, int k);

/// Visits every self-avoiding walk from the origin with 1..k_max steps.
/// The callback sees the walk as a site sequence starting at the origin;
/// returning false prunes every extension of that walk.
void for_each_saw(int d, int k_max, const std::function<bool(std::span<const Site>)>& visit);

}  // namespace plaq
