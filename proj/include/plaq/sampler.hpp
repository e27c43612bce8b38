#pragma once

// Seeded Bernoulli(p) bond configurations of the whole lattice. A bond's state
// is a pure function of (seed, bond): the bond key is run through a
// counter-based generator and the resulting uniform deviate is compared with p.
// Nothing is stored, so a configuration is an "infinite" object that costs
// O(1) memory and is safe to share between threads.

#include <array>
#include <cstdint>
#include <memory>
#include <unordered_map>

#include "plaq/lattice.hpp"

namespace plaq {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

enum class BondStateValue : std::uint8_t { unoccupied = 0, occupied = 1 };

using BondOverrides = std::unordered_map<Bond, bool, BondHash>;

class BondConfig {
 public:
  BondConfig() = default;
  BondConfig(double p, std::uint64_t seed);

  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  /// The 53-bit uniform deviate in [0,1) attached to a bond. A bond is
  /// occupied at density q exactly when uniform(e) < q, so configurations
  /// sharing a seed are monotonically coupled in p.
  double uniform(const Bond& e) const;
  bool occupied(const Bond& e) const;

  /// Same uniforms, different density.
  BondConfig with_p(double p) const;

  /// Fixes the listed bonds; others keep their random state. Overridden
  /// occupied bonds report uniform 0, unoccupied ones report 1, and both
  /// keep their state at every density.
  BondConfig with_overrides(std::shared_ptr<const BondOverrides> overrides) const;

 private:
  double p_ = 0.0;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const BondOverrides> overrides_;
};

BondStateValue bond_state(const BondConfig& cfg, const Bond& e);
BondStateValue plaquette_state(const BondConfig& cfg, const Plaquette& pi);

/// Per-trial configuration; reproducible from (master_seed, trial_index) and
/// independent across indices.
BondConfig derive_trial_config(std::uint64_t master_seed, std::uint64_t trial_index, double p);
std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

/// A configuration in which exactly the given bonds are occupied.
BondConfig explicit_config(const std::vector<Bond>& occupied_bonds);

}  // namespace plaq
