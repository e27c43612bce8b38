#include "plaq/sampler.hpp"

#include <stdexcept>
#include <string>

namespace plaq {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

constexpr std::uint32_t kTrialTag = 0x54000000u;

// Coordinates of dimensions 4 and 5 are packed into 13 bits each.
constexpr std::int32_t kPackedLimit = 1 << 12;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

std::array<std::uint32_t, 4> bond_counter(const Bond& e) {
  const Site& b = e.base;
  // Word 3: axis in bits 0-2, dimension in bits 3-5, coordinates 4 and 5
  // (offset to be nonnegative) in bits 6-18 and 19-31. The dimension field is
  // never zero, which keeps bond counters disjoint from the seed-derivation
  // counters.
  std::uint32_t tail = (static_cast<std::uint32_t>(b.dim) << 3) | static_cast<std::uint32_t>(e.axis);
  for (int i = 3; i < b.dim; ++i) {
    if (b[i] <= -kPackedLimit || b[i] >= kPackedLimit) {
      throw std::out_of_range("coordinate " + std::to_string(b[i]) + " too large for dimension " +
                              std::to_string(b.dim));
    }
    const auto packed = static_cast<std::uint32_t>(b[i] + kPackedLimit) & 0x1FFFu;
    tail |= packed << (i == 3 ? 6 : 19);
  }
  return {static_cast<std::uint32_t>(b[0]), static_cast<std::uint32_t>(b[1]), static_cast<std::uint32_t>(b[2]),
          tail};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

BondConfig::BondConfig(double p, std::uint64_t seed) : p_(p), seed_(seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
}

double BondConfig::uniform(const Bond& e) const {
  if (overrides_) {
    if (auto it = overrides_->find(e); it != overrides_->end()) return it->second ? 0.0 : 1.0;
  }
  const auto out = philox4x32(bond_counter(e), {static_cast<std::uint32_t>(seed_),
                                                static_cast<std::uint32_t>(seed_ >> 32)});
  return to_unit(out[0], out[1]);
}

bool BondConfig::occupied(const Bond& e) const {
  if (overrides_) {
    if (auto it = overrides_->find(e); it != overrides_->end()) return it->second;
  }
  return uniform(e) < p_;
}

BondConfig BondConfig::with_p(double p) const {
  BondConfig c(p, seed_);
  c.overrides_ = overrides_;
  return c;
}

BondConfig BondConfig::with_overrides(std::shared_ptr<const BondOverrides> overrides) const {
  BondConfig c = *this;
  c.overrides_ = std::move(overrides);
  return c;
}

BondStateValue bond_state(const BondConfig& cfg, const Bond& e) {
  return cfg.occupied(e) ? BondStateValue::occupied : BondStateValue::unoccupied;
}

BondStateValue plaquette_state(const BondConfig& cfg, const Plaquette& pi) {
  return bond_state(cfg, dual_bond(pi));
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  const auto out = philox4x32({static_cast<std::uint32_t>(trial_index), static_cast<std::uint32_t>(trial_index >> 32),
                               0, kTrialTag},
                              {static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)});
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

BondConfig derive_trial_config(std::uint64_t master_seed, std::uint64_t trial_index, double p) {
  return BondConfig(p, derive_trial_seed(master_seed, trial_index));
}

BondConfig explicit_config(const std::vector<Bond>& occupied_bonds) {
  auto table = std::make_shared<BondOverrides>();
  for (const auto& e : occupied_bonds) (*table)[e] = true;
  return BondConfig(0.0, 0).with_overrides(std::move(table));
}

}  // namespace plaq
