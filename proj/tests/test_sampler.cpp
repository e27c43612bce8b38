#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "plaq/sampler.hpp"

using namespace plaq;

TEST_SUITE("sampler") {
  TEST_CASE("philox4x32-10 known answers") {
    using W = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("a bond's state depends only on seed and bond") {
    const BondConfig a(0.4, 99);
    const BondConfig b(0.4, 99);
    const BondConfig c(0.4, 100);
    int differ = 0;
    for (int x = -20; x <= 20; ++x) {
      const Bond e{make_site({x, 3, -1}), 2};
      CHECK(a.uniform(e) == b.uniform(e));
      differ += a.occupied(e) != c.occupied(e);
    }
    CHECK(differ > 0);
  }

  TEST_CASE("coupling is monotone in p") {
    const BondConfig lo(0.2, 5);
    const BondConfig hi = lo.with_p(0.6);
    for (int x = 0; x < 500; ++x) {
      const Bond e{make_site({x, -x}), x % 2};
      if (lo.occupied(e)) CHECK(hi.occupied(e));
      CHECK(lo.uniform(e) == hi.uniform(e));
    }
  }

  TEST_CASE("p = 0 and p = 1 are deterministic") {
    const BondConfig none(0.0, 3);
    const BondConfig all(1.0, 3);
    for (int x = 0; x < 200; ++x) {
      const Bond e{make_site({x, 0}), 1};
      CHECK_FALSE(none.occupied(e));
      CHECK(all.occupied(e));
    }
    CHECK_THROWS_AS(BondConfig(1.5, 0), std::invalid_argument);
    CHECK_THROWS_AS(BondConfig(-0.1, 0), std::invalid_argument);
  }

  TEST_CASE("bond frequencies match p (chi-square, 9 bins)") {
    const BondConfig cfg(0.3, 12345);
    const int n = 90000;
    std::array<int, 9> bins{};
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      const Bond e{make_site({i % 300, i / 300, 7}), i % 3};
      const double u = cfg.uniform(e);
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      bins[static_cast<std::size_t>(u * 9)]++;
      hits += cfg.occupied(e);
    }
    double chi2 = 0;
    for (int b : bins) chi2 += (b - n / 9.0) * (b - n / 9.0) / (n / 9.0);
    // 8 degrees of freedom; the 0.999 quantile is 26.12.
    CHECK(chi2 < 26.12);
    const double se = std::sqrt(0.3 * 0.7 / n);
    CHECK(std::abs(hits / double(n) - 0.3) < 4 * se);
  }

  TEST_CASE("neighbouring bonds are uncorrelated") {
    const BondConfig cfg(0.5, 77);
    const int n = 40000;
    double sxy = 0, sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
      const Site s = make_site({i, 2 * i});
      const double u = cfg.uniform(Bond{s, 0});
      const double v = cfg.uniform(Bond{s, 1});
      sx += u;
      sy += v;
      sxy += u * v;
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    // Var(U) = 1/12; the standard error of the covariance is about 1/(12 sqrt n).
    CHECK(std::abs(cov) < 5.0 / (12.0 * std::sqrt(double(n))));
  }

  TEST_CASE("axes and dimensions get distinct streams") {
    std::set<double> seen;
    const BondConfig cfg(0.5, 1);
    for (int d = 2; d <= 5; ++d) {
      for (int axis = 0; axis < d; ++axis) seen.insert(cfg.uniform(Bond{origin(d), axis}));
    }
    CHECK(seen.size() == 14);
  }

  TEST_CASE("packed coordinates are range checked") {
    const BondConfig cfg(0.5, 1);
    Site big = origin(5);
    big[4] = 5000;
    CHECK_THROWS_AS((void)cfg.uniform(Bond{big, 0}), std::out_of_range);
    big[4] = 4000;
    CHECK_NOTHROW((void)cfg.uniform(Bond{big, 0}));
  }

  TEST_CASE("trial seeds are distinct and reproducible") {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_trial_seed(42, i));
    CHECK(seeds.size() == 1000);
    CHECK(derive_trial_seed(42, 7) == derive_trial_seed(42, 7));
    CHECK(derive_trial_seed(42, 7) != derive_trial_seed(43, 7));
    CHECK(derive_trial_config(42, 7, 0.25).seed() == derive_trial_seed(42, 7));
  }

  TEST_CASE("explicit configurations hold at every density") {
    const Bond e{make_site({0, 0}), 0};
    const Bond f{make_site({0, 0}), 1};
    const BondConfig cfg = explicit_config({e});
    CHECK(cfg.occupied(e));
    CHECK_FALSE(cfg.occupied(f));
    CHECK(cfg.with_p(1.0).occupied(e));
    CHECK(bond_state(cfg, e) == BondStateValue::occupied);
    CHECK(plaquette_state(cfg, dual_plaquette(f)) == BondStateValue::unoccupied);

    auto table = std::make_shared<BondOverrides>();
    (*table)[f] = false;
    const BondConfig forced = BondConfig(1.0, 3).with_overrides(table);
    CHECK_FALSE(forced.occupied(f));
    CHECK(forced.occupied(e));
  }
}
