#pragma once

// Geometry of the hypercubic lattice Z^d: sites, bonds, plaquettes and the
// bond <-> plaquette bijection, plus the orders, norms and cones used by the
// cluster and reachability code.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace plaq {

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 5;

/// A site of Z^d. Coordinates beyond `dim` are always zero.
struct Site {
  std::array<std::int32_t, kMaxDim> c{};
  std::int32_t dim = 0;

  std::int32_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  std::int32_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site&, const Site&) = default;
};

Site origin(int dim);
Site unit(int dim, int axis);
Site make_site(std::initializer_list<std::int32_t> coords);
Site make_site(std::span<const std::int32_t> coords);

Site operator+(Site a, const Site& b);
Site operator-(Site a, const Site& b);
Site operator*(std::int32_t k, Site a);

void check_dim(int dim);

std::int64_t l1_norm(const Site& x);
std::int64_t linf_norm(const Site& x);
/// Coordinate sum s(x).
std::int64_t s_sum(const Site& x);

/// The k-th neighbour in the fixed order: axis ascending, minus before plus.
/// k ranges over [0, 2d).
inline Site neighbor(Site x, int k) {
  x[k / 2] += (k % 2 == 0) ? -1 : 1;
  return x;
}
std::vector<Site> neighbors(const Site& x);

/// y ⪯ x: y lies in the closed coordinate cuboid spanned by 0 and x.
bool precedes(const Site& y, const Site& x);

/// Strict total order used for reproducible listings: ℓ1 norm, then
/// lexicographic.
bool norm_lex_less(const Site& a, const Site& b);

std::string to_string(const Site& x);

struct SiteHash {
  std::size_t operator()(const Site& x) const noexcept;
};

/// Canonical nearest-neighbour bond: joins `base` and `base + unit(axis)`.
struct Bond {
  Site base;
  std::int32_t axis = 0;

  Site head() const {
    Site h = base;
    h[axis] += 1;
    return h;
  }

  friend bool operator==(const Bond&, const Bond&) = default;
  friend auto operator<=>(const Bond&, const Bond&) = default;
};

/// Throws std::invalid_argument unless a and b are nearest neighbours.
Bond bond_between(const Site& a, const Site& b);
bool adjacent(const Site& a, const Site& b);

struct BondHash {
  std::size_t operator()(const Bond& e) const noexcept;
};

/// A plaquette, stored as the unique bond it crosses.
struct Plaquette {
  Bond dual;

  friend bool operator==(const Plaquette&, const Plaquette&) = default;
  friend auto operator<=>(const Plaquette&, const Plaquette&) = default;
};

struct PlaquetteHash {
  std::size_t operator()(const Plaquette& p) const noexcept { return BondHash{}(p.dual); }
};

inline Plaquette dual_plaquette(const Bond& e) { return Plaquette{e}; }
inline Bond dual_bond(const Plaquette& p) { return p.dual; }

/// A point of (½Z)^d held as twice its coordinates, so all arithmetic is exact.
struct HalfPoint {
  std::array<std::int64_t, kMaxDim> twice{};
  std::int32_t dim = 0;

  friend bool operator==(const HalfPoint&, const HalfPoint&) = default;
  friend auto operator<=>(const HalfPoint&, const HalfPoint&) = default;
};

struct HalfPointHash {
  std::size_t operator()(const HalfPoint& x) const noexcept;
};

HalfPoint as_half_point(const Site& x);
/// Midpoint of a bond, which is also the centre of its dual plaquette.
HalfPoint bond_midpoint(const Bond& e);
HalfPoint plaquette_center(const Plaquette& p);
/// The 2^(d-1) corner points of a plaquette, all in (Z+½)^d.
std::vector<HalfPoint> plaquette_corners(const Plaquette& p);

std::int64_t twice_l1_norm(const HalfPoint& x);

/// rad A = max ‖x‖₁ over a nonempty finite set. Throws on an empty set.
double rad_of(std::span<const std::vector<double>> points);
double rad_of(std::span<const HalfPoint> points);
std::int64_t rad_of(std::span<const Site> points);

/// Exact nonnegative-denominator rational.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  friend bool operator==(const Rational&, const Rational&) = default;
};

bool operator<(const Rational& a, const Rational& b);
inline bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
inline bool operator>(const Rational& a, const Rational& b) { return b < a; }
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);

/// Cone K_{a,b}: x_1 >= 0 and a x_1 <= x_j <= b x_1 for j >= 2. An empty
/// upper bound stands for b = +∞.
struct Cone {
  Rational a{0};
  std::optional<Rational> b;
};

Cone make_cone(Rational a, std::optional<Rational> b);
bool in_cone(const Site& x, const Cone& cone);

}  // namespace plaq

template <>
struct std::hash<plaq::Site> : plaq::SiteHash {};
template <>
struct std::hash<plaq::Bond> : plaq::BondHash {};
