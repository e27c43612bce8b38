#include "plaq/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace plaq {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void check_dim(int dim) {
  if (dim < kMinDim || dim > kMaxDim) {
    throw std::invalid_argument("dimension must lie in [" + std::to_string(kMinDim) + ", " +
                                std::to_string(kMaxDim) + "], got " + std::to_string(dim));
  }
}

Site origin(int dim) {
  check_dim(dim);
  Site x;
  x.dim = dim;
  return x;
}

Site unit(int dim, int axis) {
  Site x = origin(dim);
  if (axis < 0 || axis >= dim) throw std::invalid_argument("axis out of range");
  x[axis] = 1;
  return x;
}

Site make_site(std::span<const std::int32_t> coords) {
  Site x = origin(static_cast<int>(coords.size()));
  std::copy(coords.begin(), coords.end(), x.c.begin());
  return x;
}

Site make_site(std::initializer_list<std::int32_t> coords) {
  return make_site(std::span<const std::int32_t>(coords.begin(), coords.size()));
}

Site operator+(Site a, const Site& b) {
  for (int i = 0; i < a.dim; ++i) a[i] += b[i];
  return a;
}

Site operator-(Site a, const Site& b) {
  for (int i = 0; i < a.dim; ++i) a[i] -= b[i];
  return a;
}

Site operator*(std::int32_t k, Site a) {
  for (int i = 0; i < a.dim; ++i) a[i] *= k;
  return a;
}

std::int64_t l1_norm(const Site& x) {
  std::int64_t n = 0;
  for (int i = 0; i < x.dim; ++i) n += std::abs(static_cast<std::int64_t>(x[i]));
  return n;
}

std::int64_t linf_norm(const Site& x) {
  std::int64_t n = 0;
  for (int i = 0; i < x.dim; ++i) n = std::max(n, std::abs(static_cast<std::int64_t>(x[i])));
  return n;
}

std::int64_t s_sum(const Site& x) {
  std::int64_t s = 0;
  for (int i = 0; i < x.dim; ++i) s += x[i];
  return s;
}

std::vector<Site> neighbors(const Site& x) {
  std::vector<Site> out;
  out.reserve(static_cast<std::size_t>(2 * x.dim));
  for (int k = 0; k < 2 * x.dim; ++k) out.push_back(neighbor(x, k));
  return out;
}

bool precedes(const Site& y, const Site& x) {
  for (int i = 0; i < x.dim; ++i) {
    const std::int64_t yi = y[i];
    const std::int64_t xi = x[i];
    if (std::abs(yi) > std::abs(xi) || xi * yi < 0) return false;
  }
  return true;
}

bool norm_lex_less(const Site& a, const Site& b) {
  const auto na = l1_norm(a);
  const auto nb = l1_norm(b);
  if (na != nb) return na < nb;
  return a.c < b.c;
}

std::string to_string(const Site& x) {
  std::string s = "(";
  for (int i = 0; i < x.dim; ++i) {
    if (i) s += ",";
    s += std::to_string(x[i]);
  }
  return s + ")";
}

std::size_t SiteHash::operator()(const Site& x) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(x.dim);
  for (int i = 0; i < x.dim; ++i) {
    h = mix64(h ^ static_cast<std::uint32_t>(x[i]));
  }
  return static_cast<std::size_t>(h);
}

bool adjacent(const Site& a, const Site& b) {
  if (a.dim != b.dim) return false;
  return l1_norm(a - b) == 1;
}

Bond bond_between(const Site& a, const Site& b) {
  if (!adjacent(a, b)) {
    throw std::invalid_argument("sites " + to_string(a) + " and " + to_string(b) +
                                " are not nearest neighbours");
  }
  for (int i = 0; i < a.dim; ++i) {
    if (a[i] != b[i]) return Bond{a[i] < b[i] ? a : b, i};
  }
  throw std::logic_error("unreachable");
}

std::size_t BondHash::operator()(const Bond& e) const noexcept {
  return static_cast<std::size_t>(mix64(SiteHash{}(e.base) ^ (static_cast<std::uint64_t>(e.axis) << 59)));
}

std::size_t HalfPointHash::operator()(const HalfPoint& x) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(x.dim);
  for (int i = 0; i < x.dim; ++i) h = mix64(h ^ static_cast<std::uint64_t>(x.twice[static_cast<std::size_t>(i)]));
  return static_cast<std::size_t>(h);
}

HalfPoint as_half_point(const Site& x) {
  HalfPoint h;
  h.dim = x.dim;
  for (int i = 0; i < x.dim; ++i) h.twice[static_cast<std::size_t>(i)] = 2 * static_cast<std::int64_t>(x[i]);
  return h;
}

HalfPoint bond_midpoint(const Bond& e) {
  HalfPoint h = as_half_point(e.base);
  h.twice[static_cast<std::size_t>(e.axis)] += 1;
  return h;
}

HalfPoint plaquette_center(const Plaquette& p) { return bond_midpoint(p.dual); }

std::vector<HalfPoint> plaquette_corners(const Plaquette& p) {
  const HalfPoint c = plaquette_center(p);
  const int d = c.dim;
  std::vector<int> free_axes;
  for (int i = 0; i < d; ++i) {
    if (i != p.dual.axis) free_axes.push_back(i);
  }
  std::vector<HalfPoint> out;
  out.reserve(std::size_t{1} << free_axes.size());
  for (unsigned mask = 0; mask < (1u << free_axes.size()); ++mask) {
    HalfPoint q = c;
    for (std::size_t j = 0; j < free_axes.size(); ++j) {
      q.twice[static_cast<std::size_t>(free_axes[j])] += (mask >> j) & 1u ? 1 : -1;
    }
    out.push_back(q);
  }
  return out;
}

std::int64_t twice_l1_norm(const HalfPoint& x) {
  std::int64_t n = 0;
  for (int i = 0; i < x.dim; ++i) n += std::abs(x.twice[static_cast<std::size_t>(i)]);
  return n;
}

double rad_of(std::span<const std::vector<double>> points) {
  if (points.empty()) throw std::invalid_argument("rad_of: empty point set");
  double r = 0.0;
  for (const auto& x : points) {
    double n = 0.0;
    for (double v : x) n += std::abs(v);
    r = std::max(r, n);
  }
  return r;
}

double rad_of(std::span<const HalfPoint> points) {
  if (points.empty()) throw std::invalid_argument("rad_of: empty point set");
  std::int64_t r = 0;
  for (const auto& x : points) r = std::max(r, twice_l1_norm(x));
  return static_cast<double>(r) / 2.0;
}

std::int64_t rad_of(std::span<const Site> points) {
  if (points.empty()) throw std::invalid_argument("rad_of: empty point set");
  std::int64_t r = 0;
  for (const auto& x : points) r = std::max(r, l1_norm(x));
  return r;
}

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n, d);
  num = g ? n / g : n;
  den = g ? d / g : d;
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

Rational parse_rational(const std::string& text) {
  auto parse = [&](std::string_view part) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw std::invalid_argument("not a rational number: '" + text + "'");
    }
    return v;
  };
  const std::string_view view(text);
  const auto slash = view.find('/');
  if (slash == std::string_view::npos) return Rational(parse(view));
  return Rational(parse(view.substr(0, slash)), parse(view.substr(slash + 1)));
}

std::string to_string(const Rational& r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

Cone make_cone(Rational a, std::optional<Rational> b) {
  if (a.num < 0) throw std::invalid_argument("cone requires a >= 0");
  if (b && !(a < *b)) throw std::invalid_argument("cone requires a < b");
  return Cone{a, b};
}

bool in_cone(const Site& x, const Cone& cone) {
  const std::int64_t x1 = x[0];
  if (x1 < 0) return false;
  for (int j = 1; j < x.dim; ++j) {
    const __int128 xj = x[j];
    // a x1 <= xj  <=>  a.num * x1 <= xj * a.den
    if (static_cast<__int128>(cone.a.num) * x1 > xj * cone.a.den) return false;
    if (cone.b && xj * cone.b->den > static_cast<__int128>(cone.b->num) * x1) return false;
  }
  return true;
}

}  // namespace plaq
