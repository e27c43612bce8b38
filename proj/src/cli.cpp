#include "plaq/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "plaq/good_cluster.hpp"
#include "plaq/mc.hpp"
#include "plaq/oriented.hpp"
#include "plaq/saw.hpp"
#include "plaq/sphere.hpp"

namespace plaq {

using Json = nlohmann::ordered_json;

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw std::invalid_argument(key + ": cannot parse '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw std::invalid_argument(key + ": expected true or false, got '" + text + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_number<T>(key, item));
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  const char* key;
  std::function<std::string(const ExperimentSpec&)> get;
  std::function<void(ExperimentSpec&, const std::string&)> set;
};

template <class T>
Field number_field(const char* key, T ExperimentSpec::*member) {
  return {key,
          [member](const ExperimentSpec& s) {
            if constexpr (std::is_same_v<T, double>) {
              return format_double(s.*member);
            } else {
              return std::to_string(s.*member);
            }
          },
          [key, member](ExperimentSpec& s, const std::string& v) { s.*member = parse_number<T>(key, v); }};
}

Field bool_field(const char* key, bool ExperimentSpec::*member) {
  return {key, [member](const ExperimentSpec& s) { return std::string(s.*member ? "true" : "false"); },
          [key, member](ExperimentSpec& s, const std::string& v) { s.*member = parse_bool(key, v); }};
}

Field string_field(const char* key, std::string ExperimentSpec::*member) {
  return {key, [member](const ExperimentSpec& s) { return s.*member; },
          [member](ExperimentSpec& s, const std::string& v) { s.*member = v; }};
}

template <class T>
Field list_field(const char* key, std::vector<T> ExperimentSpec::*member) {
  return {key, [member](const ExperimentSpec& s) { return join(s.*member); },
          [key, member](ExperimentSpec& s, const std::string& v) { s.*member = parse_list<T>(key, v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      string_field("subcommand", &ExperimentSpec::subcommand),
      number_field("dim", &ExperimentSpec::dim),
      number_field("p", &ExperimentSpec::p),
      number_field("seed", &ExperimentSpec::seed),
      number_field("rmax", &ExperimentSpec::rmax),
      number_field("trial", &ExperimentSpec::trial),
      bool_field("sites", &ExperimentSpec::sites),
      number_field("rays", &ExperimentSpec::rays),
      number_field("kmax", &ExperimentSpec::kmax),
      list_field("rlist", &ExperimentSpec::rlist),
      number_field("trials", &ExperimentSpec::trials),
      string_field("target", &ExperimentSpec::target),
      bool_field("bound", &ExperimentSpec::bound),
      string_field("variant", &ExperimentSpec::variant),
      list_field("L", &ExperimentSpec::L),
      number_field("tol", &ExperimentSpec::tol),
      bool_field("cross_check", &ExperimentSpec::cross_check),
      string_field("mode", &ExperimentSpec::mode),
      number_field("nx", &ExperimentSpec::nx),
      number_field("ny", &ExperimentSpec::ny),
      string_field("a", &ExperimentSpec::a),
      string_field("b", &ExperimentSpec::b),
      string_field("r", &ExperimentSpec::r),
      string_field("s", &ExperimentSpec::s),
      number_field("alpha", &ExperimentSpec::alpha),
      number_field("beta", &ExperimentSpec::beta),
      number_field("extent", &ExperimentSpec::extent),
      number_field("threads", &ExperimentSpec::threads),
      bool_field("verify", &ExperimentSpec::verify),
      string_field("output", &ExperimentSpec::output),
      string_field("format", &ExperimentSpec::format),
      string_field("emit_off", &ExperimentSpec::emit_off),
  };
  return table;
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json spec_json(const ExperimentSpec& spec) {
  Json j = Json::object();
  for (const auto& f : fields()) j[f.key] = f.get(spec);
  return j;
}

Json cell_json(const ResultCell& c) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else {
          return v;
        }
      },
      c);
}

std::string cell_csv(const ResultCell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return {};
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          return q + "\"";
        } else {
          return std::to_string(v);
        }
      },
      c);
}

Json site_json(const Site& x) {
  Json j = Json::array();
  for (int i = 0; i < x.dim; ++i) j.push_back(x[i]);
  return j;
}

void write_report(const ExperimentSpec& spec, const Json& result, bool one_line, std::ostream& out) {
  Json doc;
  doc["engine"] = kEngineVersion;
  doc["spec"] = spec_json(spec);
  doc["timestamp"] = timestamp_utc();
  doc["result"] = result;
  out << (one_line ? doc.dump() : doc.dump(2)) << '\n';
}

void check(bool ok, const std::string& what, std::vector<std::string>& failures) {
  if (!ok) failures.push_back(what);
}

void validate_common(const ExperimentSpec& spec) {
  if (spec.dim < kMinDim || spec.dim > kMaxDim) throw std::invalid_argument("dim must lie in [2, 5]");
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (spec.threads < 0) throw std::invalid_argument("threads must be >= 0");
  if (spec.rays < 0) throw std::invalid_argument("rays must be >= 0");
  static const std::vector<std::string> formats{"auto", "csv", "jsonl", "off"};
  if (std::find(formats.begin(), formats.end(), spec.format) == formats.end()) {
    throw std::invalid_argument("format must be one of auto|csv|jsonl|off");
  }
}

bool table_subcommand(const std::string& sub) { return sub == "saw" || sub == "tail" || sub == "critical"; }

std::string resolve_format(const ExperimentSpec& spec) {
  if (table_subcommand(spec.subcommand)) {
    if (spec.format == "off") throw std::invalid_argument("off output applies to sphere only");
    return spec.format == "auto" ? "csv" : spec.format;
  }
  if (spec.format == "csv") throw std::invalid_argument("csv output applies to saw, tail and critical");
  if (spec.format == "off" && spec.subcommand != "sphere") throw std::invalid_argument("off output applies to sphere only");
  return spec.format == "auto" ? "json" : spec.format;
}

// ---------------------------------------------------------------------------
// Subcommands. Each writes its results and returns the failed --verify checks.

std::vector<std::string> cmd_saw(const ExperimentSpec& spec, const std::string& format, std::ostream& out) {
  if (spec.kmax < 1) throw std::invalid_argument("kmax must be >= 1");
  if (spec.kmax > saw_length_cap(spec.dim)) {
    throw std::invalid_argument("kmax must be <= " + std::to_string(saw_length_cap(spec.dim)) + " for dim " +
                                std::to_string(spec.dim));
  }
  ResultTable t;
  t.columns = {"k", "sigma", "sigma_bound", "mu_upper"};
  std::vector<std::string> failures;
  SawOptions opts;
  opts.threads = spec.threads;
  for (int k = 1; k <= spec.kmax; ++k) {
    const BigInt sigma = count_saw(spec.dim, k, opts).count;
    const BigInt bound = saw_upper_bound(spec.dim, k);
    t.rows.push_back({std::int64_t{k}, sigma.convert_to<std::uint64_t>(), bound.convert_to<std::uint64_t>(),
                      mu_from_count(sigma, k)});
    check(sigma <= bound, "sigma(" + std::to_string(k) + ") exceeds the non-reversing bound", failures);
  }
  write_results(spec, t, format, out);
  return failures;
}

ClusterResult grow_for(const ExperimentSpec& spec) {
  if (spec.rmax < 1) throw std::invalid_argument("rmax must be >= 1");
  return grow_good_cluster(derive_trial_config(spec.seed, spec.trial, spec.p), spec.dim, spec.rmax);
}

std::vector<std::string> cmd_cluster(const ExperimentSpec& spec, const std::string& format, std::ostream& out) {
  const ClusterResult res = grow_for(spec);
  Json j;
  j["d"] = spec.dim;
  j["p"] = spec.p;
  j["trial"] = spec.trial;
  j["r_max"] = res.r_max;
  j["sites_count"] = res.sites.size();
  j["radius"] = res.radius;
  j["escaped"] = res.escaped;
  const bool closed = check_downward_closed(res);
  j["downward_closed"] = closed;
  if (spec.sites) {
    Json list = Json::array();
    for (const Site& x : res.sites) list.push_back(site_json(x));
    j["sites"] = list;
  }
  write_report(spec, j, format == "jsonl", out);
  std::vector<std::string> failures;
  check(closed, "cluster is not downward closed", failures);
  return failures;
}

std::vector<std::string> cmd_sphere(const ExperimentSpec& spec, const std::string& format, std::ostream& out) {
  if (!spec.emit_off.empty() && spec.dim != 3) throw std::invalid_argument("emit-off requires dim 3");
  if (format == "off" && spec.dim != 3) throw std::invalid_argument("off output requires dim 3");
  const BondConfig cfg = derive_trial_config(spec.seed, spec.trial, spec.p);
  const ClusterResult res = grow_for(spec);
  std::vector<std::string> failures;
  Json j;
  j["d"] = spec.dim;
  j["p"] = spec.p;
  j["trial"] = spec.trial;
  j["r_max"] = res.r_max;
  j["escaped"] = res.escaped;
  j["cluster_sites"] = res.sites.size();
  if (res.escaped) {
    if (format == "off") throw std::invalid_argument("cluster escaped; no complex to export");
    write_report(spec, j, format == "jsonl", out);
    failures.push_back("cluster reached r_max; no sphere was built");
    return failures;
  }
  const SphereAnalysis a = analyze_sphere(res, cfg, spec.rays, derive_trial_seed(spec.seed, spec.trial));
  const TopologyReport& rep = a.report;
  if (format == "off") {
    write_off(a.complex, out);
  } else {
    j["plaquettes"] = a.complex.size();
    j["cell_counts"] = rep.cell_counts;
    if (spec.dim <= 3) {
      j["V"] = rep.n_vertices();
      j["E"] = rep.n_edges();
      if (spec.dim == 3) j["F"] = rep.n_faces();
    }
    j["euler_characteristic"] = rep.euler_characteristic;
    j["euler_from_corners"] = rep.euler_from_corners ? Json(*rep.euler_from_corners) : Json(nullptr);
    j["ridges_ok"] = rep.ridges_ok;
    j["vertex_links_ok"] = rep.vertex_links_ok;
    j["is_closed_manifold"] = rep.is_closed_manifold;
    j["is_connected"] = rep.is_connected;
    j["origin_inside"] = rep.origin_inside ? Json(*rep.origin_inside) : Json(nullptr);
    j["all_unoccupied"] = rep.all_unoccupied ? Json(*rep.all_unoccupied) : Json(nullptr);
    j["star_shaped_ray_checks_passed"] =
        rep.star_shaped_ray_checks_passed ? Json(*rep.star_shaped_ray_checks_passed) : Json(nullptr);
    j["rays"] = spec.rays;
    j["cluster_radius"] = a.cluster_radius;
    j["sphere_radius"] = a.radius;
    j["verdict_sphere"] = to_string(rep.verdict_sphere);
    write_report(spec, j, format == "jsonl", out);
  }
  if (!spec.emit_off.empty()) {
    std::ofstream off(spec.emit_off);
    if (!off) throw std::runtime_error("cannot open " + spec.emit_off);
    write_off(a.complex, off);
  }
  check(rep.verdict_sphere != SphereVerdict::failed, "sphere checks failed", failures);
  check(a.radius <= static_cast<double>(a.cluster_radius) + 1.5, "rad[S] exceeds rad K + 3/2", failures);
  return failures;
}

std::vector<std::string> cmd_tail(const ExperimentSpec& spec, const std::string& format, std::ostream& out) {
  const TailTarget target = parse_tail_target(spec.target);
  if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (spec.rlist.empty()) throw std::invalid_argument("rlist must not be empty");
  for (int r : spec.rlist) {
    if (r < 0) throw std::invalid_argument("rlist entries must be >= 0");
  }
  std::optional<BoundCurve> bound;
  if (spec.bound) bound = theoretical_bound(spec.p, spec.dim, spec.rlist);
  TailOptions opts;
  opts.r_max = spec.rmax;
  opts.threads = spec.threads;
  const TailCurve t = tail_curve(spec.p, spec.dim, spec.rlist, spec.trials, spec.seed, target, opts);
  ResultTable table;
  table.columns = {"r", "hits", "trials", "estimate", "wilson_lo", "wilson_hi", "bound"};
  for (std::size_t i = 0; i < t.r_values.size(); ++i) {
    table.rows.push_back({std::int64_t{t.r_values[i]}, t.hits[i], t.trials, t.estimate[i], t.wilson_lo[i],
                          t.wilson_hi[i], bound ? ResultCell{bound->values[i]} : ResultCell{}});
  }
  table.notes = {{"r_max", std::to_string(t.r_max)}, {"escaped", std::to_string(t.escaped)}};
  std::vector<std::string> failures;
  if (bound) {
    const auto v = compare_tail(t, *bound);
    table.notes.emplace_back("bound_violations", join(v));
    check(v.empty(), "tail exceeds the explicit bound at r = " + join(v), failures);
  } else if (!explicit_bound_regime(spec.p, spec.dim)) {
    // No explicit constant here: compare only the decay rate with mu_hat p.
    const double mu_hat = mu_upper_estimate(spec.dim, saw_length_cap(spec.dim));
    const auto slope = fit_log_slope(t);
    table.notes.emplace_back("mu_hat", format_double(mu_hat));
    table.notes.emplace_back("log_slope", slope ? format_double(*slope) : "");
    if (slope) {
      const bool ok = slope_consistent(t, mu_hat);
      table.notes.emplace_back("slope_consistent", ok ? "true" : "false");
      if (spec.p * mu_hat * mu_hat < 1.0) check(ok, "tail decays slower than (mu_hat p)^r", failures);
    }
  }
  write_results(spec, table, format, out);
  for (std::size_t i = 0; i < t.r_values.size(); ++i) {
    check(t.wilson_lo[i] <= t.estimate[i] && t.estimate[i] <= t.wilson_hi[i], "Wilson interval misordered", failures);
  }
  return failures;
}

std::vector<std::string> cmd_critical(const ExperimentSpec& spec, const std::string& format, std::ostream& out) {
  const Variant v = parse_variant(spec.variant);
  CriticalOptions opts;
  opts.threads = spec.threads;
  opts.cross_check = spec.cross_check;
  const CriticalEstimate est = estimate_critical(v, spec.dim, spec.L, spec.trials, spec.tol, spec.seed, opts);
  ResultTable table;
  table.columns = {"L", "p_hat", "ci_lo", "ci_hi"};
  for (std::size_t i = 0; i < est.L_list.size(); ++i) {
    table.rows.push_back({est.L_list[i], est.p_hat[i], est.ci_lo[i], est.ci_hi[i]});
  }
  if (spec.cross_check) table.notes.emplace_back("non_monotone", est.non_monotone ? "true" : "false");
  write_results(spec, table, format, out);
  std::vector<std::string> failures;
  check(!est.non_monotone, "direct search disagrees with the threshold route", failures);
  for (std::size_t i = 0; i < est.L_list.size(); ++i) {
    check(est.p_hat[i] >= 0.0 && est.p_hat[i] <= 1.0 && est.bracket_width[i] <= spec.tol,
          "bisection did not converge for L = " + std::to_string(est.L_list[i]), failures);
  }
  return failures;
}

std::vector<std::string> cmd_dual2d(const ExperimentSpec& spec, const std::string& format, std::ostream& out) {
  if (spec.dim != 2) throw std::invalid_argument("dual2d requires dim 2");
  const DualWindow w = make_dual_window(spec.nx, spec.ny);
  DualityReport rep;
  if (spec.mode == "exhaustive") {
    rep = dual2d_exhaustive(w);
  } else if (spec.mode == "mc") {
    if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
    rep = dual2d_monte_carlo(w, spec.p, spec.trials, spec.seed, spec.threads);
  } else {
    throw std::invalid_argument("mode must be exhaustive or mc");
  }
  Json j;
  j["mode"] = spec.mode;
  j["nx"] = w.nx;
  j["ny"] = w.ny;
  j["random_bonds"] = w.random_bonds.size();
  j["wall_bonds"] = w.wall_bonds.size();
  j["configs"] = rep.configs;
  j["escapes"] = rep.escapes;
  j["blockings"] = rep.blockings;
  j["both"] = rep.both;
  j["neither"] = rep.neither;
  j["exact"] = rep.exact();
  write_report(spec, j, format == "jsonl", out);
  std::vector<std::string> failures;
  check(rep.exact(), "escape and blocking are not complementary on this window", failures);
  return failures;
}

std::vector<std::string> cmd_skeleton(const ExperimentSpec& spec, const std::string& format, std::ostream& out) {
  SkeletonSpec sk;
  sk.a = parse_rational(spec.a);
  if (spec.b != "inf") sk.b = parse_rational(spec.b);
  sk.r = parse_rational(spec.r);
  sk.s = parse_rational(spec.s);
  if ((spec.alpha == 0) != (spec.beta == 0)) throw std::invalid_argument("give both alpha and beta, or neither");
  if (spec.alpha == 0) {
    std::tie(sk.alpha, sk.beta) = skeleton_ratio(sk.r, sk.s);
  } else {
    sk.alpha = spec.alpha;
    sk.beta = spec.beta;
  }
  sk.extent = spec.extent;
  const Skeleton result = renormalization_skeleton(sk);
  Json j;
  j["alpha"] = sk.alpha;
  j["beta"] = sk.beta;
  j["v"] = site_json(result.v);
  j["R"] = site_json(result.R);
  j["S"] = site_json(result.S);
  j["N"] = result.pi.size();
  Json pi = Json::array();
  for (const Bond& e : result.pi) pi.push_back({e.base[0], e.base[1], e.axis});
  j["pi"] = pi;
  j["extent"] = sk.extent;
  j["sites"] = result.sites.size();
  j["all_in_cone"] = result.all_in_cone;
  j["pairwise_disjoint"] = result.pairwise_disjoint;
  j["pairs_checked"] = result.pairs_checked;
  if (spec.trials > 0) {
    j["black_density"] = black_site_density(result, spec.p, spec.trials, spec.seed, spec.threads);
    j["p_to_N"] = std::pow(spec.p, static_cast<double>(result.pi.size()));
  }
  write_report(spec, j, format == "jsonl", out);
  std::vector<std::string> failures;
  check(result.all_in_cone, "a translate of pi leaves the cone", failures);
  check(result.pairwise_disjoint, "translates of pi share a bond", failures);
  return failures;
}

std::unique_ptr<CLI::App> make_app(ExperimentSpec& spec, std::string& config_path) {
  auto app = std::make_unique<CLI::App>("Plaquette percolation: good clusters, enclosing spheres, tails, duality",
                                        "plaq");
  app->require_subcommand(1);
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value file; command-line flags override it");
    sub->add_option("--seed", spec.seed, "master seed (default: $PLAQ_SEED or 1)");
    sub->add_option("--threads", spec.threads, "worker threads (0: available parallelism)");
    sub->add_flag("--verify", spec.verify, "exit nonzero when an invariant check fails");
    sub->add_option("--output", spec.output, "result file (default: stdout)");
    sub->add_option("--format", spec.format, "auto|csv|jsonl|off");
  };
  auto* saw = app->add_subcommand("saw", "self-avoiding walk counts");
  saw->add_option("--dim", spec.dim);
  saw->add_option("--kmax", spec.kmax);
  common(saw);

  auto cluster_flags = [&](CLI::App* sub) {
    sub->add_option("--dim", spec.dim);
    sub->add_option("--p", spec.p);
    sub->add_option("--rmax", spec.rmax, "growth cutoff in l1 norm");
    sub->add_option("--trial", spec.trial, "trial index under the master seed");
  };
  auto* cluster = app->add_subcommand("cluster", "grow one good cluster");
  cluster_flags(cluster);
  cluster->add_flag("--sites", spec.sites, "include the site list");
  common(cluster);

  auto* sphere = app->add_subcommand("sphere", "build and check the enclosing sphere of one cluster");
  cluster_flags(sphere);
  sphere->add_option("--rays", spec.rays, "star-shape probe rays");
  sphere->add_option("--emit-off", spec.emit_off, "write the d=3 complex as an OFF mesh");
  common(sphere);

  auto* tail = app->add_subcommand("tail", "radius tail curve");
  tail->add_option("--dim", spec.dim);
  tail->add_option("--p", spec.p);
  tail->add_option("--rlist", spec.rlist)->delimiter(',');
  tail->add_option("--trials", spec.trials);
  tail->add_option("--target", spec.target, "cluster|sphere");
  tail->add_option("--rmax", spec.rmax, "growth cutoff (0: 4 x max r)");
  tail->add_flag("--bound", spec.bound, "add the explicit bound column");
  common(tail);

  auto* critical = app->add_subcommand("critical", "pseudo-critical points");
  critical->add_option("--variant", spec.variant, "good|adm|admH|admK|oriented");
  critical->add_option("--dim", spec.dim);
  critical->add_option("--L", spec.L)->delimiter(',');
  critical->add_option("--trials", spec.trials);
  critical->add_option("--tol", spec.tol);
  critical->add_flag("--cross-check", spec.cross_check, "recheck bracket ends by direct search");
  common(critical);

  auto* dual = app->add_subcommand("dual2d", "planar escape/blocking duality on a window");
  dual->add_option("--dim", spec.dim);
  dual->add_option("--mode", spec.mode, "exhaustive|mc");
  dual->add_option("--nx", spec.nx);
  dual->add_option("--ny", spec.ny);
  dual->add_option("--p", spec.p);
  dual->add_option("--trials", spec.trials);
  common(dual);

  auto* skeleton = app->add_subcommand("skeleton", "renormalization skeleton in a planar cone");
  skeleton->add_option("--a", spec.a);
  skeleton->add_option("--b", spec.b, "rational or inf");
  skeleton->add_option("--r", spec.r);
  skeleton->add_option("--s", spec.s);
  skeleton->add_option("--alpha", spec.alpha, "0: smallest valid");
  skeleton->add_option("--beta", spec.beta, "0: smallest valid");
  skeleton->add_option("--extent", spec.extent);
  skeleton->add_option("--p", spec.p, "density for the black-site estimate");
  skeleton->add_option("--trials", spec.trials, "trials for the black-site estimate (0: skip)");
  common(skeleton);
  return app;
}

ExperimentSpec env_defaults() {
  ExperimentSpec spec;
  if (const char* env = std::getenv("PLAQ_SEED"); env && *env) spec.seed = parse_number<std::uint64_t>("PLAQ_SEED", env);
  return spec;
}

std::vector<std::string> dispatch(const ExperimentSpec& spec, std::ostream& out) {
  validate_common(spec);
  const std::string format = resolve_format(spec);
  const std::string& sub = spec.subcommand;
  if (sub == "saw") return cmd_saw(spec, format, out);
  if (sub == "cluster") return cmd_cluster(spec, format, out);
  if (sub == "sphere") return cmd_sphere(spec, format, out);
  if (sub == "tail") return cmd_tail(spec, format, out);
  if (sub == "critical") return cmd_critical(spec, format, out);
  if (sub == "dual2d") return cmd_dual2d(spec, format, out);
  if (sub == "skeleton") return cmd_skeleton(spec, format, out);
  throw std::invalid_argument("unknown subcommand '" + sub + "'");
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string to_config(const ExperimentSpec& spec) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + "=" + f.get(spec) + "\n";
  return out;
}

ExperimentSpec parse_config(const std::string& text, ExperimentSpec base) {
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key == f.key; });
    if (it == table.end()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->set(base, value);
  }
  return base;
}

void write_results(const ExperimentSpec& spec, const ResultTable& table, const std::string& format,
                   std::ostream& out) {
  if (format == "jsonl") {
    Json header;
    header["engine"] = kEngineVersion;
    header["spec"] = spec_json(spec);
    for (const auto& [k, v] : table.notes) header[k] = v;
    header["columns"] = table.columns;
    out << header.dump() << '\n';
    Json ts;
    ts["timestamp"] = timestamp_utc();
    out << ts.dump() << '\n';
    for (const auto& row : table.rows) {
      Json j = Json::object();
      for (std::size_t i = 0; i < table.columns.size(); ++i) j[table.columns[i]] = cell_json(row[i]);
      out << j.dump() << '\n';
    }
    return;
  }
  if (format != "csv") throw std::invalid_argument("tables are written as csv or jsonl");
  out << "# engine: " << kEngineVersion << '\n';
  std::stringstream cfg(to_config(spec));
  for (std::string line; std::getline(cfg, line);) out << "# spec: " << line << '\n';
  for (const auto& [k, v] : table.notes) out << "# " << k << ": " << v << '\n';
  out << "# timestamp: " << timestamp_utc() << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_csv(row[i]);
    out << '\n';
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  try {
    spec = env_defaults();
    std::string config_path;
    auto app = make_app(spec, config_path);
    try {
      app->parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app->exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
    const std::string sub = app->get_subcommands().front()->get_name();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot read config file " + config_path);
      std::stringstream text;
      text << in.rdbuf();
      spec = parse_config(text.str(), env_defaults());
      std::string ignored;
      auto again = make_app(spec, ignored);
      again->parse(argc, argv);
    }
    spec.subcommand = sub;

    std::ofstream file;
    std::ostream* sink = &out;
    if (!spec.output.empty()) {
      file.open(spec.output);
      if (!file) throw std::runtime_error("cannot open output file " + spec.output);
      sink = &file;
    }
    const auto failures = dispatch(spec, *sink);
    if (spec.verify && !failures.empty()) {
      for (const auto& f : failures) err << "verify: " << f << '\n';
      return 1;
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace plaq
