// grushin: distances, verification suites, cube decompositions and embedding checks for
// Grushin-type metrics ds / d_E(., Y)^beta.
//
// Exit codes: 0 pass, 1 certified violation, 2 usage or spec error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "grushin/analysis.hpp"
#include "grushin/embeddings.hpp"
#include "grushin/io.hpp"
#include "grushin/whitney.hpp"

using namespace grushin;
using nlohmann::json;

namespace {

struct Common {
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> resolution;
  std::string out;
};

struct Outcome {
  json report;
  int code = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Point parse_point(const std::string& text, std::size_t dim, const char* flag) {
  std::vector<double> c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v))
      throw UsageError(std::string(flag) + ": '" + text + "' is not a list of numbers");
    c.push_back(v);
  }
  if (c.size() != dim)
    throw UsageError(std::string(flag) + ": expected " + std::to_string(dim) + " coordinates");
  Point p(dim);
  for (std::size_t i = 0; i < dim; ++i) p[i] = c[i];
  return p;
}

unsigned threads_from_env() {
  const char* v = std::getenv("GRUSHIN_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw UsageError("GRUSHIN_THREADS must be a positive integer");
  return static_cast<unsigned>(n);
}

class Session {
 public:
  explicit Session(const Common& c) : c_(c) {
    if (!c.spec_path.empty()) spec_ = load_spec(c.spec_path);
  }

  const SpaceSpec& spec() const {
    if (!spec_) throw UsageError("--spec is required");
    return *spec_;
  }
  std::uint64_t seed() const { return c_.seed ? *c_.seed : (spec_ ? spec_->seed : 1); }
  double resolution() const {
    const double r = c_.resolution ? *c_.resolution : (spec_ ? spec_->resolution : 0.02);
    if (!(r > 0.0)) throw UsageError("--resolution must be positive");
    return r;
  }

  json header(const std::string& command) const {
    json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["spec_hash"] = spec_ ? json(spec_->hash) : json(nullptr);
    j["seed"] = seed();
    j["resolution"] = resolution();
    if (spec_) {
      j["beta"] = spec_->beta;
      j["dimension"] = spec_->dimension;
    }
    return j;
  }

 private:
  const Common& c_;
  std::optional<SpaceSpec> spec_;
};

double uniform(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------------------

struct DistArgs {
  std::string from;
  std::string to;
  int refine = 0;
  std::string csv;
};

Outcome cmd_dist(const Session& ss, const DistArgs& a) {
  const auto& spec = ss.spec();
  const auto s = spec.space();
  const auto x = parse_point(a.from, spec.dimension, "--from");
  const auto y = parse_point(a.to, spec.dimension, "--to");
  if (!s.bbox().contains(x) || !s.bbox().contains(y))
    throw UsageError("--from and --to must lie inside the bounding box");
  if (a.refine < 0) throw UsageError("--refine must be nonnegative");
  auto b = distance(s, x, y, ss.resolution());
  json steps = json::array({b.width()});
  for (int i = 0; i < a.refine; ++i) {
    b = refine(s, b);
    steps.push_back(b.width());
  }
  if (!(b.lower <= b.upper * (1.0 + 1e-12)) || !std::isfinite(b.upper))
    throw NumericalError("solver returned an inconsistent bracket");
  Outcome o{ss.header("dist")};
  o.report["bracket"] = to_json(b);
  o.report["refinements"] = a.refine;
  o.report["widths"] = steps;
  o.report["relative_width"] = b.upper > 0 ? b.width() / b.upper : 0.0;
  if (!a.csv.empty()) write_atomic(a.csv, polyline_csv(b.witness));
  return o;
}

// ---------------------------------------------------------------------------------------

struct VerifyArgs {
  double H = 16.0;
  std::size_t samples = 0;
  std::optional<double> alpha;
  double A = -1.0;
  double eps = 1.0;
  int n = 0;
  std::size_t per_axis = 33;
};

Outcome verify_holder(const Session& ss, const VerifyArgs& a) {
  const auto r = check_holder(ss.spec().space(), a.H, a.samples ? a.samples : 200, ss.seed(),
                              ss.resolution());
  Outcome o{ss.header("verify holder")};
  o.report["holder"] = to_json(r);
  o.code = r.violated ? 1 : 0;
  return o;
}

Outcome verify_qs(const Session& ss, const VerifyArgs& a) {
  const auto r = check_quasisymmetry(ss.spec().space(), a.H, a.samples ? a.samples : 1000,
                                     ss.seed(), ss.resolution());
  Outcome o{ss.header("verify qs")};
  o.report["quasisymmetry"] = to_json(r);
  json eta = json::array();
  for (int k = 1; k <= 6; ++k) eta.push_back(r.eta(std::pow(10.0, -k)));
  o.report["eta_decades"] = eta;
  o.code = r.violated ? 1 : 0;
  return o;
}

Outcome verify_curvature(const Session& ss, const VerifyArgs& a) {
  const std::size_t samples = a.samples ? a.samples : 10;
  Outcome o{ss.header("verify curvature")};
  if (a.alpha) {
    const double alpha = *a.alpha;
    if (!(alpha > 0.0)) throw UsageError("--alpha must be positive");
    auto one = [](double, double) { return 1.0; };
    auto G = [alpha](double x, double) { return std::pow(std::abs(x), -2.0 * alpha); };
    std::mt19937_64 g(ss.seed());
    json rows = json::array();
    double worst = 0.0;
    double pmin = INFINITY;
    double pmax = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const double x = 0.5 + 1.5 * double(i) / double(std::max<std::size_t>(samples - 1, 1));
      const double y = 2.0 * uniform(g) - 1.0;
      const double K = gaussian_curvature_diagonal(one, G, Point{x, y}, 1e-4 * x);
      const double exact = -alpha * (alpha + 1.0) / (x * x);
      const double rel = std::abs(K - exact) / std::abs(exact);
      worst = std::max(worst, rel);
      pmin = std::min(pmin, std::abs(K) * x * x);
      pmax = std::max(pmax, std::abs(K) * x * x);
      rows.push_back({{"x", x}, {"y", y}, {"K", K}, {"K_exact", exact}, {"rel_error", rel}});
    }
    o.report["alpha"] = alpha;
    o.report["samples"] = rows;
    o.report["max_rel_error"] = worst;
    o.report["product_spread"] = pmax / pmin - 1.0;
    o.code = worst <= 0.02 ? 0 : 1;
    return o;
  }
  const auto s = ss.spec().space();
  const double A = a.A > 0 ? a.A : INFINITY;
  const auto r = check_whitney_curvature(s, A, samples, ss.seed());
  o.report["curvature"] = to_json(r);
  o.code = r.violated ? 1 : 0;
  return o;
}

Outcome verify_doubling(const Session& ss, const VerifyArgs& a) {
  const auto r =
      estimate_doubling(ss.spec().space(), a.samples ? a.samples : 20, ss.seed(), a.per_axis);
  Outcome o{ss.header("verify doubling")};
  o.report["doubling"] = to_json(r);
  return o;
}

Outcome verify_nondoubling(const Session& ss, const VerifyArgs& a) {
  if (!(a.eps > 0.0)) throw UsageError("--eps must be positive");
  if (a.n < 0) throw UsageError("--n must be nonnegative");
  const auto r = nondoubling_balls(a.eps, a.n);
  Outcome o{ss.header("verify nondoubling")};
  o.report["nondoubling"] = to_json(r);
  o.code = (r.disjoint && r.count >= r.required) ? 0 : 1;
  return o;
}

// ---------------------------------------------------------------------------------------

struct DecomposeArgs {
  double delta = 1.0 / 8.0;
  double c0 = 1.0 / 9.0;
  double C1 = 2.0;
  std::optional<double> a;
  std::size_t per_axis = 100;
  bool enlarge = false;
  bool balls = false;
  double eps = 0.5;
  bool charts = false;
  bool cubes = false;
  std::string csv;
};

Outcome cmd_decompose(const Session& ss, const DecomposeArgs& args) {
  const auto& spec = ss.spec();
  WhitneyData data;
  data.delta = args.delta;
  data.c0 = args.c0;
  data.C1 = args.C1;
  require_christ_data(data.christ());
  data.a = args.a ? *args.a : admissible_a(spec.beta, data.delta);
  if (args.per_axis < 2) throw UsageError("--per-axis must be at least 2");

  const auto s = spec.space();
  const auto grid = std::make_shared<const GeodesicGrid>(s, args.per_axis);
  const GraphMetric m(grid);
  std::vector<double> boundary(m.size());
  std::vector<std::size_t> omega;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double dE = s.singular().distance(m.point(i));
    boundary[i] = distance_to_singular(s, m.point(i));
    if (dE > 0.0) omega.push_back(i);
  }
  auto sys = whitney_decompose(m, omega, data, boundary);
  if (args.enlarge || args.balls || args.charts) sys = enlarge_cubes(m, sys);

  Outcome o{ss.header("decompose")};
  o.report["per_axis"] = args.per_axis;
  o.report["samples"] = m.size();
  json js = to_json(sys);
  std::size_t multi = 0;
  std::size_t largest = 0;
  for (const auto& q : sys.cubes) {
    if (q.members.size() > 1) ++multi;
    largest = std::max(largest, q.members.size());
  }
  js["cube_count"] = sys.cubes.size();
  js["multi_point_cubes"] = multi;
  js["largest_cube"] = largest;
  if (!args.cubes) js.erase("cubes");
  o.report["system"] = js;
  bool pass = sys.disjoint && sys.in_shell && sys.dense;

  if (args.balls) {
    const auto r = verify_whitney_balls(m, sys, args.eps);
    o.report["whitney_balls"] = to_json(r);
    pass = pass && r.diameter_violations == 0 && r.isolation_failures == 0;
  }
  if (args.charts) {
    std::size_t pairs = 0, certified = 0, violations = 0, charted = 0;
    double dmin = INFINITY;
    double dmax = 0.0;
    for (std::size_t q = 0; q < sys.cubes.size(); ++q) {
      const auto c = cube_chart(s, m, sys, q);
      pairs += c.pairs;
      certified += c.certified;
      violations += c.violations;
      if (c.pairs > 0) {
        ++charted;
        dmin = std::min(dmin, c.distortion);
        dmax = std::max(dmax, c.distortion);
      }
    }
    const auto k = chart_constants(data.a, spec.beta, data.delta);
    o.report["charts"] = {{"a", data.a},
                          {"C2", k.C2},
                          {"J", k.J},
                          {"C3", k.C3},
                          {"lower_factor", k.lower_factor(spec.beta)},
                          {"upper_factor", k.upper_factor(spec.beta)},
                          {"cubes_charted", charted},
                          {"pairs", pairs},
                          {"certified", certified},
                          {"violations", violations},
                          {"distortion_min", charted ? dmin : 1.0},
                          {"distortion_max", charted ? dmax : 1.0},
                          {"distortion_spread", charted ? dmax / dmin : 1.0}};
    pass = pass && violations == 0;
  }
  o.report["pass"] = pass;
  o.code = pass ? 0 : 1;
  if (!args.csv.empty()) write_atomic(args.csv, cube_csv(m, sys));
  return o;
}

// ---------------------------------------------------------------------------------------

struct EmbedArgs {
  std::string name;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::string pipeline;
  std::size_t pairs = 2000;
  std::size_t samples = 200;
  std::size_t paths = 50;
};

CandidateMap pipeline_map(const std::string& text, std::size_t dim) {
  json p;
  try {
    p = json::parse(text);
  } catch (const json::parse_error&) {
    throw UsageError("--pipeline: malformed JSON");
  }
  if (!p.is_array() || p.empty()) throw UsageError("--pipeline: expected a nonempty array");
  std::optional<CandidateMap> f;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& st = p[i];
    if (!st.is_object() || !st.contains("name") || !st["name"].is_string())
      throw UsageError("--pipeline[" + std::to_string(i) + "]: expected {\"name\": ...}");
    double param = 0.0;
    if (st.contains("param")) {
      if (!st["param"].is_number()) throw UsageError("--pipeline[" + std::to_string(i) + "].param");
      param = st["param"].get<double>();
    }
    const std::size_t d = f ? f->target_dim() : dim;
    const auto g = CandidateMap::named(st["name"].get<std::string>(), param, d);
    f = f ? f->then(g) : g;
  }
  return *f;
}

std::vector<Point> distortion_points(const GrushinSpace& s, std::size_t n, std::uint64_t seed) {
  const auto& box = s.bbox();
  double half = INFINITY;
  for (std::size_t i = 0; i < box.dim(); ++i) half = std::min(half, 0.5 * (box.hi[i] - box.lo[i]));
  if (const auto c = s.singular().as_single_point(); c && box.dim() == 2 && box.contains(*c)) {
    double r1 = half;
    for (std::size_t i = 0; i < 2; ++i)
      r1 = std::min({r1, (*c)[i] - box.lo[i], box.hi[i] - (*c)[i]});
    if (r1 > 0.0) return annulus_sample(n, 0.05 * r1, r1, seed, *c);
  }
  std::mt19937_64 g(seed);
  std::vector<Point> pts;
  const double keep = 1e-3 * box.diameter();
  for (std::size_t tries = 0; pts.size() < n && tries < 100 * n; ++tries) {
    Point p(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i)
      p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * uniform(g);
    if (s.singular().distance(p) > keep) pts.push_back(p);
  }
  return pts;
}

Outcome cmd_embed(const Session& ss, const EmbedArgs& a) {
  const auto& spec = ss.spec();
  if (a.alpha && a.beta) throw UsageError("give at most one of --alpha and --beta");
  CandidateMap f = CandidateMap::named("identity", 0.0, spec.dimension);
  if (!a.pipeline.empty()) {
    if (!a.name.empty()) throw UsageError("give either a map name or --pipeline");
    f = pipeline_map(a.pipeline, spec.dimension);
  } else {
    if (a.name.empty()) throw UsageError("a map name or --pipeline is required");
    double param = 0.0;
    if (a.alpha) param = *a.alpha;
    else if (a.beta) param = *a.beta;
    else if (a.name == "cone") param = spec.beta;
    else if (a.name == "grushin-chart" || a.name == "grushin-chart-inverse")
      param = spec.beta / (1.0 - spec.beta);
    f = CandidateMap::named(a.name, param, spec.dimension);
  }
  if (f.domain_dim() != spec.dimension)
    throw UsageError("map domain dimension does not match the spec");

  const auto s = spec.space();
  Outcome o{ss.header("embed")};
  o.report["map"] = f.describe();
  bool pass = true;
  json checks = json::object();
  if (f.stages().size() == 1) {
    const auto& st = f.stages().front();
    if (st.name == "cone" && s.singular().as_single_point()) {
      const auto r = cone_length_check(st.param, a.paths, ss.seed());
      checks["path_isometry"] = to_json(r);
      checks["path_isometry"]["tolerance"] = 2e-3;
      pass = pass && r.max_rel_error <= 2e-3;
    } else if (st.name == "grushin-chart") {
      const auto r = chart_length_check(st.param, a.paths, ss.seed());
      checks["length_preservation"] = to_json(r);
      checks["length_preservation"]["tolerance"] = 1e-3;
      pass = pass && r.max_rel_error <= 1e-3;
    }
  }
  o.report["checks"] = checks;
  const auto pts = distortion_points(s, a.samples, ss.seed());
  o.report["distortion"] = to_json(measure_distortion(s, pts, f, a.pairs, ss.seed()));
  o.report["distortion"]["samples"] = pts.size();
  o.report["pass"] = pass;
  o.code = pass ? 0 : 1;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distances, verification suites and decompositions for Grushin-type metrics"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool spec_required) {
    auto* opt = sub->add_option("--spec", common.spec_path, "space specification (JSON)");
    if (spec_required) opt->required();
    sub->add_option("--seed", common.seed, "random seed (default: the spec's)");
    sub->add_option("--resolution", common.resolution, "solver resolution (default: the spec's)");
    sub->add_option("--out", common.out, "write the JSON report here instead of stdout");
  };

  DistArgs dist;
  auto* d = app.add_subcommand("dist", "bracket the distance between two points");
  add_common(d, true);
  d->add_option("--from", dist.from, "comma-separated coordinates")->required();
  d->add_option("--to", dist.to, "comma-separated coordinates")->required();
  d->add_option("--refine", dist.refine, "number of refinement passes");
  d->add_option("--csv", dist.csv, "write the witness path as CSV");

  VerifyArgs va;
  auto* v = app.add_subcommand("verify", "run a verification suite");
  v->require_subcommand(1);
  auto* vh = v->add_subcommand("holder", "d_Y <= H d_E^(1-beta) on sampled pairs");
  add_common(vh, true);
  vh->add_option("--H", va.H, "claimed constant");
  vh->add_option("--samples", va.samples, "pairs (default 200)");
  auto* vq = v->add_subcommand("qs", "quasisymmetry on sampled triples");
  add_common(vq, true);
  vq->add_option("--H", va.H, "Hoelder constant behind eta");
  vq->add_option("--samples", va.samples, "triples (default 1000)");
  auto* vc = v->add_subcommand("curvature", "Gaussian curvature samples");
  add_common(vc, false);
  vc->add_option("--alpha", va.alpha, "use the metric dx^2 + |x|^(-2 alpha) dy^2");
  vc->add_option("--A", va.A, "claimed constant in |K| <= A d_Y^-2");
  vc->add_option("--samples", va.samples, "sample points (default 10)");
  auto* vd = v->add_subcommand("doubling", "doubling constant estimate");
  add_common(vd, true);
  vd->add_option("--samples", va.samples, "balls (default 20)");
  vd->add_option("--per-axis", va.per_axis, "lattice vertices per axis");
  auto* vn = v->add_subcommand("nondoubling", "disjoint balls packed near x = 0");
  add_common(vn, false);
  vn->add_option("--eps", va.eps, "exponent in exp(2/|x|^eps)");
  vn->add_option("--n", va.n, "scale index");

  DecomposeArgs da;
  auto* dc = app.add_subcommand("decompose", "Whitney decomposition of a lattice sample");
  add_common(dc, true);
  dc->add_option("--delta", da.delta);
  dc->add_option("--c0", da.c0);
  dc->add_option("--C1", da.C1);
  dc->add_option("--a", da.a, "Whitney constant (default: admissible a for beta)");
  dc->add_option("--per-axis", da.per_axis, "lattice vertices per axis");
  dc->add_flag("--enlarge", da.enlarge, "enlarge small cubes");
  dc->add_flag("--verify-balls", da.balls, "Whitney ball and overlap checks");
  dc->add_option("--eps", da.eps, "star parameter");
  dc->add_flag("--charts", da.charts, "cube chart sandwich checks");
  dc->add_flag("--cubes", da.cubes, "list every cube in the report");
  dc->add_option("--csv", da.csv, "write cube footprints as CSV");

  EmbedArgs ea;
  auto* e = app.add_subcommand("embed", "distortion of a candidate map");
  add_common(e, true);
  e->add_option("map", ea.name, "identity, cone, grushin-chart, grushin-chart-inverse, project-xy");
  e->add_option("--alpha", ea.alpha);
  e->add_option("--beta", ea.beta);
  e->add_option("--pipeline", ea.pipeline, "JSON list of {\"name\", \"param\"} stages");
  e->add_option("--pairs", ea.pairs);
  e->add_option("--samples", ea.samples);
  e->add_option("--paths", ea.paths, "polylines for the length check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : 2;
  }

  try {
    threads_from_env();
    const Session ss(common);
    Outcome o;
    if (d->parsed()) o = cmd_dist(ss, dist);
    else if (vh->parsed()) o = verify_holder(ss, va);
    else if (vq->parsed()) o = verify_qs(ss, va);
    else if (vc->parsed()) o = verify_curvature(ss, va);
    else if (vd->parsed()) o = verify_doubling(ss, va);
    else if (vn->parsed()) o = verify_nondoubling(ss, va);
    else if (dc->parsed()) o = cmd_decompose(ss, da);
    else o = cmd_embed(ss, ea);
    o.report["exit_code"] = o.code;
    const auto text = dump(o.report);
    if (common.out.empty()) std::cout << text;
    else write_atomic(common.out, text);
    return o.code;
  } catch (const UsageError& err) {
    std::cerr << "grushin: " << err.what() << '\n';
    return 2;
  } catch (const SpecError& err) {
    std::cerr << "grushin: spec error: " << err.what() << '\n';
    return 2;
  } catch (const PreconditionError& err) {
    std::cerr << "grushin: " << err.what() << '\n';
    return 2;
  } catch (const DimensionError& err) {
    std::cerr << "grushin: " << err.what() << '\n';
    return 2;
  } catch (const UnsupportedDimension& err) {
    std::cerr << "grushin: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "grushin: numerical failure: " << err.what() << '\n';
    return 3;
  }
}
