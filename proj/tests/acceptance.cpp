// Acceptance suite: one PASS/FAIL line per criterion. argv[1] is the grushin executable.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "grushin/analysis.hpp"
#include "grushin/geodesic.hpp"
#include "grushin/whitney.hpp"

using namespace grushin;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

BoundingBox square(double lo, double hi) { return {Point{lo, lo}, Point{hi, hi}}; }

GrushinSpace v_axis(double beta, double lo = -1.0, double hi = 1.0) {
  return GrushinSpace(SingularSet::coordinate_plane(2, 0), beta, square(lo, hi));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 ---------------------------------------------------------------------------------------

Verdict radial_distance() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> pts;
  while (pts.size() < 20) {
    const Point p{u(rng), u(rng)};
    if (std::abs(p[1]) > 0.02 && dist(p, Point{0.0, 0.0}) > 0.02) pts.push_back(p);
  }
  const std::vector<SingularSet> ys{
      SingularSet::point(Point{0.0, 0.0}), SingularSet::coordinate_plane(2, 1),
      SingularSet(2, {shape::Segment{Point{-0.5, 0.0}, Point{0.5, 0.0}}})};
  double worst = 0.0;
  std::size_t lower_above = 0;
  std::size_t solves = 0;
  for (const auto& y : ys)
    for (double beta : {0.0, 0.25, 0.5, 0.75}) {
      const GrushinSpace s(y, beta, square(-1.0, 1.0));
      for (const auto& p : pts) {
        const double dE = y.distance(p);
        const double exact = std::pow(dE, 1.0 - beta) / (1.0 - beta);
        const auto b = distance(s, p, y.nearest(p), 0.02 * dE);
        worst = std::max(worst, std::abs(b.upper - exact) / exact);
        if (b.lower > exact * (1.0 + 1e-9)) ++lower_above;
        ++solves;
      }
    }
  const double t = seconds_since(t0);
  return {worst <= 0.02 && lower_above == 0 && t <= 120.0,
          fmt("%zu solves, max rel error of upper %.2e (tol 0.02), lower above exact %zu, %.1f s "
              "(limit 120)",
              solves, worst, lower_above, t)};
}

// 2 ---------------------------------------------------------------------------------------

Verdict cone_geodesic() {
  const auto t0 = std::chrono::steady_clock::now();
  const double exact = 4.0 * std::sin(std::numbers::pi / 8.0);
  const GrushinSpace s(SingularSet::point(Point{0.0, 0.0}), 0.5, square(-1.0, 1.0));
  auto b = distance(s, Point{1.0, 0.0}, Point{0.0, 1.0}, 0.02);
  for (int i = 0; i < 2; ++i) b = refine(s, b);
  const double t = seconds_since(t0);
  const bool contains = b.lower <= exact && b.upper >= exact;
  const double width = b.width() / exact;
  return {contains && width <= 0.04 && t <= 60.0,
          fmt("bracket [%.6f, %.6f] around %.6f, width %.2e (tol 0.04), %.1f s (limit 60)",
              b.lower, b.upper, exact, width, t)};
}

// 3 ---------------------------------------------------------------------------------------

Verdict euclidean_limit() {
  const GrushinSpace s(SingularSet(2, {shape::Segment{Point{-0.5, 0.0}, Point{0.5, 0.0}}}), 0.0,
                       square(-1.0, 1.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double dist_err = 0.0;
  bool lower_ok = true;
  for (int i = 0; i < 10; ++i) {
    const Point x{u(rng), u(rng)};
    const Point y{u(rng), u(rng)};
    const auto b = distance(s, x, y, 0.05);
    const double e = dist(x, y);
    dist_err = std::max(dist_err, std::abs(b.upper - e) / e);
    lower_ok = lower_ok && b.lower <= e * (1.0 + 1e-12);
  }
  double kmax = 0.0;
  const auto v = v_axis(0.0, 0.1, 2.0);
  const auto cr = check_whitney_curvature(v, INFINITY, 20, 4);
  for (const double k : cr.K_numeric) kmax = std::max(kmax, std::abs(k));
  for (const Point& p : {Point{0.3, 0.4}, Point{-0.7, 0.2}, Point{0.9, -0.8}})
    kmax = std::max(kmax, std::abs(gaussian_curvature_conformal(s, p)));
  const auto h = check_holder(v_axis(0.0), 1.0, 100, 5);
  const double holder_err = std::abs(h.worst_ratio - 1.0);
  double eta_err = 0.0;
  for (const double t : {1e-6, 1e-3, 0.1, 0.5, 1.0, 3.0, 100.0})
    eta_err = std::max(eta_err, std::abs(eta_control(0.0, 1.0, t) - t) / t);
  const auto q = check_quasisymmetry(v_axis(0.0), 1.0, 200, 6);
  const bool pass = dist_err <= 0.01 && lower_ok && kmax <= 1e-6 && !h.violated &&
                    holder_err <= 1e-9 && eta_err <= 1e-12 && !q.violated;
  return {pass, fmt("distance error %.2e (tol 0.01), max |K| %.1e (tol 1e-6), Hoelder ratio - 1 "
                    "%.1e, eta(t) - t %.1e (tol 1e-12), qs violations %d",
                    dist_err, kmax, holder_err, eta_err, int(q.violated))};
}

// 4 ---------------------------------------------------------------------------------------

Verdict curvature() {
  auto one = [](double, double) { return 1.0; };
  double alpha_err = 0.0;
  for (double alpha : {1.0, 2.0}) {
    auto G = [alpha](double x, double) { return std::pow(std::abs(x), -2.0 * alpha); };
    for (int i = 0; i < 10; ++i) {
      const double x = 0.5 + 1.5 * i / 9.0;
      const double K = gaussian_curvature_diagonal(one, G, Point{x, 0.3}, 1e-4 * x);
      const double exact = -alpha * (alpha + 1.0) / (x * x);
      alpha_err = std::max(alpha_err, std::abs(K / exact - 1.0));
    }
  }
  const double beta = 0.5;
  const auto s = v_axis(beta, -2.0, 2.0);
  double conf_err = 0.0;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::uniform_real_distribution<double> sgn(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Point p{sgn(rng) < 0 ? -u(rng) : u(rng), sgn(rng)};
    const double exact = -beta * std::pow(std::abs(p[0]), 2.0 * beta - 2.0);
    conf_err = std::max(conf_err, std::abs(gaussian_curvature_conformal(s, p) / exact - 1.0));
  }
  const auto r = check_whitney_curvature(v_axis(beta, 0.1, 2.0), INFINITY, 20, 9);
  double pmin = INFINITY;
  double pmax = 0.0;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const double dY = distance_to_singular(s, r.points[i]);
    const double prod = std::abs(r.K_numeric[i]) * dY * dY;
    pmin = std::min(pmin, prod);
    pmax = std::max(pmax, prod);
  }
  const double spread = pmax / pmin - 1.0;
  return {alpha_err <= 0.02 && conf_err <= 0.02 && spread <= 0.03 && !r.points.empty(),
          fmt("alpha metric rel error %.2e (tol 0.02), conformal rel error %.2e (tol 0.02), "
              "|K| d_Y^2 spread %.2e over %zu points (tol 0.03)",
              alpha_err, conf_err, spread, r.points.size())};
}

// 5 ---------------------------------------------------------------------------------------

Verdict nondoubling() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string counts;
  for (int n = 0; n <= 2; ++n) {
    const auto r = nondoubling_balls(1.0, n);
    const auto want =
        std::uint64_t(std::floor(std::exp2(n + 1) * std::exp(std::exp2(double(n)))));
    pass = pass && r.count >= want && r.disjoint && r.min_pair_lower >= 2.0 * r.radius;
    counts += fmt("%s%llu/%llu", n ? ", " : "", (unsigned long long)r.count,
                  (unsigned long long)want);
  }
  const double t = seconds_since(t0);
  return {pass && t <= 120.0,
          fmt("counts/required %s, disjointness certified %s, %.1f s (limit 120)", counts.c_str(),
              pass ? "yes" : "no", t)};
}

// 6-8 -------------------------------------------------------------------------------------

struct LatticeRun {
  std::shared_ptr<const GeodesicGrid> grid;
  std::unique_ptr<GraphMetric> m;
  CubeSystem sys;
  GrushinSpace s;
};

LatticeRun lattice(double beta, std::size_t per_axis, bool enlarge) {
  LatticeRun r{nullptr, nullptr, {},
               GrushinSpace(SingularSet::coordinate_plane(2, 0), beta, square(0.0, 1.0))};
  r.grid = std::make_shared<const GeodesicGrid>(r.s, per_axis);
  r.m = std::make_unique<GraphMetric>(r.grid);
  std::vector<double> b(r.m->size());
  std::vector<std::size_t> omega;
  for (std::size_t i = 0; i < r.m->size(); ++i) {
    b[i] = distance_to_singular(r.s, r.m->point(i));
    if (r.m->point(i)[0] > 0.0) omega.push_back(i);
  }
  WhitneyData d;
  d.a = admissible_a(beta);
  r.sys = whitney_decompose(*r.m, omega, d, b);
  if (enlarge) r.sys = enlarge_cubes(*r.m, r.sys);
  return r;
}

Verdict christ_whitney() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = lattice(0.5, 100, false);
  const double t = seconds_since(t0);
  return {r.sys.disjoint && r.sys.in_shell && r.sys.dense && t <= 180.0,
          fmt("%zu samples, a = %g, %zu cubes: disjoint %d, shell condition %d, density %d, "
              "%.1f s (limit 180)",
              r.m->size(), r.sys.data.a, r.sys.cubes.size(), int(r.sys.disjoint),
              int(r.sys.in_shell), int(r.sys.dense), t)};
}

Verdict whitney_balls() {
  const auto coarse = lattice(0.5, 100, true);
  const auto a = verify_whitney_balls(*coarse.m, coarse.sys);
  const auto fine = lattice(0.5, 199, true);
  const auto b = verify_whitney_balls(*fine.m, fine.sys);
  const bool ok = a.diameter_violations + b.diameter_violations == 0 &&
                  a.isolation_failures + b.isolation_failures == 0;
  const long dN = long(b.max_membership) - long(a.max_membership);
  return {ok && std::abs(dN) <= 1,
          fmt("diameter violations %zu/%zu, isolation failures %zu/%zu (of %zu/%zu small cubes), "
              "N = %zu at 100^2 and %zu at 199^2 (tol +-1)",
              a.diameter_violations, b.diameter_violations, a.isolation_failures,
              b.isolation_failures, a.small_cubes, b.small_cubes, a.max_membership,
              b.max_membership)};
}

Verdict cube_charts() {
  bool pass = true;
  std::string detail;
  for (double beta : {0.25, 0.5}) {
    const double a = admissible_a(beta);
    const auto r = lattice(beta, 100, true);
    std::size_t pairs = 0, certified = 0, violations = 0;
    double dmin = INFINITY;
    double dmax = 0.0;
    for (std::size_t q = 0; q < r.sys.cubes.size(); ++q) {
      const auto c = cube_chart(r.s, *r.m, r.sys, q);
      pairs += c.pairs;
      certified += c.certified;
      violations += c.violations;
      if (c.pairs) {
        dmin = std::min(dmin, c.distortion);
        dmax = std::max(dmax, c.distortion);
      }
    }
    pass = pass && std::isfinite(a) && pairs > 0 && certified == pairs && violations == 0 &&
           dmax / dmin <= 1.2;
    detail += fmt("%sbeta %.2f: a = %g, %zu pairs, %zu certified, %zu violations, distortion "
                  "spread %.4f",
                  detail.empty() ? "" : "; ", beta, a, pairs, certified, violations, dmax / dmin);
  }
  return {pass, detail + " (tol 1.2)"};
}

// 9 ---------------------------------------------------------------------------------------

Verdict quasisymmetry() {
  const auto r = check_quasisymmetry(v_axis(0.5), 16.0, 1000, 9);
  bool decreasing = true;
  double prev = r.eta(1.0);
  for (int k = 1; k <= 6; ++k) {
    const double e = r.eta(std::pow(10.0, -k));
    decreasing = decreasing && e < prev;
    prev = e;
  }
  return {!r.violated && r.triples_tested == 1000 && decreasing,
          fmt("%zu triples, certified violations %zu, proven %zu, unresolved %zu, eta(1e-6) = "
              "%.3e, strictly decreasing %d",
              r.triples_tested, r.violations.size(), r.certified_ok, r.unresolved, prev,
              int(decreasing))};
}

// 10 --------------------------------------------------------------------------------------

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict reproducibility(const std::string& exe) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("grushin-accept-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto write = [&](const char* name, const char* text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const auto cone = write("cone.json", R"({"dimension": 2, "beta": 0.5,
      "singular": [{"type": "point", "at": [0, 0]}], "bbox": {"lo": [-2, -2], "hi": [2, 2]},
      "solver": {"resolution": 0.05, "seed": 4}})");
  const auto vaxis = write("vaxis.json", R"({"dimension": 2, "beta": 0.5,
      "singular": [{"type": "line", "point": [0, 0], "normal": [1, 0]}],
      "bbox": {"lo": [-1, -1], "hi": [1, 1]}, "solver": {"resolution": 0.05, "seed": 3}})");
  const auto line = write("line.json", R"({"dimension": 2, "beta": 0.5,
      "singular": [{"type": "coordinate-plane", "axis": 0}],
      "bbox": {"lo": [0, 0], "hi": [1, 1]}})");
  const std::vector<std::string> commands{
      "dist --spec " + cone + " --from 1,0 --to 0,1 --refine 1 --csv {}.csv",
      "verify holder --H 16 --samples 200 --seed 7 --spec " + vaxis,
      "verify qs --H 16 --samples 300 --seed 7 --spec " + vaxis,
      "verify curvature --spec " + vaxis,
      "verify curvature --alpha 2 --seed 7",
      "verify doubling --samples 6 --per-axis 17 --seed 7 --spec " + vaxis,
      "verify nondoubling --eps 1 --n 2",
      "decompose --per-axis 40 --verify-balls --charts --cubes --csv {}.csv --spec " + line,
      "embed cone --seed 7 --spec " + cone,
      "embed grushin-chart --alpha 2 --seed 7 --spec " + line,
      "embed --pipeline '[{\"name\":\"cone\",\"param\":0.5},{\"name\":\"project-xy\"}]' --seed 7 "
      "--spec " + cone};
  std::size_t identical = 0;
  std::string failed;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::string outputs[2];
    bool ran = true;
    for (int run = 0; run < 2; ++run) {
      const auto base = (dir / ("out" + std::to_string(c) + "_" + std::to_string(run))).string();
      auto cmd = commands[c];
      if (const auto at = cmd.find("{}"); at != std::string::npos) cmd.replace(at, 2, base);
      const int status =
          std::system((exe + " " + cmd + " --out " + base + ".json 2>/dev/null").c_str());
      const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      ran = ran && (code == 0 || code == 1) && fs::exists(base + ".json");
      outputs[run] = read_file(base + ".json");
      if (fs::exists(base + ".csv")) outputs[run] += read_file(base + ".csv");
    }
    if (ran && !outputs[0].empty() && outputs[0] == outputs[1]) ++identical;
    else failed += " [" + commands[c].substr(0, commands[c].find(" --")) + "]";
  }
  fs::remove_all(dir);
  return {identical == commands.size(),
          fmt("%zu/%zu commands byte-identical across two runs%s", identical, commands.size(),
              failed.empty() ? "" : (", differing:" + failed).c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path to grushin>\n");
    return 2;
  }
  const std::string exe = argv[1];
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"distance to Y equals the radial closed form", radial_distance},
      {"cone geodesic bracket", cone_geodesic},
      {"beta = 0 reduces to Euclidean geometry", euclidean_limit},
      {"curvature closed forms and the d_Y^-2 bound", curvature},
      {"non-doubling packing counts", nondoubling},
      {"Christ-Whitney decomposition of a 1e4-point lattice", christ_whitney},
      {"Whitney ball overlap and stable membership bound", whitney_balls},
      {"cube chart sandwich and distortion", cube_charts},
      {"quasisymmetry on 1000 triples", quasisymmetry},
      {"byte-identical CLI output", [&] { return reproducibility(exe); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
