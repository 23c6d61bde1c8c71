#include "grushin/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <unistd.h>

namespace grushin {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw SpecError(where + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing field '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "expected a finite number");
  return x;
}

Point point(const json& v, std::size_t dim, const std::string& where) {
  if (!v.is_array() || v.size() != dim)
    fail(where, "expected an array of " + std::to_string(dim) + " numbers");
  Point p(dim);
  for (std::size_t i = 0; i < dim; ++i)
    p[i] = number(v[i], where + "[" + std::to_string(i) + "]");
  return p;
}

Primitive primitive(const json& v, std::size_t dim, const std::string& where) {
  const auto& t = field(v, "type", where);
  if (!t.is_string()) fail(where + ".type", "expected a string");
  const auto type = t.get<std::string>();
  auto pt = [&](const char* key) { return point(field(v, key, where), dim, where + "." + key); };
  if (type == "point") return shape::PointShape{pt("at")};
  if (type == "segment") return shape::Segment{pt("a"), pt("b")};
  if (type == "halfline") return shape::HalfLine{pt("origin"), pt("direction")};
  if (type == "hyperplane" || type == "line") return shape::Hyperplane{pt("point"), pt("normal")};
  if (type == "box") return shape::Box{pt("lo"), pt("hi")};
  if (type == "cloud") {
    const auto& pts = field(v, "points", where);
    if (!pts.is_array() || pts.empty()) fail(where + ".points", "expected a nonempty array");
    shape::Cloud c;
    for (std::size_t i = 0; i < pts.size(); ++i)
      c.points.push_back(point(pts[i], dim, where + ".points[" + std::to_string(i) + "]"));
    return c;
  }
  if (type == "coordinate-plane") {
    const double axis = number(field(v, "axis", where), where + ".axis");
    if (axis < 0 || axis >= double(dim) || axis != std::floor(axis))
      fail(where + ".axis", "expected an axis index below the dimension");
    const double offset = v.contains("offset") ? number(v["offset"], where + ".offset") : 0.0;
    Point p(dim);
    Point n(dim);
    p[std::size_t(axis)] = offset;
    n[std::size_t(axis)] = 1.0;
    return shape::Hyperplane{p, n};
  }
  fail(where + ".type", "unknown primitive '" + type + "'");
}

json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (const double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

GrushinSpace SpaceSpec::space() const { return GrushinSpace(singular, beta, bbox, pad); }

SpaceSpec parse_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SpecError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                    ": malformed JSON");
  }
  SpaceSpec s;
  const double dim = number(field(j, "dimension", "spec"), "dimension");
  if (dim < 1 || dim > double(kMaxDim) || dim != std::floor(dim))
    fail("dimension", "expected an integer in [1, " + std::to_string(kMaxDim) + "]");
  s.dimension = std::size_t(dim);
  s.beta = number(field(j, "beta", "spec"), "beta");
  if (!(s.beta >= 0.0 && s.beta < 1.0)) fail("beta", "expected a value in [0, 1)");

  const auto& ys = field(j, "singular", "spec");
  if (!ys.is_array() || ys.empty()) fail("singular", "expected a nonempty array of primitives");
  std::vector<Primitive> prims;
  for (std::size_t i = 0; i < ys.size(); ++i)
    prims.push_back(primitive(ys[i], s.dimension, "singular[" + std::to_string(i) + "]"));
  try {
    s.singular = SingularSet(s.dimension, std::move(prims));
  } catch (const GrushinError& e) {
    fail("singular", e.what());
  }

  const auto& bb = field(j, "bbox", "spec");
  s.bbox.lo = point(field(bb, "lo", "bbox"), s.dimension, "bbox.lo");
  s.bbox.hi = point(field(bb, "hi", "bbox"), s.dimension, "bbox.hi");
  for (std::size_t i = 0; i < s.dimension; ++i)
    if (!(s.bbox.lo[i] < s.bbox.hi[i])) fail("bbox", "expected lo < hi on every axis");

  if (j.contains("solver")) {
    const auto& sv = j["solver"];
    if (!sv.is_object()) fail("solver", "expected an object");
    if (sv.contains("resolution")) {
      s.resolution = number(sv["resolution"], "solver.resolution");
      if (!(s.resolution > 0.0)) fail("solver.resolution", "expected a positive number");
    }
    if (sv.contains("pad")) {
      s.pad = number(sv["pad"], "solver.pad");
      if (!(s.pad >= 0.0)) fail("solver.pad", "expected a nonnegative number");
    }
    if (sv.contains("seed")) {
      const auto& v = sv["seed"];
      if (!v.is_number_unsigned()) fail("solver.seed", "expected a nonnegative integer");
      s.seed = v.get<std::uint64_t>();
    }
  }
  s.hash = fnv1a_hex(j.dump());
  return s;
}

SpaceSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec(ss.str());
  } catch (const SpecError& e) {
    throw SpecError(path + ": " + e.what());
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// ---------------------------------------------------------------------------------------

json to_json(const Point& p) {
  json a = json::array();
  for (std::size_t i = 0; i < p.dim(); ++i) a.push_back(num(p[i]));
  return a;
}

json to_json(const DistanceBracket& b) {
  json w = json::array();
  for (const auto& v : b.witness.vertices) w.push_back(to_json(v));
  return {{"from", to_json(b.from)},
          {"to", to_json(b.to)},
          {"lower", num(b.lower)},
          {"upper", num(b.upper)},
          {"width", num(b.width())},
          {"resolution", num(b.resolution)},
          {"floor", num(b.floor)},
          {"cells", b.cells},
          {"path_vertices", b.path_vertices},
          {"resource_limited", b.resource_limited},
          {"witness", w}};
}

namespace {

json pair_json(const PairWitness& w) {
  return {{"x", to_json(w.x)}, {"y", to_json(w.y)}, {"lower", num(w.lower)}, {"upper", num(w.upper)}};
}

}  // namespace

json to_json(const HolderReport& r) {
  json v = json::array();
  for (const auto& w : r.violations) v.push_back(pair_json(w));
  return {{"H", num(r.H_claimed)},
          {"samples", r.samples},
          {"worst_ratio", num(r.worst_ratio)},
          {"worst_certified_ratio", num(r.worst_certified_ratio)},
          {"unresolved", r.unresolved},
          {"violated", r.violated},
          {"violations", v}};
}

json to_json(const QuasisymmetryReport& r) {
  json v = json::array();
  for (const auto& w : r.violations)
    v.push_back({{"x", to_json(w.x)},
                 {"y", to_json(w.y)},
                 {"z", to_json(w.z)},
                 {"t", num(w.t)},
                 {"eta", num(w.eta)},
                 {"ratio_lower", num(w.ratio_lower)}});
  return {{"beta", num(r.beta)},
          {"H", num(r.H)},
          {"triples", r.triples_tested},
          {"worst_excess", num(r.worst_excess)},
          {"certified_ok", r.certified_ok},
          {"unresolved", r.unresolved},
          {"violated", r.violated},
          {"violations", v}};
}

json to_json(const DoublingReport& r) {
  return {{"balls", r.balls_tested},
          {"D_estimate", r.D_estimate},
          {"counts", r.counts},
          {"grid_per_axis", r.grid_per_axis}};
}

json to_json(const CurvatureReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back(to_json(p));
  json j = {{"points", pts},
            {"K", nums(r.K_numeric)},
            {"A", num(r.A)},
            {"A_fit", num(r.A_fit)},
            {"violated", r.violated},
            {"skipped", r.skipped}};
  j["K_closed_form"] = r.K_closed_form ? nums(*r.K_closed_form) : json(nullptr);
  return j;
}

json to_json(const NondoublingReport& r) {
  return {{"eps", num(r.eps)},
          {"n", r.n},
          {"count", r.count},
          {"required", r.required},
          {"radius", num(r.radius)},
          {"x_center", num(r.x_center)},
          {"spacing", num(r.spacing)},
          {"min_pair_lower", num(r.min_pair_lower)},
          {"disjoint", r.disjoint}};
}

json to_json(const ChristCheck& c) {
  return {{"nested", c.nested},
          {"dense", c.dense},
          {"sandwich", c.sandwich},
          {"sandwich_failures", c.sandwich_failures},
          {"c0_tight", num(c.c0_tight)},
          {"C1_tight", num(c.C1_tight)},
          {"attempts", c.attempts}};
}

json to_json(const CubeSystem& sys) {
  json cubes = json::array();
  for (const auto& q : sys.cubes)
    cubes.push_back({{"k", q.k},
                     {"center", q.center},
                     {"members", q.members},
                     {"diam", num(q.diam)},
                     {"boundary_distance", num(q.boundary_distance)},
                     {"in_shell", q.in_shell},
                     {"enlarged", q.enlarged},
                     {"q_offset", num(q.q_offset)},
                     {"diam_enlarged", num(q.diam_enlarged)}});
  return {{"data",
           {{"delta", num(sys.data.delta)},
            {"c0", num(sys.data.c0)},
            {"C1", num(sys.data.C1)},
            {"a", num(sys.data.a)}}},
          {"omega_size", sys.omega.size()},
          {"complement_size", sys.complement.size()},
          {"disjoint", sys.disjoint},
          {"in_shell", sys.in_shell},
          {"dense", sys.dense},
          {"christ", to_json(sys.christ)},
          {"cubes", cubes}};
}

json to_json(const BallOverlapReport& r) {
  return {{"eps", num(r.eps)},
          {"cubes", r.cubes},
          {"pairs_checked", r.pairs_checked},
          {"diameter_violations", r.diameter_violations},
          {"small_cubes", r.small_cubes},
          {"isolation_failures", r.isolation_failures},
          {"correspondence_failures", r.correspondence_failures},
          {"asymmetric_pairs", r.asymmetric_pairs},
          {"max_star", r.max_star},
          {"max_star2", r.max_star2},
          {"N", r.max_membership}};
}

json to_json(const ChartReport& r) {
  return {{"cube", r.cube},
          {"k", r.k},
          {"M", num(r.M)},
          {"L", num(r.L)},
          {"ell", num(r.ell)},
          {"a", num(r.constants.a)},
          {"a_beta", num(r.a_beta)},
          {"C2", num(r.constants.C2)},
          {"J", num(r.constants.J)},
          {"C3", num(r.constants.C3)},
          {"pairs", r.pairs},
          {"certified", r.certified},
          {"violations", r.violations},
          {"ratio_min", num(r.ratio_min)},
          {"ratio_max", num(r.ratio_max)},
          {"distortion", num(r.distortion)}};
}

json to_json(const DistortionReport& r) {
  auto pj = [](const DistortionPair& p) {
    return json{{"i", p.i},
                {"j", p.j},
                {"d_lower", num(p.d_lower)},
                {"d_upper", num(p.d_upper)},
                {"d_target", num(p.d_target)}};
  };
  return {{"L_lower", num(r.L_lower)},
          {"L_estimate", num(r.L_estimate)},
          {"scale", num(r.scale)},
          {"pairs", r.pairs},
          {"worst_expand", pj(r.worst_expand)},
          {"worst_contract", pj(r.worst_contract)}};
}

json to_json(const LengthCheck& r) {
  return {{"paths", r.paths},
          {"max_rel_error", num(r.max_rel_error)},
          {"source_lengths", nums(r.source_lengths)},
          {"image_lengths", nums(r.image_lengths)}};
}

std::string cube_csv(const SampleMetric& m, const CubeSystem& sys) {
  std::ostringstream os;
  os.precision(17);
  const std::size_t dim = m.size() ? m.point(0).dim() : 0;
  os << "cube,k,point";
  for (std::size_t i = 0; i < dim; ++i) os << ",x" << i + 1;
  os << '\n';
  for (std::size_t c = 0; c < sys.cubes.size(); ++c)
    for (const auto i : sys.cubes[c].members) {
      os << c << ',' << sys.cubes[c].k << ',' << i;
      for (std::size_t a = 0; a < dim; ++a) os << ',' << m.point(i)[a];
      os << '\n';
    }
  return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

}  // namespace grushin
