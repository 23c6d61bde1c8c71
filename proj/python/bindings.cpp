#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "grushin/analysis.hpp"
#include "grushin/embeddings.hpp"
#include "grushin/io.hpp"
#include "grushin/whitney.hpp"

namespace py = pybind11;
using namespace grushin;

namespace {

Point to_point(const std::vector<double>& v) {
  if (v.empty() || v.size() > kMaxDim) throw py::value_error("expected 1 to 8 coordinates");
  Point p(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i];
  return p;
}

std::vector<double> from_point(const Point& p) {
  std::vector<double> v(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) v[i] = p[i];
  return v;
}

std::vector<std::vector<double>> from_points(const std::vector<Point>& pts) {
  std::vector<std::vector<double>> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(from_point(p));
  return out;
}

py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

struct Space {
  SpaceSpec spec;
  GrushinSpace space;

  explicit Space(SpaceSpec s) : spec(std::move(s)), space(spec.space()) {}
};

CandidateMap make_map(const py::object& m, std::size_t dim) {
  if (py::isinstance<py::str>(m)) return CandidateMap::named(m.cast<std::string>(), 0.0, dim);
  std::optional<CandidateMap> f;
  for (const auto& stage : m) {
    std::string name;
    double param = 0.0;
    if (py::isinstance<py::str>(stage)) {
      name = stage.cast<std::string>();
    } else {
      auto t = stage.cast<std::pair<std::string, double>>();
      name = t.first;
      param = t.second;
    }
    const auto g = CandidateMap::named(name, param, f ? f->target_dim() : dim);
    f = f ? f->then(g) : g;
  }
  if (!f) throw py::value_error("empty map pipeline");
  return *f;
}

py::dict decompose(const Space& s, std::size_t per_axis, std::optional<double> a, bool enlarge,
                   bool balls, bool charts, double eps) {
  WhitneyData data;
  data.a = a ? *a : admissible_a(s.spec.beta, data.delta);
  const auto grid = std::make_shared<const GeodesicGrid>(s.space, per_axis);
  const GraphMetric m(grid);
  std::vector<double> boundary(m.size());
  std::vector<std::size_t> omega;
  for (std::size_t i = 0; i < m.size(); ++i) {
    boundary[i] = distance_to_singular(s.space, m.point(i));
    if (s.space.singular().distance(m.point(i)) > 0.0) omega.push_back(i);
  }
  auto sys = whitney_decompose(m, omega, data, boundary);
  if (enlarge || balls || charts) sys = enlarge_cubes(m, sys);
  py::dict out;
  out["system"] = to_py(to_json(sys));
  out["points"] = from_points(grid->points());
  if (balls) out["whitney_balls"] = to_py(to_json(verify_whitney_balls(m, sys, eps)));
  if (charts) {
    py::list reports;
    for (std::size_t q = 0; q < sys.cubes.size(); ++q) {
      const auto c = cube_chart(s.space, m, sys, q);
      if (c.pairs > 0) reports.append(to_py(to_json(c)));
    }
    out["charts"] = reports;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Grushin-type metrics ds / d_E(., Y)^beta: distances, checks, decompositions";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<GrushinError>(m, "GrushinError", PyExc_RuntimeError);
  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<UnsupportedDimension>(m, "UnsupportedDimension", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ResourceLimit>(m, "ResourceLimit", base.ptr());

  py::class_<Space>(m, "Space")
      .def_static("from_json", [](const std::string& text) { return Space(parse_spec(text)); })
      .def_static("load", [](const std::string& path) { return Space(load_spec(path)); })
      .def_property_readonly("beta", [](const Space& s) { return s.spec.beta; })
      .def_property_readonly("dimension", [](const Space& s) { return s.spec.dimension; })
      .def_property_readonly("resolution", [](const Space& s) { return s.spec.resolution; })
      .def_property_readonly("seed", [](const Space& s) { return s.spec.seed; })
      .def_property_readonly("hash", [](const Space& s) { return s.spec.hash; })
      .def_property_readonly("bbox", [](const Space& s) {
        return std::make_pair(from_point(s.space.bbox().lo), from_point(s.space.bbox().hi));
      })
      .def("distance_to_y", [](const Space& s, const std::vector<double>& p) {
        return s.space.singular().distance(to_point(p));
      })
      .def("__repr__", [](const Space& s) {
        return "<Space dim=" + std::to_string(s.spec.dimension) +
               " beta=" + std::to_string(s.spec.beta) + " hash=" + s.spec.hash + ">";
      });

  py::class_<DistanceBracket>(m, "DistanceBracket")
      .def_readonly("lower", &DistanceBracket::lower)
      .def_readonly("upper", &DistanceBracket::upper)
      .def_readonly("resolution", &DistanceBracket::resolution)
      .def_readonly("cells", &DistanceBracket::cells)
      .def_readonly("resource_limited", &DistanceBracket::resource_limited)
      .def_property_readonly("width", &DistanceBracket::width)
      .def_property_readonly("witness",
                             [](const DistanceBracket& b) { return from_points(b.witness.vertices); })
      .def("to_dict", [](const DistanceBracket& b) { return to_py(to_json(b)); })
      .def("__repr__", [](const DistanceBracket& b) {
        return "<DistanceBracket [" + std::to_string(b.lower) + ", " + std::to_string(b.upper) + "]>";
      });

  m.def(
      "distance",
      [](const Space& s, const std::vector<double>& x, const std::vector<double>& y,
         std::optional<double> resolution) {
        py::gil_scoped_release release;
        return distance(s.space, to_point(x), to_point(y), resolution.value_or(s.spec.resolution));
      },
      py::arg("space"), py::arg("x"), py::arg("y"), py::arg("resolution") = py::none(),
      "Certified bracket [lower, upper] for d_Y(x, y).");
  m.def(
      "refine",
      [](const Space& s, const DistanceBracket& b) {
        py::gil_scoped_release release;
        return refine(s.space, b);
      },
      py::arg("space"), py::arg("bracket"));
  m.def("distance_to_singular", [](const Space& s, const std::vector<double>& p) {
    return distance_to_singular(s.space, to_point(p));
  });
  m.def("lower_bound", [](const Space& s, const std::vector<double>& x, const std::vector<double>& y) {
    return certified_lower_bound(s.space, to_point(x), to_point(y));
  });
  m.def("path_length", [](const Space& s, const std::vector<std::vector<double>>& pts) {
    Polyline p;
    for (const auto& v : pts) p.vertices.push_back(to_point(v));
    return grushin_length(s.space, p);
  });

  m.def(
      "check_holder",
      [](const Space& s, double H, std::size_t samples, std::uint64_t seed) {
        return to_py(to_json(check_holder(s.space, H, samples, seed, s.spec.resolution)));
      },
      py::arg("space"), py::arg("H"), py::arg("samples") = 200, py::arg("seed") = 1);
  m.def(
      "check_quasisymmetry",
      [](const Space& s, double H, std::size_t triples, std::uint64_t seed) {
        return to_py(to_json(check_quasisymmetry(s.space, H, triples, seed, s.spec.resolution)));
      },
      py::arg("space"), py::arg("H"), py::arg("triples") = 1000, py::arg("seed") = 1);
  m.def(
      "check_curvature",
      [](const Space& s, double A, std::size_t samples, std::uint64_t seed) {
        return to_py(to_json(check_whitney_curvature(s.space, A, samples, seed)));
      },
      py::arg("space"), py::arg("A") = INFINITY, py::arg("samples") = 10, py::arg("seed") = 1);
  m.def("gaussian_curvature", [](const Space& s, const std::vector<double>& p) {
    return gaussian_curvature_conformal(s.space, to_point(p));
  });
  m.def(
      "estimate_doubling",
      [](const Space& s, std::size_t balls, std::uint64_t seed, std::size_t per_axis) {
        return to_py(to_json(estimate_doubling(s.space, balls, seed, per_axis)));
      },
      py::arg("space"), py::arg("balls") = 20, py::arg("seed") = 1, py::arg("per_axis") = 33);
  m.def("nondoubling_balls", [](double eps, int n) { return to_py(to_json(nondoubling_balls(eps, n))); },
        py::arg("eps"), py::arg("n"));
  m.def("eta_control", &eta_control, py::arg("beta"), py::arg("H"), py::arg("t"));
  m.def("holder_constant_uniform", &holder_constant_uniform, py::arg("C"), py::arg("N"),
        py::arg("beta"));

  m.def("admissible_a", &admissible_a, py::arg("beta"), py::arg("delta") = 1.0 / 8.0);
  m.def(
      "chart_constants",
      [](double a, double beta, double delta) {
        const auto k = chart_constants(a, beta, delta);
        py::dict d;
        d["a"] = k.a;
        d["C2"] = k.C2;
        d["J"] = k.J;
        d["C3"] = k.C3;
        d["lower_factor"] = k.lower_factor(beta);
        d["upper_factor"] = k.upper_factor(beta);
        return d;
      },
      py::arg("a"), py::arg("beta"), py::arg("delta") = 1.0 / 8.0);
  m.def("decompose", &decompose, py::arg("space"), py::arg("per_axis") = 100,
        py::arg("a") = py::none(), py::arg("enlarge") = false, py::arg("verify_balls") = false,
        py::arg("charts") = false, py::arg("eps") = 0.5,
        "Whitney decomposition of the per_axis lattice over the space's bbox.");

  m.def("cone_map", [](double beta, const std::vector<double>& p) {
    return from_point(cone_map(beta, to_point(p)));
  });
  m.def("grushin_chart", [](double alpha, const std::vector<double>& p) {
    return from_point(grushin_chart(alpha, to_point(p)));
  });
  m.def("grushin_chart_inverse", [](double alpha, const std::vector<double>& q) {
    return from_point(grushin_chart_inverse(alpha, to_point(q)));
  });
  m.def("snowflake_parameter", [](double beta, double eps) {
    const auto s = snowflake_parameter(beta, eps);
    py::dict d;
    d["beta_tilde"] = s.beta_tilde;
    d["alpha_tilde"] = s.alpha_tilde;
    d["target_dim"] = s.target_dim;
    return d;
  });
  m.def("annulus_sample", [](std::size_t n, double r0, double r1, std::uint64_t seed) {
    return from_points(annulus_sample(n, r0, r1, seed));
  });
  m.def(
      "measure_distortion",
      [](const Space& s, const std::vector<std::vector<double>>& points, const py::object& map,
         std::size_t pairs, std::uint64_t seed) {
        std::vector<Point> pts;
        for (const auto& v : points) pts.push_back(to_point(v));
        const auto f = make_map(map, s.spec.dimension);
        auto j = to_json(measure_distortion(s.space, pts, f, pairs, seed));
        j["map"] = f.describe();
        return to_py(j);
      },
      py::arg("space"), py::arg("points"), py::arg("map"), py::arg("pairs") = 2000,
      py::arg("seed") = 1,
      "map is a name or a list of names / (name, param) pairs applied left to right.");
  m.def("cone_length_check",
        [](double beta, std::size_t paths, std::uint64_t seed) {
          return to_py(to_json(cone_length_check(beta, paths, seed)));
        },
        py::arg("beta"), py::arg("paths") = 50, py::arg("seed") = 1);
  m.def("chart_length_check",
        [](double alpha, std::size_t paths, std::uint64_t seed) {
          return to_py(to_json(chart_length_check(alpha, paths, seed)));
        },
        py::arg("alpha"), py::arg("paths") = 50, py::arg("seed") = 1);
}
