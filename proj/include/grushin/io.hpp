#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "grushin/analysis.hpp"
#include "grushin/embeddings.hpp"
#include "grushin/geodesic.hpp"
#include "grushin/metric.hpp"
#include "grushin/whitney.hpp"

namespace grushin {

inline constexpr const char* kVersion = "0.1.0";

/// A parsed space description.
///
///   {"dimension": 2, "beta": 0.5,
///    "singular": [{"type": "point", "at": [0, 0]}],
///    "bbox": {"lo": [-1, -1], "hi": [1, 1]},
///    "solver": {"resolution": 0.02, "pad": 2.0, "seed": 1}}
///
/// Primitive types: point (at), segment (a, b), halfline (origin, direction), hyperplane
/// or line (point, normal), box (lo, hi), cloud (points), coordinate-plane (axis, offset).
struct SpaceSpec {
  std::size_t dimension = 2;
  double beta = 0.0;
  SingularSet singular{2, {shape::PointShape{Point{0.0, 0.0}}}};
  BoundingBox bbox;
  double resolution = 0.02;
  double pad = -1.0;
  std::uint64_t seed = 1;
  /// 16 hex digits of FNV-1a over the canonical JSON.
  std::string hash;

  [[nodiscard]] GrushinSpace space() const;
};

/// Throws SpecError naming the line and column for syntax errors and the field path for
/// invalid content.
SpaceSpec parse_spec(const std::string& text);
SpaceSpec load_spec(const std::string& path);

std::string fnv1a_hex(const std::string& bytes);

nlohmann::json to_json(const Point& p);
nlohmann::json to_json(const DistanceBracket& b);
nlohmann::json to_json(const HolderReport& r);
nlohmann::json to_json(const QuasisymmetryReport& r);
nlohmann::json to_json(const DoublingReport& r);
nlohmann::json to_json(const CurvatureReport& r);
nlohmann::json to_json(const NondoublingReport& r);
nlohmann::json to_json(const ChristCheck& c);
nlohmann::json to_json(const CubeSystem& sys);
nlohmann::json to_json(const BallOverlapReport& r);
nlohmann::json to_json(const ChartReport& r);
nlohmann::json to_json(const DistortionReport& r);
nlohmann::json to_json(const LengthCheck& r);

/// One row per cube member: cube, k, point, coordinates.
std::string cube_csv(const SampleMetric& m, const CubeSystem& sys);

/// Pretty JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace grushin
