#include "grushin/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>

namespace grushin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr double kRel = 1e-12;

bool le(double a, double b) { return a <= b + kRel * std::abs(b); }

}  // namespace

// ---------------------------------------------------------------------------------------
// Sample metrics

std::vector<std::pair<std::size_t, double>> SampleMetric::ball(std::size_t i,
                                                               double radius) const {
  const auto d = distances_from({i}, nullptr, radius);
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t j = 0; j < d.size(); ++j)
    if (d[j] <= radius) out.emplace_back(j, d[j]);
  return out;
}

DenseMetric::DenseMetric(std::vector<Point> points, std::vector<double> matrix)
    : points_(std::move(points)), d_(std::move(matrix)) {
  const std::size_t n = points_.size();
  if (d_.size() != n * n) throw PreconditionError("distance matrix size does not match points");
  for (std::size_t i = 0; i < n; ++i) {
    if (d_[i * n + i] != 0.0) throw PreconditionError("distance matrix has a nonzero diagonal");
    for (std::size_t j = 0; j < i; ++j) {
      const double a = d_[i * n + j];
      const double b = d_[j * n + i];
      if (!(a > 0.0) || std::abs(a - b) > 1e-12 * std::max(a, b))
        throw PreconditionError("distance matrix is not symmetric and positive off the diagonal");
    }
  }
}

DenseMetric DenseMetric::euclidean(std::vector<Point> points) {
  return from(std::move(points), [](const Point& a, const Point& b) { return dist(a, b); });
}

DenseMetric DenseMetric::from(std::vector<Point> points,
                              const std::function<double(const Point&, const Point&)>& d) {
  const std::size_t n = points.size();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) m[i * n + j] = m[j * n + i] = d(points[i], points[j]);
  return DenseMetric(std::move(points), std::move(m));
}

std::vector<double> DenseMetric::distances_from(const std::vector<std::size_t>& sources,
                                                std::vector<std::size_t>* owner,
                                                double limit) const {
  const std::size_t n = points_.size();
  std::vector<double> out(n, kInf);
  if (owner) owner->assign(n, kNone);
  for (const auto s : sources) {
    if (s >= n) throw PreconditionError("source index out of range");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = d_[s * n + j];
      if (limit >= 0.0 && v > limit) continue;
      if (v < out[j]) {
        out[j] = v;
        if (owner) (*owner)[j] = s;
      }
    }
  }
  return out;
}

double DenseMetric::min_separation() const {
  double best = kInf;
  const std::size_t n = points_.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) best = std::min(best, d_[i * n + j]);
  return best;
}

double DenseMetric::triangle_excess() const {
  const std::size_t n = points_.size();
  double worst = -kInf;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (i == k) continue;
      const double dik = d_[i * n + k];
      for (std::size_t j = 0; j < n; ++j)
        worst = std::max(worst, (dik - d_[i * n + j] - d_[j * n + k]) / dik);
    }
  return worst;
}

GraphMetric::GraphMetric(std::shared_ptr<const GeodesicGrid> grid,
                         std::vector<std::size_t> vertices)
    : grid_(std::move(grid)), vertices_(std::move(vertices)) {
  index_of_.assign(grid_->size(), kNone);
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i] >= grid_->size()) throw PreconditionError("vertex out of range");
    if (index_of_[vertices_[i]] != kNone) throw PreconditionError("duplicate vertex");
    index_of_[vertices_[i]] = i;
  }
  min_sep_ = kInf;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    for (const auto& [j, d] : ball(i, min_sep_))
      if (j != i && d > 0.0) min_sep_ = std::min(min_sep_, d);
}

GraphMetric::GraphMetric(std::shared_ptr<const GeodesicGrid> grid)
    : GraphMetric(grid, [&] {
        std::vector<std::size_t> all(grid->size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
      }()) {}

double GraphMetric::distance(std::size_t i, std::size_t j) const {
  return grid_->distance(vertices_[i], vertices_[j]);
}

std::vector<double> GraphMetric::distances_from(const std::vector<std::size_t>& sources,
                                                std::vector<std::size_t>* owner,
                                                double limit) const {
  std::vector<std::size_t> src(sources.size());
  for (std::size_t r = 0; r < sources.size(); ++r) {
    if (sources[r] >= vertices_.size()) throw PreconditionError("source index out of range");
    src[r] = vertices_[sources[r]];
  }
  std::vector<std::size_t> own;
  const auto d = grid_->distances_from(src, owner ? &own : nullptr, limit);
  std::vector<double> out(vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) out[i] = d[vertices_[i]];
  if (owner) {
    owner->assign(vertices_.size(), kNone);
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      const auto o = own[vertices_[i]];
      if (o < index_of_.size()) (*owner)[i] = index_of_[o];
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, double>> GraphMetric::ball(std::size_t i,
                                                              double radius) const {
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& [v, d] : grid_->ball(vertices_.at(i), radius))
    if (index_of_[v] != kNone) out.emplace_back(index_of_[v], d);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------------------
// Christ hierarchy

void require_christ_data(const ChristData& d) {
  if (!(d.delta > 0.0) || !(d.c0 > 0.0) || !(d.delta + d.c0 < 0.25))
    throw PreconditionError("need delta, c0 > 0 and delta + c0 < 1/4");
  if (!(d.C1 > 1.0 / (1.0 - d.delta))) throw PreconditionError("need C1 > 1/(1 - delta)");
}

const ChristHierarchy::Level& ChristHierarchy::level(int k) const {
  const int i = std::clamp(k, k_min(), k_fine()) - k_min_;
  return levels_[std::size_t(i)];
}

const std::vector<std::size_t>& ChristHierarchy::centers(int k) const {
  return level(k).centers;
}

std::size_t ChristHierarchy::cube_of(int k, std::size_t pos) const {
  return level(k).owner.at(pos);
}

ChristCube ChristHierarchy::cube(int k, std::size_t mu) const {
  const auto& lv = level(k);
  ChristCube c;
  c.k = k;
  c.mu = mu;
  c.center = lv.centers.at(mu);
  for (std::size_t p = 0; p < subset_.size(); ++p)
    if (lv.owner[p] == mu) c.members.push_back(subset_[p]);
  std::sort(c.members.begin(), c.members.end());
  if (k > k_min_) c.parent_mu = k > k_fine() ? mu : lv.parent[mu];
  if (std::max(k, k_min_) < k_fine()) {
    const auto& next = level(std::max(k, k_min_) + 1);
    for (std::size_t j = 0; j < next.centers.size(); ++j)
      if (next.parent[j] == mu) c.children_mu.push_back(j);
  }
  return c;
}

std::vector<ChristCube> ChristHierarchy::cubes() const {
  std::vector<ChristCube> out;
  for (int k = k_min(); k <= k_fine(); ++k) {
    const auto& lv = level(k);
    std::vector<std::vector<std::size_t>> members(lv.centers.size());
    for (std::size_t p = 0; p < subset_.size(); ++p) members[lv.owner[p]].push_back(subset_[p]);
    std::vector<std::vector<std::size_t>> children(lv.centers.size());
    if (k < k_fine()) {
      const auto& next = level(k + 1);
      for (std::size_t j = 0; j < next.centers.size(); ++j) children[next.parent[j]].push_back(j);
    }
    for (std::size_t mu = 0; mu < lv.centers.size(); ++mu) {
      ChristCube c;
      c.k = k;
      c.mu = mu;
      c.center = lv.centers[mu];
      c.members = std::move(members[mu]);
      std::sort(c.members.begin(), c.members.end());
      if (k > k_min_) c.parent_mu = lv.parent[mu];
      c.children_mu = std::move(children[mu]);
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

struct Built {
  int k_min = 0;
  std::vector<std::vector<std::size_t>> centers;
  /// Per level, per sample index: position of the nearest center, kNone outside the subset.
  std::vector<std::vector<std::size_t>> nearest;
};

// Nested greedy nets visited in `order` (subset positions); centers kept sorted by index.
Built build_nets(const SampleMetric& m, const ChristData& data,
                 const std::vector<std::size_t>& subset, const std::vector<std::size_t>& order) {
  const std::size_t n = m.size();
  std::vector<char> in_subset(n, 0);
  for (const auto i : subset) in_subset[i] = 1;

  double ecc = 0.0;
  for (const double v : m.distances_from({subset.front()}))
    if (std::isfinite(v)) ecc = std::max(ecc, v);
  Built b;
  b.k_min = ecc > 0.0 ? int(std::floor(std::log(2.0 * ecc) / std::log(data.delta))) : 0;

  std::vector<std::size_t> prev;
  for (int k = b.k_min;; ++k) {
    if (k - b.k_min > 400) throw NumericalError("net hierarchy did not reach the sample scale");
    const double r = std::pow(data.delta, k);
    std::vector<char> is_center(n, 0);
    std::vector<std::size_t> centers = prev;
    std::vector<double> mind(n, kInf);
    if (!prev.empty()) mind = m.distances_from(prev, nullptr, r);
    for (const auto c : prev) is_center[c] = 1;
    for (const auto pos : order) {
      const auto i = subset[pos];
      if (is_center[i] || mind[i] < r) continue;
      is_center[i] = 1;
      centers.push_back(i);
      for (const auto& [j, d] : m.ball(i, r)) mind[j] = std::min(mind[j], d);
    }
    std::sort(centers.begin(), centers.end());
    if (k == b.k_min && centers.size() > 1) {
      // The diameter estimate can sit exactly on a power of delta.
      --b.k_min;
      k = b.k_min - 1;
      continue;
    }
    std::vector<std::size_t> owner;
    m.distances_from(centers, &owner);
    std::vector<std::size_t> pos_of(n, kNone);
    for (std::size_t j = 0; j < centers.size(); ++j) pos_of[centers[j]] = j;
    std::vector<std::size_t> near(n, kNone);
    for (std::size_t i = 0; i < n; ++i)
      if (in_subset[i] && owner[i] != kNone) near[i] = pos_of[owner[i]];
    b.centers.push_back(centers);
    b.nearest.push_back(std::move(near));
    if (centers.size() == subset.size()) break;
    prev = std::move(centers);
  }
  return b;
}

}  // namespace

ChristHierarchy christ_decompose(const SampleMetric& m, const ChristData& data,
                                 std::vector<std::size_t> subset) {
  require_christ_data(data);
  if (subset.empty()) {
    subset.resize(m.size());
    std::iota(subset.begin(), subset.end(), std::size_t{0});
  }
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  if (subset.empty()) throw PreconditionError("empty sample");
  if (subset.back() >= m.size()) throw PreconditionError("subset index out of range");
  const std::size_t S = subset.size();

  std::vector<std::vector<std::size_t>> orders;
  orders.emplace_back(S);
  std::iota(orders[0].begin(), orders[0].end(), std::size_t{0});
  orders.emplace_back(orders[0].rbegin(), orders[0].rend());
  for (std::uint64_t seed : {1u, 2u}) {
    auto o = orders[0];
    std::mt19937_64 rng(seed);
    std::shuffle(o.begin(), o.end(), rng);
    orders.push_back(std::move(o));
  }

  std::optional<ChristHierarchy> best;
  for (std::size_t attempt = 0; attempt < orders.size(); ++attempt) {
    const Built b = build_nets(m, data, subset, orders[attempt]);
    ChristHierarchy h;
    h.data_ = data;
    h.subset_ = subset;
    h.k_min_ = b.k_min;
    const std::size_t L = b.centers.size();
    h.levels_.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      h.levels_[l].centers = b.centers[l];
      if (l > 0) {
        for (const auto c : b.centers[l]) h.levels_[l].parent.push_back(b.nearest[l - 1][c]);
      }
    }
    // Finest level: every point is its own center; coarser owners follow the parents.
    {
      auto& fine = h.levels_[L - 1];
      std::vector<std::size_t> pos_of(m.size(), kNone);
      for (std::size_t j = 0; j < fine.centers.size(); ++j) pos_of[fine.centers[j]] = j;
      fine.owner.resize(S);
      for (std::size_t p = 0; p < S; ++p) fine.owner[p] = pos_of[subset[p]];
      for (std::size_t l = L - 1; l-- > 0;) {
        h.levels_[l].owner.resize(S);
        for (std::size_t p = 0; p < S; ++p)
          h.levels_[l].owner[p] = h.levels_[l + 1].parent[h.levels_[l + 1].owner[p]];
      }
    }

    ChristCheck chk;
    chk.attempts = int(attempt + 1);
    chk.c0_tight = kInf;
    chk.C1_tight = 0.0;
    std::vector<std::size_t> pos_of(m.size(), kNone);
    for (std::size_t p = 0; p < S; ++p) pos_of[subset[p]] = p;
    const double reach = std::max(data.C1, 1.0 / (1.0 - data.delta)) * 1.5;
    for (std::size_t l = 0; l < L; ++l) {
      const int k = b.k_min + int(l);
      const double r = std::pow(data.delta, k);
      const auto& lv = h.levels_[l];
      std::vector<std::size_t> size(lv.centers.size(), 0);
      for (std::size_t p = 0; p < S; ++p) ++size[lv.owner[p]];
      if (l > 0)
        for (std::size_t p = 0; p < S; ++p)
          if (h.levels_[l - 1].owner[p] != lv.parent[lv.owner[p]]) chk.nested = false;
      for (std::size_t mu = 0; mu < lv.centers.size(); ++mu) {
        const auto x = lv.centers[mu];
        if (size[mu] == 0 || lv.owner[pos_of[x]] != mu) chk.dense = false;
        if (size[mu] == 1 && l + 1 == L) {
          // Singletons at the finest level: other points lie at least delta^k away.
          chk.c0_tight = std::min(chk.c0_tight, 1.0);
          continue;
        }
        auto near = m.ball(x, reach * r);
        std::size_t seen = 0;
        double far_member = 0.0;
        double near_other = kInf;
        for (const auto& [j, d] : near) {
          const auto p = pos_of[j];
          if (p == kNone) continue;
          if (lv.owner[p] == mu) {
            ++seen;
            far_member = std::max(far_member, d);
          } else {
            near_other = std::min(near_other, d);
          }
        }
        if (seen < size[mu]) {
          const auto all = m.distances_from({x});
          for (std::size_t p = 0; p < S; ++p)
            if (lv.owner[p] == mu) far_member = std::max(far_member, all[subset[p]]);
        }
        chk.C1_tight = std::max(chk.C1_tight, far_member / r);
        chk.c0_tight = std::min(chk.c0_tight, near_other / r);
        if (far_member > data.C1 * r * (1.0 + kRel) || near_other < data.c0 * r * (1.0 - kRel)) {
          ++chk.sandwich_failures;
          chk.sandwich = false;
        }
      }
    }
    h.check_ = chk;
    const bool better = !best || chk.sandwich_failures < best->check_.sandwich_failures;
    if (better) best = std::move(h);
    best->check_.attempts = int(attempt + 1);
    if (best->check_.sandwich) break;
  }
  return std::move(*best);
}

// ---------------------------------------------------------------------------------------
// Whitney cubes

namespace {

double eccentric_distance(const SampleMetric& m, const std::vector<std::size_t>& members,
                          std::size_t from, double reach) {
  if (members.size() <= 1) return 0.0;
  const auto near = m.ball(from, reach);
  std::vector<double> got;
  double far = 0.0;
  std::size_t hit = 0;
  auto it = near.begin();
  for (const auto j : members) {
    while (it != near.end() && it->first < j) ++it;
    if (it != near.end() && it->first == j) {
      far = std::max(far, it->second);
      ++hit;
    }
  }
  if (hit == members.size()) return far;
  const auto all = m.distances_from({from});
  for (const auto j : members) far = std::max(far, all[j]);
  return far;
}

double diameter(const SampleMetric& m, const std::vector<std::size_t>& members, double reach) {
  double d = 0.0;
  for (const auto i : members) d = std::max(d, eccentric_distance(m, members, i, reach));
  return d;
}

}  // namespace

CubeSystem whitney_decompose(const SampleMetric& m, const std::vector<std::size_t>& omega_in,
                             const WhitneyData& data, std::optional<std::vector<double>> boundary) {
  require_christ_data(data.christ());
  if (!(data.a >= 4.0)) throw PreconditionError("need a >= 4");
  const std::size_t n = m.size();
  CubeSystem sys;
  sys.data = data;
  sys.omega = omega_in;
  std::sort(sys.omega.begin(), sys.omega.end());
  sys.omega.erase(std::unique(sys.omega.begin(), sys.omega.end()), sys.omega.end());
  if (!sys.omega.empty() && sys.omega.back() >= n) throw PreconditionError("omega index out of range");
  std::vector<char> in_omega(n, 0);
  for (const auto i : sys.omega) in_omega[i] = 1;
  for (std::size_t i = 0; i < n; ++i)
    if (!in_omega[i]) sys.complement.push_back(i);
  sys.cube_of.assign(n, CubeSystem::npos);
  if (sys.omega.empty()) {
    sys.disjoint = sys.in_shell = sys.dense = true;
    return sys;
  }

  if (boundary) {
    if (boundary->size() != n) throw PreconditionError("boundary distances must cover the sample");
    sys.boundary = std::move(*boundary);
  } else {
    if (sys.complement.empty())
      throw PreconditionError("omega is the whole sample: no complement to measure distance to");
    sys.boundary = m.distances_from(sys.complement);
  }
  for (const auto i : sys.omega)
    if (!(sys.boundary[i] > 0.0) || !std::isfinite(sys.boundary[i]))
      throw PreconditionError("omega points need a finite positive distance to the complement");

  const auto h = christ_decompose(m, data.christ(), sys.omega);
  sys.christ = h.check();
  const double aC1 = data.a * data.C1;

  struct Candidate {
    int k;
    std::size_t center;
    std::size_t pos;
    bool singleton;
  };
  std::vector<Candidate> cand;
  const auto& sub = h.subset();
  for (std::size_t pos = 0; pos < sub.size(); ++pos) {
    const double b = sys.boundary[sub[pos]];
    int k = int(std::floor(std::log(b / aC1) / std::log(data.delta))) + 1;
    while (!(aC1 * std::pow(data.delta, k) < b)) ++k;
    while (!(b <= aC1 * std::pow(data.delta, k - 1))) --k;
    if (k > h.k_fine()) {
      cand.push_back({k, sub[pos], pos, true});
    } else {
      cand.push_back({k, h.centers(k)[h.cube_of(k, pos)], pos, false});
    }
  }
  std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
    return a.k != b.k ? a.k < b.k : a.center < b.center;
  });

  std::map<int, std::vector<std::vector<std::size_t>>> members_at;
  auto members_of = [&](int k, std::size_t mu) -> const std::vector<std::size_t>& {
    const int kc = std::clamp(k, h.k_min(), h.k_fine());
    auto it = members_at.find(kc);
    if (it == members_at.end()) {
      std::vector<std::vector<std::size_t>> lists(h.centers(kc).size());
      for (std::size_t p = 0; p < sub.size(); ++p) lists[h.cube_of(kc, p)].push_back(sub[p]);
      it = members_at.emplace(kc, std::move(lists)).first;
    }
    return it->second[mu];
  };

  std::vector<char> covered(n, 0);
  const double C1_use = std::max(data.C1, h.check().C1_tight);
  for (const auto& c : cand) {
    if (covered[c.center]) continue;
    WhitneyCube q;
    q.k = c.k;
    q.center = c.center;
    double reach = 0.0;
    if (c.singleton) {
      q.members = {c.center};
    } else {
      q.members = members_of(c.k, h.cube_of(c.k, c.pos));
      const int kc = std::clamp(c.k, h.k_min(), h.k_fine());
      reach = 2.0 * C1_use * std::pow(data.delta, kc) * (1.0 + 1e-9);
    }
    for (const auto i : q.members) {
      covered[i] = 1;
      sys.cube_of[i] = sys.cubes.size();
    }
    q.diam = diameter(m, q.members, reach);
    q.diam_enlarged = q.diam;
    q.boundary_distance = kInf;
    for (const auto i : q.members) q.boundary_distance = std::min(q.boundary_distance, sys.boundary[i]);
    const double dk = std::pow(data.delta, q.k);
    q.in_shell = le((data.a - 2.0) * data.C1 * dk, q.boundary_distance) &&
             le(q.boundary_distance, aC1 / data.delta * dk);
    sys.cubes.push_back(std::move(q));
  }

  sys.in_shell = std::all_of(sys.cubes.begin(), sys.cubes.end(), [](const auto& q) { return q.in_shell; });
  std::vector<std::size_t> hits(n, 0);
  for (const auto& q : sys.cubes)
    for (const auto i : q.members) ++hits[i];
  sys.disjoint = true;
  sys.dense = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (hits[i] > 1) sys.disjoint = false;
    if (in_omega[i] && hits[i] == 0) sys.dense = false;
    if (!in_omega[i] && hits[i] > 0) sys.disjoint = false;
  }
  return sys;
}

CubeSystem enlarge_cubes(const SampleMetric& m, CubeSystem sys) {
  for (auto& q : sys.cubes) {
    const double quarter = sys.data.c0 * std::pow(sys.data.delta, q.k) / 4.0;
    if (q.enlarged || !(q.diam < quarter)) continue;
    const double ecc = eccentric_distance(m, q.members, q.center, 2.0 * q.diam);
    q.enlarged = true;
    q.q_offset = quarter;
    q.diam_enlarged = std::max(q.diam, ecc + quarter);
  }
  return sys;
}

namespace {

// Distance from Q's members to every sample point, up to `limit`.
std::vector<std::pair<std::size_t, double>> reach_from(const SampleMetric& m,
                                                       const std::vector<std::size_t>& members,
                                                       double limit) {
  std::vector<std::pair<std::size_t, double>> out;
  if (members.size() <= 8) {
    for (const auto i : members) {
      auto b = m.ball(i, limit);
      out.insert(out.end(), b.begin(), b.end());
    }
    return out;
  }
  const auto d = m.distances_from(members, nullptr, limit);
  for (std::size_t j = 0; j < d.size(); ++j)
    if (d[j] <= limit) out.emplace_back(j, d[j]);
  return out;
}

std::size_t checked_cube(const CubeSystem& sys, std::size_t q) {
  if (q >= sys.cubes.size()) throw PreconditionError("cube index out of range");
  return q;
}

}  // namespace

double cube_distance(const SampleMetric& m, const CubeSystem& sys, std::size_t q, std::size_t r) {
  checked_cube(sys, q);
  checked_cube(sys, r);
  if (q == r) return 0.0;
  const auto d = m.distances_from(sys.cubes[q].members);
  double best = kInf;
  for (const auto j : sys.cubes[r].members) best = std::min(best, d[j]);
  return best;
}

double relative_distance(const SampleMetric& m, const CubeSystem& sys, std::size_t q,
                         std::size_t r) {
  checked_cube(sys, q);
  checked_cube(sys, r);
  if (q == r) return 0.0;
  const double dq = sys.cubes[q].diam_enlarged;
  const double dr = sys.cubes[r].diam_enlarged;
  if (!(dq > 0.0) || !(dr > 0.0))
    throw PreconditionError("zero-diameter cube; enlarge the system first");
  return cube_distance(m, sys, q, r) / std::min(dq, dr);
}

std::vector<std::vector<std::size_t>> whitney_stars(const SampleMetric& m, const CubeSystem& sys,
                                                    double eps, bool enlarged) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("eps must lie in (0, 1)");
  const std::size_t C = sys.cubes.size();
  auto diam = [&](std::size_t i) {
    return enlarged ? sys.cubes[i].diam_enlarged : sys.cubes[i].diam;
  };
  std::vector<std::vector<std::size_t>> stars(C);
  std::vector<double> best(C, kInf);
  std::vector<std::size_t> touched;
  for (std::size_t q = 0; q < C; ++q) {
    stars[q].push_back(q);
    const double dq = diam(q);
    if (!(dq > 0.0)) continue;
    for (const auto& [j, d] : reach_from(m, sys.cubes[q].members, eps * dq)) {
      const auto r = sys.cube_of[j];
      if (r == CubeSystem::npos || r == q) continue;
      if (best[r] == kInf) touched.push_back(r);
      best[r] = std::min(best[r], d);
    }
    for (const auto r : touched) {
      if (best[r] < eps * std::min(dq, diam(r))) stars[q].push_back(r);
      best[r] = kInf;
    }
    touched.clear();
    std::sort(stars[q].begin(), stars[q].end());
  }
  return stars;
}

namespace {

std::vector<std::size_t> second_star(const std::vector<std::vector<std::size_t>>& stars,
                                     std::size_t q) {
  std::vector<std::size_t> out;
  for (const auto r : stars[q]) out.insert(out.end(), stars[r].begin(), stars[r].end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

WhitneyBall whitney_ball(const SampleMetric& m, const CubeSystem& sys, std::size_t q, double eps) {
  checked_cube(sys, q);
  const auto stars = whitney_stars(m, sys, eps, true);
  return {stars[q], second_star(stars, q)};
}

BallOverlapReport verify_whitney_balls(const SampleMetric& m, const CubeSystem& sys, double eps) {
  BallOverlapReport rep;
  rep.eps = eps;
  rep.cubes = sys.cubes.size();
  const auto& D = sys.data;
  const auto stars = whitney_stars(m, sys, eps, true);
  const auto plain = whitney_stars(m, sys, eps, false);
  const double c = 1.0 + D.a * D.C1 / (2.0 * D.delta * D.c0) + eps;
  const double lo = (D.a - 2.0) / 2.0 / c;
  std::vector<std::size_t> membership(sys.cubes.size(), 0);
  for (std::size_t q = 0; q < sys.cubes.size(); ++q) {
    const auto& Q = sys.cubes[q];
    for (const auto r : stars[q]) {
      if (r == q) continue;
      ++rep.pairs_checked;
      const double dq = Q.diam_enlarged;
      const double dr = sys.cubes[r].diam_enlarged;
      if (!(le(lo * dr, dq) && le(dq, dr / lo))) ++rep.diameter_violations;
      if (!std::binary_search(stars[r].begin(), stars[r].end(), q)) ++rep.asymmetric_pairs;
    }
    const auto s2 = second_star(stars, q);
    if (Q.diam_enlarged <= D.c0 * std::pow(D.delta, Q.k) / 2.0) {
      ++rep.small_cubes;
      if (stars[q].size() != 1 || s2.size() != 1) ++rep.isolation_failures;
    }
    if (plain[q] != stars[q]) ++rep.correspondence_failures;
    rep.max_star = std::max(rep.max_star, stars[q].size());
    rep.max_star2 = std::max(rep.max_star2, s2.size());
    for (const auto r : s2) ++membership[r];
  }
  for (const auto v : membership) rep.max_membership = std::max(rep.max_membership, v);
  return rep;
}

// ---------------------------------------------------------------------------------------
// Per-cube charts

double ChartConstants::lower_factor(double beta) const { return std::pow(1.0 + 2.0 * J, -beta); }

double ChartConstants::upper_factor(double beta) const { return std::pow(C3 - J, -beta); }

ChartConstants chart_constants(double a, double beta, double delta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw PreconditionError("beta must lie in [0, 1)");
  if (!(a > 2.0)) throw PreconditionError("need a > 2");
  ChartConstants c;
  c.a = a;
  const double g = a / delta + 1.0;
  const double e = 1.0 / (1.0 - beta);
  c.C2 = e / g;
  c.J = 1.0 / (1.0 / c.C2 - 1.0);
  c.C3 = std::pow(a - 2.0, e) * std::pow(g, -e);
  return c;
}

double admissible_a(double beta, double delta) {
  for (int a = 4; a <= 1000000; ++a) {
    const auto c = chart_constants(a, beta, delta);
    if (1.0 / c.C2 - 1.0 > 0.0 && c.C3 - c.J > 0.0) return a;
  }
  throw PreconditionError("no admissible a up to 10^6: beta " + std::to_string(beta) +
                          " is too close to 1");
}

ChartReport cube_chart(const GrushinSpace& s, const SampleMetric& m, const CubeSystem& sys,
                       std::size_t cube, std::size_t max_pairs) {
  checked_cube(sys, cube);
  const auto& Q = sys.cubes[cube];
  const double beta = s.beta();
  const double delta = sys.data.delta;
  ChartReport rep;
  rep.cube = cube;
  rep.k = Q.k;
  rep.a_beta = admissible_a(beta, delta);
  rep.constants = chart_constants(sys.data.a, beta, delta);
  const double dk = std::pow(delta, Q.k);
  rep.M = sys.data.C1 * dk;
  rep.L = (sys.data.a / delta + 1.0) * sys.data.C1 * dk;
  rep.ell = std::pow((1.0 - beta) * rep.L, 1.0 / (1.0 - beta));
  const double lb = std::pow(rep.ell, beta);
  const double lf = rep.constants.lower_factor(beta);
  const double uf = rep.constants.upper_factor(beta);

  const auto& mem = Q.members;
  const std::size_t total = mem.size() * (mem.size() - 1) / 2;
  const std::size_t want = std::min(total, std::max<std::size_t>(max_pairs, 1));
  rep.ratio_min = kInf;
  rep.ratio_max = 0.0;
  std::size_t idx = 0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < mem.size() && rep.pairs < want; ++i) {
    for (std::size_t j = i + 1; j < mem.size() && rep.pairs < want; ++j, ++idx) {
      if (idx != (next * total) / want) continue;
      ++next;
      const Point& y = m.point(mem[i]);
      const Point& z = m.point(mem[j]);
      const double dE = dist(y, z);
      const double lower = certified_lower_bound(s, y, z);
      const double upper = std::max(lower, segment_length(s, y, z));
      ++rep.pairs;
      if (le(lf * dE, lb * lower) && le(lb * upper, uf * dE)) ++rep.certified;
      if (!le(lf * dE, lb * upper) || !le(lb * lower, uf * dE)) ++rep.violations;
      const double ratio = lb * 0.5 * (lower + upper) / dE;
      rep.ratio_min = std::min(rep.ratio_min, ratio);
      rep.ratio_max = std::max(rep.ratio_max, ratio);
    }
  }
  if (rep.pairs == 0) {
    rep.ratio_min = rep.ratio_max = 1.0;
    rep.distortion = 1.0;
  } else {
    rep.distortion = rep.ratio_max / rep.ratio_min;
  }
  return rep;
}

}  // namespace grushin
