#include "upress/leaf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace upress {

namespace {

void check_param(const LeafSegment& leaf, double q, const char* op) {
  const double slack = 1e-12 + 1e-12 * leaf.delta;
  if (q < -leaf.delta - slack || q > leaf.delta + slack)
    throw std::invalid_argument(std::string(op) + ": parameter outside [-delta, delta]");
}

double chord_sum(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) s += norm(v[i] - v[i - 1]);
  return s;
}

/// Map every vertex forward once, inserting pre-image midpoints until all
/// image gaps are at or below the resolution. Returns the image polyline.
std::vector<Vec2> push_refined(const SystemSpec& system, std::vector<Vec2>& cur,
                               double resolution, std::size_t* center,
                               std::size_t max_vertices) {
  std::vector<Vec2> img(cur.size());
  for (std::size_t i = 0; i < cur.size(); ++i) img[i] = system.fiber_apply_lift(cur[i]);
  for (int round = 0; round < 48; ++round) {
    std::vector<Vec2> ncur, nimg;
    ncur.reserve(cur.size() * 2);
    nimg.reserve(cur.size() * 2);
    std::size_t ncenter = center ? *center : 0;
    bool split = false;
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      ncur.push_back(cur[i]);
      nimg.push_back(img[i]);
      if (norm(img[i + 1] - img[i]) > resolution) {
        Vec2 mid = 0.5 * (cur[i] + cur[i + 1]);
        ncur.push_back(mid);
        nimg.push_back(system.fiber_apply_lift(mid));
        if (center && i + 1 <= *center) ++ncenter;
        split = true;
      }
    }
    ncur.push_back(cur.back());
    nimg.push_back(img.back());
    if (!split) break;
    cur = std::move(ncur);
    img = std::move(nimg);
    if (center) *center = ncenter;
    if (cur.size() > max_vertices)
      throw std::runtime_error("leaf: image refinement exceeded the vertex budget");
  }
  return img;
}

/// Translate a polyline by the integer vector that brings `anchor` into [0,1)^2.
void recenter_chart(std::vector<Vec2>& v, std::size_t anchor) {
  const double tx = std::floor(v[anchor][0]);
  const double ty = std::floor(v[anchor][1]);
  if (tx == 0.0 && ty == 0.0) return;
  for (Vec2& p : v) {
    p[0] -= tx;
    p[1] -= ty;
  }
}

}  // namespace

Vec2 LeafSegment::point_at(double q) const {
  std::size_t hint = 0;
  return point_at(q, hint);
}

Vec2 LeafSegment::point_at(double q, std::size_t& hint) const {
  check_param(*this, q, "point_at");
  q = std::clamp(q, s.front(), s.back());
  if (hint + 1 >= s.size()) hint = 0;
  if (s[hint] <= q && q <= s[hint + 1]) {
    // keep hint
  } else {
    const auto it = std::upper_bound(s.begin(), s.end(), q);
    hint = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - s.begin())) - 1;
    if (hint + 1 >= s.size()) hint = s.size() - 2;
  }
  const double span = s[hint + 1] - s[hint];
  const double t = span > 0.0 ? (q - s[hint]) / span : 0.0;
  return points[hint] + t * (points[hint + 1] - points[hint]);
}

TorusPoint LeafSegment::torus_point_at(double q) const {
  const Vec2 p = point_at(q);
  if (dim == 2) return TorusPoint::wrapped2(p[0], p[1]);
  return TorusPoint::wrapped3(p[0], p[1], theta);
}

namespace {

LeafSegment straight_leaf(const SystemSpec& system, const TorusPoint& x, double delta,
                          double resolution) {
  LeafSegment leaf;
  leaf.base = x;
  leaf.delta = delta;
  leaf.resolution = resolution;
  leaf.construction_depth = 0;
  leaf.dim = system.dim();
  leaf.theta = system.dim() == 3 ? x.theta() : 0.0;
  const Vec2 v = system.unstable_eigendirection();
  const Vec2 c = x.fiber();
  const int m = std::max(1, static_cast<int>(std::ceil(delta / resolution)));
  const double step = delta / m;
  leaf.s.reserve(static_cast<std::size_t>(2 * m + 1));
  leaf.points.reserve(static_cast<std::size_t>(2 * m + 1));
  for (int j = -m; j <= m; ++j) {
    double q = (j == -m) ? -delta : (j == m ? delta : j * step);
    leaf.s.push_back(q);
    leaf.points.push_back(c + q * v);
  }
  leaf.center_ = static_cast<std::size_t>(m);
  return leaf;
}

LeafSegment pushed_leaf(const SystemSpec& system, const TorusPoint& x, double delta,
                        double resolution, int depth) {
  // Measured mean expansion along the backward orbit sets the seed length.
  std::vector<TorusPoint> back(static_cast<std::size_t>(depth) + 1);
  back[0] = x;
  for (int k = 1; k <= depth; ++k)
    back[static_cast<std::size_t>(k)] = inverse(system, back[static_cast<std::size_t>(k - 1)]);
  const TorusPoint& tail = back[static_cast<std::size_t>(depth)];
  Vec2 v = system.fiber_unstable_direction(tail.fiber(), 30);
  const Vec2 seed_dir = v;
  double growth = 1.0;
  for (int k = depth; k >= 1; --k) {
    Vec2 w = system.fiber_jacobian_lift(back[static_cast<std::size_t>(k)].fiber()) * v;
    const double e = norm(w);
    growth *= e;
    v = {w[0] / e, w[1] / e};
  }

  double margin = 1.3;
  for (int attempt = 0; attempt < 5; ++attempt, margin *= 1.6) {
    const double half = delta * margin / growth;
    const int m = 32;
    std::vector<Vec2> cur(static_cast<std::size_t>(2 * m + 1));
    std::size_t center = static_cast<std::size_t>(m);
    for (int j = -m; j <= m; ++j)
      cur[static_cast<std::size_t>(j + m)] = tail.fiber() + (half * j / m) * seed_dir;

    for (int stepi = 0; stepi < depth; ++stepi) {
      cur = push_refined(system, cur, resolution, &center, 4u << 20);
      recenter_chart(cur, center);
    }

    // Anchor the parameterization at the base point: the pushed curve passes
    // through x up to the (contracted) transverse construction error.
    Vec2 xc = x.fiber();
    xc[0] += std::round(cur[center][0] - xc[0]);
    xc[1] += std::round(cur[center][1] - xc[1]);
    std::size_t best_i = 0;
    double best_d = std::numeric_limits<double>::infinity();
    double best_t = 0.0;
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const Vec2 d = cur[i + 1] - cur[i];
      const double len2 = norm_sq(d);
      double t = len2 > 0.0 ? std::clamp(dot(xc - cur[i], d) / len2, 0.0, 1.0) : 0.0;
      const Vec2 foot = cur[i] + t * d;
      const double dist = norm(foot - xc);
      if (dist < best_d) {
        best_d = dist;
        best_i = i;
        best_t = t;
      }
    }
    const Vec2 foot = cur[best_i] + best_t * (cur[best_i + 1] - cur[best_i]);

    // Arclength coordinates relative to the anchor.
    std::vector<double> acc(cur.size(), 0.0);
    for (std::size_t i = 1; i < cur.size(); ++i)
      acc[i] = acc[i - 1] + norm(cur[i] - cur[i - 1]);
    const double s_anchor = acc[best_i] + best_t * (acc[best_i + 1] - acc[best_i]);
    if (acc.back() - s_anchor < delta || s_anchor < delta) continue;  // seed too short

    LeafSegment leaf;
    leaf.base = x;
    leaf.delta = delta;
    leaf.resolution = resolution;
    leaf.construction_depth = depth;
    leaf.dim = system.dim();
    leaf.theta = system.dim() == 3 ? x.theta() : 0.0;

    auto point_on = [&](double target) {  // target in raw arclength (acc units)
      auto it = std::upper_bound(acc.begin(), acc.end(), target);
      std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - acc.begin())) - 1;
      if (i + 1 >= cur.size()) i = cur.size() - 2;
      const double span = acc[i + 1] - acc[i];
      const double t = span > 0.0 ? (target - acc[i]) / span : 0.0;
      return cur[i] + t * (cur[i + 1] - cur[i]);
    };

    leaf.s.push_back(-delta);
    leaf.points.push_back(point_on(s_anchor - delta));
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double q = acc[i] - s_anchor;
      if (q <= -delta + 1e-15 || q >= delta - 1e-15) continue;
      if (q > 0.0 && leaf.s.back() < 0.0) {  // insert the anchor exactly at 0
        leaf.center_ = leaf.s.size();
        leaf.s.push_back(0.0);
        leaf.points.push_back(foot);
      }
      if (q - leaf.s.back() <= 1e-15) continue;
      leaf.s.push_back(q);
      leaf.points.push_back(cur[i]);
    }
    if (leaf.s.back() < 0.0) {
      leaf.center_ = leaf.s.size();
      leaf.s.push_back(0.0);
      leaf.points.push_back(foot);
    }
    leaf.s.push_back(delta);
    leaf.points.push_back(point_on(s_anchor + delta));
    return leaf;
  }
  throw std::runtime_error("trace_leaf: pushed segment stayed shorter than the requested radius");
}

}  // namespace

LeafSegment trace_leaf(const SystemSpec& system, const TorusPoint& x, double delta,
                       double resolution, int depth) {
  if (x.dim != system.dim()) throw std::invalid_argument("trace_leaf: dimension mismatch");
  if (!(delta > 0.0) || delta >= 0.5)
    throw std::invalid_argument("trace_leaf: delta must lie in (0, 0.5)");
  if (!(resolution > 0.0)) throw std::invalid_argument("trace_leaf: resolution must be > 0");
  if (depth < 1) throw std::invalid_argument("trace_leaf: depth must be >= 1");
  if (system.linear_fiber()) return straight_leaf(system, x, delta, resolution);
  return pushed_leaf(system, x, delta, resolution, depth);
}

double du_distance(const LeafSegment& leaf, double s1, double s2) {
  check_param(leaf, s1, "du_distance");
  check_param(leaf, s2, "du_distance");
  return std::fabs(s2 - s1);
}

double dun_distance(const SystemSpec& system, const LeafSegment& leaf, double s1, double s2,
                    int n, double saturation) {
  if (n < 1) throw std::invalid_argument("dun_distance: n must be >= 1");
  check_param(leaf, s1, "dun_distance");
  check_param(leaf, s2, "dun_distance");
  if (s1 == s2) return 0.0;

  if (system.linear_fiber()) {
    // The iterated leaf stays the unstable line; distances scale exactly.
    double d = std::fabs(s2 - s1);
    double best = d;
    for (int j = 1; j < n; ++j) {
      d *= system.lambda_u();
      best = d;  // expanding, so the last iterate dominates
      if (best > saturation) break;
    }
    return best;
  }

  // Perturbed fiber: carry the leaf section between the two parameters and
  // measure arclength along its forward images.
  const double lo = std::min(s1, s2), hi = std::max(s1, s2);
  std::vector<Vec2> cur;
  cur.push_back(leaf.point_at(lo));
  for (std::size_t i = 0; i < leaf.s.size(); ++i) {
    if (leaf.s[i] > lo + 1e-15 && leaf.s[i] < hi - 1e-15) cur.push_back(leaf.points[i]);
  }
  cur.push_back(leaf.point_at(hi));

  double best = hi - lo;
  for (int j = 1; j < n; ++j) {
    if (best > saturation) return best;
    cur = push_refined(system, cur, leaf.resolution, nullptr, 8u << 20);
    recenter_chart(cur, 0);
    best = std::max(best, chord_sum(cur));
  }
  return best;
}

}  // namespace upress
