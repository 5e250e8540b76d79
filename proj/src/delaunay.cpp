#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <utility>

#include "glcorner/error.hpp"

namespace glc::detail {
namespace {

constexpr int kNone = -1;

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> nb{kNone, kNone, kNone};  // across the edge opposite v[i]
  std::array<int, 3> seg{kNone, kNone, kNone};
  bool alive = true;
  bool inside = true;
  bool given_up = false;
};

inline int nx(int i) { return i == 2 ? 0 : i + 1; }
inline int pv(int i) { return i == 0 ? 2 : i - 1; }

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

// Positive when d lies strictly inside the circumcircle of ccw (a, b, c).
bool in_circle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const long double adx = a.x - d.x, ady = a.y - d.y;
  const long double bdx = b.x - d.x, bdy = b.y - d.y;
  const long double cdx = c.x - d.x, cdy = c.y - d.y;
  const long double det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) +
                          (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) +
                          (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
  return det > 0;
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = dot(ab, ab), ac2 = dot(ac, ac);
  return {a.x + (ac.y * ab2 - ab.y * ac2) / d,
          a.y + (ab.x * ac2 - ac.x * ab2) / d};
}

struct EncEntry {
  int tri;
  int a;
  int b;
};

struct BoundaryPiece {
  int a;
  int b;
  int outer;
  int seg;
  bool inside;
};

class Refiner {
 public:
  Refiner(const Pslg& pslg, const RefineOptions& options)
      : pslg_(pslg), options_(options) {
    const double t = options.min_angle_deg * M_PI / 180.0;
    ratio_bound_ = 1.0 / (2.0 * std::sin(t));
  }

  RefinedMesh run() {
    init();
    recover_segments();
    mark_outside();
    refine();
    return extract();
  }

 private:
  // ---- basic helpers -----------------------------------------------------

  int new_tri() {
    if (!free_.empty()) {
      const int t = free_.back();
      free_.pop_back();
      tris_[t] = Tri{};
      return t;
    }
    tris_.emplace_back();
    return static_cast<int>(tris_.size()) - 1;
  }

  int add_vertex(Vec2 p, int seg, int input) {
    pts_.push_back(p);
    vseg_.push_back(seg);
    vinput_.push_back(input);
    vtri_.push_back(kNone);
    return static_cast<int>(pts_.size()) - 1;
  }

  int edge_index_in(int t, int a, int b) const {
    const Tri& T = tris_[t];
    for (int i = 0; i < 3; ++i) {
      const int p = T.v[nx(i)], q = T.v[pv(i)];
      if ((p == a && q == b) || (p == b && q == a)) return i;
    }
    return kNone;
  }

  void init() {
    const auto& P = pslg_.points;
    require(P.size() >= 3, ErrorKind::kMeshingFailure, "need at least 3 points");
    Vec2 lo = P[0], hi = P[0];
    for (const Vec2& p : P) {
      lo.x = std::min(lo.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }
    const Vec2 c = 0.5 * (lo + hi);
    scale_ = std::max(hi.x - lo.x, hi.y - lo.y);
    require(scale_ > 0, ErrorKind::kMeshingFailure, "degenerate point set");
    min_len_ = 1e-11 * scale_;
    const double L = 20.0 * scale_;
    add_vertex(c + Vec2{-L, -L}, kNone, kNone);
    add_vertex(c + Vec2{L, -L}, kNone, kNone);
    add_vertex(c + Vec2{0.0, L}, kNone, kNone);
    const int t = new_tri();
    tris_[t].v = {0, 1, 2};
    for (int k = 0; k < 3; ++k) vtri_[k] = t;

    input_angle_.assign(P.size(), 2 * M_PI);
    std::vector<std::vector<double>> dirs(P.size());
    for (const auto& s : pslg_.segments) {
      const Vec2 d = P[s[1]] - P[s[0]];
      dirs[s[0]].push_back(std::atan2(d.y, d.x));
      dirs[s[1]].push_back(std::atan2(-d.y, -d.x));
    }
    for (std::size_t i = 0; i < P.size(); ++i) {
      auto& d = dirs[i];
      if (d.size() < 2) continue;
      std::sort(d.begin(), d.end());
      double gap = d.front() + 2 * M_PI - d.back();
      for (std::size_t k = 1; k < d.size(); ++k) gap = std::min(gap, d[k] - d[k - 1]);
      input_angle_[i] = gap;
    }

    input_to_vertex_.resize(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) {
      const int loc = locate(P[i], tris_.empty() ? 0 : vtri_[0]);
      const int v = insert(P[i], loc, kNone, kNone, false, nullptr, static_cast<int>(i));
      require(v >= 0, ErrorKind::kMeshingFailure, "duplicate or degenerate input point");
      input_to_vertex_[i] = v;
    }
  }

  // Visibility walk. Returns the triangle containing p (closed).
  int locate(Vec2 p, int start) const {
    int t = start;
    if (t < 0 || !tris_[t].alive) {
      t = 0;
      while (!tris_[t].alive) ++t;
    }
    std::size_t steps = 0, seed = 0;
    while (true) {
      const Tri& T = tris_[t];
      bool moved = false;
      const int off = static_cast<int>(seed++ % 3);
      for (int k = 0; k < 3; ++k) {
        const int i = (k + off) % 3;
        const Vec2 a = pts_[T.v[nx(i)]], b = pts_[T.v[pv(i)]];
        if (orient(a, b, p) < 0 && T.nb[i] != kNone) {
          t = T.nb[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
      if (++steps > 4 * tris_.size() + 100)
        throw Error(ErrorKind::kMeshingFailure, "point location did not terminate");
    }
  }

  // Straight walk from the centroid of t to p. Returns the triangle holding p
  // or kNone when a segment blocks the way (reported through blocked).
  int trace(int t, Vec2 p, EncEntry* blocked) const {
    const Tri& T0 = tris_[t];
    const Vec2 o = (1.0 / 3.0) * (pts_[T0.v[0]] + pts_[T0.v[1]] + pts_[T0.v[2]]);
    int from_edge = kNone;
    std::size_t steps = 0;
    while (true) {
      const Tri& T = tris_[t];
      int exit = kNone;
      bool inside = true;
      for (int i = 0; i < 3; ++i) {
        const Vec2 a = pts_[T.v[nx(i)]], b = pts_[T.v[pv(i)]];
        if (orient(a, b, p) < 0) inside = false;
      }
      if (inside) return t;
      for (int i = 0; i < 3; ++i) {
        if (i == from_edge) continue;
        const Vec2 a = pts_[T.v[nx(i)]], b = pts_[T.v[pv(i)]];
        if (orient(a, b, p) >= 0) continue;
        const double sa = orient(o, p, a), sb = orient(o, p, b);
        if ((sa <= 0 && sb >= 0) || (sa >= 0 && sb <= 0)) {
          exit = i;
          break;
        }
      }
      if (exit == kNone) {
        for (int i = 0; i < 3; ++i) {
          if (i == from_edge) continue;
          const Vec2 a = pts_[T.v[nx(i)]], b = pts_[T.v[pv(i)]];
          if (orient(a, b, p) < 0) {
            exit = i;
            break;
          }
        }
      }
      if (exit == kNone) return t;
      if (T.seg[exit] != kNone || T.nb[exit] == kNone) {
        if (blocked) *blocked = {t, T.v[nx(exit)], T.v[pv(exit)]};
        return kNone;
      }
      const int n = T.nb[exit];
      from_edge = edge_index_in(n, T.v[nx(exit)], T.v[pv(exit)]);
      t = n;
      if (++steps > tris_.size() + 100) return kNone;
    }
  }

  // Bowyer-Watson insertion. Returns the new vertex or kNone when rejected.
  // split_edge: edge of t0 that p splits (a segment piece); its halves keep
  // the segment id. When check_encroach is set, segments on the cavity
  // boundary that p would encroach are reported and the insertion rejected.
  int insert(Vec2 p, int t0, int split_edge, int split_seg, bool check_encroach,
             std::vector<EncEntry>* encroached, int input = kNone) {
    ++epoch_;
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
    cav_.clear();
    auto add = [&](int t) {
      mark_[t] = epoch_;
      cav_.push_back(t);
    };
    add(t0);
    int split_a = kNone, split_b = kNone;
    if (split_edge != kNone) {
      const Tri& T = tris_[t0];
      split_a = T.v[nx(split_edge)];
      split_b = T.v[pv(split_edge)];
      if (T.nb[split_edge] != kNone) add(T.nb[split_edge]);
    } else {
      const Tri& T = tris_[t0];
      for (int i = 0; i < 3; ++i) {
        const Vec2 a = pts_[T.v[nx(i)]], b = pts_[T.v[pv(i)]];
        if (norm(p - a) < min_len_ || norm(p - b) < min_len_) return kNone;
        const double o = orient(a, b, p);
        if (o <= 1e-13 * dot(b - a, b - a)) {
          if (T.seg[i] != kNone) {
            if (encroached) encroached->push_back({t0, T.v[nx(i)], T.v[pv(i)]});
            return kNone;
          }
          if (T.nb[i] != kNone && mark_[T.nb[i]] != epoch_) add(T.nb[i]);
        }
      }
    }
    for (std::size_t k = 0; k < cav_.size(); ++k) {
      const Tri T = tris_[cav_[k]];
      for (int i = 0; i < 3; ++i) {
        const int n = T.nb[i];
        if (n == kNone || mark_[n] == epoch_) continue;
        if (T.seg[i] != kNone) continue;
        const Tri& N = tris_[n];
        if (in_circle(pts_[N.v[0]], pts_[N.v[1]], pts_[N.v[2]], p)) add(n);
      }
    }

    // Boundary of the cavity; grow it until p sees every boundary edge.
    bnd_.clear();
    for (int pass = 0;; ++pass) {
      bnd_.clear();
      int fix = kNone;
      bool reject = false;
      for (int t : cav_) {
        const Tri& T = tris_[t];
        for (int i = 0; i < 3; ++i) {
          const int n = T.nb[i];
          if (n != kNone && mark_[n] == epoch_) continue;
          const int a = T.v[nx(i)], b = T.v[pv(i)];
          const double o = orient(pts_[a], pts_[b], p);
          const double len2 = dot(pts_[b] - pts_[a], pts_[b] - pts_[a]);
          if (o <= 1e-14 * len2) {
            if (T.seg[i] != kNone || n == kNone) {
              if (T.seg[i] != kNone && encroached) encroached->push_back({t, a, b});
              reject = true;
            } else if (fix == kNone) {
              fix = n;
            }
          }
          bnd_.push_back({a, b, n, T.seg[i], T.inside});
        }
      }
      if (reject) return kNone;
      if (fix == kNone) break;
      add(fix);
      if (pass > 64) return kNone;
    }

    if (check_encroach) {
      bool enc = false;
      for (const auto& e : bnd_) {
        if (e.seg == kNone) continue;
        if (dot(pts_[e.a] - p, pts_[e.b] - p) < 0) {
          // Locate the cavity triangle that owns the edge.
          for (int t : cav_) {
            if (edge_index_in(t, e.a, e.b) != kNone) {
              if (encroached) encroached->push_back({t, e.a, e.b});
              break;
            }
          }
          enc = true;
        }
      }
      if (enc) return kNone;
    }

    const int seg_of_p = split_seg;
    const int vp = add_vertex(p, seg_of_p, input);
    for (int t : cav_) {
      tris_[t].alive = false;
      free_.push_back(t);
    }
    created_.clear();
    link_.clear();
    for (const auto& e : bnd_) {
      const int t = new_tri();
      Tri& T = tris_[t];
      T.v = {e.a, e.b, vp};
      T.nb[2] = e.outer;
      T.seg[2] = e.seg;
      T.inside = e.inside;
      if (split_edge != kNone) {
        if (e.b == split_a || e.b == split_b) T.seg[0] = split_seg;
        if (e.a == split_a || e.a == split_b) T.seg[1] = split_seg;
      }
      if (e.outer != kNone) {
        Tri& O = tris_[e.outer];
        for (int j = 0; j < 3; ++j) {
          if (O.v[j] != e.a && O.v[j] != e.b) O.nb[j] = t;
        }
      }
      created_.push_back(t);
      link_.push_back({e.a, e.b});
    }
    // Pair up the spokes: tri (a, b, p) meets tri (b, c, p) along (b, p).
    for (std::size_t i = 0; i < created_.size(); ++i) {
      const int b = link_[i].second;
      for (std::size_t j = 0; j < created_.size(); ++j) {
        if (link_[j].first == b) {
          tris_[created_[i]].nb[0] = created_[j];
          tris_[created_[j]].nb[1] = created_[i];
          break;
        }
      }
    }
    for (int t : created_) {
      for (int k = 0; k < 3; ++k) vtri_[tris_[t].v[k]] = t;
    }
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
    return vp;
  }

  bool find_edge(int a, int b, int* tri, int* edge) const {
    const int t0 = vtri_[a];
    for (int dir = 0; dir < 2; ++dir) {
      int t = t0;
      std::size_t guard = 0;
      while (t != kNone) {
        const Tri& T = tris_[t];
        int k = 0;
        while (T.v[k] != a) ++k;
        if (T.v[nx(k)] == b) {
          *tri = t;
          *edge = pv(k);
          return true;
        }
        if (T.v[pv(k)] == b) {
          *tri = t;
          *edge = nx(k);
          return true;
        }
        t = dir == 0 ? T.nb[nx(k)] : T.nb[pv(k)];
        if (t == t0 || ++guard > 10000) break;
      }
      if (t == t0) break;
    }
    return false;
  }

  void set_segment(int t, int i, int seg) {
    Tri& T = tris_[t];
    T.seg[i] = seg;
    const int n = T.nb[i];
    if (n != kNone) {
      const int j = edge_index_in(n, T.v[nx(i)], T.v[pv(i)]);
      tris_[n].seg[j] = seg;
    }
  }

  bool is_shell_center(int v) const {
    return vinput_[v] != kNone && input_angle_[vinput_[v]] < 0.5 * M_PI + 0.05;
  }

  Vec2 split_point(int a, int b) const {
    const Vec2 pa = pts_[a], pb = pts_[b];
    const double L = norm(pb - pa);
    const bool ca = is_shell_center(a), cb = is_shell_center(b);
    if (ca != cb) {
      const double d = std::exp2(std::round(std::log2(0.5 * L)));
      if (d > 0.2 * L && d < 0.8 * L) {
        return ca ? pa + (d / L) * (pb - pa) : pb + (d / L) * (pa - pb);
      }
    }
    return 0.5 * (pa + pb);
  }

  void recover_segments() {
    for (std::size_t s = 0; s < pslg_.segments.size(); ++s) {
      std::vector<std::pair<int, int>> stack;
      stack.emplace_back(input_to_vertex_[pslg_.segments[s][0]],
                         input_to_vertex_[pslg_.segments[s][1]]);
      while (!stack.empty()) {
        const auto [a, b] = stack.back();
        stack.pop_back();
        int t, e;
        if (find_edge(a, b, &t, &e)) {
          set_segment(t, e, static_cast<int>(s));
          continue;
        }
        require(norm(pts_[b] - pts_[a]) > min_len_, ErrorKind::kMeshingFailure,
                "segment recovery collapsed");
        const Vec2 m = split_point(a, b);
        const int loc = locate(m, vtri_[a]);
        const int v = insert(m, loc, kNone, kNone, false, nullptr);
        require(v >= 0, ErrorKind::kMeshingFailure, "segments intersect");
        vseg_[v] = static_cast<int>(s);
        stack.emplace_back(a, v);
        stack.emplace_back(v, b);
      }
    }
  }

  void mark_outside() {
    std::vector<int> stack;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      Tri& T = tris_[t];
      if (!T.alive) continue;
      if (T.v[0] < 3 || T.v[1] < 3 || T.v[2] < 3) {
        T.inside = false;
        stack.push_back(static_cast<int>(t));
      }
    }
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      for (int i = 0; i < 3; ++i) {
        const int n = tris_[t].nb[i];
        if (n == kNone || tris_[t].seg[i] != kNone || !tris_[n].inside) continue;
        tris_[n].inside = false;
        stack.push_back(n);
      }
    }
  }

  // ---- quality ------------------------------------------------------------

  bool is_bad(int t) const {
    const Tri& T = tris_[t];
    if (!T.alive || !T.inside || T.given_up) return false;
    const Vec2 p[3] = {pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]]};
    double l[3];
    for (int i = 0; i < 3; ++i) l[i] = norm(p[pv(i)] - p[nx(i)]);
    int imin = 0, imax = 0;
    for (int i = 1; i < 3; ++i) {
      if (l[i] < l[imin]) imin = i;
      if (l[i] > l[imax]) imax = i;
    }
    if (l[imin] < 1e-9 * scale_) return false;
    if (options_.size) {
      const Vec2 c = (1.0 / 3.0) * (p[0] + p[1] + p[2]);
      if (l[imax] > options_.size(c)) return true;
    }
    const double area = 0.5 * orient(p[0], p[1], p[2]);
    const double R = l[0] * l[1] * l[2] / (4.0 * area);
    if (R / l[imin] <= ratio_bound_) return false;

    // Smallest angle sits at a small input angle: cannot be improved.
    const int apex = T.v[imin];
    if (vinput_[apex] != kNone && input_angle_[vinput_[apex]] < M_PI / 3 + 1e-9)
      return false;
    // Shortest edge joins two segments at equal distance from their shared
    // acute apex: splitting it would cascade toward the apex.
    const int u = T.v[nx(imin)], w = T.v[pv(imin)];
    if (vseg_[u] != kNone && vseg_[w] != kNone && vseg_[u] != vseg_[w]) {
      const auto& su = pslg_.segments[vseg_[u]];
      const auto& sw = pslg_.segments[vseg_[w]];
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          if (su[i] != sw[j]) continue;
          if (input_angle_[su[i]] >= M_PI / 3 + 1e-9) continue;
          const Vec2 c = pslg_.points[su[i]];
          const double du = norm(pts_[u] - c), dw = norm(pts_[w] - c);
          if (std::abs(du - dw) <= 1e-6 * std::max(du, dw)) return false;
        }
      }
    }
    return true;
  }

  void check_segment_edges(int t) {
    const Tri& T = tris_[t];
    if (!T.alive || !T.inside) return;
    for (int i = 0; i < 3; ++i) {
      if (T.seg[i] == kNone) continue;
      const int a = T.v[nx(i)], b = T.v[pv(i)];
      if (dot(pts_[a] - pts_[T.v[i]], pts_[b] - pts_[T.v[i]]) < 0) enc_.push_back({t, a, b});
    }
  }

  void after_insert() {
    for (int t : created_) {
      check_segment_edges(t);
      if (is_bad(t)) bad_.push_back(t);
    }
  }

  bool split_segment(const EncEntry& e) {
    if (!tris_[e.tri].alive) return false;
    const int i = edge_index_in(e.tri, e.a, e.b);
    if (i == kNone || tris_[e.tri].seg[i] == kNone) return false;
    if (norm(pts_[e.b] - pts_[e.a]) < 1e-9 * scale_) return false;
    const Vec2 m = split_point(e.a, e.b);
    const int v = insert(m, e.tri, i, tris_[e.tri].seg[i], false, nullptr);
    require(v >= 0, ErrorKind::kMeshingFailure, "segment split failed");
    after_insert();
    return true;
  }

  void sweep() {
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!tris_[t].alive) continue;
      check_segment_edges(static_cast<int>(t));
      if (is_bad(static_cast<int>(t))) bad_.push_back(static_cast<int>(t));
    }
  }

  void refine() {
    sweep();
    std::vector<EncEntry> rejected;
    while (true) {
      if (pts_.size() > options_.max_vertices)
        throw Error(ErrorKind::kMeshingFailure, "vertex budget exceeded");
      if (!enc_.empty()) {
        const EncEntry e = enc_.front();
        enc_.pop_front();
        split_segment(e);
        continue;
      }
      if (!bad_.empty()) {
        const int t = bad_.front();
        bad_.pop_front();
        if (!is_bad(t)) continue;
        const Tri& T = tris_[t];
        const Vec2 c = circumcenter(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]]);
        EncEntry blocked{kNone, kNone, kNone};
        const int ct = trace(t, c, &blocked);
        if (ct == kNone) {
          const int be = blocked.tri == kNone
                             ? kNone
                             : edge_index_in(blocked.tri, blocked.a, blocked.b);
          if (be != kNone && tris_[blocked.tri].seg[be] != kNone) {
            enc_.push_back(blocked);
            bad_.push_back(t);
          } else {
            tris_[t].given_up = true;
          }
          continue;
        }
        rejected.clear();
        const int v = insert(c, ct, kNone, kNone, true, &rejected);
        if (v == kNone) {
          if (rejected.empty()) {
            tris_[t].given_up = true;
          } else {
            for (const auto& r : rejected) enc_.push_back(r);
            bad_.push_back(t);
          }
          continue;
        }
        after_insert();
        continue;
      }
      sweep();
      if (enc_.empty() && bad_.empty()) break;
    }
  }

  RefinedMesh extract() const {
    RefinedMesh out;
    std::vector<int> map(pts_.size(), kNone);
    // Input points keep the leading indices.
    for (int v : input_to_vertex_) {
      if (map[v] == kNone) {
        map[v] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(pts_[v]);
      }
    }
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      const Tri& T = tris_[t];
      if (!T.alive || !T.inside) continue;
      for (int k = 0; k < 3; ++k) {
        if (map[T.v[k]] == kNone) {
          map[T.v[k]] = static_cast<int>(out.nodes.size());
          out.nodes.push_back(pts_[T.v[k]]);
        }
      }
    }
    // Renumber non-input nodes by creation order for reproducibility.
    {
      std::vector<int> order;
      for (std::size_t v = 3; v < pts_.size(); ++v) {
        if (map[v] != kNone && vinput_[v] == kNone) order.push_back(static_cast<int>(v));
      }
      int next = static_cast<int>(input_to_vertex_.size());
      for (int v : order) {
        map[v] = next;
        out.nodes[next] = pts_[v];
        ++next;
      }
    }
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      const Tri& T = tris_[t];
      if (!T.alive || !T.inside) continue;
      out.triangles.push_back({map[T.v[0]], map[T.v[1]], map[T.v[2]]});
      for (int i = 0; i < 3; ++i) {
        if (T.seg[i] == kNone) continue;
        const int n = T.nb[i];
        const bool boundary = n == kNone || !tris_[n].inside;
        if (!boundary && n < static_cast<int>(t)) continue;
        out.segment_edges.push_back({map[T.v[nx(i)]], map[T.v[pv(i)]], T.seg[i]});
      }
    }
    out.input_to_node.resize(input_to_vertex_.size());
    for (std::size_t i = 0; i < input_to_vertex_.size(); ++i)
      out.input_to_node[i] = map[input_to_vertex_[i]];
    return out;
  }

  const Pslg& pslg_;
  RefineOptions options_;
  double ratio_bound_ = 1.0;
  double scale_ = 1.0;
  double min_len_ = 0.0;

  std::vector<Vec2> pts_;
  std::vector<int> vseg_;
  std::vector<int> vinput_;
  std::vector<int> vtri_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<double> input_angle_;
  std::vector<int> input_to_vertex_;

  std::vector<int> mark_;
  int epoch_ = 0;
  std::vector<int> cav_;
  std::vector<BoundaryPiece> bnd_;
  std::vector<int> created_;
  std::vector<std::pair<int, int>> link_;

  std::deque<EncEntry> enc_;
  std::deque<int> bad_;
};

}  // namespace

RefinedMesh refine_pslg(const Pslg& pslg, const RefineOptions& options) {
  Refiner r(pslg, options);
  return r.run();
}

}  // namespace glc::detail
