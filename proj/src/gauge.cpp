#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "glcorner/assembly.hpp"
#include "glcorner/error.hpp"

namespace glc {

GaugeField GaugeField::standard() { return GaugeField{}; }

GaugeField GaugeField::explicit_nodal(std::vector<Vec2> values) {
  GaugeField g;
  g.kind_ = Kind::kExplicit;
  g.nodal_ = std::move(values);
  return g;
}

GaugeField GaugeField::analytic(std::function<Vec2(Vec2)> f) {
  require(static_cast<bool>(f), ErrorKind::kInvalidParameter, "empty gauge function");
  GaugeField g;
  g.kind_ = Kind::kAnalytic;
  g.f_ = std::move(f);
  return g;
}

GaugeField GaugeField::with_correction(std::vector<Vec2> nodal) const {
  GaugeField g = *this;
  g.nodal_ = std::move(nodal);
  return g;
}

Vec2 GaugeField::base(Vec2 x) const {
  switch (kind_) {
    case Kind::kStandardF: return standard_f(x);
    case Kind::kAnalytic: return f_(x);
    case Kind::kExplicit: return {0.0, 0.0};
  }
  return {0.0, 0.0};
}

Vec2 GaugeField::eval(const Mesh& mesh, std::size_t t, const std::array<double, 3>& bary) const {
  const auto& T = mesh.triangles[t];
  const Vec2 x = bary[0] * mesh.nodes[T[0]] + bary[1] * mesh.nodes[T[1]] + bary[2] * mesh.nodes[T[2]];
  Vec2 a = base(x);
  if (!nodal_.empty()) {
    a += bary[0] * nodal_[T[0]] + bary[1] * nodal_[T[1]] + bary[2] * nodal_[T[2]];
  }
  return a;
}

Vec2 GaugeField::at_node(const Mesh& mesh, std::size_t i) const {
  Vec2 a = base(mesh.nodes[i]);
  if (!nodal_.empty()) a += nodal_[i];
  return a;
}

namespace {

// Minimizing momentum of the half-line de Gennes operator (its square is the
// boundary ground energy). Only shapes the gauge; accuracy is not critical.
constexpr double kXi0 = 0.76818365;

// Quadratic potential Phi with F + grad Phi equal to the shifted Landau gauge
// of the line through p0 with tangent e and inward normal n:
//   A_e(x) = -sigma ((x - p0).n - shift) e,  sigma = e x n.
struct EdgePotential {
  double J11, J12, J22;  // symmetric Jacobian of A_e - F
  Vec2 c;                // (A_e - F)(0)

  EdgePotential(Vec2 p0, Vec2 e, Vec2 n, double shift) {
    const double sigma = cross(e, n);
    J11 = -sigma * e.x * n.x;
    J22 = -sigma * e.y * n.y;
    J12 = 0.5 * (-sigma * e.x * n.y - sigma * e.y * n.x);
    c = sigma * (dot(p0, n) + shift) * e;
  }
  double value(Vec2 x) const {
    return 0.5 * (J11 * x.x * x.x + 2 * J12 * x.x * x.y + J22 * x.y * x.y) + dot(c, x);
  }
  Vec2 grad(Vec2 x) const { return {J11 * x.x + J12 * x.y + c.x, J12 * x.x + J22 * x.y + c.y}; }
};

// C2 step on [0, 1].
double smooth_step(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}
double smooth_step_d(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

// Blended edge gauge potential of the sector {|theta| < alpha/2} (vertex at
// the origin). Returns Phi and grad Phi, so that A = F + grad Phi.
class SectorPotential {
 public:
  SectorPotential(double alpha, double shift)
      : alpha_(alpha),
        lower_({0, 0}, {std::cos(-alpha / 2), std::sin(-alpha / 2)},
               {std::sin(alpha / 2), std::cos(alpha / 2)}, shift),
        upper_({0, 0}, {std::cos(alpha / 2), std::sin(alpha / 2)},
               {std::sin(alpha / 2), -std::cos(alpha / 2)}, shift) {}

  void eval(Vec2 y, double* phi, Vec2* grad) const {
    const double r2 = dot(y, y);
    const double p1 = lower_.value(y), p2 = upper_.value(y);
    const Vec2 g1 = lower_.grad(y), g2 = upper_.grad(y);
    if (r2 == 0.0) {
      *phi = 0.0;
      *grad = 0.5 * (g1 + g2);
      return;
    }
    const double theta = std::atan2(y.y, y.x);
    const double s = (theta + alpha_ / 2) / alpha_;
    const double w = 1.0 - smooth_step(s);
    const double dw = -smooth_step_d(s) / alpha_;
    const Vec2 dtheta{-y.y / r2, y.x / r2};
    *phi = w * p1 + (1 - w) * p2;
    *grad = w * g1 + (1 - w) * g2 + (p1 - p2) * dw * dtheta;
  }

 private:
  double alpha_;
  EdgePotential lower_, upper_;
};

}  // namespace

GaugeField make_sector_gauge(double alpha, SectorGauge type, double b) {
  require(alpha > 0 && alpha <= 2 * M_PI + 1e-12, ErrorKind::kInvalidParameter,
          "sector angle must lie in (0, 2pi]");
  require(b > 0, ErrorKind::kInvalidParameter, "field strength must be positive");
  switch (type) {
    case SectorGauge::kStandard: return GaugeField::standard();
    case SectorGauge::kAngular:
      return GaugeField::analytic([](Vec2 x) {
        const double t = std::atan2(x.y, x.x);
        return Vec2{-t * x.x, -t * x.y};
      });
    case SectorGauge::kEdgeBlend: {
      auto pot = std::make_shared<SectorPotential>(alpha, kXi0 / std::sqrt(b));
      return GaugeField::analytic([pot](Vec2 x) {
        double phi;
        Vec2 g;
        pot->eval(x, &phi, &g);
        return standard_f(x) + g;
      });
    }
  }
  return GaugeField::standard();
}

namespace {

struct CornerPatch {
  Vec2 p;
  double angle_rot;  // rotation from the sector frame to the global frame
  Vec2 fp;           // F(p)
  double c = 0.0;    // additive constant
  std::shared_ptr<SectorPotential> pot;

  void eval(Vec2 x, double* phi, Vec2* grad) const {
    const Vec2 y = rotate(x - p, -angle_rot);
    double ph;
    Vec2 gy;
    pot->eval(y, &ph, &gy);
    *phi = -dot(fp, x) + ph + c;
    *grad = -1.0 * fp + rotate(gy, angle_rot);
  }
};

// Corner patches joined along each edge, where neighbouring patches are the
// same Landau gauge up to a constant. The loop sum of those constants is the
// flux mismatch between b * area and the edge gauges; its integer part (in
// units of 2 pi / b) goes into a flux tube at the centroid, which is invisible
// to the operator, and only the remainder (|b r| <= pi) is spread over the
// edges.
//
// Star-shaped polygons use weights depending on the angle about the centroid,
// so that each transition sits on an edge midpoint and every corner zone
// belongs to a single patch. Otherwise softmin weights of the corner distances
// are used, with the whole mismatch spread over the edges.
class PolygonPotential {
 public:
  PolygonPotential(const PolygonDomain& poly, double b) {
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    double lmin = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < n; ++s) {
      const Vec2 out = v[(s + 1) % n] - v[s];
      lmin = std::min(lmin, norm(out));
      CornerPatch c;
      c.p = v[s];
      c.angle_rot = std::atan2(out.y, out.x) + 0.5 * poly.angles()[s];
      c.fp = standard_f(v[s]);
      c.pot = std::make_shared<SectorPotential>(poly.angles()[s], kXi0 / std::sqrt(b));
      patches_.push_back(c);
    }
    eps_ = lmin / 6.0;
    center_ = poly.centroid();

    // Angular positions of corners and edge midpoints about the centroid.
    angular_ = poly.contains(center_);
    double prev = 0;
    for (std::size_t s = 0; s < n && angular_; ++s) {
      double t = std::atan2(v[s].y - center_.y, v[s].x - center_.x);
      if (s == 0) {
        prev = t;
      } else {
        while (t <= prev) t += 2 * M_PI;
        prev = t;
      }
      phi_.push_back(t);
    }
    if (angular_) {
      phi_.push_back(phi_[0] + 2 * M_PI);
      angular_ = phi_[n - 1] < phi_[0] + 2 * M_PI;
    }
    for (std::size_t s = 0; s < n && angular_; ++s) {
      const Vec2 m = 0.5 * (v[s] + v[(s + 1) % n]);
      double t = std::atan2(m.y - center_.y, m.x - center_.x);
      while (t <= phi_[s]) t += 2 * M_PI;
      while (t > phi_[s + 1]) t -= 2 * M_PI;
      if (!(t > phi_[s] && t < phi_[s + 1])) angular_ = false;
      mid_.push_back(t);
      half_.push_back(0.5 * std::min(t - phi_[s], phi_[s + 1] - t));
    }

    std::vector<double> d(n);
    double total = 0, perim = poly.perimeter();
    for (std::size_t s = 0; s < n; ++s) {
      const Vec2 m = 0.5 * (v[s] + v[(s + 1) % n]);
      double a, bb;
      Vec2 g;
      patches_[s].eval(m, &a, &g);
      patches_[(s + 1) % n].eval(m, &bb, &g);
      d[s] = a - bb;
      total += d[s];
    }
    double spread = total;
    if (angular_) {
      jump_ = 2 * M_PI / b * std::round(b * total / (2 * M_PI));
      spread = total - jump_;
    }
    double c = 0;
    for (std::size_t s = 0; s + 1 < n; ++s) {
      c += d[s] - spread * norm(v[(s + 1) % n] - v[s]) / perim;
      patches_[s + 1].c = c;
    }
  }

  Vec2 eval(Vec2 x) const { return standard_f(x) + (angular_ ? angular_grad(x) : softmin_grad(x)); }

 private:
  Vec2 angular_grad(Vec2 x) const {
    const std::size_t n = patches_.size();
    const Vec2 y = x - center_;
    const double r2 = dot(y, y);
    double t = std::atan2(y.y, y.x);
    while (t < phi_[0]) t += 2 * M_PI;
    while (t >= phi_[n]) t -= 2 * M_PI;
    std::size_t s = 0;
    while (s + 1 < n && t >= phi_[s + 1]) ++s;
    const std::size_t s1 = (s + 1) % n;
    double p0, p1;
    Vec2 g0, g1;
    patches_[s].eval(x, &p0, &g0);
    const double u = (t - (mid_[s] - half_[s])) / (2 * half_[s]);
    const double w = smooth_step(u);
    if (w == 0.0) return g0;
    patches_[s1].eval(x, &p1, &g1);
    if (s1 == 0) p1 += jump_;  // past the last edge, patch 0 continues on the next sheet
    if (w == 1.0) return g1;
    const Vec2 dt = r2 > 0 ? Vec2{-y.y / r2, y.x / r2} : Vec2{0, 0};
    const Vec2 gw = (smooth_step_d(u) / (2 * half_[s])) * dt;
    return (1 - w) * g0 + w * g1 + (p1 - p0) * gw;
  }

  Vec2 softmin_grad(Vec2 x) const {
    const std::size_t n = patches_.size();
    double dmin = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n);
    for (std::size_t s = 0; s < n; ++s) {
      dist[s] = norm(x - patches_[s].p);
      dmin = std::min(dmin, dist[s]);
    }
    double z = 0;
    std::vector<double> e(n);
    Vec2 zg{0, 0};
    std::vector<Vec2> eg(n);
    for (std::size_t s = 0; s < n; ++s) {
      e[s] = std::exp(-(dist[s] - dmin) / eps_);
      const Vec2 dd = dist[s] > 0 ? (1.0 / dist[s]) * (x - patches_[s].p) : Vec2{0, 0};
      eg[s] = (-e[s] / eps_) * dd;
      z += e[s];
      zg += eg[s];
    }
    Vec2 grad{0, 0};
    for (std::size_t s = 0; s < n; ++s) {
      if (e[s] < 1e-300) continue;
      const double w = e[s] / z;
      const Vec2 gw = (1.0 / z) * eg[s] - (e[s] / (z * z)) * zg;
      double phi;
      Vec2 g;
      patches_[s].eval(x, &phi, &g);
      grad += w * g + phi * gw;
    }
    return grad;
  }

  std::vector<CornerPatch> patches_;
  double eps_ = 1.0;
  bool angular_ = false;
  Vec2 center_{0, 0};
  std::vector<double> phi_, mid_, half_;
  double jump_ = 0.0;
};

}  // namespace

GaugeField make_polygon_gauge(const PolygonDomain& poly, double b) {
  require(b > 0, ErrorKind::kInvalidParameter, "field strength must be positive");
  auto pot = std::make_shared<PolygonPotential>(poly, b);
  return GaugeField::analytic([pot](Vec2 x) { return pot->eval(x); });
}

}  // namespace glc
