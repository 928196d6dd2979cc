#include "mamv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mamv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

// max over |y| = eps of |d + A y|, by the secular equation in the eigenframe of A.
double farthest_offset(const Vec& d, const SpdShape& shape, double eps) {
    const int n = d.size();
    const Vec& a = shape.eigenvalues();
    const Matrix& q = shape.frame();
    Vec c(n);
    for (int k = 0; k < n; ++k) c[k] = q.column(k).dot(d);

    const double top = a[0] * a[0];
    const double scale = std::max(d.norm2(), 1e-300);
    bool degenerate = true;
    for (int k = 0; k < n; ++k) {
        if (a[k] * a[k] >= top * (1.0 - 1e-12) && c[k] * c[k] > 1e-28 * scale) degenerate = false;
    }

    auto secular = [&](double mu) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            if (a[k] * a[k] >= top * (1.0 - 1e-12) && mu <= top) continue;
            const double r = a[k] * c[k] / (mu - a[k] * a[k]);
            s += r * r;
        }
        return s;
    };

    if (degenerate && secular(top) <= eps * eps) {
        // hard case: leftover length goes along the top eigendirection
        double used = 0.0, value = 0.0;
        for (int k = 0; k < n; ++k) {
            if (a[k] * a[k] >= top * (1.0 - 1e-12)) continue;
            const double y = a[k] * c[k] / (top - a[k] * a[k]);
            used += y * y;
            value += (c[k] + a[k] * y) * (c[k] + a[k] * y);
        }
        value += top * std::max(0.0, eps * eps - used);
        return std::sqrt(value);
    }

    double acn = 0.0;
    for (int k = 0; k < n; ++k) acn += a[k] * a[k] * c[k] * c[k];
    double lo = top, hi = top + std::sqrt(acn) / eps + 1e-300;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (secular(mid) > eps * eps ? lo : hi) = mid;
    }
    const double mu = hi;
    double value = 0.0;
    for (int k = 0; k < n; ++k) {
        const double y = a[k] * c[k] / (mu - a[k] * a[k]);
        value += (c[k] + a[k] * y) * (c[k] + a[k] * y);
    }
    return std::sqrt(value);
}

}  // namespace

double unit_ball_volume(int n) {
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

// ---------------------------------------------------------------------------
// ConvexDomain

ConvexDomain ConvexDomain::disc(const Vec& center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw Error(Errc::InvalidDomain, "disc radius must be positive and finite");
    }
    ConvexDomain d;
    d.kind_ = Kind::Disc;
    d.n_ = center.size();
    d.center_ = center;
    d.radius_ = radius;
    return d;
}

ConvexDomain ConvexDomain::box(const Vec& lo, const Vec& hi) {
    if (lo.size() != hi.size()) throw Error(Errc::InvalidDomain, "box corners differ in dimension");
    ConvexDomain d;
    d.kind_ = Kind::Box;
    d.n_ = lo.size();
    d.lo_ = lo;
    d.hi_ = hi;
    for (int i = 0; i < d.n_; ++i) {
        if (!(lo[i] < hi[i])) throw Error(Errc::InvalidDomain, "box needs lo < hi on every axis");
        d.faces_.push_back({Vec::unit(d.n_, i), hi[i]});
        d.faces_.push_back({-Vec::unit(d.n_, i), -lo[i]});
    }
    return d;
}

ConvexDomain ConvexDomain::polygon(std::vector<Vec> vertices) {
    const int m = static_cast<int>(vertices.size());
    if (m < 3) throw Error(Errc::InvalidDomain, "polygon needs at least 3 vertices");
    for (const Vec& v : vertices) {
        if (v.size() != 2) throw Error(Errc::InvalidDomain, "polygon vertices must be planar");
    }
    double turning = 0.0;
    for (int i = 0; i < m; ++i) {
        const Vec e0 = vertices[(i + 1) % m] - vertices[i];
        const Vec e1 = vertices[(i + 2) % m] - vertices[(i + 1) % m];
        const double c = cross2(e0, e1);
        if (!(c > 0.0)) {
            throw Error(Errc::InvalidDomain,
                        "polygon is not counterclockwise strictly convex at vertex " +
                            std::to_string((i + 1) % m));
        }
        turning += std::atan2(c, e0.dot(e1));
    }
    if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-9) {
        throw Error(Errc::InvalidDomain, "polygon winds more than once");
    }

    ConvexDomain d;
    d.kind_ = Kind::Polygon;
    d.n_ = 2;
    for (int i = 0; i < m; ++i) {
        const Vec e = vertices[(i + 1) % m] - vertices[i];
        const Vec nu = (1.0 / e.norm()) * Vec{e[1], -e[0]};
        d.faces_.push_back({nu, nu.dot(vertices[i])});
    }
    d.vertices_ = std::move(vertices);
    return d;
}

ConvexDomain ConvexDomain::whole_space(int n) {
    ConvexDomain d;
    d.kind_ = Kind::WholeSpace;
    d.n_ = n;
    return d;
}

bool ConvexDomain::contains(const Vec& y, double slack) const {
    return boundary_distance(y) >= -slack;
}

double ConvexDomain::boundary_distance(const Vec& y) const {
    switch (kind_) {
        case Kind::WholeSpace: return kInf;
        case Kind::Disc: return radius_ - (y - center_).norm();
        case Kind::Box:
        case Kind::Polygon: {
            double best = kInf;
            for (const HalfSpace& f : faces_) best = std::min(best, f.offset - f.normal.dot(y));
            return best;
        }
    }
    return kInf;
}

double ConvexDomain::ray_exit(const Vec& y, const Vec& dir) const {
    switch (kind_) {
        case Kind::WholeSpace: return kInf;
        case Kind::Disc: {
            // |d + t dir|^2 = R^2, larger root
            const Vec d = y - center_;
            const double a = dir.norm2(), b = d.dot(dir), c = d.norm2() - radius_ * radius_;
            const double disc = std::max(0.0, b * b - a * c);
            return std::max(0.0, (-b + std::sqrt(disc)) / a);
        }
        case Kind::Box:
        case Kind::Polygon: {
            double t = kInf;
            for (const HalfSpace& f : faces_) {
                const double rate = f.normal.dot(dir);
                if (rate > 0.0) t = std::min(t, std::max(0.0, (f.offset - f.normal.dot(y)) / rate));
            }
            return t;
        }
    }
    return kInf;
}

double ConvexDomain::diameter() const {
    switch (kind_) {
        case Kind::WholeSpace: return kInf;
        case Kind::Disc: return 2.0 * radius_;
        case Kind::Box: return (hi_ - lo_).norm();
        case Kind::Polygon: {
            double best = 0.0;
            for (const Vec& a : vertices_)
                for (const Vec& b : vertices_) best = std::max(best, (a - b).norm());
            return best;
        }
    }
    return kInf;
}

void ConvexDomain::bounding_box(Vec& lo, Vec& hi) const {
    switch (kind_) {
        case Kind::WholeSpace: throw Error(Errc::InvalidDomain, "whole space has no bounding box");
        case Kind::Disc:
            lo = center_ - Vec(n_, radius_);
            hi = center_ + Vec(n_, radius_);
            return;
        case Kind::Box:
            lo = lo_;
            hi = hi_;
            return;
        case Kind::Polygon:
            lo = vertices_.front();
            hi = vertices_.front();
            for (const Vec& v : vertices_) {
                for (int i = 0; i < 2; ++i) {
                    lo[i] = std::min(lo[i], v[i]);
                    hi[i] = std::max(hi[i], v[i]);
                }
            }
            return;
    }
}

std::string ConvexDomain::str() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case Kind::WholeSpace: os << "whole_space(" << n_ << ")"; break;
        case Kind::Disc: os << "disc(" << center_.str() << ", " << radius_ << ")"; break;
        case Kind::Box: os << "rect(" << lo_.str() << ", " << hi_.str() << ")"; break;
        case Kind::Polygon:
            os << "polygon(";
            for (std::size_t i = 0; i < vertices_.size(); ++i) os << (i ? ", " : "") << vertices_[i].str();
            os << ")";
            break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Ellipsoid

Ellipsoid::Ellipsoid(Vec center, SpdShape shape, double eps)
    : center_(std::move(center)), shape_(std::move(shape)), eps_(eps) {
    if (!shape_.det_normalized()) {
        throw Error(Errc::InvalidMatrix, "ellipsoid shape must have det 1, got " + std::to_string(shape_.det()));
    }
    if (!(eps > 0.0)) throw Error(Errc::InvalidArgument, "ellipsoid scale must be positive");
    if (center_.size() != shape_.dim()) throw Error(Errc::InvalidArgument, "center/shape dimension mismatch");
}

bool Ellipsoid::contains(const Vec& y, double slack) const {
    return shape_.solve(y - center_).norm() <= eps_ + slack;
}

double Ellipsoid::volume() const {
    return std::pow(eps_, shape_.dim()) * shape_.det() * unit_ball_volume(shape_.dim());
}

// ---------------------------------------------------------------------------
// Containment

bool contains_ellipsoid(const ConvexDomain& domain, const Ellipsoid& e) {
    constexpr double kSlack = 1e-12;
    const Vec& x = e.center();
    const SpdShape& a = e.shape();
    const double eps = e.scale();
    switch (domain.kind()) {
        case ConvexDomain::Kind::WholeSpace: return true;
        case ConvexDomain::Kind::Disc: {
            const Vec d = x - domain.center();
            const double r = domain.radius();
            const double dn = d.norm();
            if (dn + eps * a.lambda_max() <= r + kSlack) return true;
            if (dn + eps * a.lambda_min() > r + kSlack) return false;
            return farthest_offset(d, a, eps) <= r + kSlack;
        }
        case ConvexDomain::Kind::Box:
        case ConvexDomain::Kind::Polygon:
            for (const HalfSpace& f : domain.faces()) {
                if (f.normal.dot(x) + eps * a.apply(f.normal).norm() > f.offset + kSlack) return false;
            }
            return true;
    }
    return false;
}

double max_scale(const ConvexDomain& domain, const Vec& x, const SpdShape& shape) {
    if (x.size() != domain.dim() || shape.dim() != domain.dim()) {
        throw Error(Errc::InvalidArgument, "dimension mismatch in max_scale");
    }
    if (!domain.contains(x, 0.0)) {
        throw Error(Errc::PointOutsideDomain, x.str() + " is not in " + domain.str());
    }
    switch (domain.kind()) {
        case ConvexDomain::Kind::WholeSpace: return kInf;
        case ConvexDomain::Kind::Box:
        case ConvexDomain::Kind::Polygon: {
            double best = kInf;
            for (const HalfSpace& f : domain.faces()) {
                best = std::min(best, (f.offset - f.normal.dot(x)) / shape.apply(f.normal).norm());
            }
            return std::max(best, 0.0);
        }
        case ConvexDomain::Kind::Disc: {
            const Vec d = x - domain.center();
            const double r = domain.radius();
            const double gap = r - d.norm();
            double lo = gap / shape.lambda_max();
            double hi = gap / shape.lambda_min();
            if (d.norm() == 0.0 || hi - lo <= 1e-15 * hi) return lo;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (farthest_offset(d, shape, mid) <= r ? lo : hi) = mid;
            }
            return lo;
        }
    }
    return 0.0;
}

}  // namespace mamv
