#include "mamv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mamv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double checked(const ScalarField& u, const Vec& p) {
    const double v = u(p);
    if (!std::isfinite(v)) {
        throw Error(Errc::NonFiniteIntegrand, "integrand is " + std::to_string(v) + " at " + p.str());
    }
    return v;
}

Vec polar_point(double r, double theta) { return Vec{r * std::cos(theta), r * std::sin(theta)}; }

void require_kind(const QuadratureRule& rule, MeasureKind kind, const char* who) {
    if (rule.kind() != kind) {
        throw Error(Errc::InvalidArgument,
                    std::string(who) + " needs a " + (kind == MeasureKind::Solid ? "solid" : "surface") + " rule");
    }
}

double rule_sum(const ScalarField& u, const Vec& x, const SpdShape& a, double eps, const QuadratureRule& rule) {
    double s = 0.0;
    const auto& nodes = rule.nodes();
    const auto& w = rule.weights();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        s += w[k] * checked(u, x + eps * a.apply(nodes[k]));
    }
    return s / rule.measure();
}

// Planar average split along the zero set of the kink function. Angular
// breakpoints are the angles where the crossing pattern along the ray changes;
// each ray is split radially at its crossings.
class KinkSplitter {
public:
    KinkSplitter(const ScalarField& u, const ScalarField& kink, const Vec& x, const SpdShape& a, double eps,
                 const QuadratureRule& rule)
        : u_(u), kink_(kink), x_(x), a_(a), eps_(eps), rule_(rule) {}

    double average() {
        const bool solid = rule_.kind() == MeasureKind::Solid;
        std::vector<double> breaks = angular_breaks(solid);
        const int total = std::max(rule_.orders().angular_kink, rule_.orders().angular);
        double integral = 0.0;
        if (breaks.empty()) {
            const double dtheta = kTwoPi / total;
            for (int k = 0; k < total; ++k) integral += dtheta * ray_integral(k * dtheta, solid);
        } else {
            const int arcs = static_cast<int>(breaks.size());
            const int per_arc = std::max(16, total / arcs);
            std::vector<double> tn, tw;
            for (int i = 0; i < arcs; ++i) {
                const double t0 = breaks[i];
                const double t1 = i + 1 < arcs ? breaks[i + 1] : breaks[0] + kTwoPi;
                gauss_legendre(per_arc, t0, t1, tn, tw);
                for (int k = 0; k < per_arc; ++k) integral += tw[k] * ray_integral(tn[k], solid);
            }
        }
        return solid ? integral / (std::numbers::pi * eps_ * eps_) : integral / kTwoPi;
    }

private:
    static constexpr int kAngularSamples = 180;
    static constexpr int kRadialSamples = 16;

    static int sign(double v) { return v > 0.0 ? 1 : -1; }

    double level(double r, double theta) const {
        return kink_(x_ + a_.apply(polar_point(r, theta)));
    }

    // sign at the rim, sign next to the center, number of radial crossings
    long signature(double theta, bool solid) const {
        const int rim = sign(level(eps_, theta));
        if (!solid) return rim;
        const int inner = sign(level(1e-7 * eps_, theta));
        int prev = inner, crossings = 0;
        for (int j = 1; j <= kRadialSamples; ++j) {
            const int s = sign(level(eps_ * j / kRadialSamples, theta));
            crossings += s != prev;
            prev = s;
        }
        return rim + 3 * inner + 9 * crossings;
    }

    std::vector<double> angular_breaks(bool solid) const {
        std::vector<double> out;
        const double step = kTwoPi / kAngularSamples;
        long first = signature(0.0, solid), prev = first;
        for (int k = 1; k <= kAngularSamples; ++k) {
            const double theta = k * step;
            const long s = k == kAngularSamples ? first : signature(theta, solid);
            if (s != prev) {
                double lo = theta - step, hi = theta;
                for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (signature(mid, solid) == prev ? lo : hi) = mid;
                }
                out.push_back(0.5 * (lo + hi));
            }
            prev = s;
        }
        return out;
    }

    double ray_integral(double theta, bool solid) const {
        if (!solid) return checked(u_, x_ + a_.apply(polar_point(eps_, theta)));

        std::vector<double> cuts{0.0};
        double r_prev = 1e-7 * eps_;
        int s_prev = sign(level(r_prev, theta));
        for (int j = 1; j <= kRadialSamples; ++j) {
            const double r = eps_ * j / kRadialSamples;
            const int s = sign(level(r, theta));
            if (s != s_prev) {
                double lo = r_prev, hi = r;
                for (int it = 0; it < 60 && hi - lo > 1e-15 * eps_; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (sign(level(mid, theta)) == s_prev ? lo : hi) = mid;
                }
                cuts.push_back(0.5 * (lo + hi));
            }
            s_prev = s;
            r_prev = r;
        }
        cuts.push_back(eps_);

        const int order = rule_.orders().radial_kink;
        std::vector<double> rn, rw;
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            gauss_legendre(order, cuts[i], cuts[i + 1], rn, rw);
            for (int k = 0; k < order; ++k) {
                s += rw[k] * rn[k] * checked(u_, x_ + a_.apply(polar_point(rn[k], theta)));
            }
        }
        return s;
    }

    const ScalarField& u_;
    const ScalarField& kink_;
    const Vec& x_;
    const SpdShape& a_;
    double eps_;
    const QuadratureRule& rule_;
};

}  // namespace

void gauss_legendre(int order, double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 1) throw Error(Errc::InvalidArgument, "Gauss-Legendre order must be positive");
    nodes.assign(order, 0.0);
    weights.assign(order, 0.0);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= order; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = order * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = mid - half * z;
        nodes[order - 1 - i] = mid + half * z;
        weights[i] = half * w;
        weights[order - 1 - i] = half * w;
    }
}

QuadratureRule QuadratureRule::build(int n, MeasureKind kind, const QuadratureOrders& orders) {
    if (n != 2 && n != 3) throw Error(Errc::InvalidArgument, "quadrature rules exist for n = 2, 3 only");
    if (orders.radial < 1 || orders.angular < 1 || orders.polar < 1 || orders.angular_kink < 1 ||
        orders.radial_kink < 1) {
        throw Error(Errc::InvalidArgument, "quadrature orders must be positive");
    }
    QuadratureRule rule;
    rule.n_ = n;
    rule.kind_ = kind;
    rule.orders_ = orders;
    const bool solid = kind == MeasureKind::Solid;

    std::vector<double> rn{1.0}, rw{1.0};
    if (solid) {
        gauss_legendre(orders.radial, 0.0, 1.0, rn, rw);
        for (std::size_t i = 0; i < rn.size(); ++i) rw[i] *= std::pow(rn[i], n - 1);
    }
    const int qa = orders.angular;
    const double dphi = kTwoPi / qa;

    if (n == 2) {
        for (std::size_t i = 0; i < rn.size(); ++i) {
            for (int k = 0; k < qa; ++k) {
                rule.nodes_.push_back(polar_point(rn[i], k * dphi));
                rule.weights_.push_back(rw[i] * dphi);
            }
        }
    } else {
        std::vector<double> mu, mw;
        gauss_legendre(orders.polar, -1.0, 1.0, mu, mw);
        for (std::size_t i = 0; i < rn.size(); ++i) {
            for (std::size_t j = 0; j < mu.size(); ++j) {
                const double s = std::sqrt(std::max(0.0, 1.0 - mu[j] * mu[j]));
                for (int k = 0; k < qa; ++k) {
                    const double phi = k * dphi;
                    rule.nodes_.push_back(rn[i] * Vec{s * std::cos(phi), s * std::sin(phi), mu[j]});
                    rule.weights_.push_back(rw[i] * mw[j] * dphi);
                }
            }
        }
    }
    rule.measure_ = solid ? unit_ball_volume(n) : unit_sphere_area(n);
    return rule;
}

double ball_average(const ScalarField& g, const Vec& x, double eps, const QuadratureRule& rule) {
    require_kind(rule, MeasureKind::Solid, "ball_average");
    return rule_sum(g, x, SpdShape::identity(rule.dim()), eps, rule);
}

double sphere_average(const ScalarField& g, const Vec& x, double eps, const QuadratureRule& rule) {
    require_kind(rule, MeasureKind::Surface, "sphere_average");
    return rule_sum(g, x, SpdShape::identity(rule.dim()), eps, rule);
}

double ellipsoid_average(const ScalarField& u, const Vec& x, const SpdShape& a, double eps,
                         const QuadratureRule& rule, const AverageOptions& opts) {
    if (x.size() != rule.dim() || a.dim() != rule.dim()) {
        throw Error(Errc::InvalidArgument, "dimension mismatch in ellipsoid_average");
    }
    if (opts.domain && !contains_ellipsoid(*opts.domain, Ellipsoid(x, a, eps))) {
        throw Error(Errc::EllipsoidEscapesDomain,
                    "E_eps(A, x) with eps = " + std::to_string(eps) + ", A = " + a.str() + " leaves " +
                        opts.domain->str());
    }
    if (opts.kink) {
        if (rule.dim() == 2) return KinkSplitter(u, *opts.kink, x, a, eps, rule).average();
        QuadratureOrders high = rule.orders();
        high.radial = std::max(high.radial, 16);
        high.polar = std::max(high.polar, 32);
        high.angular = std::max(high.angular, 64);
        return rule_sum(u, x, a, eps, QuadratureRule::build(3, rule.kind(), high));
    }
    return rule_sum(u, x, a, eps, rule);
}

double weighted_surface_average(const ScalarField& u, const Vec& x, const SpdShape& a, double eps,
                                const QuadratureRule& rule, const AverageOptions& opts) {
    require_kind(rule, MeasureKind::Surface, "weighted_surface_average");
    return ellipsoid_average(u, x, a, eps, rule, opts);
}

}  // namespace mamv
