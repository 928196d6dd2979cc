#include "mamv/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>

#include "mamv/parallel.hpp"

namespace mamv {

namespace {

std::optional<SymMatrix> hint_for(const TestFunction& u, const Vec& x, const MvConfig& cfg) {
    if (!cfg.use_hint || u.smoothness != Smoothness::C2 || !u.hess) return std::nullopt;
    SymMatrix h = u.hess(x);
    if (h.lambda_min() < -kPsdTolerance) return std::nullopt;
    return h;
}

void check_point(const TestFunction& u, const Vec& x, double eps) {
    if (x.size() != u.dim) throw Error(Errc::InvalidArgument, "point dimension does not match " + u.name);
    if (!(eps > 0.0)) throw Error(Errc::InvalidArgument, "eps must be positive");
}

MvResult from_search(const SearchResult& s) {
    MvResult r;
    r.value = s.value;
    r.lambda_max = s.lambda_max;
    r.evaluations = s.evaluations;
    r.shape = s.shape;
    r.eps_lambda_max = s.eps_lambda_max;
    return r;
}

MvResult continuous_mv(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg, MeasureKind kind,
                       const ConvexDomain* domain) {
    check_point(u, x, eps);
    const QuadratureRule rule = QuadratureRule::build(u.dim, kind, cfg.quadrature);
    AverageOptions opts;
    if (u.kink) opts.kink = &u.kink;
    const ShapeObjective objective = [&](const SpdShape& a) {
        return ellipsoid_average(u.eval, x, a, eps, rule, opts);
    };
    const std::optional<SymMatrix> hint = hint_for(u, x, cfg);

    if (domain) {
        if (domain->dim() != u.dim) throw Error(Errc::InvalidArgument, "domain dimension does not match " + u.name);
        return from_search(inf_domain(objective, *domain, x, eps, cfg.search, hint));
    }
    const double phi = cfg.phi(eps);
    if (cfg.enforce_locality) {
        const double dist = u.domain.boundary_distance(x);
        if (!(eps * phi < dist)) {
            throw Error(Errc::EllipsoidEscapesDomain,
                        "eps phi(eps) = " + format_double(eps * phi) + " is not below the distance " +
                            format_double(dist) + " from " + x.str() + " to the boundary of " + u.domain.str());
        }
    }
    return from_search(inf_restricted(objective, u.dim, phi, cfg.search, hint));
}

double discrete_value(const TestFunction& u, const Vec& x, const SpdShape& a, double eps, bool check_domain) {
    const int n = u.dim;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec arm = (eps * a.eigenvalues()[i]) * a.frame().column(i);
        for (const Vec& p : {x + arm, x - arm}) {
            if (check_domain && !u.domain.contains(p, 0.0)) {
                throw Error(Errc::StencilOutOfDomain, "stencil point " + p.str() + " leaves " + u.domain.str());
            }
            const double v = u(p);
            if (!std::isfinite(v)) {
                throw Error(Errc::NonFiniteIntegrand, "u is " + std::to_string(v) + " at " + p.str());
            }
            s += 0.5 * v;
        }
    }
    return s / n;
}

bool is_solid(Variant v) { return v == Variant::RestrictedSolid || v == Variant::DomainSolid; }

// deterministic unit-interval stream independent of library distributions
double unit_draw(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

}  // namespace

// ---------------------------------------------------------------------------
// Variants and phi

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::RestrictedSolid: return "solid_restricted";
        case Variant::DomainSolid: return "solid_domain";
        case Variant::RestrictedSurface: return "surface_restricted";
        case Variant::DomainSurface: return "surface_domain";
        case Variant::WeightedSurface: return "weighted_surface";
        case Variant::Discrete: return "discrete";
    }
    return "unknown";
}

Variant variant_from_string(const std::string& name) {
    for (Variant v : {Variant::RestrictedSolid, Variant::DomainSolid, Variant::RestrictedSurface,
                      Variant::DomainSurface, Variant::WeightedSurface, Variant::Discrete}) {
        if (name == to_string(v)) return v;
    }
    throw Error(Errc::InvalidConfig, "unknown variant '" + name + "'");
}

bool needs_domain(Variant v) { return v == Variant::DomainSolid || v == Variant::DomainSurface; }

double coefficient(Variant v, int n) { return is_solid(v) ? n / (2.0 * (n + 2)) : 0.5; }

PhiSchedule PhiSchedule::power(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::InvalidConfig, "phi power needs 0 < alpha < 1");
    PhiSchedule p;
    p.kind_ = Kind::Power;
    p.param_ = alpha;
    return p;
}

PhiSchedule PhiSchedule::constant(double c) {
    if (!(c >= 1.0) || !std::isfinite(c)) throw Error(Errc::InvalidConfig, "constant phi must be >= 1");
    PhiSchedule p;
    p.kind_ = Kind::Constant;
    p.param_ = c;
    return p;
}

PhiSchedule PhiSchedule::table(std::vector<std::pair<double, double>> points) {
    if (points.empty()) throw Error(Errc::InvalidConfig, "phi table is empty");
    std::sort(points.begin(), points.end());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].first > 0.0) || !(points[i].second > 0.0)) {
            throw Error(Errc::InvalidConfig, "phi table entries must be positive");
        }
        if (i > 0 && points[i].first == points[i - 1].first) {
            throw Error(Errc::InvalidConfig, "phi table has a repeated eps");
        }
    }
    PhiSchedule p;
    p.kind_ = Kind::Table;
    p.table_ = std::move(points);
    return p;
}

double PhiSchedule::operator()(double eps) const {
    switch (kind_) {
        case Kind::Power: return std::pow(eps, -param_);
        case Kind::Constant: return param_;
        case Kind::Table: {
            const auto& t = table_;
            const double lo = t.front().first, hi = t.back().first;
            if (eps < lo * (1.0 - 1e-12) || eps > hi * (1.0 + 1e-12)) {
                throw Error(Errc::InvalidConfig, "eps " + format_double(eps) + " is outside the phi table");
            }
            if (t.size() == 1) return t.front().second;
            std::size_t i = 1;
            while (i + 1 < t.size() && t[i].first < eps) ++i;
            const double s = (std::log(eps) - std::log(t[i - 1].first)) / (std::log(t[i].first) - std::log(t[i - 1].first));
            return std::exp((1.0 - s) * std::log(t[i - 1].second) + s * std::log(t[i].second));
        }
    }
    return 1.0;
}

std::string PhiSchedule::str() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Power: os << "power:" << format_double(param_); break;
        case Kind::Constant: os << "const:" << format_double(param_); break;
        case Kind::Table:
            os << "table:";
            for (std::size_t i = 0; i < table_.size(); ++i) {
                os << (i ? ";" : "") << format_double(table_[i].first) << "=" << format_double(table_[i].second);
            }
            break;
    }
    return os.str();
}

PhiCheck check_phi_hypotheses(const PhiSchedule& phi, const std::vector<double>& schedule) {
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        const double e0 = schedule[i - 1], e1 = schedule[i];
        if (!(e1 < e0)) return {false, "schedule is not strictly decreasing"};
        if (!(phi(e1) > phi(e0))) return {false, "phi does not increase at eps = " + format_double(e1)};
        if (!(e1 * phi(e1) < e0 * phi(e0))) {
            return {false, "eps phi(eps) does not decrease at eps = " + format_double(e1)};
        }
    }
    return {};
}

std::vector<double> default_schedule(int count) {
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(0.2 * std::ldexp(1.0, -k));
    return out;
}

MvConfig unrestricted_equivalent(MvConfig cfg) {
    cfg.variant = Variant::RestrictedSolid;
    cfg.phi = PhiSchedule::constant(1e3);
    return cfg;
}

// ---------------------------------------------------------------------------
// Operators

MvResult mv_solid_restricted(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg) {
    return continuous_mv(u, x, eps, cfg, MeasureKind::Solid, nullptr);
}

MvResult mv_solid_domain(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg,
                         const ConvexDomain& domain) {
    return continuous_mv(u, x, eps, cfg, MeasureKind::Solid, &domain);
}

MvResult mv_surface(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg,
                    const ConvexDomain* domain) {
    return continuous_mv(u, x, eps, cfg, MeasureKind::Surface, domain);
}

MvResult mv_weighted_surface(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg,
                             const ConvexDomain* domain) {
    // the weighted measure on the ellipsoid boundary pulls back to the uniform sphere measure
    return continuous_mv(u, x, eps, cfg, MeasureKind::Surface, domain);
}

MvResult mv_discrete(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg) {
    check_point(u, x, eps);
    const double phi = cfg.phi(eps);
    if (cfg.enforce_locality) {
        const double dist = u.domain.boundary_distance(x);
        if (!(eps * phi < dist)) {
            throw Error(Errc::StencilOutOfDomain, "eps phi(eps) = " + format_double(eps * phi) +
                                                      " reaches the boundary of " + u.domain.str());
        }
    }
    const ShapeObjective objective = [&](const SpdShape& a) { return discrete_value(u, x, a, eps, true); };
    return from_search(inf_discrete(objective, u.dim, phi, cfg.discrete, hint_for(u, x, cfg)));
}

MvResult mv(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg, const ConvexDomain* domain) {
    switch (cfg.variant) {
        case Variant::RestrictedSolid: return mv_solid_restricted(u, x, eps, cfg);
        case Variant::DomainSolid:
            if (!domain) throw Error(Errc::InvalidConfig, "solid_domain needs a domain");
            return mv_solid_domain(u, x, eps, cfg, *domain);
        case Variant::RestrictedSurface: return mv_surface(u, x, eps, cfg, nullptr);
        case Variant::DomainSurface:
            if (!domain) throw Error(Errc::InvalidConfig, "surface_domain needs a domain");
            return mv_surface(u, x, eps, cfg, domain);
        case Variant::WeightedSurface: return mv_weighted_surface(u, x, eps, cfg, domain);
        case Variant::Discrete: return mv_discrete(u, x, eps, cfg);
    }
    throw Error(Errc::InvalidConfig, "unknown variant");
}

double fixed_shape_value(const TestFunction& u, const Vec& x, const SpdShape& a, double eps, const MvConfig& cfg) {
    check_point(u, x, eps);
    if (cfg.variant == Variant::Discrete) return discrete_value(u, x, a, eps, false);
    const QuadratureRule rule =
        QuadratureRule::build(u.dim, is_solid(cfg.variant) ? MeasureKind::Solid : MeasureKind::Surface, cfg.quadrature);
    AverageOptions opts;
    if (u.kink) opts.kink = &u.kink;
    return ellipsoid_average(u.eval, x, a, eps, rule, opts);
}

double remainder_of(const TestFunction& u, const Vec& x, double eps, double value, Variant v) {
    const double f = std::max(0.0, u.rhs(x));
    const double root = f == 0.0 ? 0.0 : std::pow(f, 1.0 / u.dim);
    return value - u(x) - coefficient(v, u.dim) * root * eps * eps;
}

double remainder(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg, const ConvexDomain* domain) {
    return remainder_of(u, x, eps, mv(u, x, eps, cfg, domain).value, cfg.variant);
}

double error_budget(const TestFunction& u, const MvConfig& cfg) {
    return u.smoothness == Smoothness::C2 && !u.kink ? cfg.smooth_budget : cfg.kink_budget;
}

RemainderSeries remainder_series(const TestFunction& u, const Vec& x, const MvConfig& cfg,
                                 const std::vector<double>& schedule, const ConvexDomain* domain) {
    if (schedule.empty()) throw Error(Errc::InvalidArgument, "empty eps schedule");
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (!(schedule[i] < schedule[i - 1])) throw Error(Errc::InvalidArgument, "eps schedule must decrease");
    }
    RemainderSeries s;
    s.variant = std::string(to_string(cfg.variant));
    s.function = u.name;
    s.x = x;
    s.coefficient = coefficient(cfg.variant, u.dim);
    s.entries.resize(schedule.size());
    parallel_for(schedule.size(), [&](std::size_t i) {
        const double eps = schedule[i];
        const MvResult r = mv(u, x, eps, cfg, domain);
        RemainderEntry& e = s.entries[i];
        e.eps = eps;
        e.value = r.value;
        e.remainder = remainder_of(u, x, eps, r.value, cfg.variant);
        e.lambda_max = r.lambda_max;
        e.evaluations = r.evaluations;
    });
    const double budget = error_budget(u, cfg);
    for (double eps : schedule) s.floors.push_back(cfg.floor_factor * budget * eps * eps);
    finalize_series(s, cfg.slope_margin);
    return s;
}

// ---------------------------------------------------------------------------
// Touching paraboloids

std::string_view to_string(Touch t) { return t == Touch::Above ? "above" : "below"; }

void validate_touching(const TestFunction& u, const Vec& x, const TestFunction& p, Touch direction, double delta,
                       int samples) {
    const int n = u.dim;
    if (p.dim != n) throw Error(Errc::InvalidArgument, "paraboloid dimension does not match " + u.name);
    if (!(delta > 0.0)) throw Error(Errc::InvalidArgument, "contact radius must be positive");
    const double u0 = u(x), p0 = p(x);
    if (std::abs(u0 - p0) > 1e-10 * (1.0 + std::abs(u0))) {
        throw Error(Errc::NotATouchingParaboloid,
                    "P(x) = " + format_double(p0) + " differs from u(x) = " + format_double(u0));
    }

    auto probe = [&](const Vec& z) {
        if (!u.domain.contains(z, 0.0)) return;
        const double uz = u(z), pz = p(z);
        const double tol = 1e-9 * (1.0 + std::abs(uz) + std::abs(pz));
        const bool ok = direction == Touch::Above ? pz >= uz - tol : pz <= uz + tol;
        if (!ok) {
            throw Error(Errc::NotATouchingParaboloid,
                        "P does not stay " + std::string(direction == Touch::Above ? "above" : "below") +
                            " u at " + z.str() + ": P = " + format_double(pz) + ", u = " + format_double(uz));
        }
    };

    if (n == 2) {
        const int rings = std::max(1, static_cast<int>(std::lround(std::sqrt(samples))));
        const int per_ring = std::max(1, samples / rings);
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < rings; ++j) {
            const double r = delta * (j + 1) / rings;
            for (int k = 0; k < per_ring; ++k) {
                const double th = 2.0 * std::numbers::pi * k / per_ring + j * golden;
                probe(x + Vec{r * std::cos(th), r * std::sin(th)});
            }
        }
        return;
    }
    std::mt19937_64 gen(20240611u);
    for (int k = 0; k < samples; ++k) {
        Vec d(n);
        for (int i = 0; i < n; ++i) {
            const double a = std::max(unit_draw(gen), 1e-300), b = unit_draw(gen);
            d[i] = std::sqrt(-2.0 * std::log(a)) * std::cos(2.0 * std::numbers::pi * b);
        }
        const double r = delta * std::pow(unit_draw(gen), 1.0 / n);
        probe(x + (r / d.norm()) * d);
    }
}

ViscosityReport viscosity_check(const TestFunction& u, const Vec& x, const MvConfig& cfg, Touch direction,
                                const std::vector<TestFunction>& paraboloids, double delta,
                                const std::vector<double>& schedule, const ConvexDomain* domain) {
    ViscosityReport report;
    report.direction = direction;
    report.f = std::max(0.0, u.rhs(x));
    const int n = u.dim;
    const double c = coefficient(cfg.variant, n);
    const double f_root = report.f == 0.0 ? 0.0 : std::pow(report.f, 1.0 / n);

    for (const TestFunction& p : paraboloids) {
        validate_touching(u, x, p, direction, delta);
        ViscosityEntry entry;
        entry.label = p.name;
        const SymMatrix m = p.hess(x);
        const double det = std::max(0.0, m.det());
        entry.det_root = det == 0.0 ? 0.0 : std::pow(det, 1.0 / n);
        entry.classical = direction == Touch::Above ? entry.det_root >= f_root * (1.0 - 1e-12)
                                                    : entry.det_root <= f_root * (1.0 + 1e-12);

        RemainderSeries s;
        s.variant = std::string(to_string(cfg.variant));
        s.function = p.name;
        s.x = x;
        s.coefficient = c;
        s.entries.resize(schedule.size());
        parallel_for(schedule.size(), [&](std::size_t i) {
            const double eps = schedule[i];
            const MvResult r = mv(p, x, eps, cfg, domain);
            RemainderEntry& e = s.entries[i];
            e.eps = eps;
            e.value = r.value;
            e.remainder = r.value - p(x) - c * f_root * eps * eps;
            e.lambda_max = r.lambda_max;
            e.evaluations = r.evaluations;
        });
        std::vector<double> eps_list, raw, floors;
        for (const RemainderEntry& e : s.entries) {
            const double floor = cfg.floor_factor * cfg.smooth_budget * e.eps * e.eps;
            s.floors.push_back(floor);
            const double v = direction == Touch::Above ? std::max(0.0, -e.remainder) : std::max(0.0, e.remainder);
            eps_list.push_back(e.eps);
            raw.push_back(v);
            floors.push_back(floor);
            entry.violation.push_back(v / (e.eps * e.eps));
        }
        finalize_series(s, cfg.slope_margin);

        bool negligible = true;
        for (std::size_t i = 0; i < raw.size(); ++i) negligible = negligible && raw[i] <= floors[i];
        const RateFit fit = fit_rate(eps_list, raw, floors);
        entry.holds = negligible || (fit.status == RateFit::Status::Ok && fit.slope > 2.0 + cfg.slope_margin);
        entry.series = std::move(s);
        report.all_hold = report.all_hold && entry.holds;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace mamv
