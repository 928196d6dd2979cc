#pragma once

// Infimum-over-ellipsoids mean-value operators for det D^2 u = f, their
// remainders, remainder series and paraboloid touching tests.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mamv/functions.hpp"
#include "mamv/quadrature.hpp"
#include "mamv/report.hpp"
#include "mamv/search.hpp"

namespace mamv {

enum class Variant { RestrictedSolid, DomainSolid, RestrictedSurface, DomainSurface, WeightedSurface, Discrete };

/// solid_restricted, solid_domain, surface_restricted, surface_domain,
/// weighted_surface, discrete.
std::string_view to_string(Variant v);
/// InvalidConfig for unknown names.
Variant variant_from_string(const std::string& name);
bool needs_domain(Variant v);

/// c in R = mv - u(x) - c f(x)^{1/n} eps^2: n/(2(n+2)) for solid variants,
/// 1/2 for the others.
double coefficient(Variant v, int n);

class PhiSchedule {
public:
    /// eps^{-alpha}, 0 < alpha < 1.
    static PhiSchedule power(double alpha);
    static PhiSchedule constant(double c);
    /// Pairs (eps, phi); log-log interpolation inside the table range.
    static PhiSchedule table(std::vector<std::pair<double, double>> points);

    double operator()(double eps) const;
    std::string str() const;

private:
    enum class Kind { Power, Constant, Table };
    Kind kind_ = Kind::Power;
    double param_ = 0.5;
    std::vector<std::pair<double, double>> table_;
};

struct PhiCheck {
    bool ok = true;
    std::string reason;
};

/// Along a decreasing schedule: phi strictly increases and eps phi strictly
/// decreases.
PhiCheck check_phi_hypotheses(const PhiSchedule& phi, const std::vector<double>& schedule);

/// Geometric 0.2 * 2^{-k}, k = 0..count-1.
std::vector<double> default_schedule(int count = 5);

struct MvConfig {
    Variant variant = Variant::RestrictedSolid;
    PhiSchedule phi = PhiSchedule::power(0.5);
    QuadratureOrders quadrature;
    SearchBudget search;
    DiscreteGrid discrete;
    double smooth_budget = 1e-8;
    double kink_budget = 1e-5;
    double slope_margin = 0.1;
    double floor_factor = 10.0;
    /// Restricted variants require eps phi(eps) < dist(x, boundary of u's domain).
    bool enforce_locality = true;
    /// Inject the optimal shape of D^2 u(x) for C2 functions.
    bool use_hint = true;
};

/// Restricted with phi = 1e3 constant; diagnostics only.
MvConfig unrestricted_equivalent(MvConfig cfg);

struct MvResult {
    double value = 0.0;
    double lambda_max = 1.0;
    long evaluations = 0;
    std::optional<SpdShape> shape;
    std::optional<double> eps_lambda_max;
};

MvResult mv_solid_restricted(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg);
MvResult mv_solid_domain(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg,
                         const ConvexDomain& domain);
/// Restricted when domain is null, domain-constrained otherwise.
MvResult mv_surface(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg,
                    const ConvexDomain* domain = nullptr);
MvResult mv_weighted_surface(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg,
                             const ConvexDomain* domain = nullptr);
MvResult mv_discrete(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg);
/// Dispatch on cfg.variant. Domain variants need a domain.
MvResult mv(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg,
            const ConvexDomain* domain = nullptr);

/// Solid or surface average at one shape with no feasibility check.
double fixed_shape_value(const TestFunction& u, const Vec& x, const SpdShape& a, double eps, const MvConfig& cfg);

/// R = value - u(x) - c f(x)^{1/n} eps^2 for an operator value.
double remainder_of(const TestFunction& u, const Vec& x, double eps, double value, Variant v);
double remainder(const TestFunction& u, const Vec& x, double eps, const MvConfig& cfg,
                 const ConvexDomain* domain = nullptr);

/// Quadrature error budget that applies to u.
double error_budget(const TestFunction& u, const MvConfig& cfg);

/// Entries evaluated in parallel; schedule must be strictly decreasing.
RemainderSeries remainder_series(const TestFunction& u, const Vec& x, const MvConfig& cfg,
                                 const std::vector<double>& schedule, const ConvexDomain* domain = nullptr);

enum class Touch { Above, Below };
std::string_view to_string(Touch t);

/// Checks P(x) = u(x) and P >= u (Above) or P <= u (Below) on 10^4
/// deterministic points of B_delta(x); NotATouchingParaboloid otherwise.
void validate_touching(const TestFunction& u, const Vec& x, const TestFunction& p, Touch direction, double delta,
                       int samples = 10000);

struct ViscosityEntry {
    std::string label;
    double det_root = 0.0;           // det(D^2 P)^{1/n}
    bool classical = false;          // det D^2 P >= f (Above) or <= f (Below)
    RemainderSeries series;          // remainders of P with u's right-hand side
    std::vector<double> violation;   // [-R]^+ (Above) or [R]^+ (Below), divided by eps^2
    bool holds = false;
};

struct ViscosityReport {
    Touch direction = Touch::Above;
    double f = 0.0;
    std::vector<ViscosityEntry> entries;
    bool all_hold = true;
};

/// For each paraboloid P touching u at x: validates contact, then tests
/// P(x) <= (>=) mv(P) - c f(x)^{1/n} eps^2 + o(eps^2). The violation passes
/// when it sits below the error floor on every entry or decays faster than
/// eps^{2 + margin}.
ViscosityReport viscosity_check(const TestFunction& u, const Vec& x, const MvConfig& cfg, Touch direction,
                                const std::vector<TestFunction>& paraboloids, double delta,
                                const std::vector<double>& schedule, const ConvexDomain* domain = nullptr);

}  // namespace mamv
