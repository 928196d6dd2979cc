#pragma once

// Product Gauss rules on the unit ball and sphere (n = 2, 3) and the
// averages built on them: ball, sphere, ellipsoid pullback and the
// coarea-weighted surface average.

#include <functional>
#include <vector>

#include "mamv/geometry.hpp"
#include "mamv/linalg.hpp"

namespace mamv {

using ScalarField = std::function<double(const Vec&)>;

struct QuadratureOrders {
    int radial = 8;
    int angular = 32;
    int polar = 16;          // n = 3, Gauss-Legendre in cos(theta)
    int angular_kink = 256;  // total angular nodes when a kink set is declared
    int radial_kink = 16;    // per radial piece between kink crossings
};

enum class MeasureKind { Solid, Surface };

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int order, double a, double b, std::vector<double>& nodes, std::vector<double>& weights);

class QuadratureRule {
public:
    /// n in {2, 3}; InvalidArgument otherwise.
    static QuadratureRule build(int n, MeasureKind kind, const QuadratureOrders& orders = {});

    int dim() const noexcept { return n_; }
    MeasureKind kind() const noexcept { return kind_; }
    const QuadratureOrders& orders() const noexcept { return orders_; }
    /// Nodes in the closed unit ball (solid) or on the unit sphere (surface).
    const std::vector<Vec>& nodes() const noexcept { return nodes_; }
    /// Sum to the measure of the unit ball or sphere.
    const std::vector<double>& weights() const noexcept { return weights_; }
    double measure() const noexcept { return measure_; }

private:
    int n_ = 0;
    MeasureKind kind_ = MeasureKind::Solid;
    QuadratureOrders orders_;
    std::vector<Vec> nodes_;
    std::vector<double> weights_;
    double measure_ = 0.0;
};

struct AverageOptions {
    /// When set, E_eps(A, x) must lie inside it (EllipsoidEscapesDomain).
    const ConvexDomain* domain = nullptr;
    /// Level-set function whose zero set carries the kinks of u. For n = 2 the
    /// rule is split along it; for n = 3 the orders are escalated instead.
    const ScalarField* kink = nullptr;
};

/// ⨍_{B_eps(x)} g. Requires a solid rule.
double ball_average(const ScalarField& g, const Vec& x, double eps, const QuadratureRule& rule);
/// ⨍_{∂B_eps(x)} g. Requires a surface rule.
double sphere_average(const ScalarField& g, const Vec& x, double eps, const QuadratureRule& rule);

/// ⨍ u(x + A y) over B_eps(0) or ∂B_eps(0) according to the rule kind.
double ellipsoid_average(const ScalarField& u, const Vec& x, const SpdShape& a, double eps,
                         const QuadratureRule& rule, const AverageOptions& opts = {});

/// Average over ∂E_eps(A, x) against the weight |(A A^T)^{-1}(y - x)|^{-1}.
/// The pullback of that measure to ∂B_eps is uniform, so this is the surface
/// pullback average. Requires a surface rule.
double weighted_surface_average(const ScalarField& u, const Vec& x, const SpdShape& a, double eps,
                                const QuadratureRule& rule, const AverageOptions& opts = {});

}  // namespace mamv
