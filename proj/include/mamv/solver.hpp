#pragma once

// Wide-stencil fixed-point solver for det D^2 u = f in a convex planar
// domain with Dirichlet data g, built on the discrete orthonormal-frame
// mean-value formula.

#include <memory>
#include <optional>
#include <vector>

#include "mamv/error.hpp"
#include "mamv/geometry.hpp"
#include "mamv/operators.hpp"
#include "mamv/quadrature.hpp"

namespace mamv {

struct SolverConfig {
    PhiSchedule phi = PhiSchedule::power(0.5);
    int frame_angles = 8;  // frames at k pi / frame_angles
    int alpha_grid = 9;    // cell midpoints of log alpha on (-2 log phi, 2 log phi)
    double tol = 1e-10;    // on the max node update
    int max_iter = 200000;
    int burn_in = 20;      // sweeps before monotonicity of the residual is monitored
};

struct Grid2 {
    enum class Node : unsigned char { Interior, Boundary, Exterior };

    Vec origin;  // lower-left node
    double h = 0.0;
    int nx = 0, ny = 0;
    std::vector<Node> kind;  // row-major, index j * nx + i
    std::vector<double> u;

    Vec point(int i, int j) const { return origin + Vec{i * h, j * h}; }
    int index(int i, int j) const { return j * nx + i; }
};

struct SolveReport {
    int iterations = 0;
    double residual = 0.0;  // last max node update
    std::optional<double> max_error;
    int monotonicity_warnings = 0;
    std::vector<double> residual_history;
};

struct SolveResult {
    Grid2 grid;
    SolveReport report;
};

class NotConvergedError : public Error {
public:
    NotConvergedError(const std::string& what, SolveReport report)
        : Error(Errc::NotConverged, what), report_(std::move(report)) {}
    const SolveReport& report() const noexcept { return report_; }

private:
    SolveReport report_;
};

/// Jacobi sweeps u <- min over stencils of the discrete formula solved for
/// the center value. Requires eps >= 2h, f >= 0 (InvalidRhs), a planar
/// bounded domain, and eps phi(eps) <= inradius / 2.
SolveResult solve_dirichlet(const ConvexDomain& domain, const ScalarField& f, const ScalarField& g, double eps,
                            double h, const SolverConfig& cfg = {}, const ScalarField& exact = {});

/// Sweep operator applied once at one node, reading `values`; exposed for
/// monotonicity checks. `values` is indexed like Grid2::u.
class StencilOperator {
public:
    StencilOperator(const ConvexDomain& domain, const ScalarField& f, const ScalarField& g, double eps, double h,
                    const SolverConfig& cfg);
    ~StencilOperator();
    StencilOperator(const StencilOperator&) = delete;
    StencilOperator& operator=(const StencilOperator&) = delete;

    const Grid2& layout() const;
    /// Updated value at node k (interior nodes); boundary nodes return g.
    double apply(int k, const std::vector<double>& values) const;
    /// Initial guess: inverse-distance blend of boundary values along 8 rays.
    std::vector<double> initial_guess() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace mamv
