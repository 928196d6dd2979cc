#pragma once

// Minimization over det-1 SPD shapes, either under an eigenvalue cap
// A <= theta I or under ellipsoid containment in a convex domain.
// Deterministic: fixed grid, injected candidates, coordinate golden-section.

#include <functional>
#include <optional>
#include <vector>

#include "mamv/geometry.hpp"
#include "mamv/linalg.hpp"

namespace mamv {

using ShapeObjective = std::function<double(const SpdShape&)>;

struct SearchBudget {
    int rotations = 16;  // n = 2 frame angles on [0, pi); n = 3 uses 60 fixed frames
    int eig_grid = 17;   // log-eigenvalue grid points per axis
    int refine_sweeps = 12;  // upper bound; sweeps stop once one gains nothing
    int golden_iters = 40;
    double whole_space_cap = 1e4;  // eigenvalue cap used when the domain is unbounded
};

/// Frame base * R(angles) with log-eigenvalues t, sum t = 0.
struct ShapeParam {
    Matrix base;
    std::vector<double> angles;  // n = 2: one angle; n = 3: x, y, z rotation angles
    Vec t;

    Matrix frame() const;
    SpdShape shape() const;
    double max_log() const;
};

/// The 60 rotations of the icosahedral group, in a fixed order.
const std::vector<Matrix>& icosahedral_frames();

/// Zero-sum log-eigenvalues of A* = det(H)^{1/2n} H^{-1/2}, with small or
/// vanishing eigenvalues of H floored, then clamped to max t <= cap keeping
/// the sum at zero.
Vec hint_log_eigenvalues(const EigenSystem& h, double cap);

struct SearchResult {
    double value;
    SpdShape shape;
    double lambda_max;
    long evaluations;
    double coarse_value;
    double refined_value;
    std::optional<double> eps_lambda_max;  // domain searches only
};

/// inf objective(A) over det A = 1, A <= theta I. InfeasibleBound if theta < 1.
SearchResult inf_restricted(const ShapeObjective& objective, int n, double theta, const SearchBudget& budget = {},
                            const std::optional<SymMatrix>& hint = std::nullopt);

/// inf objective(A) over det A = 1 with E_eps(A, x) inside the domain.
SearchResult inf_domain(const ShapeObjective& objective, const ConvexDomain& domain, const Vec& x, double eps,
                        const SearchBudget& budget = {}, const std::optional<SymMatrix>& hint = std::nullopt);

struct DiscreteGrid {
    int rotations = 32;   // n = 2 frame angles on [0, pi)
    int alpha_grid = 33;  // cell midpoints of log alpha on (-2 log phi, 2 log phi)
};

/// Grid minimum over det-1 shapes with every eigenvalue strictly below phi.
/// The shape stands for the stencil: frame = V, eigenvalues = sqrt(alpha).
SearchResult inf_discrete(const ShapeObjective& objective, int n, double phi, const DiscreteGrid& grid = {},
                          const std::optional<SymMatrix>& hint = std::nullopt);

/// alpha in I_eps^n: all entries in (0, phi^2) with product 1 (within 1e-12).
bool in_index_set(const Vec& alpha, double phi);

}  // namespace mamv
