#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mamv/functions.hpp"
#include "mamv/solver.hpp"

using namespace mamv;

namespace {

const ConvexDomain kSquare = ConvexDomain::box(Vec{-1.0, -1.0}, Vec{1.0, 1.0});

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no throw";
    return Errc::InvalidArgument;
}

const ScalarField kOne = [](const Vec&) { return 1.0; };
const ScalarField kZero = [](const Vec&) { return 0.0; };
const ScalarField kHalfSquare = [](const Vec& z) { return 0.5 * z.norm2(); };

double max_gap(const Grid2& g, const ScalarField& exact) {
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.kind[g.index(i, j)] != Grid2::Node::Exterior)
                worst = std::max(worst, std::abs(g.u[g.index(i, j)] - exact(g.point(i, j))));
    return worst;
}

}  // namespace

TEST(Solver, AffineDataIsReproduced) {
    const ScalarField affine = [](const Vec& z) { return 0.3 + 0.8 * z[0] - 0.5 * z[1]; };
    SolverConfig cfg;
    cfg.tol = 1e-14;
    const SolveResult r = solve_dirichlet(kSquare, kZero, affine, 0.2, 0.05, cfg, affine);
    EXPECT_LE(max_gap(r.grid, affine), 1e-10);
    ASSERT_TRUE(r.report.max_error.has_value());
    EXPECT_LE(*r.report.max_error, 1e-10);
}

TEST(Solver, QuadraticBenchmarkOnCoarseGrid) {
    const SolveResult r = solve_dirichlet(kSquare, kOne, kHalfSquare, 0.2, 0.04, {}, kHalfSquare);
    ASSERT_TRUE(r.report.max_error.has_value());
    EXPECT_LE(*r.report.max_error, 5e-3);
    EXPECT_LE(r.report.residual, 1e-10);
    EXPECT_EQ(static_cast<int>(r.report.residual_history.size()), r.report.iterations);
}

TEST(Solver, UPlusOnDisc) {
    const TestFunction u = u_plus(2);
    const ConvexDomain disc = ConvexDomain::disc(Vec{0.0, 0.0}, 0.8);
    const SolveResult r = solve_dirichlet(disc, u.rhs, u.eval, 0.1, 0.02, {}, u.eval);
    ASSERT_TRUE(r.report.max_error.has_value());
    EXPECT_LE(*r.report.max_error, 1e-2);
}

TEST(Solver, UpdateIsMonotone) {
    const TestFunction u = u_plus(2);
    const StencilOperator op(kSquare, u.rhs, u.eval, 0.2, 0.04, {});
    const Grid2& g = op.layout();
    std::vector<double> base = op.initial_guess();
    std::mt19937_64 gen(61);
    std::uniform_real_distribution<double> bump(0.0, 0.05);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(base.size()) - 1);
    int checked = 0;
    while (checked < 200) {
        const int k = pick(gen);
        if (g.kind[k] != Grid2::Node::Interior) continue;
        const double before = op.apply(k, base);
        std::vector<double> raised = base;
        for (std::size_t m = 0; m < raised.size(); ++m)
            if (static_cast<int>(m) != k && g.kind[m] == Grid2::Node::Interior) raised[m] += bump(gen);
        EXPECT_GE(op.apply(k, raised), before - 1e-15);
        ++checked;
    }
}

TEST(Solver, ComparisonPrinciple) {
    const ScalarField g1 = kHalfSquare;
    const ScalarField g2 = [](const Vec& z) { return 0.5 * z.norm2() + 0.05 + 0.02 * z[0] * z[0]; };
    const ScalarField f1 = [](const Vec& z) { return 1.0 + 0.5 * z[1] * z[1]; };
    const ScalarField f2 = [](const Vec&) { return 0.5; };
    SolverConfig cfg;
    const SolveResult r1 = solve_dirichlet(kSquare, f1, g1, 0.2, 0.05, cfg);
    const SolveResult r2 = solve_dirichlet(kSquare, f2, g2, 0.2, 0.05, cfg);
    const double slack = cfg.tol * std::max(r1.report.iterations, r2.report.iterations);
    for (std::size_t k = 0; k < r1.grid.u.size(); ++k) {
        if (r1.grid.kind[k] == Grid2::Node::Exterior) continue;
        EXPECT_LE(r1.grid.u[k], r2.grid.u[k] + slack);
    }
}

TEST(Solver, Deterministic) {
    const SolveResult a = solve_dirichlet(kSquare, kOne, kHalfSquare, 0.2, 0.05);
    const SolveResult b = solve_dirichlet(kSquare, kOne, kHalfSquare, 0.2, 0.05);
    EXPECT_EQ(a.grid.u, b.grid.u);
    EXPECT_EQ(a.report.iterations, b.report.iterations);
}

TEST(Solver, RejectsBadInput) {
    const ScalarField negative = [](const Vec& z) { return z[0] > 0.5 ? -1.0 : 1.0; };
    EXPECT_EQ(code_of([&] { solve_dirichlet(kSquare, negative, kHalfSquare, 0.2, 0.05); }), Errc::InvalidRhs);
    EXPECT_EQ(code_of([] { solve_dirichlet(kSquare, kOne, kHalfSquare, 0.07, 0.05); }), Errc::InvalidArgument);
    EXPECT_EQ(code_of([] { solve_dirichlet(kSquare, kOne, kHalfSquare, 0.3, 0.05); }), Errc::InvalidConfig);
    EXPECT_EQ(code_of([] { solve_dirichlet(ConvexDomain::whole_space(2), kOne, kHalfSquare, 0.2, 0.05); }),
              Errc::InvalidDomain);
}

TEST(Solver, NotConvergedCarriesReport) {
    SolverConfig cfg;
    cfg.max_iter = 5;
    try {
        solve_dirichlet(kSquare, kOne, kHalfSquare, 0.2, 0.05, cfg);
        FAIL() << "no throw";
    } catch (const NotConvergedError& e) {
        EXPECT_EQ(e.code(), Errc::NotConverged);
        EXPECT_EQ(e.report().iterations, 5);
        EXPECT_GT(e.report().residual, cfg.tol);
    }
}

TEST(Solver, GridClassification) {
    const StencilOperator op(ConvexDomain::disc(Vec{0.0, 0.0}, 0.8), kOne, kHalfSquare, 0.1, 0.05, {});
    const Grid2& g = op.layout();
    int interior = 0, boundary = 0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double r = g.point(i, j).norm();
            switch (g.kind[g.index(i, j)]) {
                case Grid2::Node::Interior: EXPECT_LT(r, 0.8); ++interior; break;
                case Grid2::Node::Boundary: EXPECT_NEAR(r, 0.8, 1e-6); ++boundary; break;
                case Grid2::Node::Exterior: EXPECT_GT(r, 0.8 - 1e-9); break;
            }
        }
    }
    EXPECT_GT(interior, 0);
    EXPECT_GT(boundary, 0);
}
