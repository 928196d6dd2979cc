#include "mamv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mamv/parallel.hpp"

namespace mamv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// arm endpoint offset in grid units, split into cell corner and bilinear fraction
struct ArmOffset {
    int di = 0, dj = 0;
    double fx = 0.0, fy = 0.0;
    double length = 0.0;
    Vec dir;
};

struct BoundaryArm {
    int arm;
    double length;
    double value;
};

double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) < 1e-9 ? r : v;
}

}  // namespace

struct StencilOperator::Impl {
    ConvexDomain domain;
    ScalarField f, g;
    double eps, h;
    SolverConfig cfg;
    Grid2 grid;
    std::vector<double> f_root;
    std::vector<double> alpha;  // per candidate and direction, alpha_i
    std::vector<ArmOffset> arms;
    int candidates = 0;
    // boundary arms per node, sorted by arm id; empty for nodes whose stencil is fully interpolable
    std::vector<std::vector<BoundaryArm>> boundary_arms;

    Impl(const ConvexDomain& d, const ScalarField& f_, const ScalarField& g_, double eps_, double h_,
         const SolverConfig& c)
        : domain(d), f(f_), g(g_), eps(eps_), h(h_), cfg(c) {}

    bool active(int i, int j) const {
        if (i < 0 || j < 0 || i >= grid.nx || j >= grid.ny) return false;
        return grid.kind[grid.index(i, j)] != Grid2::Node::Exterior;
    }

    bool interpolable(int i, int j, const ArmOffset& a) const {
        const int i0 = i + a.di, j0 = j + a.dj;
        if (!active(i0, j0)) return false;
        if (a.fx > 0.0 && !active(i0 + 1, j0)) return false;
        if (a.fy > 0.0 && !active(i0, j0 + 1)) return false;
        if (a.fx > 0.0 && a.fy > 0.0 && !active(i0 + 1, j0 + 1)) return false;
        return true;
    }

    double interpolate(int i, int j, const ArmOffset& a, const std::vector<double>& v) const {
        const int k = grid.index(i + a.di, j + a.dj);
        double s = (1.0 - a.fx) * (1.0 - a.fy) * v[k];
        if (a.fx > 0.0) s += a.fx * (1.0 - a.fy) * v[k + 1];
        if (a.fy > 0.0) s += (1.0 - a.fx) * a.fy * v[k + grid.nx];
        if (a.fx > 0.0 && a.fy > 0.0) s += a.fx * a.fy * v[k + grid.nx + 1];
        return s;
    }
};

StencilOperator::StencilOperator(const ConvexDomain& domain, const ScalarField& f, const ScalarField& g,
                                 double eps, double h, const SolverConfig& cfg)
    : impl_(std::make_unique<Impl>(domain, f, g, eps, h, cfg)) {
    Impl& m = *impl_;
    if (domain.dim() != 2 || domain.is_whole_space()) {
        throw Error(Errc::InvalidDomain, "the solver needs a bounded planar domain");
    }
    if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "grid spacing must be positive");
    if (!(eps >= 2.0 * h * (1.0 - 1e-12))) {
        throw Error(Errc::InvalidArgument, "eps = " + format_double(eps) + " is below 2h = " + format_double(2.0 * h));
    }
    if (cfg.frame_angles < 1 || cfg.alpha_grid < 1) throw Error(Errc::InvalidConfig, "stencil sizes must be positive");

    Vec lo, hi;
    domain.bounding_box(lo, hi);
    Grid2& gr = m.grid;
    gr.origin = lo;
    gr.h = h;
    gr.nx = static_cast<int>(std::floor((hi[0] - lo[0]) / h + 1e-9)) + 1;
    gr.ny = static_cast<int>(std::floor((hi[1] - lo[1]) / h + 1e-9)) + 1;
    const int total = gr.nx * gr.ny;
    gr.kind.assign(total, Grid2::Node::Exterior);
    gr.u.assign(total, 0.0);
    m.f_root.assign(total, 0.0);
    double inradius = 0.0;
    for (int j = 0; j < gr.ny; ++j) {
        for (int i = 0; i < gr.nx; ++i) {
            const int k = gr.index(i, j);
            const Vec p = gr.point(i, j);
            const double d = domain.boundary_distance(p);
            inradius = std::max(inradius, d);
            if (d > 1e-9 * h) {
                gr.kind[k] = Grid2::Node::Interior;
                const double fv = f(p);
                if (!(fv >= 0.0)) {
                    throw Error(Errc::InvalidRhs, "f = " + format_double(fv) + " at " + p.str());
                }
                m.f_root[k] = std::sqrt(fv);
            } else if (d >= -1e-9 * h) {
                gr.kind[k] = Grid2::Node::Boundary;
                gr.u[k] = g(p);
            }
        }
    }
    const double phi = cfg.phi(eps);
    if (eps * phi > 0.5 * inradius * (1.0 + 1e-12)) {
        throw Error(Errc::InvalidConfig, "eps phi(eps) = " + format_double(eps * phi) +
                                             " exceeds half the inradius " + format_double(0.5 * inradius));
    }

    // candidates: frame angle k, log alpha cell midpoint j; arms (+v1, -v1, +v2, -v2)
    const double span = 2.0 * std::log(phi);
    for (int a = 0; a < cfg.frame_angles; ++a) {
        const double th = std::numbers::pi * a / cfg.frame_angles;
        const Vec v1{std::cos(th), std::sin(th)}, v2{-std::sin(th), std::cos(th)};
        for (int j = 0; j < cfg.alpha_grid; ++j) {
            const double s = -span + (j + 0.5) * 2.0 * span / cfg.alpha_grid;
            const double al[2] = {std::exp(s), std::exp(-s)};
            const Vec* vs[2] = {&v1, &v2};
            for (int d = 0; d < 2; ++d) {
                m.alpha.push_back(al[d]);
                const double len = eps * std::sqrt(al[d]);
                for (double sign : {1.0, -1.0}) {
                    ArmOffset o;
                    o.dir = sign * *vs[d];
                    o.length = len;
                    const double ox = snap(len * o.dir[0] / h), oy = snap(len * o.dir[1] / h);
                    o.di = static_cast<int>(std::floor(ox));
                    o.dj = static_cast<int>(std::floor(oy));
                    o.fx = ox - o.di;
                    o.fy = oy - o.dj;
                    m.arms.push_back(o);
                }
            }
            ++m.candidates;
        }
    }

    m.boundary_arms.assign(total, {});
    for (int j = 0; j < gr.ny; ++j) {
        for (int i = 0; i < gr.nx; ++i) {
            const int k = gr.index(i, j);
            if (gr.kind[k] != Grid2::Node::Interior) continue;
            const Vec p = gr.point(i, j);
            for (int a = 0; a < static_cast<int>(m.arms.size()); ++a) {
                const ArmOffset& o = m.arms[a];
                if (m.interpolable(i, j, o)) continue;
                const double t = domain.ray_exit(p, o.dir);
                m.boundary_arms[k].push_back({a, t, g(p + t * o.dir)});
            }
        }
    }
}

StencilOperator::~StencilOperator() = default;

const Grid2& StencilOperator::layout() const { return impl_->grid; }

double StencilOperator::apply(int k, const std::vector<double>& values) const {
    const Impl& m = *impl_;
    const Grid2& gr = m.grid;
    if (gr.kind[k] != Grid2::Node::Interior) return gr.u[k];
    const int i = k % gr.nx, j = k / gr.nx;
    const auto& special = m.boundary_arms[k];

    if (special.empty()) {
        double best = kInf;
        for (int c = 0; c < m.candidates; ++c) {
            double s = 0.0;
            for (int a = 4 * c; a < 4 * c + 4; ++a) s += m.interpolate(i, j, m.arms[a], values);
            best = std::min(best, s);
        }
        return 0.25 * best - 0.5 * m.eps * m.eps * m.f_root[k];
    }

    std::size_t next = 0;
    auto arm_value = [&](int a, double& len) {
        while (next < special.size() && special[next].arm < a) ++next;
        if (next < special.size() && special[next].arm == a) {
            len = special[next].length;
            return special[next].value;
        }
        len = m.arms[a].length;
        return m.interpolate(i, j, m.arms[a], values);
    };
    double best = kInf;
    for (int c = 0; c < m.candidates; ++c) {
        double wsum = 0.0, wm = 0.0;
        for (int d = 0; d < 2; ++d) {
            const int a = 4 * c + 2 * d;
            double fwd = 0.0, back = 0.0;
            const double up = arm_value(a, fwd);
            const double down = arm_value(a + 1, back);
            // second difference on unequal arms: (back u+ + fwd u-) / (fwd + back) = u0 + fwd back Q / 2
            const double mid = (back * up + fwd * down) / (fwd + back);
            const double w = m.alpha[2 * c + d] * 2.0 / (fwd * back);
            wsum += w;
            wm += w * mid;
        }
        best = std::min(best, (wm - 2.0 * m.f_root[k]) / wsum);
    }
    return best;
}

std::vector<double> StencilOperator::initial_guess() const {
    const Impl& m = *impl_;
    const Grid2& gr = m.grid;
    std::vector<double> u = gr.u;
    for (int j = 0; j < gr.ny; ++j) {
        for (int i = 0; i < gr.nx; ++i) {
            const int k = gr.index(i, j);
            if (gr.kind[k] != Grid2::Node::Interior) continue;
            const Vec p = gr.point(i, j);
            double num = 0.0, den = 0.0;
            for (int r = 0; r < 8; ++r) {
                const double th = std::numbers::pi * r / 4.0;
                const Vec dir{std::cos(th), std::sin(th)};
                const double t = std::max(m.domain.ray_exit(p, dir), 1e-300);
                num += m.g(p + t * dir) / t;
                den += 1.0 / t;
            }
            u[k] = num / den;
        }
    }
    return u;
}

SolveResult solve_dirichlet(const ConvexDomain& domain, const ScalarField& f, const ScalarField& g, double eps,
                            double h, const SolverConfig& cfg, const ScalarField& exact) {
    const StencilOperator op(domain, f, g, eps, h, cfg);
    const Grid2& layout = op.layout();
    std::vector<double> u = op.initial_guess();
    std::vector<double> next = u;
    std::vector<int> interior;
    for (int k = 0; k < static_cast<int>(layout.kind.size()); ++k) {
        if (layout.kind[k] == Grid2::Node::Interior) interior.push_back(k);
    }

    SolveReport report;
    bool converged = false;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        parallel_for(interior.size(), [&](std::size_t q) { next[interior[q]] = op.apply(interior[q], u); });
        double res = 0.0;
        for (int k : interior) res = std::max(res, std::abs(next[k] - u[k]));
        std::swap(u, next);
        report.iterations = it;
        if (it > cfg.burn_in && !report.residual_history.empty() && res > report.residual_history.back()) {
            ++report.monotonicity_warnings;
        }
        report.residual_history.push_back(res);
        report.residual = res;
        if (res < cfg.tol) {
            converged = true;
            break;
        }
    }

    SolveResult out{layout, report};
    out.grid.u = u;
    if (exact) {
        double err = 0.0;
        for (int j = 0; j < layout.ny; ++j)
            for (int i = 0; i < layout.nx; ++i) {
                const int k = layout.index(i, j);
                if (layout.kind[k] != Grid2::Node::Exterior) err = std::max(err, std::abs(u[k] - exact(layout.point(i, j))));
            }
        out.report.max_error = err;
    }
    if (!converged) {
        throw NotConvergedError("no convergence after " + std::to_string(cfg.max_iter) + " sweeps (max update " +
                                    format_double(report.residual) + ")",
                                out.report);
    }
    return out;
}

}  // namespace mamv
