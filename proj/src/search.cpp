#include "mamv/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mamv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix rotation_from_angles(int n, const std::vector<double>& angles) {
    if (n == 2) return Matrix::rotation2(angles[0]);
    return Matrix::rotation3(Vec{1.0, 0.0, 0.0}, angles[0]) * Matrix::rotation3(Vec{0.0, 1.0, 0.0}, angles[1]) *
           Matrix::rotation3(Vec{0.0, 0.0, 1.0}, angles[2]);
}

std::vector<double> linspace(double a, double b, int m) {
    if (m == 1 || a == b) return {0.5 * (a + b)};
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) out[i] = a + (b - a) * i / (m - 1);
    return out;
}

void check_search_dim(int n) {
    if (n != 2 && n != 3) throw Error(Errc::InvalidArgument, "shape search supports n = 2, 3");
}

void check_budget(const SearchBudget& b) {
    if (b.rotations < 1 || b.eig_grid < 1 || b.refine_sweeps < 0 || b.golden_iters < 1 || !(b.whole_space_cap >= 1.0)) {
        throw Error(Errc::InvalidConfig, "search budget entries must be positive");
    }
}

ShapeParam param_from(const Matrix& frame, const Vec& t) {
    return ShapeParam{frame, std::vector<double>(frame.dim() == 2 ? 1 : 3, 0.0), t};
}

SymMatrix log_matrix(const ShapeParam& p) { return SymMatrix::from_eigen(p.frame(), p.t); }

std::vector<SymMatrix> traceless_basis(int n) {
    std::vector<SymMatrix> out;
    for (int i = 0; i + 1 < n; ++i) {
        Vec d(n);
        for (int k = 0; k <= i; ++k) d[k] = 1.0;
        d[i + 1] = -(i + 1.0);
        out.push_back((1.0 / d.norm()) * SymMatrix::diagonal(d));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            SymMatrix m(n);
            m.set(i, j, std::sqrt(0.5));
            out.push_back(m);
        }
    return out;
}

// Shared driver: candidates, then the lexicographic grid, then optional
// refinement. Ties keep the first point found.
class Search {
public:
    Search(const ShapeObjective& objective, int n, std::function<bool(const ShapeParam&)> feasible)
        : objective_(objective), n_(n), feasible_(std::move(feasible)) {}

    double eval(const ShapeParam& p) {
        if (!feasible_(p)) return kInf;
        const SpdShape s = p.shape();
        double v;
        try {
            v = objective_(s);
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " [shape " + s.str() + "]");
        }
        ++evals_;
        if (!std::isfinite(v)) {
            throw Error(Errc::NonFiniteIntegrand, "objective is " + std::to_string(v) + " at shape " + s.str());
        }
        return v;
    }

    void offer(const ShapeParam& p) {
        const double v = eval(p);
        if (v < best_value_) {
            best_value_ = v;
            best_ = p;
        }
    }

    void grid(const std::vector<Matrix>& frames, const std::vector<double>& ts, double cap) {
        for (const Matrix& f : frames) {
            if (n_ == 2) {
                for (double t : ts) offer(ShapeParam{f, {0.0}, Vec{t, -t}});
            } else {
                for (double t1 : ts)
                    for (double t2 : ts) {
                        const Vec t{t1, t2, -t1 - t2};
                        if (t[2] > cap * (1.0 + 1e-12) + 1e-15) continue;
                        offer(ShapeParam{f, {0.0, 0.0, 0.0}, t});
                    }
            }
        }
    }

    // Coordinate golden-section on log A over a basis of traceless symmetric
    // matrices; no polar-coordinate singularity at A = I. Sweeps stop early
    // once a sweep gains nothing.
    void refine(int sweeps, int golden_iters, double step) {
        if (!best_ || !(step > 0.0)) return;
        const std::vector<SymMatrix> basis = traceless_basis(n_);
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            const double before = best_value_;
            for (const SymMatrix& dir : basis) {
                const SymMatrix start = log_matrix(*best_);
                auto at = [&](double s) {
                    const EigenSystem e = jacobi_eigen(start + s * dir);
                    return param_from(e.vectors, e.values);
                };
                const double g = (std::sqrt(5.0) - 1.0) / 2.0;
                double a = -step, b = step;
                double x1 = b - g * (b - a), x2 = a + g * (b - a);
                double f1 = eval(at(x1)), f2 = eval(at(x2));
                for (int it = 0; it < golden_iters; ++it) {
                    if (f1 <= f2) {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - g * (b - a);
                        f1 = eval(at(x1));
                    } else {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + g * (b - a);
                        f2 = eval(at(x2));
                    }
                }
                const double v = std::min(f1, f2);
                if (v < best_value_) {
                    best_value_ = v;
                    best_ = at(f1 <= f2 ? x1 : x2);
                }
            }
            if (!(best_value_ < before - 1e-15 * std::abs(before))) break;
        }
    }

    bool found() const { return best_.has_value(); }
    const ShapeParam& best() const { return *best_; }
    double best_value() const { return best_value_; }
    long evaluations() const { return evals_; }

private:
    const ShapeObjective& objective_;
    int n_;
    std::function<bool(const ShapeParam&)> feasible_;
    std::optional<ShapeParam> best_;
    double best_value_ = kInf;
    long evals_ = 0;
};

std::vector<Matrix> frames_for(int n, int rotations) {
    if (n == 3) return icosahedral_frames();
    std::vector<Matrix> out;
    for (int k = 0; k < rotations; ++k) out.push_back(Matrix::rotation2(std::numbers::pi * k / rotations));
    return out;
}

SearchResult assemble(const Search& s, double coarse) {
    const SpdShape shape = s.best().shape();
    return SearchResult{s.best_value(), shape, shape.lambda_max(), s.evaluations(), coarse, s.best_value(),
                        std::nullopt};
}

}  // namespace

Matrix ShapeParam::frame() const { return base * rotation_from_angles(base.dim(), angles); }

SpdShape ShapeParam::shape() const {
    Vec lambda(t.size());
    for (int i = 0; i < t.size(); ++i) lambda[i] = std::exp(t[i]);
    return SpdShape::from_eigen(frame(), lambda);
}

double ShapeParam::max_log() const {
    double m = -kInf;
    for (int i = 0; i < t.size(); ++i) m = std::max(m, t[i]);
    return m;
}

const std::vector<Matrix>& icosahedral_frames() {
    static const std::vector<Matrix> frames = [] {
        const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
        const Matrix g1 = Matrix::rotation3(Vec{0.0, 1.0, phi}, 2.0 * std::numbers::pi / 5.0);
        const Matrix g2 = Matrix::rotation3(Vec{0.0, 0.0, 1.0}, std::numbers::pi);
        std::vector<Matrix> out{Matrix::identity(3)};
        for (std::size_t i = 0; i < out.size() && out.size() < 60; ++i) {
            for (const Matrix& g : {g1, g2}) {
                const Matrix m = out[i] * g;
                const bool seen = std::any_of(out.begin(), out.end(),
                                              [&](const Matrix& o) { return (o - m).frobenius() < 1e-9; });
                if (!seen) out.push_back(m);
            }
        }
        return out;
    }();
    return frames;
}

Vec hint_log_eigenvalues(const EigenSystem& h, double cap) {
    const int n = h.values.size();
    const double top = std::max(h.values[0], 1e-200);
    Vec logs(n);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        logs[i] = std::log(std::max(h.values[i], top * 1e-24));
        mean += logs[i] / n;
    }
    Vec t(n);
    for (int i = 0; i < n; ++i) t[i] = 0.5 * (mean - logs[i]);

    // water-fill: pin entries above the cap, spread the excess over the rest
    std::array<bool, kMaxDim> pinned{};
    for (int round = 0; round < n; ++round) {
        double excess = 0.0;
        int free = 0;
        for (int i = 0; i < n; ++i) {
            if (!pinned[i] && t[i] > cap) {
                excess += t[i] - cap;
                t[i] = cap;
                pinned[i] = true;
            }
        }
        for (int i = 0; i < n; ++i) free += !pinned[i];
        if (excess == 0.0 || free == 0) break;
        for (int i = 0; i < n; ++i)
            if (!pinned[i]) t[i] += excess / free;
    }
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += t[i];
    t[n - 1] -= sum;
    return t;
}

SearchResult inf_restricted(const ShapeObjective& objective, int n, double theta, const SearchBudget& budget,
                            const std::optional<SymMatrix>& hint) {
    check_search_dim(n);
    check_budget(budget);
    if (!(theta >= 1.0)) {
        throw Error(Errc::InfeasibleBound, "eigenvalue bound " + std::to_string(theta) + " < 1");
    }
    const double cap = std::log(theta);
    Search s(objective, n, [cap](const ShapeParam& p) { return p.max_log() <= cap * (1.0 + 1e-12) + 1e-15; });

    s.offer(param_from(Matrix::identity(n), Vec(n)));
    if (hint) {
        const EigenSystem e = hint->eigen();
        s.offer(param_from(e.vectors, hint_log_eigenvalues(e, cap)));
    }
    const std::vector<double> ts = linspace(-cap, cap, budget.eig_grid);
    s.grid(frames_for(n, budget.rotations), ts, cap);
    const double coarse = s.best_value();

    s.refine(budget.refine_sweeps, budget.golden_iters, ts.size() > 1 ? ts[1] - ts[0] : 0.0);
    return assemble(s, coarse);
}

SearchResult inf_domain(const ShapeObjective& objective, const ConvexDomain& domain, const Vec& x, double eps,
                        const SearchBudget& budget, const std::optional<SymMatrix>& hint) {
    const int n = domain.dim();
    check_search_dim(n);
    check_budget(budget);
    if (x.size() != n) throw Error(Errc::InvalidArgument, "point/domain dimension mismatch");
    if (!(eps > 0.0)) throw Error(Errc::InvalidArgument, "eps must be positive");
    if (eps > max_scale(domain, x, SpdShape::identity(n))) {
        throw Error(Errc::EllipsoidEscapesDomain,
                    "B_eps(x) with eps = " + std::to_string(eps) + " is not inside " + domain.str());
    }
    const double cap = domain.is_whole_space() ? std::log(budget.whole_space_cap)
                                               : std::log(std::max(1.0, domain.diameter() / (2.0 * eps)));
    auto feasible = [&](const ShapeParam& p) {
        if (p.max_log() > cap * (1.0 + 1e-12) + 1e-15) return false;
        return domain.is_whole_space() || eps <= max_scale(domain, x, p.shape());
    };
    Search s(objective, n, feasible);

    s.offer(param_from(Matrix::identity(n), Vec(n)));
    if (hint) {
        const EigenSystem e = hint->eigen();
        const Vec full = hint_log_eigenvalues(e, cap);
        auto scaled = [&](double k) { return param_from(e.vectors, k * full); };
        double lo = 0.0, hi = 1.0;
        if (!feasible(scaled(1.0))) {
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (feasible(scaled(mid)) ? lo : hi) = mid;
            }
        } else {
            lo = 1.0;
        }
        s.offer(scaled(lo));
    }
    const std::vector<double> ts = linspace(-cap, cap, budget.eig_grid);
    s.grid(frames_for(n, budget.rotations), ts, cap);
    const double coarse = s.best_value();

    s.refine(budget.refine_sweeps, budget.golden_iters, ts.size() > 1 ? ts[1] - ts[0] : 0.0);
    SearchResult r = assemble(s, coarse);
    r.eps_lambda_max = eps * r.lambda_max;
    return r;
}

SearchResult inf_discrete(const ShapeObjective& objective, int n, double phi, const DiscreteGrid& grid,
                          const std::optional<SymMatrix>& hint) {
    check_search_dim(n);
    if (grid.rotations < 1 || grid.alpha_grid < 1) {
        throw Error(Errc::InvalidConfig, "discrete stencil sizes must be positive");
    }
    if (!(phi > 1.0)) throw Error(Errc::InfeasibleBound, "discrete index set needs phi > 1");
    const double cap = std::log(phi);
    const double open_cap = cap * (1.0 - 1e-12);
    Search s(objective, n, [cap](const ShapeParam& p) { return p.max_log() < cap; });

    s.offer(param_from(Matrix::identity(n), Vec(n)));
    if (hint) {
        const EigenSystem e = hint->eigen();
        s.offer(param_from(e.vectors, hint_log_eigenvalues(e, open_cap)));
    }
    std::vector<double> ts(grid.alpha_grid);
    const double width = 2.0 * cap / grid.alpha_grid;
    for (int j = 0; j < grid.alpha_grid; ++j) ts[j] = -cap + (j + 0.5) * width;
    s.grid(frames_for(n, grid.rotations), ts, open_cap);
    return assemble(s, s.best_value());
}

bool in_index_set(const Vec& alpha, double phi) {
    double log_prod = 0.0;
    for (int i = 0; i < alpha.size(); ++i) {
        if (!(alpha[i] > 0.0) || !(alpha[i] < phi * phi)) return false;
        log_prod += std::log(alpha[i]);
    }
    return std::abs(log_prod) <= 1e-12;
}

}  // namespace mamv
