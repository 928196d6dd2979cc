#include "mamv/functions.hpp"

#include <algorithm>
#include <cmath>

#include "mamv/report.hpp"

namespace mamv {

namespace {

double clamp_rhs(double f) { return f < 0.0 ? 0.0 : f; }

void require_dim(int n) {
    if (n < 2 || n > kMaxDim) throw Error(Errc::InvalidArgument, "test functions need 2 <= n <= 8");
}

}  // namespace

std::string_view to_string(Smoothness s) {
    switch (s) {
        case Smoothness::C2: return "C2";
        case Smoothness::C1: return "C1";
        case Smoothness::Lipschitz: return "Lipschitz";
    }
    return "unknown";
}

TestFunction paraboloid(const SymMatrix& m, const Vec& b, double c) {
    const int n = m.dim();
    require_dim(n);
    if (b.size() != n) throw Error(Errc::InvalidArgument, "paraboloid: b has the wrong dimension");
    const EigenSystem e = m.eigen();
    if (e.values[n - 1] < -kPsdTolerance) {
        throw Error(Errc::InvalidMatrix, "paraboloid matrix must be positive semidefinite");
    }
    const double f = std::pow(det_root(e.values), n);

    TestFunction t;
    t.name = "paraboloid";
    t.dim = n;
    t.eval = [m, b, c](const Vec& x) { return c + b.dot(x) + 0.5 * m.quad(x); };
    t.grad = [m, b](const Vec& x) { return b + m * x; };
    t.hess = [m](const Vec&) { return m; };
    t.rhs = [f](const Vec&) { return f; };
    t.domain = ConvexDomain::whole_space(n);
    t.smoothness = Smoothness::C2;
    return t;
}

TestFunction paraboloid(const SymMatrix& m) { return paraboloid(m, Vec(m.dim()), 0.0); }

TestFunction paraboloid_at(const SymMatrix& m, const Vec& x0, double value) {
    TestFunction t = paraboloid(m, -(m * x0), value + 0.5 * m.quad(x0));
    t.eval = [m, x0, value](const Vec& x) { return value + 0.5 * m.quad(x - x0); };
    t.grad = [m, x0](const Vec& x) { return m * (x - x0); };
    return t;
}

TestFunction cone_shell_contact(const Vec& x0, double lambda) {
    const int n = x0.size();
    if (std::abs(x0.norm() - 1.0) > 1e-12) throw Error(Errc::InvalidArgument, "contact point must lie on |x| = 1");
    if (!(lambda > 0.0)) throw Error(Errc::InvalidArgument, "contact eigenvalue must be positive");
    const SymMatrix m = lambda * SymMatrix::identity(n) + (1.0 - lambda) * SymMatrix::outer(x0);
    TestFunction t = paraboloid_at(m, x0);
    t.name = "cone_shell_contact(lambda=" + format_double(lambda) + ")";
    return t;
}

TestFunction u_plus(int n) {
    require_dim(n);
    TestFunction t;
    t.name = "u_plus";
    t.dim = n;
    t.eval = [](const Vec& x) {
        const double r2 = x.norm2();
        return 0.5 * r2 + r2 * r2 / 12.0;
    };
    t.grad = [](const Vec& x) { return (1.0 + x.norm2() / 3.0) * x; };
    t.hess = [n](const Vec& x) {
        return (1.0 + x.norm2() / 3.0) * SymMatrix::identity(n) + (2.0 / 3.0) * SymMatrix::outer(x);
    };
    t.rhs = [n](const Vec& x) {
        const double r2 = x.norm2();
        return (1.0 + r2) * std::pow(1.0 + r2 / 3.0, n - 1);
    };
    t.domain = ConvexDomain::whole_space(n);
    return t;
}

TestFunction u_minus(int n) {
    require_dim(n);
    TestFunction t;
    t.name = "u_minus";
    t.dim = n;
    t.eval = [](const Vec& x) {
        const double r2 = x.norm2();
        return 0.5 * r2 - r2 * r2 / 12.0;
    };
    t.grad = [](const Vec& x) { return (1.0 - x.norm2() / 3.0) * x; };
    t.hess = [n](const Vec& x) {
        return (1.0 - x.norm2() / 3.0) * SymMatrix::identity(n) - (2.0 / 3.0) * SymMatrix::outer(x);
    };
    t.rhs = [n](const Vec& x) {
        const double r2 = x.norm2();
        return clamp_rhs((1.0 - r2) * std::pow(1.0 - r2 / 3.0, n - 1));
    };
    t.domain = ConvexDomain::disc(Vec(n), 1.0);
    t.convexity = Convexity::OnDomain;
    return t;
}

TestFunction cone_shell(int n) {
    require_dim(n);
    TestFunction t;
    t.name = "cone_shell";
    t.dim = n;
    t.eval = [](const Vec& x) {
        const double s = std::max(0.0, x.norm() - 1.0);
        return 0.5 * s * s;
    };
    t.grad = [n](const Vec& x) {
        const double r = x.norm();
        return r > 1.0 ? (1.0 - 1.0 / r) * x : Vec(n);
    };
    // outer branch; the zero matrix inside the unit ball and on the sphere
    t.hess = [n](const Vec& x) {
        const double r = x.norm();
        if (r <= 1.0) return SymMatrix(n);
        return (1.0 - 1.0 / r) * SymMatrix::identity(n) + (1.0 / (r * r * r)) * SymMatrix::outer(x);
    };
    t.rhs = [n](const Vec& x) { return std::pow(std::max(0.0, 1.0 - 1.0 / x.norm()), n - 1); };
    t.domain = ConvexDomain::whole_space(n);
    t.smoothness = Smoothness::C1;
    t.kink = [](const Vec& x) { return x.norm() - 1.0; };
    t.kink_description = "unit sphere |x| = 1";
    return t;
}

TestFunction ridge(double gamma) {
    if (!(gamma >= 1.0)) throw Error(Errc::InvalidArgument, "ridge needs gamma >= 1");
    TestFunction t;
    t.name = "ridge(gamma=" + format_double(gamma) + ")";
    t.dim = 2;
    t.eval = [gamma](const Vec& x) { return std::pow(std::abs(x[0]), gamma); };
    t.rhs = [](const Vec&) { return 0.0; };
    t.domain = ConvexDomain::whole_space(2);
    if (gamma > 1.0) {
        t.grad = [gamma](const Vec& x) {
            const double a = std::abs(x[0]);
            return Vec{std::copysign(gamma * std::pow(a, gamma - 1.0), x[0]), 0.0};
        };
    }
    if (gamma >= 2.0) {
        t.hess = [gamma](const Vec& x) {
            return SymMatrix::diagonal(Vec{gamma * (gamma - 1.0) * std::pow(std::abs(x[0]), gamma - 2.0), 0.0});
        };
        t.smoothness = Smoothness::C2;
    } else {
        t.smoothness = gamma > 1.0 ? Smoothness::C1 : Smoothness::Lipschitz;
        t.kink = [](const Vec& x) { return x[0]; };
        t.kink_description = "line x1 = 0";
    }
    return t;
}

TestFunction example46() {
    TestFunction t;
    t.name = "example46";
    t.dim = 2;
    auto outer = [](const Vec& x) { return std::abs(x[0]) >= std::pow(x[1], 4); };
    t.eval = [outer](const Vec& x) {
        if (outer(x)) return std::abs(x[0]);
        const double q = std::pow(x[1], 4);
        return (q * q + x[0] * x[0]) / (2.0 * q);
    };
    t.grad = [outer](const Vec& x) {
        if (outer(x)) return Vec{x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? -1.0 : 0.0), 0.0};
        const double y = x[1];
        return Vec{x[0] / std::pow(y, 4), 2.0 * y * y * y - 2.0 * x[0] * x[0] / std::pow(y, 5)};
    };
    t.hess = [outer](const Vec& x) {
        if (outer(x)) return SymMatrix(2);
        const double y = x[1];
        return SymMatrix{{1.0 / std::pow(y, 4), -4.0 * x[0] / std::pow(y, 5)},
                         {-4.0 * x[0] / std::pow(y, 5), 6.0 * y * y + 10.0 * x[0] * x[0] / std::pow(y, 6)}};
    };
    // unbounded near the x2 axis inside the inner region; recorded as is
    t.rhs = [outer](const Vec& x) {
        if (outer(x)) return 0.0;
        const double y = x[1];
        return clamp_rhs(6.0 * (std::pow(y, 8) - x[0] * x[0]) / std::pow(y, 10));
    };
    t.domain = ConvexDomain::whole_space(2);
    t.smoothness = Smoothness::C1;
    t.kink = [](const Vec& x) { return std::abs(x[0]) - std::pow(x[1], 4); };
    t.kink_description = "curves |x1| = x2^4; f unbounded as x2 -> 0 inside them";
    return t;
}

TestFunction radial_quadratic(int n) {
    TestFunction t = paraboloid(SymMatrix::identity(n));
    t.name = "radial_quadratic";
    return t;
}

std::vector<TestFunction> catalog() {
    std::vector<TestFunction> out;
    out.push_back(paraboloid(SymMatrix::diagonal(Vec{2.0, 0.5})));
    out.push_back(u_plus(2));
    out.push_back(u_minus(2));
    out.push_back(cone_shell(2));
    out.push_back(ridge(1.0));
    out.push_back(example46());
    out.push_back(radial_quadratic(2));
    return out;
}

TestFunction by_name(const std::string& name, int n, double gamma) {
    if (name == "paraboloid") return paraboloid(SymMatrix::identity(n));
    if (name == "u_plus") return u_plus(n);
    if (name == "u_minus") return u_minus(n);
    if (name == "cone_shell") return cone_shell(n);
    if (name == "ridge") return ridge(gamma);
    if (name == "example46") return example46();
    if (name == "radial_quadratic") return radial_quadratic(n);
    throw Error(Errc::InvalidConfig, "unknown function '" + name + "'");
}

SymMatrix hess_fd(const TestFunction& u, const Vec& x, double h) {
    const int n = x.size();
    if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "hess_fd needs h > 0");

    std::vector<Vec> stencil{x};
    for (int i = 0; i < n; ++i) {
        const Vec ei = h * Vec::unit(n, i);
        stencil.push_back(x + ei);
        stencil.push_back(x - ei);
        for (int j = i + 1; j < n; ++j) {
            const Vec ej = h * Vec::unit(n, j);
            for (double si : {-1.0, 1.0})
                for (double sj : {-1.0, 1.0}) stencil.push_back(x + si * ei + sj * ej);
        }
    }
    const double k0 = u.kink ? u.kink(x) : 0.0;
    for (const Vec& p : stencil) {
        if (!u.domain.contains(p, 0.0)) {
            throw Error(Errc::StencilOutOfDomain, "stencil point " + p.str() + " leaves " + u.domain.str());
        }
        if (u.kink) {
            const double k = u.kink(p);
            if (k0 == 0.0 || k == 0.0 || (k > 0.0) != (k0 > 0.0)) {
                throw Error(Errc::StencilOutOfDomain, "stencil at " + x.str() + " straddles " + u.kink_description);
            }
        }
    }

    const double f0 = u(x);
    SymMatrix hs(n);
    for (int i = 0; i < n; ++i) {
        const Vec ei = h * Vec::unit(n, i);
        hs.set(i, i, (u(x + ei) - 2.0 * f0 + u(x - ei)) / (h * h));
        for (int j = i + 1; j < n; ++j) {
            const Vec ej = h * Vec::unit(n, j);
            const double v = u(x + ei + ej) - u(x + ei - ej) - u(x - ei + ej) + u(x - ei - ej);
            hs.set(i, j, v / (4.0 * h * h));
        }
    }
    return hs;
}

}  // namespace mamv
