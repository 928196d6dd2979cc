#pragma once

// Exact test functions for det D^2 u = f with closed-form derivatives.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mamv/geometry.hpp"
#include "mamv/linalg.hpp"
#include "mamv/quadrature.hpp"

namespace mamv {

enum class Smoothness { C2, C1, Lipschitz };
enum class Convexity { Global, OnDomain };

std::string_view to_string(Smoothness s);

struct TestFunction {
    std::string name;
    int dim = 2;
    ScalarField eval;
    std::function<Vec(const Vec&)> grad;        // empty when not provided
    std::function<SymMatrix(const Vec&)> hess;  // empty when not provided
    ScalarField rhs;
    ConvexDomain domain = ConvexDomain::whole_space(2);
    Smoothness smoothness = Smoothness::C2;
    ScalarField kink;  // zero set = where u fails to be C2; empty if none
    std::string kink_description;
    Convexity convexity = Convexity::Global;

    double operator()(const Vec& x) const { return eval(x); }
};

/// c + <b, x> + 1/2 <M x, x>; M must be positive semidefinite.
TestFunction paraboloid(const SymMatrix& m, const Vec& b, double c = 0.0);
TestFunction paraboloid(const SymMatrix& m);
/// value + 1/2 <M (x - x0), x - x0>.
TestFunction paraboloid_at(const SymMatrix& m, const Vec& x0, double value = 0.0);
/// Paraboloid touching cone_shell from above at |x0| = 1: Hessian with
/// eigenvalue 1 along x0 and lambda on its orthogonal complement.
TestFunction cone_shell_contact(const Vec& x0, double lambda);
/// |x|^2/2 + |x|^4/12.
TestFunction u_plus(int n = 2);
/// |x|^2/2 - |x|^4/12 on the unit ball.
TestFunction u_minus(int n = 2);
/// 1/2 (|x| - 1)_+^2.
TestFunction cone_shell(int n = 2);
/// |x_1|^gamma in the plane, gamma >= 1.
TestFunction ridge(double gamma);
/// |x_1| where |x_1| >= x_2^4, (x_2^8 + x_1^2)/(2 x_2^4) elsewhere.
TestFunction example46();
/// |x|^2/2, f = 1.
TestFunction radial_quadratic(int n = 2);

/// Every catalog entry at its default parameters (n = 2).
std::vector<TestFunction> catalog();
/// Catalog entry by CLI name; InvalidConfig for unknown names. `gamma` is
/// used by "ridge" only.
TestFunction by_name(const std::string& name, int n = 2, double gamma = 1.0);

/// Central second differences with step h. Throws StencilOutOfDomain if a
/// stencil point leaves u's domain or the stencil straddles the kink set.
SymMatrix hess_fd(const TestFunction& u, const Vec& x, double h);

}  // namespace mamv
