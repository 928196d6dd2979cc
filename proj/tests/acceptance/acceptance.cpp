// One PASS/FAIL line per acceptance criterion. Criterion 12 reruns 1-11 and
// compares their CSV artifacts byte for byte.
//
//   acceptance [--out DIR] [N ...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mamv/functions.hpp"
#include "mamv/linalg.hpp"
#include "mamv/operators.hpp"
#include "mamv/quadrature.hpp"
#include "mamv/report.hpp"
#include "mamv/search.hpp"
#include "mamv/solver.hpp"

using namespace mamv;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::string csv;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string series_csv(const std::vector<RemainderSeries>& all) {
    std::ostringstream os;
    write_csv(os, all);
    return os.str();
}

MvConfig restricted_cfg() {
    MvConfig cfg;
    cfg.variant = Variant::RestrictedSolid;
    cfg.phi = PhiSchedule::power(0.5);
    return cfg;
}

const std::vector<double> kRateSchedule{0.2, 0.1, 0.05, 0.025};

// 1. Paraboloid exactness
Outcome criterion1() {
    Outcome out;
    const Matrix r = Matrix::rotation2(std::numbers::pi / 6);
    const std::vector<std::pair<std::string, SymMatrix>> ms{
        {"I", SymMatrix::identity(2)},
        {"diag(2;1/2)", SymMatrix::diagonal(Vec{2.0, 0.5})},
        {"R(pi/6)diag(3;1/3)R(pi/6)^T", SymMatrix(r * Matrix::diagonal(Vec{3.0, 1.0 / 3.0}) * r.transpose())},
    };
    const MvConfig cfg = restricted_cfg();
    std::vector<RemainderSeries> all;
    double worst = 0.0;
    for (const auto& [label, m] : ms) {
        TestFunction p = paraboloid(m);
        p.name = "paraboloid_" + label;
        for (const Vec& x : {Vec{0.0, 0.0}, Vec{0.3, -0.2}}) {
            RemainderSeries s = remainder_series(p, x, cfg, {0.2, 0.1});
            for (const RemainderEntry& e : s.entries) worst = std::max(worst, std::abs(e.remainder) / (e.eps * e.eps));
            out.require(s.verdict == Verdict::Exact, p.name + " at " + x.str() + " not flagged exact");
            all.push_back(std::move(s));
        }
    }
    out.require(worst <= 1e-8, "max |R|/eps^2 = " + fmt(worst));
    out.note("max |R|/eps^2 = " + fmt(worst));
    out.csv = series_csv(all);
    return out;
}

// 2. Trace infimum against n det(B)^{1/n}
Outcome criterion2() {
    Outcome out;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> log_eig(std::log(0.2), std::log(5.0));
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    std::ostringstream csv;
    csv << "case,b11,b12,b22,search,closed_form,rel_error\n";
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const Matrix q = Matrix::rotation2(angle(gen));
        const SymMatrix b = SymMatrix::from_eigen(q, Vec{std::exp(log_eig(gen)), std::exp(log_eig(gen))});
        const ShapeObjective trace = [&](const SpdShape& a) { return congruence(a.matrix().matrix(), b).trace(); };
        const SearchResult s = inf_restricted(trace, 2, 10.0);
        const double exact = 2.0 * std::sqrt(b.det());
        const double rel = std::abs(s.value - exact) / exact;
        worst = std::max(worst, rel);
        csv << k << ',' << format_double(b(0, 0)) << ',' << format_double(b(0, 1)) << ',' << format_double(b(1, 1))
            << ',' << format_double(s.value) << ',' << format_double(exact) << ',' << format_double(rel) << '\n';
    }
    out.require(worst <= 1e-6, "max relative error " + fmt(worst));
    out.note("max relative error " + fmt(worst));
    out.csv = csv.str();
    return out;
}

// 3. Trace identities by quadrature
Outcome criterion3() {
    Outcome out;
    std::mt19937_64 gen(11);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::ostringstream csv;
    csv << "case,n,eps,trace,surface,solid\n";
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const int n = k % 2 == 0 ? 2 : 3;
        const double eps = 0.05 + 0.01 * (k % 20);
        Matrix m(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) m(i, j) = m(j, i) = normal(gen);
        const SymMatrix sym(m);
        const ScalarField q = [&](const Vec& y) { return sym.quad(y); };
        const Vec origin(n);
        const double surface =
            n / (eps * eps) * sphere_average(q, origin, eps, QuadratureRule::build(n, MeasureKind::Surface));
        const double solid =
            (n + 2) / (eps * eps) * ball_average(q, origin, eps, QuadratureRule::build(n, MeasureKind::Solid));
        const double tr = sym.trace();
        worst = std::max({worst, std::abs(surface - tr) / std::abs(tr), std::abs(solid - tr) / std::abs(tr)});
        csv << k << ',' << n << ',' << format_double(eps) << ',' << format_double(tr) << ','
            << format_double(surface) << ',' << format_double(solid) << '\n';
    }
    out.require(worst <= 1e-10, "max relative error " + fmt(worst));
    out.note("max relative error " + fmt(worst));
    out.csv = csv.str();
    return out;
}

// 4. u+ fourth-order remainder
Outcome criterion4() {
    Outcome out;
    const TestFunction u = u_plus(2);
    std::vector<RemainderSeries> all;
    for (const Vec& x : {Vec{0.0, 0.0}, Vec{0.3, 0.2}}) {
        RemainderSeries s = remainder_series(u, x, restricted_cfg(), kRateSchedule);
        const bool ok = s.fit.status == RateFit::Status::Ok && s.fit.slope >= 3.7;
        out.require(ok, "slope at " + x.str() + " = " + fmt(s.fit.slope));
        out.note("slope at " + x.str() + " = " + fmt(s.fit.slope));
        all.push_back(std::move(s));
    }
    out.csv = series_csv(all);
    return out;
}

// 5. u- restricted o(eps^2) and unrestricted blow-up
Outcome criterion5() {
    Outcome out;
    const TestFunction u = u_minus(2);
    const Vec x{0.3, 0.0};
    RemainderSeries s = remainder_series(u, x, restricted_cfg(), kRateSchedule);
    const bool ok = s.fit.status == RateFit::Status::Ok && s.fit.slope > 2.1;
    out.require(ok, "restricted slope " + fmt(s.fit.slope));
    out.note("restricted slope " + fmt(s.fit.slope));

    MvConfig diag = restricted_cfg();
    const SpdShape a = SpdShape::from(SymMatrix::diagonal(Vec{1e3, 1e-3}));
    const double value = fixed_shape_value(u, x, a, 0.5, diag);
    out.require(value < u(x) - 10.0, "fixed-shape value " + fmt(value) + " not below u(x) - 10");
    out.note("fixed-shape value at lambda = 1e3, eps = 0.5: " + fmt(value));

    std::ostringstream csv;
    csv << series_csv({s});
    csv << "diagnostic,lambda,eps,value,u_x\n"
        << "fixed_shape," << format_double(1e3) << ',' << format_double(0.5) << ',' << format_double(value) << ','
        << format_double(u(x)) << '\n';
    out.csv = csv.str();
    return out;
}

// 6. Ridge negative result and gamma = 2
Outcome criterion6() {
    Outcome out;
    const MvConfig cfg = restricted_cfg();
    const Vec x{0.0, 0.0};
    RemainderSeries s1 = remainder_series(ridge(1.0), x, cfg, kRateSchedule);
    const double c1 = 4.0 / (3.0 * std::numbers::pi);
    double worst = 0.0;
    for (std::size_t i = 0; i < s1.entries.size(); ++i) {
        const RemainderEntry& e = s1.entries[i];
        worst = std::max(worst, std::abs(e.value / (c1 * std::pow(e.eps, 1.5)) - 1.0));
        if (i > 0) {
            const RemainderEntry& prev = s1.entries[i - 1];
            const double growth = (e.remainder / (e.eps * e.eps)) / (prev.remainder / (prev.eps * prev.eps));
            out.require(growth >= 1.3, "R/eps^2 growth " + fmt(growth) + " at eps = " + fmt(e.eps));
        }
    }
    out.require(worst <= 0.02, "value off 4/(3 pi) eps^{3/2} by " + fmt(worst));
    out.require(s1.verdict == Verdict::Fails, "ridge(1) not flagged as failing");
    out.note("gamma = 1: max deviation " + fmt(worst) + ", slope " + fmt(s1.fit.slope));

    RemainderSeries s2 = remainder_series(ridge(2.0), x, cfg, kRateSchedule);
    out.require(s2.verdict != Verdict::Fails, "ridge(2) flagged " + std::string(to_string(s2.verdict)));
    out.note("gamma = 2: " + std::string(to_string(s2.verdict)));
    out.csv = series_csv({s1, s2});
    return out;
}

// 7. Domain-constraint positivity
Outcome criterion7() {
    Outcome out;
    MvConfig cfg = restricted_cfg();
    cfg.variant = Variant::DomainSolid;
    const ConvexDomain ball = ConvexDomain::disc(Vec{0.0, 0.0}, 1.0);
    RemainderSeries s = remainder_series(ridge(1.0), Vec{0.0, 0.0}, cfg, {0.1, 0.05}, &ball);
    for (const RemainderEntry& e : s.entries) {
        const double ratio = e.value / (e.eps * e.eps);
        out.require(ratio >= 0.3, "mv/eps^2 = " + fmt(ratio) + " at eps = " + fmt(e.eps));
        out.note("eps = " + fmt(e.eps) + ": mv/eps^2 = " + fmt(ratio));
    }
    out.csv = series_csv({s});
    return out;
}

// 8. Cone-shell point-wise property
Outcome criterion8() {
    Outcome out;
    const TestFunction u = cone_shell(2);
    const Vec x{1.0, 0.0};
    const std::vector<double> schedule{0.1, 0.05, 0.025, 0.0125};
    MvConfig restricted = restricted_cfg();
    MvConfig domain = restricted_cfg();
    domain.variant = Variant::DomainSolid;
    const ConvexDomain whole = ConvexDomain::whole_space(2);
    std::vector<RemainderSeries> all{remainder_series(u, x, restricted, schedule),
                                     remainder_series(u, x, domain, schedule, &whole)};
    for (const RemainderSeries& s : all) {
        std::string ratios;
        for (std::size_t i = 1; i < s.entries.size(); ++i) {
            const RemainderEntry& e = s.entries[i];
            const RemainderEntry& prev = s.entries[i - 1];
            const double ratio = (e.remainder / (e.eps * e.eps)) / (prev.remainder / (prev.eps * prev.eps));
            out.require(ratio <= 0.8, s.variant + " ratio " + fmt(ratio) + " at eps = " + fmt(e.eps));
            ratios += (ratios.empty() ? "" : ",") + fmt(ratio, 3);
        }
        out.note(s.variant + " ratios " + ratios);
    }
    out.csv = series_csv(all);
    return out;
}

// 9. Discrete bound at the cone-shell kink
Outcome criterion9() {
    Outcome out;
    const TestFunction u = cone_shell(2);
    const Vec x{1.0, 0.0};
    const double eps = 0.01;
    MvConfig cfg = restricted_cfg();
    cfg.variant = Variant::Discrete;
    const MvResult r = mv_discrete(u, x, eps, cfg);
    const double scaled = (r.value - u(x)) / (eps * eps);
    const double bound = std::sqrt(eps) + std::pow(std::sqrt(1.0 + std::pow(eps, 1.5)) - 1.0, 2) / (eps * eps);
    out.require(scaled <= 0.1025 && scaled <= bound, "(value - 0)/eps^2 = " + fmt(scaled));
    const Vec alpha{std::sqrt(eps), 1.0 / std::sqrt(eps)};
    const double phi = cfg.phi(eps);
    out.require(in_index_set(alpha, phi), "candidate alpha not in I_eps^2");
    const SpdShape candidate =
        SpdShape::from_eigen(Matrix::identity(2), Vec{std::sqrt(alpha[0]), std::sqrt(alpha[1])});
    const double cand = fixed_shape_value(u, x, candidate, eps, cfg);
    out.require(r.value <= cand + 1e-15, "grid infimum above the candidate value");
    out.note("(value - 0)/eps^2 = " + fmt(scaled) + ", candidate " + fmt(cand / (eps * eps)) + ", bound " +
             fmt(bound, 6));
    std::ostringstream csv;
    csv << "eps,phi,value,scaled,candidate_scaled,bound\n"
        << format_double(eps) << ',' << format_double(phi) << ',' << format_double(r.value) << ','
        << format_double(scaled) << ',' << format_double(cand / (eps * eps)) << ',' << format_double(bound) << '\n';
    out.csv = csv.str();
    return out;
}

// 10. Viscosity checks at the cone-shell kink
Outcome criterion10() {
    Outcome out;
    const TestFunction u = cone_shell(2);
    const Vec x{1.0, 0.0};
    const MvConfig cfg = restricted_cfg();
    const std::vector<double> schedule{0.1, 0.05, 0.025};
    std::vector<RemainderSeries> all;
    for (double lambda : {0.1, 0.5, 0.9}) {
        const double delta = lambda / (1.0 - lambda);
        const TestFunction p = cone_shell_contact(x, lambda);
        const ViscosityReport rep = viscosity_check(u, x, cfg, Touch::Above, {p}, delta, schedule);
        const ViscosityEntry& e = rep.entries.front();
        out.require(rep.all_hold && e.classical, "above, lambda = " + fmt(lambda));
        bool rejected = false;
        try {
            validate_touching(u, x, p, Touch::Below, delta);
        } catch (const Error& err) {
            rejected = err.code() == Errc::NotATouchingParaboloid;
        }
        out.require(rejected, "lambda = " + fmt(lambda) + " accepted as touching from below");
        const double c = coefficient(cfg.variant, 2);
        for (const RemainderEntry& pe : e.series.entries) {
            const double mu = mv_solid_restricted(u, x, pe.eps, cfg).value - u(x);
            out.require(mu <= c * std::sqrt(lambda) * pe.eps * pe.eps * (1.0 + 1e-9),
                        "mv(u) above the contact bound at eps = " + fmt(pe.eps));
        }
        all.push_back(e.series);
    }
    TestFunction zero = paraboloid(SymMatrix(2));
    zero.name = "zero";
    const ViscosityReport below = viscosity_check(u, x, cfg, Touch::Below, {zero}, 1.0, schedule);
    out.require(below.all_hold && below.entries.front().classical, "P = 0 from below");
    all.push_back(below.entries.front().series);

    const TestFunction q = paraboloid(SymMatrix::identity(2));
    for (Touch t : {Touch::Above, Touch::Below}) {
        const ViscosityReport self = viscosity_check(q, Vec{0.2, 0.1}, cfg, t, {q}, 1.0, schedule);
        out.require(self.all_hold, "self-contact " + std::string(to_string(t)));
        all.push_back(self.entries.front().series);
    }
    out.note("contact validated for lambda in {0.1, 0.5, 0.9}; directions above/below confirmed");
    out.csv = series_csv(all);
    return out;
}

// 11. Solver benchmark
Outcome criterion11() {
    Outcome out;
    const ConvexDomain square = ConvexDomain::box(Vec{-1.0, -1.0}, Vec{1.0, 1.0});
    const ScalarField f = [](const Vec&) { return 1.0; };
    const ScalarField g = [](const Vec& p) { return 0.5 * p.norm2(); };
    std::ostringstream csv;
    csv << "h,eps,iterations,residual,max_error\n";
    double errors[2];
    const double hs[2] = {0.04, 0.02}, epss[2] = {0.2, 0.1};
    for (int k = 0; k < 2; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        const SolveResult r = solve_dirichlet(square, f, g, epss[k], hs[k], {}, g);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        errors[k] = *r.report.max_error;
        csv << format_double(hs[k]) << ',' << format_double(epss[k]) << ',' << r.report.iterations << ','
            << format_double(r.report.residual) << ',' << format_double(errors[k]) << '\n';
        out.note("h = " + fmt(hs[k]) + ": error " + fmt(errors[k]) + ", " + std::to_string(r.report.iterations) +
                 " sweeps, " + fmt(secs, 3) + " s");
        if (k == 1) out.require(secs <= 300.0, "runtime " + fmt(secs) + " s");
    }
    out.require(errors[1] <= 5e-3, "error " + fmt(errors[1]) + " above 5e-3");
    out.require(errors[1] < errors[0], "error does not decrease under refinement");
    out.csv = csv.str();
    return out;
}

using Criterion = std::function<Outcome()>;

const std::map<int, std::pair<std::string, Criterion>>& criteria() {
    static const std::map<int, std::pair<std::string, Criterion>> all{
        {1, {"paraboloid exactness", criterion1}},
        {2, {"trace infimum oracle", criterion2}},
        {3, {"trace integral identities", criterion3}},
        {4, {"u+ fourth-order remainder", criterion4}},
        {5, {"u- restricted rate and unrestricted blow-up", criterion5}},
        {6, {"ridge negative result", criterion6}},
        {7, {"domain-constraint positivity", criterion7}},
        {8, {"cone-shell point-wise property", criterion8}},
        {9, {"discrete bound at the kink", criterion9}},
        {10, {"viscosity checks", criterion10}},
        {11, {"solver benchmark", criterion11}},
    };
    return all;
}

Outcome run_guarded(const Criterion& c) {
    try {
        return c();
    } catch (const std::exception& e) {
        Outcome out;
        out.require(false, std::string("exception: ") + e.what());
        return out;
    }
}

void report(int id, const std::string& title, const Outcome& o, double secs) {
    std::printf("%s criterion %2d  %-45s %6.1fs  %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
    std::filesystem::path out_dir;
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--out" && i + 1 < argc) {
            out_dir = argv[++i];
        } else {
            wanted.push_back(std::atoi(arg.c_str()));
        }
    }
    if (wanted.empty())
        for (int k = 1; k <= 12; ++k) wanted.push_back(k);
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

    std::map<int, std::string> first_run;
    bool all_pass = true;
    for (int id : wanted) {
        if (id == 12) continue;
        const auto it = criteria().find(id);
        if (it == criteria().end()) {
            std::fprintf(stderr, "unknown criterion %d\n", id);
            return 2;
        }
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome o = run_guarded(it->second.second);
        report(id, it->second.first, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        all_pass = all_pass && o.pass;
        first_run[id] = o.csv;
        if (!out_dir.empty()) std::ofstream(out_dir / ("criterion_" + std::to_string(id) + ".csv")) << o.csv;
    }

    if (std::find(wanted.begin(), wanted.end(), 12) != wanted.end()) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        // rerun under a different worker count
        setenv("MAMV_THREADS", "3", 1);
        for (const auto& [id, entry] : criteria()) {
            if (!first_run.count(id)) first_run[id] = run_guarded(entry.second).csv;
        }
        setenv("MAMV_THREADS", "1", 1);
        int identical = 0;
        for (const auto& [id, entry] : criteria()) {
            const std::string again = run_guarded(entry.second).csv;
            const bool same = again == first_run[id] && !again.empty();
            o.require(same, "criterion " + std::to_string(id) + " CSV differs");
            identical += same;
        }
        o.note(std::to_string(identical) + "/11 CSV artifacts byte-identical across runs");
        report(12, "determinism", o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
