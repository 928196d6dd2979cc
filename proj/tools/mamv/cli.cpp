#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mamv/functions.hpp"
#include "mamv/report.hpp"
#include "mamv/solver.hpp"
#include "schema_check.hpp"
#include "schema_text.hpp"

namespace mamv::cli {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::InvalidConfig, what); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double to_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        invalid("'" + s + "' is not a number");
    }
    if (used != s.size()) invalid("'" + s + "' is not a number");
    return v;
}

std::vector<double> numbers(const std::string& s) {
    std::vector<double> out;
    for (const std::string& part : split(s, ',')) out.push_back(to_number(part));
    return out;
}

Vec to_vec(const std::vector<double>& v) { return Vec::from(v); }

// ---------------------------------------------------------------------------
// config access

const json* lookup(const json& cfg, const std::string& dotted) {
    const json* node = &cfg;
    for (const std::string& part : split(dotted, '.')) {
        if (!node->is_object() || !node->contains(part)) return nullptr;
        node = &(*node)[part];
    }
    return node;
}

template <class T>
T get_or(const json& cfg, const std::string& key, T fallback) {
    const json* v = lookup(cfg, key);
    return v ? v->get<T>() : fallback;
}

template <class T>
T require(const json& cfg, const std::string& key, const std::string& command) {
    const json* v = lookup(cfg, key);
    if (!v) invalid(command + " needs \"" + key + "\"");
    return v->get<T>();
}

TestFunction build_function(const json& cfg, const std::string& command) {
    const std::string name = require<std::string>(cfg, "function", command);
    const int n = get_or(cfg, "dim", 2);
    const double gamma = get_or(cfg, "gamma", 1.0);
    if (name == "paraboloid" && cfg.contains("matrix")) {
        const std::vector<double> m = cfg["matrix"].get<std::vector<double>>();
        if (static_cast<int>(m.size()) != n * n) invalid("matrix needs " + std::to_string(n * n) + " entries");
        Matrix a(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = m[i * n + j];
        if ((a - a.transpose()).frobenius() > 1e-14 * (1.0 + a.frobenius())) invalid("matrix is not symmetric");
        return paraboloid(SymMatrix(a));
    }
    if ((name == "ridge" || name == "example46") && n != 2) invalid(name + " is planar");
    return by_name(name, n, gamma);
}

MvConfig build_mv_config(const json& cfg) {
    MvConfig m;
    m.variant = variant_from_string(get_or<std::string>(cfg, "variant", "solid_restricted"));
    m.phi = parse_phi(get_or<std::string>(cfg, "phi", "power:0.5"));
    m.quadrature.radial = get_or(cfg, "quadrature.radial", m.quadrature.radial);
    m.quadrature.angular = get_or(cfg, "quadrature.angular", m.quadrature.angular);
    m.quadrature.polar = get_or(cfg, "quadrature.polar", m.quadrature.polar);
    m.quadrature.angular_kink = get_or(cfg, "quadrature.angular_kink", m.quadrature.angular_kink);
    m.quadrature.radial_kink = get_or(cfg, "quadrature.radial_kink", m.quadrature.radial_kink);
    m.smooth_budget = get_or(cfg, "quadrature.smooth_budget", m.smooth_budget);
    m.kink_budget = get_or(cfg, "quadrature.kink_budget", m.kink_budget);
    m.search.rotations = get_or(cfg, "search.rotations", m.search.rotations);
    m.search.eig_grid = get_or(cfg, "search.eig_grid", m.search.eig_grid);
    m.search.refine_sweeps = get_or(cfg, "search.refine_sweeps", m.search.refine_sweeps);
    m.search.golden_iters = get_or(cfg, "search.golden_iters", m.search.golden_iters);
    m.search.whole_space_cap = get_or(cfg, "search.whole_space_cap", m.search.whole_space_cap);
    m.use_hint = get_or(cfg, "search.use_hint", m.use_hint);
    m.discrete.rotations = get_or(cfg, "discrete.rotations", m.discrete.rotations);
    m.discrete.alpha_grid = get_or(cfg, "discrete.alpha_grid", m.discrete.alpha_grid);
    m.slope_margin = get_or(cfg, "slope_margin", m.slope_margin);
    m.floor_factor = get_or(cfg, "floor_factor", m.floor_factor);
    return m;
}

std::vector<double> schedule_of(const json& cfg) {
    if (!cfg.contains("schedule")) return default_schedule();
    return cfg["schedule"].get<std::vector<double>>();
}

Vec point_of(const json& cfg, const TestFunction& u, const std::string& command) {
    const Vec x = to_vec(require<std::vector<double>>(cfg, "x", command));
    if (x.size() != u.dim) invalid("x has " + std::to_string(x.size()) + " coordinates, " + u.name + " needs " +
                                   std::to_string(u.dim));
    return x;
}

// ---------------------------------------------------------------------------
// artifacts

struct Artifacts {
    std::string csv;
    json doc;
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) invalid("cannot open '" + path + "' for writing");
    f << text;
    if (!f) invalid("failed writing '" + path + "'");
}

void emit(const json& cfg, const Artifacts& a, std::ostream& out) {
    const std::string csv_path = get_or<std::string>(cfg, "out.csv", "-");
    if (csv_path == "-") {
        out << a.csv;
    } else {
        write_file(csv_path, a.csv);
    }
    if (const json* p = lookup(cfg, "out.json")) write_file(p->get<std::string>(), a.doc.dump(2) + "\n");
}

std::string series_csv(const std::vector<RemainderSeries>& all) {
    std::ostringstream os;
    write_csv(os, all);
    return os.str();
}

json series_doc(const RemainderSeries& s) { return json::parse(to_json(s)); }

std::string fit_summary(const RemainderSeries& s) {
    std::ostringstream os;
    os << s.function << " at " << s.x.str() << ", " << s.variant << ": ";
    if (s.fit.status == RateFit::Status::Ok) {
        os << "slope " << format_double(s.fit.slope);
    } else {
        os << "all remainders below the error floor";
    }
    os << ", verdict " << to_string(s.verdict);
    return os.str();
}

// ---------------------------------------------------------------------------
// commands

Artifacts run_rate(const json& cfg, std::ostream& err) {
    const TestFunction u = build_function(cfg, "rate");
    const Vec x = point_of(cfg, u, "rate");
    const MvConfig m = build_mv_config(cfg);
    std::optional<ConvexDomain> domain;
    if (cfg.contains("domain")) domain = parse_domain(cfg["domain"]);
    const RemainderSeries s = remainder_series(u, x, m, schedule_of(cfg), domain ? &*domain : nullptr);
    err << fit_summary(s) << "\n";
    json doc = series_doc(s);
    doc["phi"] = m.phi.str();
    return {series_csv({s}), doc};
}

Artifacts run_sweep(const json& cfg, std::ostream& err) {
    const TestFunction u = build_function(cfg, "sweep");
    const Vec x = point_of(cfg, u, "sweep");
    const std::vector<std::string> phis = require<std::vector<std::string>>(cfg, "phis", "sweep");
    const std::vector<double> schedule = schedule_of(cfg);
    std::optional<ConvexDomain> domain;
    if (cfg.contains("domain")) domain = parse_domain(cfg["domain"]);

    std::ostringstream csv;
    csv << "phi," << csv_header() << "\n";
    json doc = json::array();
    for (const std::string& text : phis) {
        MvConfig m = build_mv_config(cfg);
        m.phi = parse_phi(text);
        const PhiCheck check = check_phi_hypotheses(m.phi, schedule);
        const RemainderSeries s = remainder_series(u, x, m, schedule, domain ? &*domain : nullptr);
        err << text << ": " << fit_summary(s) << (check.ok ? "" : " (phi hypotheses: " + check.reason + ")")
            << "\n";
        std::ostringstream rows;
        write_csv_rows(rows, s);
        std::istringstream lines(rows.str());
        for (std::string line; std::getline(lines, line);) csv << text << ',' << line << "\n";
        json entry = series_doc(s);
        entry["phi"] = text;
        entry["phi_hypotheses"] = check.ok ? json("ok") : json(check.reason);
        doc.push_back(entry);
    }
    return {csv.str(), doc};
}

Artifacts run_solve(const json& cfg, std::ostream& err) {
    if (!cfg.contains("domain")) invalid("solve needs \"domain\"");
    const ConvexDomain domain = parse_domain(cfg["domain"]);
    const std::string f_text = require<std::string>(cfg, "f", "solve");
    const std::string g_text = require<std::string>(cfg, "g", "solve");
    const double h = require<double>(cfg, "h", "solve");
    const double eps = get_or(cfg, "eps", 5.0 * h);
    SolverConfig sc;
    sc.phi = parse_phi(get_or<std::string>(cfg, "phi", "power:0.5"));
    sc.tol = get_or(cfg, "tol", sc.tol);
    sc.max_iter = get_or(cfg, "max_iter", sc.max_iter);
    sc.frame_angles = get_or(cfg, "solver.frame_angles", sc.frame_angles);
    sc.alpha_grid = get_or(cfg, "solver.alpha_grid", sc.alpha_grid);
    sc.burn_in = get_or(cfg, "solver.burn_in", sc.burn_in);

    ScalarField exact;
    std::string exact_name = get_or<std::string>(cfg, "exact", "");
    if (exact_name.empty() && g_text.rfind("const:", 0) != 0) exact_name = g_text;
    if (!exact_name.empty()) exact = parse_field(exact_name, false);

    const SolveResult r = solve_dirichlet(domain, parse_field(f_text, true), parse_field(g_text, false), eps, h, sc,
                                          exact);
    std::ostringstream csv;
    csv << "x,y,u\n";
    const Grid2& g = r.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int k = g.index(i, j);
            if (g.kind[k] == Grid2::Node::Exterior) continue;
            const Vec p = g.point(i, j);
            csv << format_double(p[0]) << ',' << format_double(p[1]) << ',' << format_double(g.u[k]) << "\n";
        }
    json doc;
    doc["domain"] = domain.str();
    doc["h"] = h;
    doc["eps"] = eps;
    doc["phi"] = sc.phi.str();
    doc["iterations"] = r.report.iterations;
    doc["residual"] = r.report.residual;
    doc["max_error"] = r.report.max_error ? json(*r.report.max_error) : json(nullptr);
    doc["monotonicity_warnings"] = r.report.monotonicity_warnings;
    err << "solve: " << r.report.iterations << " sweeps, max update " << format_double(r.report.residual);
    if (r.report.max_error) err << ", max error " << format_double(*r.report.max_error);
    err << "\n";
    return {csv.str(), doc};
}

MvConfig example_cfg(Variant v = Variant::RestrictedSolid) {
    MvConfig m;
    m.variant = v;
    m.phi = PhiSchedule::power(0.5);
    return m;
}

Artifacts run_example(const json& cfg, std::ostream& err) {
    const std::string name = require<std::string>(cfg, "name", "example");
    const std::vector<double> rate_schedule{0.2, 0.1, 0.05, 0.025};
    std::vector<RemainderSeries> all;
    json doc;
    doc["example"] = name;

    auto add = [&](RemainderSeries s) {
        err << fit_summary(s) << "\n";
        all.push_back(std::move(s));
    };

    if (name == "paraboloid-exactness") {
        const Matrix r = Matrix::rotation2(std::numbers::pi / 6);
        const std::vector<std::pair<std::string, SymMatrix>> ms{
            {"I", SymMatrix::identity(2)},
            {"diag(2;1/2)", SymMatrix::diagonal(Vec{2.0, 0.5})},
            {"R(pi/6)diag(3;1/3)R(pi/6)^T", SymMatrix(r * Matrix::diagonal(Vec{3.0, 1.0 / 3.0}) * r.transpose())},
        };
        for (const auto& [label, m] : ms) {
            TestFunction p = paraboloid(m);
            p.name = "paraboloid_" + label;
            add(remainder_series(p, Vec{0.3, -0.2}, example_cfg(), {0.2, 0.1, 0.05}));
        }
    } else if (name == "u-plus-fourth-order") {
        for (const Vec& x : {Vec{0.0, 0.0}, Vec{0.3, 0.2}})
            add(remainder_series(u_plus(2), x, example_cfg(), rate_schedule));
    } else if (name == "u-minus-restricted") {
        add(remainder_series(u_minus(2), Vec{0.3, 0.0}, example_cfg(), rate_schedule));
    } else if (name == "u-minus-blowup") {
        const TestFunction u = u_minus(2);
        const Vec x{0.3, 0.0};
        RemainderSeries s;
        s.variant = "fixed_shape";
        s.function = u.name;
        s.x = x;
        s.coefficient = coefficient(Variant::RestrictedSolid, 2);
        for (double lambda : {1.0, 10.0, 100.0, 1000.0}) {
            const SpdShape a = SpdShape::from(SymMatrix::diagonal(Vec{lambda, 1.0 / lambda}));
            RemainderEntry e;
            e.eps = 0.5;
            e.value = fixed_shape_value(u, x, a, 0.5, example_cfg());
            e.remainder = remainder_of(u, x, 0.5, e.value, Variant::RestrictedSolid);
            e.lambda_max = lambda;
            e.evaluations = 1;
            err << "lambda " << format_double(lambda) << ": fixed-shape value " << format_double(e.value)
                << " (u(x) = " << format_double(u(x)) << ")\n";
            s.entries.push_back(e);
        }
        all.push_back(s);
        json records = json::array();
        for (const RemainderEntry& e : s.entries) records.push_back({{"lambda", e.lambda_max}, {"value", e.value}});
        doc["fixed_shape"] = records;
        doc["u_x"] = u(x);
    } else if (name == "cone-shell-pointwise") {
        const std::vector<double> schedule{0.1, 0.05, 0.025, 0.0125};
        const ConvexDomain whole = ConvexDomain::whole_space(2);
        add(remainder_series(cone_shell(2), Vec{1.0, 0.0}, example_cfg(), schedule));
        add(remainder_series(cone_shell(2), Vec{1.0, 0.0}, example_cfg(Variant::DomainSolid), schedule, &whole));
    } else if (name == "cone-shell-viscosity") {
        const TestFunction u = cone_shell(2);
        const Vec x{1.0, 0.0};
        const std::vector<double> schedule{0.1, 0.05, 0.025};
        json checks = json::array();
        auto record = [&](const ViscosityReport& rep, double delta) {
            for (const ViscosityEntry& e : rep.entries) {
                err << e.label << " from " << to_string(rep.direction) << ": det^{1/n} " << format_double(e.det_root)
                    << ", classical " << (e.classical ? "yes" : "no") << ", mean-value inequality "
                    << (e.holds ? "holds" : "violated") << "\n";
                checks.push_back({{"paraboloid", e.label},
                                  {"direction", std::string(to_string(rep.direction))},
                                  {"delta", delta},
                                  {"det_root", e.det_root},
                                  {"classical", e.classical},
                                  {"violation_over_eps2", e.violation},
                                  {"holds", e.holds}});
                all.push_back(e.series);
            }
        };
        for (double lambda : {0.1, 0.5, 0.9}) {
            const double delta = lambda / (1.0 - lambda);
            record(viscosity_check(u, x, example_cfg(), Touch::Above, {cone_shell_contact(x, lambda)}, delta,
                                   schedule),
                   delta);
        }
        TestFunction zero = paraboloid(SymMatrix(2));
        zero.name = "zero";
        record(viscosity_check(u, x, example_cfg(), Touch::Below, {zero}, 1.0, schedule), 1.0);
        doc["checks"] = checks;
    } else if (name == "ridge-negative") {
        add(remainder_series(ridge(1.0), Vec{0.0, 0.0}, example_cfg(), rate_schedule));
        add(remainder_series(ridge(2.0), Vec{0.0, 0.0}, example_cfg(), rate_schedule));
    } else if (name == "ridge-domain") {
        const ConvexDomain ball = ConvexDomain::disc(Vec{0.0, 0.0}, 1.0);
        add(remainder_series(ridge(1.0), Vec{0.0, 0.0}, example_cfg(Variant::DomainSolid), {0.1, 0.05, 0.025},
                             &ball));
    } else if (name == "discrete-cone-shell") {
        add(remainder_series(cone_shell(2), Vec{1.0, 0.0}, example_cfg(Variant::Discrete), {0.04, 0.02, 0.01}));
    } else {
        invalid("unknown example '" + name + "'");
    }
    json series = json::array();
    for (const RemainderSeries& s : all) series.push_back(series_doc(s));
    doc["series"] = series;
    return {series_csv(all), doc};
}

void fail(std::ostream& err, const std::string& code, const std::string& message, int exit_code,
          const json& extra = json()) {
    json e{{"code", code}, {"message", message}, {"exit", exit_code}};
    if (!extra.is_null()) e["details"] = extra;
    err << json{{"error", e}}.dump() << "\n";
}

// schema leaves as dotted keys
void flatten(const json& props, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
    for (const auto& [key, schema] : props.items()) {
        if (schema.value("type", "") == "object") {
            flatten(schema.value("properties", json::object()), prefix + key + ".", out);
        } else {
            out.emplace_back(prefix + key, schema);
        }
    }
}

json coerce(const std::string& raw, const json& schema) {
    if (schema.contains("anyOf") && !raw.empty() && raw.front() == '{') {
        try {
            return json::parse(raw);
        } catch (const json::parse_error& e) {
            invalid("'" + raw + "' is not valid JSON: " + e.what());
        }
    }
    const std::string type = schema.value("type", "string");
    if (type == "number") return to_number(raw);
    if (type == "integer") {
        const double v = to_number(raw);
        if (v != static_cast<double>(static_cast<long long>(v))) invalid("'" + raw + "' is not an integer");
        return static_cast<long long>(v);
    }
    if (type == "boolean") {
        if (raw == "true" || raw == "1") return true;
        if (raw == "false" || raw == "0") return false;
        invalid("'" + raw + "' is not a boolean");
    }
    if (type == "array") {
        const std::string item = schema.contains("items") ? schema["items"].value("type", "string") : "string";
        json arr = json::array();
        for (const std::string& part : split(raw, ',')) arr.push_back(item == "number" ? json(to_number(part)) : json(part));
        return arr;
    }
    return raw;
}

void set_dotted(json& cfg, const std::string& dotted, json value) {
    json* node = &cfg;
    const std::vector<std::string> parts = split(dotted, '.');
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
    (*node)[parts.back()] = std::move(value);
}

}  // namespace

const json& run_config_schema() {
    static const json schema = json::parse(kRunConfigSchema);
    return schema;
}

ConvexDomain parse_domain(const std::string& text) {
    if (text == "whole") return ConvexDomain::whole_space(2);
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) throw Error(Errc::InvalidDomain, "domain '" + text + "' has no kind prefix");
    const std::string kind = text.substr(0, colon);
    const std::string body = text.substr(colon + 1);
    if (kind == "whole") {
        const double n = to_number(body);
        return ConvexDomain::whole_space(static_cast<int>(n));
    }
    const std::vector<double> v = numbers(body);
    if (kind == "rect") {
        if (v.size() != 4) throw Error(Errc::InvalidDomain, "rect needs x0,y0,x1,y1");
        return ConvexDomain::box(Vec{v[0], v[1]}, Vec{v[2], v[3]});
    }
    if (kind == "disc") {
        if (v.size() < 3) throw Error(Errc::InvalidDomain, "disc needs a center and a radius");
        return ConvexDomain::disc(Vec::from(std::span<const double>(v.data(), v.size() - 1)), v.back());
    }
    if (kind == "polygon") {
        if (v.size() % 2 != 0) throw Error(Errc::InvalidDomain, "polygon needs coordinate pairs");
        std::vector<Vec> vertices;
        for (std::size_t i = 0; i < v.size(); i += 2) vertices.push_back(Vec{v[i], v[i + 1]});
        return ConvexDomain::polygon(vertices);
    }
    throw Error(Errc::InvalidDomain, "unknown domain kind '" + kind + "'");
}

ConvexDomain parse_domain(const nlohmann::json& literal) {
    if (literal.is_string()) return parse_domain(literal.get<std::string>());
    const auto vec = [](const json& v) { return Vec::from(v.get<std::vector<double>>()); };
    if (literal.contains("disc")) {
        return ConvexDomain::disc(vec(literal["disc"]["center"]), literal["disc"]["radius"].get<double>());
    }
    if (literal.contains("rect")) return ConvexDomain::box(vec(literal["rect"]["lo"]), vec(literal["rect"]["hi"]));
    if (literal.contains("polygon")) {
        std::vector<Vec> vertices;
        for (const json& v : literal["polygon"]) vertices.push_back(vec(v));
        return ConvexDomain::polygon(vertices);
    }
    if (literal.value("whole_space", false)) return ConvexDomain::whole_space(2);
    throw Error(Errc::InvalidDomain, "domain literal " + literal.dump() + " is not recognized");
}

PhiSchedule parse_phi(const std::string& text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) invalid("phi '" + text + "' has no kind prefix");
    const std::string kind = text.substr(0, colon);
    const std::string body = text.substr(colon + 1);
    if (kind == "power") return PhiSchedule::power(to_number(body));
    if (kind == "const") return PhiSchedule::constant(to_number(body));
    if (kind == "table") {
        std::vector<std::pair<double, double>> points;
        for (const std::string& pair : split(body, ';')) {
            const std::vector<std::string> ep = split(pair, '=');
            if (ep.size() != 2) invalid("phi table entry '" + pair + "' is not eps=phi");
            points.emplace_back(to_number(ep[0]), to_number(ep[1]));
        }
        return PhiSchedule::table(points);
    }
    invalid("unknown phi kind '" + kind + "'");
}

ScalarField parse_field(const std::string& text, bool rhs) {
    if (text.rfind("const:", 0) == 0) {
        const double c = to_number(text.substr(6));
        return [c](const Vec&) { return c; };
    }
    const TestFunction u = by_name(text);
    return rhs ? u.rhs : u.eval;
}

int run(const json& config, std::ostream& out, std::ostream& err) {
    const std::vector<std::string> problems = schema_errors(run_config_schema(), config);
    if (!problems.empty()) {
        fail(err, "InvalidConfig", "configuration does not match the run-config schema", kValidation, problems);
        return kValidation;
    }
    try {
        if (const json* t = lookup(config, "threads")) {
            setenv("MAMV_THREADS", std::to_string(t->get<int>()).c_str(), 1);
        }
        const std::string command = config["command"];
        Artifacts a;
        if (command == "example") {
            a = run_example(config, err);
        } else if (command == "rate") {
            a = run_rate(config, err);
        } else if (command == "solve") {
            a = run_solve(config, err);
        } else {
            a = run_sweep(config, err);
        }
        emit(config, a, out);
        return kOk;
    } catch (const NotConvergedError& e) {
        json report{{"iterations", e.report().iterations}, {"residual", e.report().residual}};
        fail(err, "NotConverged", e.what(), kNumerical, report);
        return kNumerical;
    } catch (const Error& e) {
        const int code = is_numerical_failure(e.code()) ? kNumerical : kValidation;
        fail(err, std::string(to_string(e.code())), e.what(), code);
        return code;
    } catch (const json::exception& e) {
        fail(err, "InvalidConfig", e.what(), kValidation);
        return kValidation;
    }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mean-value operators for det D^2 u = f: examples, remainder rates, solver, phi sweeps"};
    app.name("mamv");
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print this help message and exit");  // frees -h; --h is the grid spacing

    std::vector<std::pair<std::string, json>> keys;
    flatten(run_config_schema()["properties"], "", keys);
    std::map<std::string, std::string> raw;
    std::string config_path;
    const std::map<std::string, std::string> commands{
        {"example", "reproduce a named example"},
        {"rate", "remainder series and log-log rate fit"},
        {"solve", "wide-stencil Dirichlet solver"},
        {"sweep", "remainder series across phi schedules"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [command, description] : commands) {
        CLI::App* sub = app.add_subcommand(command, description);
        sub->add_option("--config", config_path, "JSON run configuration; supersedes flags");
        for (const auto& [key, schema] : keys) {
            if (key == "command") continue;
            std::string help = schema.value("description", "");
            if (schema.contains("enum")) {
                std::string choices;
                for (const json& e : schema["enum"]) choices += (choices.empty() ? "" : " | ") + e.get<std::string>();
                help = help.empty() ? choices : help + ": " + choices;
            }
            sub->add_option("--" + key, raw[key], help);
        }
        subs.push_back(sub);
    }

    std::vector<std::string> argv_store{"mamv"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (std::string& s : argv_store) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        fail(err, "InvalidArguments", e.what(), kValidation);
        return kValidation;
    }

    CLI::App* chosen = nullptr;
    for (CLI::App* s : subs)
        if (s->parsed()) chosen = s;
    json cfg{{"command", chosen->get_name()}};
    try {
        for (const auto& [key, schema] : keys) {
            if (key == "command" || chosen->count("--" + key) == 0) continue;
            set_dotted(cfg, key, coerce(raw[key], schema));
        }
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) invalid("cannot read config file '" + config_path + "'");
            json file;
            try {
                file = json::parse(f);
            } catch (const json::exception& e) {
                invalid("config file '" + config_path + "' is not valid JSON: " + e.what());
            }
            if (!file.is_object()) invalid("config file must hold a JSON object");
            if (file.contains("command") && file["command"] != cfg["command"]) {
                invalid("config file command " + file["command"].dump() + " does not match '" +
                        chosen->get_name() + "'");
            }
            cfg.merge_patch(file);
        }
    } catch (const Error& e) {
        fail(err, std::string(to_string(e.code())), e.what(), kValidation);
        return kValidation;
    }
    return run(cfg, out, err);
}

}  // namespace mamv::cli
