#include "mamv/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace mamv {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Exact: return "exact";
        case Verdict::Passes: return "passes o(eps^2)";
        case Verdict::Fails: return "fails o(eps^2)";
    }
    return "unknown";
}

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& remainder,
                 const std::vector<double>& floors) {
    if (eps.size() != remainder.size() || eps.size() != floors.size()) {
        throw Error(Errc::InvalidArgument, "fit_rate: column lengths differ");
    }
    std::vector<double> xs, ys;
    RateFit fit;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double r = std::abs(remainder[i]);
        if (r > floors[i] && r > 0.0 && eps[i] > 0.0) {
            xs.push_back(std::log(eps[i]));
            ys.push_back(std::log(r));
        } else {
            ++fit.excluded;
        }
    }
    fit.used = static_cast<int>(xs.size());
    if (xs.size() < 2) return fit;

    const double m = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / m;
        my += ys[i] / m;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) return fit;
    fit.status = RateFit::Status::Ok;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += e * e;
    }
    fit.rms = std::sqrt(ss / m);
    return fit;
}

RateFit fit_rate(const RemainderSeries& series) {
    std::vector<double> eps, rem;
    for (const RemainderEntry& e : series.entries) {
        eps.push_back(e.eps);
        rem.push_back(e.remainder);
    }
    std::vector<double> floors = series.floors;
    floors.resize(eps.size(), 0.0);
    return fit_rate(eps, rem, floors);
}

void finalize_series(RemainderSeries& series, double slope_margin) {
    auto& en = series.entries;
    for (std::size_t i = 0; i < en.size(); ++i) {
        en[i].slope_running.reset();
        if (i == 0) continue;
        const double r0 = std::abs(en[i - 1].remainder), r1 = std::abs(en[i].remainder);
        if (r0 > 0.0 && r1 > 0.0) {
            en[i].slope_running = std::log(r1 / r0) / std::log(en[i].eps / en[i - 1].eps);
        }
    }
    series.fit = fit_rate(series);
    bool all_below = true;
    for (std::size_t i = 0; i < en.size(); ++i) {
        const double floor = i < series.floors.size() ? series.floors[i] : 0.0;
        all_below = all_below && std::abs(en[i].remainder) <= floor;
    }
    if (all_below) {
        series.verdict = Verdict::Exact;
    } else if (series.fit.status == RateFit::Status::Ok && series.fit.slope > 2.0 + slope_margin) {
        series.verdict = Verdict::Passes;
    } else {
        series.verdict = Verdict::Fails;
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_header() {
    return "variant,function,x,eps,value,remainder,abs_remainder,slope_running,lambda_max,evals";
}

void write_csv_rows(std::ostream& os, const RemainderSeries& s) {
    std::string x;
    for (int i = 0; i < s.x.size(); ++i) x += (i ? ";" : "") + format_double(s.x[i]);
    for (const RemainderEntry& e : s.entries) {
        os << s.variant << ',' << s.function << ',' << x << ',' << format_double(e.eps) << ','
           << format_double(e.value) << ',' << format_double(e.remainder) << ','
           << format_double(std::abs(e.remainder)) << ','
           << (e.slope_running ? format_double(*e.slope_running) : std::string()) << ','
           << format_double(e.lambda_max) << ',' << e.evaluations << '\n';
    }
}

void write_csv(std::ostream& os, const std::vector<RemainderSeries>& series) {
    os << csv_header() << '\n';
    for (const RemainderSeries& s : series) write_csv_rows(os, s);
}

std::string to_json(const RemainderSeries& s) {
    using nlohmann::json;
    json records = json::array();
    for (const RemainderEntry& e : s.entries) {
        json r;
        r["variant"] = s.variant;
        r["function"] = s.function;
        r["x"] = std::vector<double>(s.x.values().begin(), s.x.values().end());
        r["eps"] = e.eps;
        r["value"] = e.value;
        r["remainder"] = e.remainder;
        r["abs_remainder"] = std::abs(e.remainder);
        r["slope_running"] = e.slope_running ? json(*e.slope_running) : json(nullptr);
        r["lambda_max"] = e.lambda_max;
        r["evals"] = e.evaluations;
        records.push_back(r);
    }
    json fit;
    fit["status"] = s.fit.status == RateFit::Status::Ok ? "ok" : "all-below-floor";
    fit["slope"] = s.fit.status == RateFit::Status::Ok ? json(s.fit.slope) : json(nullptr);
    fit["intercept"] = s.fit.status == RateFit::Status::Ok ? json(s.fit.intercept) : json(nullptr);
    fit["rms"] = s.fit.rms;
    fit["used"] = s.fit.used;
    fit["excluded"] = s.fit.excluded;
    json doc;
    doc["records"] = records;
    doc["coefficient"] = s.coefficient;
    doc["fit"] = fit;
    doc["verdict"] = std::string(to_string(s.verdict));
    return doc.dump(2);
}

}  // namespace mamv
