#pragma once

// Remainder series, log-log rate fits and CSV / JSON serialization.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mamv/linalg.hpp"

namespace mamv {

struct RemainderEntry {
    double eps = 0.0;
    double value = 0.0;
    double remainder = 0.0;
    double lambda_max = 0.0;
    long evaluations = 0;
    std::optional<double> slope_running;  // against the previous entry
};

struct RateFit {
    enum class Status { Ok, AllBelowFloor };
    Status status = Status::AllBelowFloor;
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
    int used = 0;
    int excluded = 0;
};

enum class Verdict { Exact, Passes, Fails };
std::string_view to_string(Verdict v);

struct RemainderSeries {
    std::string variant;
    std::string function;
    Vec x;
    double coefficient = 0.0;
    std::vector<RemainderEntry> entries;  // decreasing eps
    std::vector<double> floors;           // per entry, |R| at or below is noise
    RateFit fit;
    Verdict verdict = Verdict::Fails;
};

/// Least squares of log|R| on log eps over entries with |R| above their floor.
/// Fewer than two usable points gives Status::AllBelowFloor.
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& remainder,
                 const std::vector<double>& floors);
RateFit fit_rate(const RemainderSeries& series);

/// Fills slope_running, fit and verdict. Exact when every |R| is at or below
/// its floor, Passes when the fitted slope exceeds 2 + margin.
void finalize_series(RemainderSeries& series, double slope_margin);

/// %.17g; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

std::string csv_header();
void write_csv_rows(std::ostream& os, const RemainderSeries& series);
void write_csv(std::ostream& os, const std::vector<RemainderSeries>& series);

/// JSON document with one record per entry plus the fit.
std::string to_json(const RemainderSeries& series);

}  // namespace mamv
