#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "episignal/date.hpp"
#include "episignal/stats.hpp"

namespace episignal::corr {

using DailySeries = std::map<Date, double>;

struct LagCorrelation {
    int lag = 0;  // negative = tweets precede cases
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

enum class StrengthClass { strong, moderate, weak, not_significant };

inline std::string strength_name(StrengthClass s) {
    switch (s) {
        case StrengthClass::strong: return "strong";
        case StrengthClass::moderate: return "moderate";
        case StrengthClass::weak: return "weak";
        default: return "not_significant";
    }
}

// |r| > 0.8 is strong and 0.3 < |r| <= 0.8 moderate, both gated on p < 0.05;
// the boundaries themselves fall into the weaker class.
inline StrengthClass classify_strength(double r, double p) {
    if (p >= 0.05) return StrengthClass::not_significant;
    const double a = std::fabs(r);
    if (a > 0.8) return StrengthClass::strong;
    if (a > 0.3) return StrengthClass::moderate;
    return StrengthClass::weak;
}

struct PairedSample {
    std::vector<double> cases;
    std::vector<double> volume;
};

// Pairs cases[d] with volume[d + lag] for each d where both series are
// defined, in date order. lag = -5 pairs a day's cases with the volume from
// five days earlier.
inline PairedSample align_with_lag(const DailySeries& cases, const DailySeries& volume, int lag,
                                   std::optional<DateInterval> window = std::nullopt) {
    PairedSample out;
    for (const auto& [date, c] : cases) {
        if (window && !window->contains(date)) continue;
        auto it = volume.find(date + lag);
        if (it == volume.end()) continue;
        out.cases.push_back(c);
        out.volume.push_back(it->second);
    }
    if (out.cases.size() < 3) throw std::runtime_error("insufficient overlap");
    return out;
}

struct LagScanResult {
    std::vector<LagCorrelation> correlations;
    std::vector<int> skipped_lags;  // lags with too little overlap or zero variance
    std::optional<int> best_lead;   // lag maximizing |r| among significant entries
};

// One correlation per lag over `period`; best_lead maximizes |r| among
// p < 0.05 lags with ties resolved toward smaller |lag|.
inline LagScanResult lag_scan(const DailySeries& cases, const DailySeries& volume,
                              DateInterval period, int lag_min = -10, int lag_max = 5) {
    if (lag_min > lag_max) throw std::invalid_argument("lag_scan: empty lag range");
    LagScanResult out;
    for (int lag = lag_min; lag <= lag_max; ++lag) {
        try {
            PairedSample pair = align_with_lag(cases, volume, lag, period);
            auto res = pearson(pair.cases, pair.volume);
            out.correlations.push_back({lag, res.r, res.p, res.n});
        } catch (const std::exception&) {
            out.skipped_lags.push_back(lag);
        }
    }
    for (const auto& c : out.correlations) {
        if (c.p >= 0.05) continue;
        if (!out.best_lead) {
            out.best_lead = c.lag;
            continue;
        }
        double best_abs = 0.0;
        for (const auto& b : out.correlations) {
            if (b.lag == *out.best_lead) best_abs = std::fabs(b.r);
        }
        const double a = std::fabs(c.r);
        if (a > best_abs || (a == best_abs && std::abs(c.lag) < std::abs(*out.best_lead))) {
            out.best_lead = c.lag;
        }
    }
    return out;
}

// Mann-Kendall on the day-ordered values.
inline TrendResult trend_test(const DailySeries& series) {
    std::vector<double> values;
    values.reserve(series.size());
    for (const auto& [date, v] : series) {
        (void)date;
        values.push_back(v);
    }
    return mann_kendall(values);
}

}  // namespace episignal::corr
