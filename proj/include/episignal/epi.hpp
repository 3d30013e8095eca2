#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "episignal/csv.hpp"
#include "episignal/date.hpp"
#include "episignal/ingest.hpp"

namespace episignal::epi {

using ingest::CaseSeries;

// Discretization of the reproduction-number axis.
struct RtGrid {
    double r_min = 0.0;
    double r_max = 6.0;
    double step = 0.01;

    std::size_t size() const {
        return static_cast<std::size_t>(std::llround((r_max - r_min) / step)) + 1;
    }
    double value(std::size_t i) const { return r_min + static_cast<double>(i) * step; }

    void validate() const {
        if (!(r_min >= 0.0) || !(r_min < r_max) || !(step > 0.0)) {
            throw std::invalid_argument("invalid RtGrid");
        }
        if (r_max < 3.0) {
            throw std::invalid_argument("RtGrid must reach at least 3.0");
        }
    }
};

struct RtPosterior {
    std::vector<Date> dates;
    RtGrid grid;
    std::vector<std::vector<double>> posterior;  // one normalized row per date
    std::vector<double> map_estimate;
    std::vector<std::pair<double, double>> credible_interval;
    double interval_mass = 0.9;
    std::vector<Date> floored_days;  // days whose predecessor count was floored to 1
};

struct PandemicPeriods {
    DateInterval pre_peak;
    DateInterval free_contagious;
    DateInterval measures;
    DateInterval decay;
    Date t0;
    Date t1;
    bool pre_peak_clipped = false;
    bool decay_empty = false;
};

// Centered Gaussian rolling mean, kernel truncated at `window` and
// renormalized where it hangs over the boundary.
inline CaseSeries smooth_cases(const CaseSeries& series, int window, double sigma) {
    if (window < 1 || window % 2 == 0) {
        throw std::invalid_argument("smooth_cases: window must be odd and >= 1");
    }
    if (!(sigma > 0.0)) throw std::invalid_argument("smooth_cases: sigma must be positive");
    const std::size_t n = series.values.size();
    if (n < static_cast<std::size_t>(window)) {
        throw std::invalid_argument("smooth_cases: series shorter than window");
    }
    const int half = window / 2;
    std::vector<double> kernel(static_cast<std::size_t>(window));
    for (int j = -half; j <= half; ++j) {
        kernel[static_cast<std::size_t>(j + half)] =
            std::exp(-0.5 * (static_cast<double>(j) / sigma) * (static_cast<double>(j) / sigma));
    }
    CaseSeries out = series;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        double wsum = 0.0;
        for (int j = -half; j <= half; ++j) {
            const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i) + j;
            if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n)) continue;
            const double w = kernel[static_cast<std::size_t>(j + half)];
            acc += w * series.values[static_cast<std::size_t>(idx)];
            wsum += w;
        }
        out.values[i] = acc / wsum;
    }
    return out;
}

namespace detail {

// In-place convolution along the R axis with a Gaussian of std `sigma`
// (in R units), boundary-renormalized, then normalized to total mass 1.
inline void diffuse_prior(std::vector<double>& p, double sigma, double step) {
    const double sigma_idx = sigma / step;
    const int half = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_idx)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
    for (int j = -half; j <= half; ++j) {
        kernel[static_cast<std::size_t>(j + half)] =
            std::exp(-0.5 * (static_cast<double>(j) / sigma_idx) * (static_cast<double>(j) / sigma_idx));
    }
    const std::size_t n = p.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        double wsum = 0.0;
        for (int j = -half; j <= half; ++j) {
            const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i) + j;
            if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n)) continue;
            const double w = kernel[static_cast<std::size_t>(j + half)];
            acc += w * p[static_cast<std::size_t>(idx)];
            wsum += w;
        }
        out[i] = acc / wsum;
    }
    double total = 0.0;
    for (double v : out) total += v;
    for (double& v : out) v /= total;
    p = std::move(out);
}

inline void normalize(std::vector<double>& p) {
    double total = 0.0;
    for (double v : p) total += v;
    if (total <= 0.0) throw std::runtime_error("posterior collapsed to zero mass");
    for (double& v : p) v /= total;
}

// Smallest contiguous grid window containing the mode with mass >= level.
inline std::pair<std::size_t, std::size_t> hdi_window(const std::vector<double>& p,
                                                      std::size_t mode, double level) {
    const std::size_t n = p.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + p[i];
    std::size_t best_l = 0, best_r = n - 1;
    std::size_t best_width = n;
    for (std::size_t l = 0; l <= mode; ++l) {
        // binary search smallest r >= mode with mass(l..r) >= level
        std::size_t lo = mode, hi = n - 1, r = n;
        while (lo <= hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (prefix[mid + 1] - prefix[l] >= level) {
                r = mid;
                if (mid == 0) break;
                hi = mid - 1;
            } else {
                lo = mid + 1;
            }
        }
        if (r == n) continue;
        const std::size_t width = r - l;
        if (width < best_width) {
            best_width = width;
            best_l = l;
            best_r = r;
        }
    }
    return {best_l, best_r};
}

}  // namespace detail

// Sequential Bayesian filter over an R grid. Day 0 starts from a uniform
// prior; each later day diffuses the previous posterior with a Gaussian random
// walk and multiplies in the Poisson likelihood of the observed count under
// lambda_t = k_{t-1} * exp(gamma_si * (R - 1)), gamma_si = 1 / serial_interval.
inline RtPosterior estimate_rt(const CaseSeries& series, const RtGrid& grid, double sigma_rw,
                               double serial_interval, double interval_mass = 0.9) {
    grid.validate();
    if (!(sigma_rw > 0.0)) throw std::invalid_argument("estimate_rt: sigma_rw must be positive");
    if (!(serial_interval > 0.0)) {
        throw std::invalid_argument("estimate_rt: serial interval must be positive");
    }
    for (double v : series.values) {
        if (v < 0.0) throw std::invalid_argument("estimate_rt: series must be nonnegative");
    }
    std::size_t first = series.values.size();
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (series.values[i] >= 1.0) {
            first = i;
            break;
        }
    }
    if (first == series.values.size()) throw std::runtime_error("no epidemic signal");

    const double gamma_si = 1.0 / serial_interval;
    const std::size_t m = grid.size();
    RtPosterior out;
    out.grid = grid;
    out.interval_mass = interval_mass;
    const std::size_t days = series.values.size() - first;
    out.dates.reserve(days);
    out.posterior.reserve(days);

    std::vector<double> current(m, 1.0 / static_cast<double>(m));
    std::vector<double> loglik(m);
    for (std::size_t t = 0; t < days; ++t) {
        const Date date = series.date_at(first + t);
        if (t > 0) {
            detail::diffuse_prior(current, sigma_rw, grid.step);
            double prev_k = series.values[first + t - 1];
            if (prev_k < 1.0) {
                prev_k = 1.0;
                out.floored_days.push_back(date);
            }
            const double k = series.values[first + t];
            double max_ll = -1e300;
            for (std::size_t i = 0; i < m; ++i) {
                const double lambda = prev_k * std::exp(gamma_si * (grid.value(i) - 1.0));
                loglik[i] = k * std::log(lambda) - lambda;
                if (loglik[i] > max_ll) max_ll = loglik[i];
            }
            for (std::size_t i = 0; i < m; ++i) current[i] *= std::exp(loglik[i] - max_ll);
            detail::normalize(current);
        }
        std::size_t mode = 0;
        for (std::size_t i = 1; i < m; ++i) {
            if (current[i] > current[mode]) mode = i;
        }
        auto [lo, hi] = detail::hdi_window(current, mode, interval_mass);
        out.dates.push_back(date);
        out.posterior.push_back(current);
        out.map_estimate.push_back(grid.value(mode));
        out.credible_interval.emplace_back(grid.value(lo), grid.value(hi));
    }
    return out;
}

// Slices the study window into the four pandemic periods using first-crossing
// semantics on the MAP trajectory. t0 is the first local maximum above r0_max
// (plateaus resolve to their first day); t1 the first later day below r0_max.
inline PandemicPeriods slice_periods(const RtPosterior& rt, double r0_min = 1.4,
                                     double r0_max = 2.5) {
    const auto& m = rt.map_estimate;
    const std::size_t n = m.size();
    if (n == 0) throw std::runtime_error("no peak");
    std::size_t peak = n;
    for (std::size_t i = 0; i < n && peak == n; ++i) {
        if (m[i] <= r0_max) continue;
        std::size_t j = i + 1;
        while (j < n && m[j] == m[i]) ++j;
        if (j < n && m[j] < m[i]) peak = i;  // plateau resolved to its first day
    }
    if (peak == n) throw std::runtime_error("no peak");
    std::size_t t1_idx = n;
    for (std::size_t i = peak; i < n; ++i) {
        if (m[i] < r0_max) {
            t1_idx = i;
            break;
        }
    }
    if (t1_idx == n) throw std::runtime_error("no peak");

    auto first_below = [&](std::size_t from, double threshold) {
        for (std::size_t i = from; i < n; ++i) {
            if (m[i] < threshold) return i;
        }
        return n;
    };
    const std::size_t fc_end = first_below(t1_idx, r0_min);
    const std::size_t me_end = fc_end == n ? n : first_below(fc_end, 1.0);

    const Date data_start = rt.dates.front();
    const Date series_end = rt.dates.back() + 1;
    auto date_of = [&](std::size_t i) { return i == n ? series_end : rt.dates[i]; };

    PandemicPeriods out;
    out.t0 = rt.dates[peak];
    out.t1 = rt.dates[t1_idx];
    Date pre_start = out.t1 - 30;
    if (pre_start < data_start) {
        pre_start = data_start;
        out.pre_peak_clipped = true;
    }
    out.pre_peak = {pre_start, out.t1};
    out.free_contagious = {out.t1, date_of(fc_end)};
    out.measures = {date_of(fc_end), date_of(me_end)};
    out.decay = {date_of(me_end), series_end};
    out.decay_empty = out.decay.empty();
    return out;
}

inline void write_rt_csv(const RtPosterior& rt, const std::string& path) {
    CsvWriter w(path);
    w.row({"date", "map", "ci_low", "ci_high"});
    for (std::size_t i = 0; i < rt.dates.size(); ++i) {
        w.row({rt.dates[i].to_iso(), format_float(rt.map_estimate[i]),
               format_float(rt.credible_interval[i].first),
               format_float(rt.credible_interval[i].second)});
    }
}

inline nlohmann::json periods_to_json(const PandemicPeriods& p) {
    auto interval = [](const DateInterval& iv) {
        return nlohmann::json{{"start", iv.begin.to_iso()}, {"end", iv.end.to_iso()}};
    };
    return nlohmann::json{{"pre_peak", interval(p.pre_peak)},
                          {"free_contagious", interval(p.free_contagious)},
                          {"measures", interval(p.measures)},
                          {"decay", interval(p.decay)},
                          {"t0", p.t0.to_iso()},
                          {"t1", p.t1.to_iso()},
                          {"pre_peak_clipped", p.pre_peak_clipped},
                          {"decay_empty", p.decay_empty}};
}

inline PandemicPeriods periods_from_json(const nlohmann::json& j) {
    auto interval = [](const nlohmann::json& v) {
        auto b = Date::parse(v.at("start").get<std::string>());
        auto e = Date::parse(v.at("end").get<std::string>());
        if (!b || !e) throw std::runtime_error("bad date in periods json");
        return DateInterval{*b, *e};
    };
    PandemicPeriods p;
    p.pre_peak = interval(j.at("pre_peak"));
    p.free_contagious = interval(j.at("free_contagious"));
    p.measures = interval(j.at("measures"));
    p.decay = interval(j.at("decay"));
    p.t0 = *Date::parse(j.at("t0").get<std::string>());
    p.t1 = *Date::parse(j.at("t1").get<std::string>());
    p.pre_peak_clipped = j.at("pre_peak_clipped").get<bool>();
    p.decay_empty = j.at("decay_empty").get<bool>();
    return p;
}

}  // namespace episignal::epi
