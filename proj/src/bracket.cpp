#include "fdrkit/bracket.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fdr {

const double kDefaultEpsLo = 1.0 / 255.0;
const double kDefaultEpsHi = 254.0 / 255.0;

ExposureSet::ExposureSet(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty())
        throw std::invalid_argument("ExposureSet: needs at least one exposure");
    if (times_.front() > 1.0)
        throw std::invalid_argument("ExposureSet: longest exposure must be <= 2^0");
    for (size_t n = 0; n < times_.size(); ++n) {
        if (!(times_[n] > 0.0) || !std::isfinite(times_[n]))
            throw std::invalid_argument("ExposureSet: times must be finite and > 0");
        if (n > 0 && !(times_[n] < times_[n - 1]))
            throw std::invalid_argument("ExposureSet: times must be strictly decreasing");
    }
}

ExposureSet ExposureSet::from_ev_list(const std::vector<double>& evs) {
    std::vector<double> times(evs.size());
    std::transform(evs.begin(), evs.end(), times.begin(),
                   [](double ev) { return std::exp2(ev); });
    return ExposureSet(std::move(times));
}

ExposureSet ExposureSet::parse(const std::string& comma_separated_evs) {
    std::vector<double> evs;
    std::string tok;
    std::istringstream is(comma_separated_evs);
    while (std::getline(is, tok, ',')) {
        size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("exposure list: bad EV '" + tok + "'");
        }
        if (pos != tok.size())
            throw std::invalid_argument("exposure list: bad EV '" + tok + "'");
        evs.push_back(v);
    }
    if (evs.empty()) throw std::invalid_argument("exposure list: empty");
    return from_ev_list(evs);
}

void ExposureBracket::validate() const {
    if (exposures.empty() || exposures.size() != times.size())
        throw std::invalid_argument("bracket: exposure/time count mismatch");
    ExposureSet check(times);  // ordering + positivity
    if (!(eps_lo > 0.0) || !(eps_lo < eps_hi) || !(eps_hi <= 1.0))
        throw std::invalid_argument("bracket: need 0 < eps_lo < eps_hi <= 1");
    for (const Image& e : exposures) {
        if (!e.same_shape(exposures.front()) || e.format != exposures.front().format)
            throw std::invalid_argument("bracket: exposures must share shape and format");
        validate_ldr(e);
    }
}

ExposureBracket decompose(const Image& radiance, const ExposureSet& times,
                          const ToneMapper& tm, double eps_lo, double eps_hi) {
    validate_radiance(radiance);
    if (!(eps_lo > 0.0) || !(eps_lo < eps_hi) || !(eps_hi <= 1.0))
        throw std::invalid_argument("decompose: need 0 < eps_lo < eps_hi <= 1");

    ExposureBracket bracket;
    bracket.times = times.times();
    bracket.tonemapper = tm;
    bracket.eps_lo = eps_lo;
    bracket.eps_hi = eps_hi;
    bracket.exposures.reserve(times.size());
    for (size_t n = 0; n < times.size(); ++n) {
        const double dt = times[n];
        Image exp(radiance.width, radiance.height, radiance.channels, radiance.format);
        for (size_t k = 0; k < radiance.data.size(); ++k) {
            const double y = tm.apply(dt * radiance.data[k]);
            exp.data[k] = (y < eps_lo || y > eps_hi) ? 0.0 : y;
        }
        bracket.exposures.push_back(std::move(exp));
    }
    return bracket;
}

Image normalize_exposure(const ExposureBracket& bracket, size_t n) {
    if (n >= bracket.size())
        throw std::out_of_range("normalize_exposure: exposure index out of range");
    const double dt = bracket.times[n];
    Image out = bracket.exposures[n];
    for (double& v : out.data)
        v = (v == 0.0) ? 0.0 : bracket.tonemapper.invert(v) / dt;
    return out;
}

namespace {

// Inverse-maps an LDR level to radiance, tolerating levels that sit outside a
// decreasing operator's range (clamped to the nearest representable level).
double ldr_to_radiance(const ToneMapper& tm, double level, double dt) {
    if (!tm.increasing()) {
        // Decreasing operator: the representable LDR range is (T(inf), T(0)].
        const double top = tm.apply(0.0);
        if (level >= top) return 0.0;
        if (level <= 0.0) return std::numeric_limits<double>::infinity();
        return tm.invert(level) / dt;
    }
    return tm.invert(level) / dt;
}

}  // namespace

std::vector<CandlestickRow> candlestick(const ExposureSet& times, const ToneMapper& tm,
                                        double eps) {
    if (!(eps > 0.0) || !(eps < 0.5))
        throw std::invalid_argument("candlestick: need 0 < eps < 0.5");
    std::vector<CandlestickRow> rows;
    rows.reserve(times.size());
    for (size_t n = 0; n < times.size(); ++n) {
        const double dt = times[n];
        CandlestickRow row;
        row.delta_t = dt;
        double lim0 = ldr_to_radiance(tm, 0.0, dt);
        double lim1 = ldr_to_radiance(tm, 1.0, dt);
        double body0 = ldr_to_radiance(tm, eps, dt);
        double body1 = ldr_to_radiance(tm, 1.0 - eps, dt);
        row.limit_lo = std::min(lim0, lim1);
        row.limit_hi = std::max(lim0, lim1);
        row.body_lo = std::min(body0, body1);
        row.body_hi = std::max(body0, body1);
        row.marker = ldr_to_radiance(tm, 0.5, dt);
        rows.push_back(row);
    }
    return rows;
}

CoverageReport validate_coverage(const ExposureSet& times, const ToneMapper& tm,
                                 double eps, double range_lo, double range_hi) {
    if (!(range_lo < range_hi) || !(range_lo >= 0.0))
        throw std::invalid_argument("validate_coverage: need 0 <= range_lo < range_hi");
    const auto rows = candlestick(times, tm, eps);

    // Sweep the elementary intervals between all body endpoints inside the
    // queried range and classify them by how many bodies cover them.
    std::vector<double> cuts{range_lo, range_hi};
    for (const auto& row : rows) {
        for (double v : {row.body_lo, row.body_hi})
            if (v > range_lo && v < range_hi) cuts.push_back(v);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    CoverageReport report;
    auto extend = [](std::vector<Interval>& list, double lo, double hi) {
        if (!list.empty() && list.back().hi == lo)
            list.back().hi = hi;
        else
            list.push_back({lo, hi});
    };
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k], hi = cuts[k + 1];
        const double mid = lo + (hi - lo) / 2.0;
        int covered = 0;
        for (const auto& row : rows)
            if (mid >= row.body_lo && mid <= row.body_hi) ++covered;
        if (covered == 0) extend(report.gaps, lo, hi);
        if (covered >= 2) extend(report.overlaps, lo, hi);
    }
    return report;
}

std::vector<double> decay_schedule(const ExposureSet& targets, int epochs_to_target,
                                   int epoch) {
    if (epochs_to_target <= 0)
        throw std::invalid_argument("decay_schedule: epochs_to_target must be > 0");
    if (epoch < 0) throw std::invalid_argument("decay_schedule: epoch must be >= 0");
    const double t0 = targets[0];
    const double tN = targets[targets.size() - 1];
    const double frac =
        static_cast<double>(std::min(epoch, epochs_to_target)) / epochs_to_target;
    const double decay = t0 * std::pow(tN / t0, frac);

    std::vector<double> times(targets.size());
    for (size_t n = 0; n < targets.size(); ++n) times[n] = std::max(targets[n], decay);
    return times;
}

}  // namespace fdr
