#pragma once

#include <vector>

#include "fdrkit/image.hpp"
#include "fdrkit/tonemap.hpp"

namespace fdr {

// Relative shutter times delta_t, strictly decreasing, delta_t[0] <= 1.
class ExposureSet {
public:
    explicit ExposureSet(std::vector<double> times);
    // EVs are exponents k with delta_t = 2^k, e.g. {0, -8, -15}.
    static ExposureSet from_ev_list(const std::vector<double>& evs);
    static ExposureSet parse(const std::string& comma_separated_evs);

    size_t size() const { return times_.size(); }
    double operator[](size_t n) const { return times_[n]; }
    const std::vector<double>& times() const { return times_; }

private:
    std::vector<double> times_;
};

// A tone-mapped LDR exposure stack: exposure n holds T(delta_t[n] * I) with
// out-of-range samples zeroed.
struct ExposureBracket {
    std::vector<Image> exposures;
    std::vector<double> times;
    ToneMapper tonemapper = ToneMapper::identity();
    double eps_lo = 1.0 / 255.0;
    double eps_hi = 254.0 / 255.0;

    size_t size() const { return exposures.size(); }
    void validate() const;  // throws std::invalid_argument on shape/value errors
};

extern const double kDefaultEpsLo;
extern const double kDefaultEpsHi;

// Simulates capturing the bracket from a radiance image: per sample,
// y = T(delta_t * v); keep y if eps_lo <= y <= eps_hi, else 0.
ExposureBracket decompose(const Image& radiance, const ExposureSet& times,
                          const ToneMapper& tm, double eps_lo = kDefaultEpsLo,
                          double eps_hi = kDefaultEpsHi);

// Partial inversion of exposure n: T^-1(y) / delta_t[n], zeros stay zero.
Image normalize_exposure(const ExposureBracket& bracket, size_t n);

// Dynamic-range "candlestick" of one exposure: the radiance interval an
// exposure can represent. Bodies span LDR [eps, 1-eps], limits LDR [0, 1],
// the marker is the LDR midpoint 0.5, all mapped back to radiance.
struct CandlestickRow {
    double delta_t = 1.0;
    double limit_lo = 0.0, limit_hi = 0.0;
    double body_lo = 0.0, body_hi = 0.0;
    double marker = 0.0;
};

std::vector<CandlestickRow> candlestick(const ExposureSet& times,
                                        const ToneMapper& tm,
                                        double eps = kDefaultEpsLo);

struct Interval {
    double lo = 0.0, hi = 0.0;
};

// Radiance subranges of [range_lo, range_hi] covered by no candlestick body
// (gaps) or by more than one (overlaps).
struct CoverageReport {
    std::vector<Interval> gaps;
    std::vector<Interval> overlaps;
};

CoverageReport validate_coverage(const ExposureSet& times, const ToneMapper& tm,
                                 double eps, double range_lo, double range_hi);

// Training-style exposure decay: every head starts at the longest target time
// and decays log-linearly toward its own target, reached at epoch
// epochs_to_target. delta(e) = t0 * (tN/t0)^(min(e, i)/i);
// head n gets max(target_n, delta(e)). Returned per head; early epochs tie
// several heads at the same time, so the result is not an ExposureSet.
std::vector<double> decay_schedule(const ExposureSet& targets, int epochs_to_target,
                                   int epoch);

}  // namespace fdr
