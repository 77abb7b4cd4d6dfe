#pragma once

#include <set>
#include <vector>

#include "fdrkit/bracket.hpp"
#include "fdrkit/segmentation.hpp"

namespace fdr {

// Per-exposure, per-sample fusion weights in [0, 1], shaped like the bracket.
struct WeightStack {
    std::vector<Image> weights;

    size_t size() const { return weights.size(); }
    void validate_against(const ExposureBracket& bracket) const;
};

// 1 where eps_lo <= y <= eps_hi, else 0 (the bracket's own thresholds).
WeightStack validity_mask(const ExposureBracket& bracket);

enum class RobertsonExponent {
    Squared,  // exp(-(psi*y/lambda - 2)^2), the bell curve used everywhere here
    Literal   // exp(psi*y/lambda - 2), kept only for side-by-side comparison
};

// Bell-shaped LDR confidence w(y) = alpha*exp(-(4y-2)^2) + beta with
// alpha = e^4/(e^4 - 1), beta = 1/(1 - e^4) (psi = 255, lambda = 255/4), so
// w(0) = w(1) = 0 and w(0.5) = 1 exactly.
double robertson_weight(double y, RobertsonExponent form = RobertsonExponent::Squared);

// robertson_weight applied elementwise to the bracket's LDR samples.
WeightStack robertson_weights(const ExposureBracket& bracket);

// Masked average of per-exposure recovered radiance:
//   I = sum_n W_n * (T^-1(y_n)/dt_n) / sum_n W_n.
// Where every weight vanishes, falls back to clipped single-exposure
// recovery: the shortest exposure for saturated-high samples, the longest for
// dark samples (all-zero samples recover 0).
Image fuse_rgb(const ExposureBracket& bracket, const WeightStack& weights);

// Robertson-style maximum-likelihood estimate with externally supplied
// weights: I = sum_n dt_n * W_n * T^-1(y_n) / sum_n dt_n^2 * W_n.
// Same all-weights-zero fallback as fuse_rgb.
Image fuse_weighted(const ExposureBracket& bracket, const WeightStack& weights);

// fuse_weighted with robertson_weights(bracket); bit-identical to calling the
// two yourself.
Image fuse_robertson(const ExposureBracket& bracket);

enum class ScalarFusion { Rgb, Robertson };

// Fuses the HSV value channel with the chosen scalar method and recombines it
// with hue and saturation taken from exposure 0.
Image fuse_hsv(const ExposureBracket& bracket, ScalarFusion inner);

// Per-exposure class keep-sets for label-selective fusion.
struct ClassMaskSpec {
    std::vector<std::set<int>> keep;  // one set per exposure, ids in [0, 4]

    static ClassMaskSpec parse(const std::string& spec);  // "0,1,2;3,4;..."
    void validate(size_t exposure_count) const;
};

// Zeroes every sample whose label class is not in the exposure's keep-set.
ExposureBracket mask_classes(const ExposureBracket& bracket,
                             const SegmentationLabel& label,
                             const ClassMaskSpec& spec);

}  // namespace fdr
