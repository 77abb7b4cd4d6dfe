#include "fdrkit/fusion.hpp"

#include <cmath>
#include <sstream>

namespace fdr {

void WeightStack::validate_against(const ExposureBracket& bracket) const {
    if (weights.size() != bracket.size())
        throw std::invalid_argument("weights: stack size must match bracket");
    for (size_t n = 0; n < weights.size(); ++n) {
        if (!weights[n].same_shape(bracket.exposures[n]))
            throw std::invalid_argument("weights: shape must match bracket exposures");
        for (double w : weights[n].data)
            if (!(w >= 0.0) || w > 1.0)
                throw std::invalid_argument("weights: values must be in [0, 1]");
    }
}

WeightStack validity_mask(const ExposureBracket& bracket) {
    bracket.validate();
    WeightStack stack;
    stack.weights.reserve(bracket.size());
    for (const Image& exp : bracket.exposures) {
        Image w = exp;
        for (double& v : w.data)
            v = (v >= bracket.eps_lo && v <= bracket.eps_hi) ? 1.0 : 0.0;
        stack.weights.push_back(std::move(w));
    }
    return stack;
}

double robertson_weight(double y, RobertsonExponent form) {
    if (!(y >= 0.0) || y > 1.0)
        throw std::invalid_argument("robertson_weight: y must be in [0, 1]");
    // alpha*exp(u) + beta with alpha = e^4/(e^4-1), beta = 1/(1-e^4) is
    // expm1(u + 4)/expm1(4); this form hits 0 and 1 exactly at the anchors.
    const double u = (form == RobertsonExponent::Squared)
                         ? -(4.0 * y - 2.0) * (4.0 * y - 2.0)
                         : 4.0 * y - 2.0;
    return std::expm1(u + 4.0) / std::expm1(4.0);
}

WeightStack robertson_weights(const ExposureBracket& bracket) {
    bracket.validate();
    WeightStack stack;
    stack.weights.reserve(bracket.size());
    for (const Image& exp : bracket.exposures) {
        Image w = exp;
        for (double& v : w.data) v = robertson_weight(v);
        stack.weights.push_back(std::move(w));
    }
    return stack;
}

namespace {

// Recovery for samples no estimator can see (every weight zero): saturated
// bright samples take the shortest exposure's clipped level, dark samples the
// longest exposure's (an all-zero sample recovers 0).
double saturated_fallback(const ExposureBracket& bracket, size_t k) {
    const size_t shortest = bracket.size() - 1;
    const double v_short = bracket.exposures[shortest].data[k];
    if (v_short > 0.0)
        return bracket.tonemapper.invert(v_short) / bracket.times[shortest];
    const double v_long = bracket.exposures[0].data[k];
    if (v_long > 0.0) return bracket.tonemapper.invert(v_long) / bracket.times[0];
    return 0.0;
}

enum class Estimator { Average, Robertson };

Image fuse_generic(const ExposureBracket& bracket, const WeightStack& weights,
                   Estimator estimator) {
    bracket.validate();
    weights.validate_against(bracket);
    const Image& first = bracket.exposures[0];
    Image out(first.width, first.height, first.channels, first.format);
    const size_t count = first.data.size();
    for (size_t k = 0; k < count; ++k) {
        double num = 0.0, den = 0.0;
        for (size_t n = 0; n < bracket.size(); ++n) {
            const double w = weights.weights[n].data[k];
            if (w == 0.0) continue;
            const double y = bracket.exposures[n].data[k];
            const double dt = bracket.times[n];
            const double recovered = bracket.tonemapper.invert(y);
            if (estimator == Estimator::Average) {
                num += w * (recovered / dt);
                den += w;
            } else {
                num += w * dt * recovered;
                den += w * dt * dt;
            }
        }
        out.data[k] = (den > 0.0) ? num / den : saturated_fallback(bracket, k);
    }
    return out;
}

}  // namespace

Image fuse_rgb(const ExposureBracket& bracket, const WeightStack& weights) {
    return fuse_generic(bracket, weights, Estimator::Average);
}

Image fuse_weighted(const ExposureBracket& bracket, const WeightStack& weights) {
    return fuse_generic(bracket, weights, Estimator::Robertson);
}

Image fuse_robertson(const ExposureBracket& bracket) {
    return fuse_weighted(bracket, robertson_weights(bracket));
}

Image fuse_hsv(const ExposureBracket& bracket, ScalarFusion inner) {
    bracket.validate();
    if (bracket.exposures[0].channels != 3)
        throw std::invalid_argument("fuse_hsv: needs 3-channel exposures");

    // Value-channel bracket for the scalar fusion.
    ExposureBracket values;
    values.times = bracket.times;
    values.tonemapper = bracket.tonemapper;
    values.eps_lo = bracket.eps_lo;
    values.eps_hi = bracket.eps_hi;
    std::vector<Image> hsv_exposures;
    hsv_exposures.reserve(bracket.size());
    for (const Image& exp : bracket.exposures) {
        Image hsv = rgb_to_hsv(exp);
        Image v(exp.width, exp.height, 1, exp.format);
        for (size_t p = 0; p < v.data.size(); ++p) v.data[p] = hsv.data[p * 3 + 2];
        values.exposures.push_back(std::move(v));
        hsv_exposures.push_back(std::move(hsv));
    }

    Image fused_v;
    if (inner == ScalarFusion::Robertson) {
        fused_v = fuse_robertson(values);
    } else {
        fused_v = fuse_rgb(values, validity_mask(values));
    }

    // Recombine with hue and saturation from exposure 0.
    const Image& hsv0 = hsv_exposures[0];
    Image out(fused_v.width, fused_v.height, 3, fused_v.format);
    for (size_t p = 0; p < fused_v.data.size(); ++p) {
        hsv_to_rgb_pixel(hsv0.data[p * 3 + 0], hsv0.data[p * 3 + 1], fused_v.data[p],
                         out.data[p * 3 + 0], out.data[p * 3 + 1], out.data[p * 3 + 2]);
    }
    return out;
}

ClassMaskSpec ClassMaskSpec::parse(const std::string& spec) {
    ClassMaskSpec out;
    std::string group;
    std::istringstream groups(spec);
    while (std::getline(groups, group, ';')) {
        std::set<int> ids;
        std::string tok;
        std::istringstream items(group);
        while (std::getline(items, tok, ',')) {
            size_t pos = 0;
            int id = 0;
            try {
                id = std::stoi(tok, &pos);
            } catch (const std::exception&) {
                throw std::invalid_argument("class mask: bad class id '" + tok + "'");
            }
            if (pos != tok.size() || id < 0 || id >= kSkyClassCount)
                throw std::invalid_argument("class mask: bad class id '" + tok + "'");
            ids.insert(id);
        }
        out.keep.push_back(std::move(ids));
    }
    if (out.keep.empty()) throw std::invalid_argument("class mask: empty spec");
    return out;
}

void ClassMaskSpec::validate(size_t exposure_count) const {
    if (keep.size() != exposure_count)
        throw std::invalid_argument("class mask: one keep-set per exposure required");
    for (const auto& ids : keep)
        for (int id : ids)
            if (id < 0 || id >= kSkyClassCount)
                throw std::invalid_argument("class mask: class id out of range");
}

ExposureBracket mask_classes(const ExposureBracket& bracket,
                             const SegmentationLabel& label,
                             const ClassMaskSpec& spec) {
    bracket.validate();
    spec.validate(bracket.size());
    const Image& first = bracket.exposures[0];
    if (label.width != first.width || label.height != first.height)
        throw std::invalid_argument("mask_classes: label shape must match bracket");
    for (uint8_t c : label.classes)
        if (c >= kSkyClassCount)
            throw std::invalid_argument("mask_classes: label contains unknown class id");

    ExposureBracket out = bracket;
    for (size_t n = 0; n < out.size(); ++n) {
        const auto& ids = spec.keep[n];
        Image& exp = out.exposures[n];
        for (size_t p = 0; p < label.classes.size(); ++p) {
            if (!ids.count(label.classes[p])) {
                for (int c = 0; c < exp.channels; ++c)
                    exp.data[p * exp.channels + c] = 0.0;
            }
        }
    }
    return out;
}

}  // namespace fdr
