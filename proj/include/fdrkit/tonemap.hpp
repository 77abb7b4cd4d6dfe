#pragma once

#include <string>

#include "fdrkit/image.hpp"

namespace fdr {

enum class ToneMapperKind {
    Identity,
    PowerLaw,     // x^(1/gamma)
    LogN,         // log_n(x + 1)
    NaturalLog,   // (ln(x + eps) + beta) * alpha
    MuLawLog2,    // log2(ln(1 + mu x)/ln(1 + mu) + 1)
    Inverted      // 1/(1 + x + 0.01)
};

// Bijective scalar compression curve with an exact analytic inverse.
// All kinds are strictly increasing on [0, inf) except Inverted, which is
// strictly decreasing. Evaluation is double precision throughout.
class ToneMapper {
public:
    static ToneMapper identity();
    static ToneMapper power_law(double gamma = 2.2);
    static ToneMapper log_n(double n = 10.0);
    static ToneMapper natural_log(double alpha = 1.0, double beta = 0.0,
                                  double epsilon = 1e-6);
    static ToneMapper mu_law_log2(double mu = 5000.0);
    static ToneMapper inverted();

    // Grammar: identity | gamma:<g> | logn:<n> | ln:<alpha>,<beta>,<eps>
    //        | mulog2:<mu> | inverted
    static ToneMapper parse(const std::string& spec);
    std::string to_string() const;

    ToneMapperKind kind() const { return kind_; }
    bool increasing() const { return kind_ != ToneMapperKind::Inverted; }

    double apply(double x) const;
    double invert(double y) const;

    Image apply(const Image& img) const;
    Image invert(const Image& img) const;

    // |x - invert(apply(x) - delta)|: radiance error caused by a fixed LDR
    // perturbation delta at operating point x.
    double nonlinearity_error(double x, double delta) const;

private:
    ToneMapper() = default;
    ToneMapperKind kind_ = ToneMapperKind::Identity;
    double gamma_ = 2.2;
    double n_ = 10.0;
    double alpha_ = 1.0;
    double beta_ = 0.0;
    double epsilon_ = 1e-6;
    double mu_ = 5000.0;
};

}  // namespace fdr
