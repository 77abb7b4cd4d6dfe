#include "fdrkit/tonemap.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fdr {

static const double kInvertedOffset = 0.01;

ToneMapper ToneMapper::identity() {
    ToneMapper t;
    t.kind_ = ToneMapperKind::Identity;
    return t;
}

ToneMapper ToneMapper::power_law(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("power_law: gamma must be > 0");
    ToneMapper t;
    t.kind_ = ToneMapperKind::PowerLaw;
    t.gamma_ = gamma;
    return t;
}

ToneMapper ToneMapper::log_n(double n) {
    if (!(n > 1.0) || !std::isfinite(n))
        throw std::invalid_argument("log_n: base must be > 1");
    ToneMapper t;
    t.kind_ = ToneMapperKind::LogN;
    t.n_ = n;
    return t;
}

ToneMapper ToneMapper::natural_log(double alpha, double beta, double epsilon) {
    if (!(alpha != 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw std::invalid_argument("natural_log: alpha must be nonzero");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("natural_log: epsilon must be > 0");
    ToneMapper t;
    t.kind_ = ToneMapperKind::NaturalLog;
    t.alpha_ = alpha;
    t.beta_ = beta;
    t.epsilon_ = epsilon;
    return t;
}

ToneMapper ToneMapper::mu_law_log2(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw std::invalid_argument("mu_law_log2: mu must be > 0");
    ToneMapper t;
    t.kind_ = ToneMapperKind::MuLawLog2;
    t.mu_ = mu;
    return t;
}

ToneMapper ToneMapper::inverted() {
    ToneMapper t;
    t.kind_ = ToneMapperKind::Inverted;
    return t;
}

double ToneMapper::apply(double x) const {
    if (!std::isfinite(x) || x < 0.0)
        throw std::invalid_argument("tonemap apply: x must be finite and >= 0");
    switch (kind_) {
        case ToneMapperKind::Identity:
            return x;
        case ToneMapperKind::PowerLaw:
            return std::pow(x, 1.0 / gamma_);
        case ToneMapperKind::LogN:
            return std::log1p(x) / std::log(n_);
        case ToneMapperKind::NaturalLog:
            return (std::log(x + epsilon_) + beta_) * alpha_;
        case ToneMapperKind::MuLawLog2:
            return std::log2(std::log1p(mu_ * x) / std::log1p(mu_) + 1.0);
        case ToneMapperKind::Inverted:
            return 1.0 / (1.0 + x + kInvertedOffset);
    }
    throw std::logic_error("tonemap apply: bad kind");
}

double ToneMapper::invert(double y) const {
    if (!std::isfinite(y))
        throw std::invalid_argument("tonemap invert: y must be finite");
    switch (kind_) {
        case ToneMapperKind::Identity:
            return y;
        case ToneMapperKind::PowerLaw:
            if (y < 0.0) throw std::invalid_argument("tonemap invert: y out of range");
            return std::pow(y, gamma_);
        case ToneMapperKind::LogN:
            if (y < 0.0) throw std::invalid_argument("tonemap invert: y out of range");
            return std::expm1(y * std::log(n_));
        case ToneMapperKind::NaturalLog:
            // The analytic inverse can dip into (-eps, 0) for y below T(0);
            // clamp at zero (numerical guard).
            return std::max(0.0, std::exp(y / alpha_ - beta_) - epsilon_);
        case ToneMapperKind::MuLawLog2:
            if (y < 0.0) throw std::invalid_argument("tonemap invert: y out of range");
            return std::expm1((std::exp2(y) - 1.0) * std::log1p(mu_)) / mu_;
        case ToneMapperKind::Inverted:
            if (!(y > 0.0) || y > 1.0 / (1.0 + kInvertedOffset))
                throw std::invalid_argument("tonemap invert: y out of range");
            return 1.0 / y - 1.0 - kInvertedOffset;
    }
    throw std::logic_error("tonemap invert: bad kind");
}

Image ToneMapper::apply(const Image& img) const {
    Image out = img;
    for (double& v : out.data) v = apply(v);
    return out;
}

Image ToneMapper::invert(const Image& img) const {
    Image out = img;
    for (double& v : out.data) v = invert(v);
    return out;
}

double ToneMapper::nonlinearity_error(double x, double delta) const {
    return std::abs(x - invert(apply(x) - delta));
}

std::string ToneMapper::to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case ToneMapperKind::Identity: return "identity";
        case ToneMapperKind::PowerLaw: os << "gamma:" << gamma_; break;
        case ToneMapperKind::LogN: os << "logn:" << n_; break;
        case ToneMapperKind::NaturalLog:
            os << "ln:" << alpha_ << "," << beta_ << "," << epsilon_;
            break;
        case ToneMapperKind::MuLawLog2: os << "mulog2:" << mu_; break;
        case ToneMapperKind::Inverted: return "inverted";
    }
    return os.str();
}

namespace {

double parse_number(const std::string& s, const char* what) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("tonemap spec: bad ") + what + " '" + s + "'");
    }
    if (pos != s.size())
        throw std::invalid_argument(std::string("tonemap spec: bad ") + what + " '" + s + "'");
    return v;
}

}  // namespace

ToneMapper ToneMapper::parse(const std::string& spec) {
    if (spec == "identity") return identity();
    if (spec == "inverted") return inverted();
    const size_t colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("tonemap spec: unknown operator '" + spec + "'");
    const std::string head = spec.substr(0, colon);
    const std::string args = spec.substr(colon + 1);
    if (head == "gamma") return power_law(parse_number(args, "gamma"));
    if (head == "logn") return log_n(parse_number(args, "base"));
    if (head == "mulog2") return mu_law_log2(parse_number(args, "mu"));
    if (head == "ln") {
        std::vector<std::string> parts;
        std::string cur;
        std::istringstream is(args);
        while (std::getline(is, cur, ',')) parts.push_back(cur);
        if (parts.size() != 3)
            throw std::invalid_argument("tonemap spec: ln takes alpha,beta,eps");
        return natural_log(parse_number(parts[0], "alpha"), parse_number(parts[1], "beta"),
                           parse_number(parts[2], "eps"));
    }
    throw std::invalid_argument("tonemap spec: unknown operator '" + spec + "'");
}

}  // namespace fdr
