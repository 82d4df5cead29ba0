#include "arn/resonance.hpp"

#include <cmath>
#include <string>

#include "arn/errors.hpp"

namespace arn {

ResonatorSpec ResonatorSpec::sigmoid(double center, double rho, double k) {
    ResonatorSpec s;
    s.transform = Transform::Sigmoid;
    s.center = center;
    s.rho = rho;
    s.k = k;
    s.validate();
    return s;
}

ResonatorSpec ResonatorSpec::scaled(double p, double k) {
    ResonatorSpec s;
    s.transform = Transform::ScaledInput;
    s.scale = p;
    s.k = k;
    s.validate();
    return s;
}

ResonatorSpec ResonatorSpec::translated(double p, double k) {
    ResonatorSpec s;
    s.transform = Transform::TranslatedInput;
    s.scale = p;
    s.k = k;
    s.validate();
    return s;
}

void ResonatorSpec::validate() const {
    if (!(k > 0.0)) {
        throw ParameterError("resonator requires k > 0, got " + std::to_string(k));
    }
    switch (transform) {
        case Transform::ScaledInput:
            if (!(scale > 0.0)) {
                throw ParameterError("scaled input requires p > 0, got " +
                                     std::to_string(scale));
            }
            break;
        case Transform::TranslatedInput:
            break;
        case Transform::Sigmoid:
            if (!(rho > 0.0)) {
                throw ParameterError("sigmoid transform requires rho > 0, got " +
                                     std::to_string(rho));
            }
            // The sigmoid range (0, 1) must contain inputs on both sides of
            // the peak at X = k/2.
            if (!(k < 2.0)) {
                throw ParameterError(
                    "sigmoid transform requires k in (0, 2) so the peak at k/2 "
                    "is reachable from both sides, got k = " + std::to_string(k));
            }
            break;
    }
}

namespace {

double transform_input(const ResonatorSpec& spec, double x) {
    switch (spec.transform) {
        case Transform::ScaledInput:
            return x * spec.scale;
        case Transform::TranslatedInput:
            return x - spec.scale;
        case Transform::Sigmoid:
            return 1.0 / (1.0 + std::exp(-spec.rho * (x - spec.center)));
    }
    return 0.0;
}

}  // namespace

double resonate(const ResonatorSpec& spec, double x) {
    spec.validate();
    const double X = transform_input(spec, x);
    return X * (spec.k - X);
}

std::pair<double, double> peak(const ResonatorSpec& spec) {
    spec.validate();
    const double y_m = spec.k * spec.k / 4.0;
    switch (spec.transform) {
        case Transform::ScaledInput:
            return {spec.k / (2.0 * spec.scale), y_m};
        case Transform::TranslatedInput:
            return {spec.k / 2.0 + spec.scale, y_m};
        case Transform::Sigmoid:
            return {spec.center, y_m};
    }
    return {0.0, y_m};
}

double half_power_threshold(double k) {
    if (!(k >= 0.0)) {
        throw ParameterError("half_power_threshold requires k >= 0");
    }
    return (k * k / 4.0) / std::sqrt(2.0);
}

CoverageInterval coverage_bounds(const ResonatorSpec& spec, double threshold) {
    spec.validate();
    const double y_m = spec.k * spec.k / 4.0;
    if (!(threshold > 0.0)) {
        throw ParameterError("coverage threshold must be positive, got " +
                             std::to_string(threshold));
    }
    if (!(threshold < y_m)) {
        throw CoverageError("threshold " + std::to_string(threshold) +
                            " at or above peak " + std::to_string(y_m) +
                            " leaves empty coverage");
    }
    // Roots of X*(k - X) = T in transformed space.
    const double s = std::sqrt(spec.k * spec.k - 4.0 * threshold);
    const double x_lo = (spec.k - s) / 2.0;
    const double x_hi = (spec.k + s) / 2.0;
    switch (spec.transform) {
        case Transform::ScaledInput:
            return {x_lo / spec.scale, x_hi / spec.scale};
        case Transform::TranslatedInput:
            return {spec.scale + x_lo, spec.scale + x_hi};
        case Transform::Sigmoid: {
            // Transformed roots must be reachable by the sigmoid range (0, 1).
            if (!(x_lo > 0.0) || !(x_hi < 1.0)) {
                throw CoverageError(
                    "sigmoid output never falls back to threshold " +
                    std::to_string(threshold) + " on one side (k = " +
                    std::to_string(spec.k) + ")");
            }
            const double lo = spec.center + std::log(x_lo / (1.0 - x_lo)) / spec.rho;
            const double hi = spec.center + std::log(x_hi / (1.0 - x_hi)) / spec.rho;
            return {lo, hi};
        }
    }
    return {};
}

double rho_from_sigma(double sigma) {
    if (!(sigma > 0.0)) {
        throw ParameterError("rho_from_sigma requires sigma > 0, got " +
                             std::to_string(sigma));
    }
    return kRhoSigmaRatio / sigma;
}

CoverageInterval coverage_from_stats(double center, double sigma, double alpha) {
    if (!(sigma > 0.0)) {
        throw ParameterError("coverage_from_stats requires sigma > 0");
    }
    if (!(alpha > 0.0)) {
        throw ParameterError("coverage_from_stats requires alpha > 0");
    }
    return {center - alpha * sigma, center + alpha * sigma};
}

}  // namespace arn
