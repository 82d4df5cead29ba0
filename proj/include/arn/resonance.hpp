#ifndef ARN_RESONANCE_HPP
#define ARN_RESONANCE_HPP

#include <utility>

namespace arn {

// Ratio between the resonance control parameter and the standard deviation
// of a Gaussian input stream whose half-power coverage the resonator should
// reproduce: rho = kRhoSigmaRatio / sigma.
inline constexpr double kRhoSigmaRatio = 1.4652;

// Half-power coverage of a unit Gaussian in units of sigma: x_c = +-alpha*sigma.
inline constexpr double kGaussianHalfPowerAlpha = 0.8325;

enum class Transform {
    ScaledInput,      // X = p * x
    TranslatedInput,  // X = x - p
    Sigmoid,          // X = 1 / (1 + exp(-rho * (x - center)))
};

// One scalar input's tuned resonance curve y = X * (k - X).
struct ResonatorSpec {
    Transform transform = Transform::Sigmoid;
    double k = 1.0;
    double center = 0.0;  // resonant input x_m (Sigmoid only)
    double rho = 1.0;     // resonance control parameter (Sigmoid only)
    double scale = 1.0;   // p (ScaledInput / TranslatedInput only)

    static ResonatorSpec sigmoid(double center, double rho, double k = 1.0);
    static ResonatorSpec scaled(double p, double k = 1.0);
    static ResonatorSpec translated(double p, double k = 1.0);

    // Throws ParameterError if the spec violates its invariants. The sigmoid
    // transform additionally requires k in (0, 2) so that the transformed
    // input range (0, 1) has values on both sides of the peak at X = k/2.
    void validate() const;
};

// Raw input interval over which a resonator's output stays at or above a
// threshold.
struct CoverageInterval {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    bool contains(double x) const { return lower <= x && x <= upper; }
};

// Resonator output X * (k - X) at raw input x. Peaks at k^2/4.
double resonate(const ResonatorSpec& spec, double x);

// Analytic peak location and value (x_m, y_m); y_m = k^2/4 for every transform.
std::pair<double, double> peak(const ResonatorSpec& spec);

// Half-power threshold (k^2/4) / sqrt(2) on the raw output scale.
double half_power_threshold(double k);

// Raw inputs at which the resonator output equals T, 0 < T < k^2/4.
// Throws CoverageError when T is at or above the peak, or when the sigmoid
// curve never falls back to T on one side (possible for k != 1).
CoverageInterval coverage_bounds(const ResonatorSpec& spec, double threshold);

// rho reproducing the half-power coverage of a Gaussian input with the given
// standard deviation (Eq. rho = 1.4652 / sigma).
double rho_from_sigma(double sigma);

// Coverage interval {x_m - alpha*sigma, x_m + alpha*sigma} from input
// statistics.
CoverageInterval coverage_from_stats(double center, double sigma, double alpha);

}  // namespace arn

#endif
