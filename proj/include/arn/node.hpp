#ifndef ARN_NODE_HPP
#define ARN_NODE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "arn/resonance.hpp"

namespace arn {

// Per-dimension running mean and variance (Welford) of the inputs that
// matched a node. The creating input counts as the first sample.
struct RunningStats {
    std::vector<double> mean;
    std::vector<double> m2;
    std::uint64_t count = 0;

    void reset(std::span<const double> first) {
        mean.assign(first.begin(), first.end());
        m2.assign(first.size(), 0.0);
        count = 1;
    }

    void add(std::span<const double> x) {
        ++count;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double d = x[i] - mean[i];
            mean[i] += d / static_cast<double>(count);
            m2[i] += d * (x[i] - mean[i]);
        }
    }

    // Sample variance (n - 1); zero while fewer than two samples.
    double variance(std::size_t i) const {
        if (count < 2) return 0.0;
        return m2[i] / static_cast<double>(count - 1);
    }

    double stddev(std::size_t i) const { return std::sqrt(variance(i)); }

    bool operator==(const RunningStats&) const = default;
};

// A bundle of resonators sharing one k; the unit of recognition.
//
// `dims` is empty for nodes spanning the full layer arity. Masked nodes
// (input masking enabled) keep only selected input dimensions: resonator j
// then reads input[dims[j]], and the aggregator normalizes by the kept count.
struct Node {
    std::uint32_t id = 0;
    std::vector<ResonatorSpec> resonators;
    std::vector<std::uint32_t> dims;
    std::optional<int> label;
    std::uint64_t hit_count = 0;
    RunningStats stats;

    std::size_t arity() const { return resonators.size(); }

    bool operator==(const Node&) const = default;
};

inline bool operator==(const ResonatorSpec& a, const ResonatorSpec& b) {
    return a.transform == b.transform && a.k == b.k && a.center == b.center &&
           a.rho == b.rho && a.scale == b.scale;
}

}  // namespace arn

#endif
