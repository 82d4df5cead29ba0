#ifndef ARN_LAYER_HPP
#define ARN_LAYER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "arn/node.hpp"

namespace arn {

enum class TuningPolicy {
    Frozen,       // node parameters never change after creation
    StatsTuning,  // winners retune center/rho from their running statistics
};

struct LayerConfig {
    std::size_t input_arity = 0;
    double threshold = 0.9;   // on the normalized scale where the peak is 1
    double default_rho = 2.42;
    double k = 1.0;
    TuningPolicy tuning = TuningPolicy::StatsTuning;
    std::uint64_t min_hits_for_tuning = 5;
    double rho_min = 0.5;
    double rho_max = 50.0;
    double sigma_floor = 1e-3;
    double tie_epsilon = 1e-6;
    double relax_factor = 0.95;

    void validate() const;  // throws ParameterError
};

struct Candidate {
    std::uint32_t id = 0;
    double output = 0.0;
};

struct Recognition {
    std::optional<std::uint32_t> winner;
    double output = 0.0;                // winner's normalized output
    std::vector<Candidate> candidates;  // descending by (output, hits, -id)
    std::optional<std::uint32_t> created;
};

// Growable ordered collection of nodes sharing a threshold and default rho.
//
// present() is side effect free; all mutation happens in train_step and
// create_node. A trained layer may therefore be queried concurrently from
// any number of threads, while training requires exclusive access.
class Layer {
public:
    explicit Layer(LayerConfig cfg);

    const LayerConfig& config() const { return cfg_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(std::uint32_t id) const { return nodes_.at(id); }
    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }

    // Normalized multi-input output (4 / (N k^2)) * sum_i X_i(k - X_i) in
    // [0, 1]; equals 1 exactly when every dimension sits at its center.
    double aggregate(const Node& node, std::span<const double> input) const;

    // Outputs of all nodes on one input, indexed by node id.
    std::vector<double> outputs(std::span<const double> input) const;

    // Evaluates every node; candidates hold all outputs >= threshold.
    Recognition present(std::span<const double> input) const;

    // present() + growth/tuning. A missing candidate creates a node; a winner
    // with a conflicting label creates a correctly labeled node instead of
    // retuning; otherwise the winner absorbs the input into its statistics.
    Recognition train_step(std::span<const double> input,
                           std::optional<int> label = std::nullopt);

    // Appends a node resonating at `input`. Throws StructureError on an
    // exact duplicate center vector.
    std::uint32_t create_node(std::span<const double> input,
                              std::optional<int> label = std::nullopt);

    // Masked variant: resonators only for input positions listed in `dims`,
    // with `values` the corresponding input values.
    std::uint32_t create_node_masked(std::span<const std::uint32_t> dims,
                                     std::span<const double> values,
                                     std::optional<int> label = std::nullopt);

    // Retunes one node from its running statistics: center <- mean,
    // rho <- clamp(1.4652 / max(sigma, sigma_floor), rho_min, rho_max).
    // Nodes with fewer than two hits are left untouched.
    void tune_node(std::uint32_t id);

    // Winner under the deterministic rule: maximum output, exact ties broken
    // by larger hit_count, then smaller id. Throws StructureError when empty.
    std::uint32_t resolve_ambiguity(const std::vector<Candidate>& candidates) const;

    // Id of the node whose center vector (and mask) equals the input exactly.
    std::optional<std::uint32_t> find_center(std::span<const double> input) const;

    // Monotonically increasing revision; bumped by every mutation. Lets
    // callers detect stale traces.
    std::uint64_t revision() const { return revision_; }

    // Direct mutable access for deserialization.
    void restore_node(Node node);
    void set_revision(std::uint64_t r) { revision_ = r; }

private:
    void check_arity(std::size_t got) const;
    bool ordered_before(const Candidate& a, const Candidate& b) const;

    LayerConfig cfg_;
    std::vector<Node> nodes_;
    std::uint64_t revision_ = 0;
};

}  // namespace arn

#endif
