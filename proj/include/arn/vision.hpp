#ifndef ARN_VISION_HPP
#define ARN_VISION_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arn/dataset.hpp"
#include "arn/layer.hpp"

namespace arn {

// ---------------------------------------------------------------------------
// Tiling
// ---------------------------------------------------------------------------

struct TilingSpec {
    std::size_t image_height = 28;
    std::size_t image_width = 28;
    std::size_t grid_rows = 4;
    std::size_t grid_cols = 4;
    // Emission order of tiles; empty means row-major top-left to bottom-right.
    std::vector<std::uint32_t> order;

    std::size_t tile_count() const { return grid_rows * grid_cols; }
    std::size_t tile_height() const { return image_height / grid_rows; }
    std::size_t tile_width() const { return image_width / grid_cols; }
    std::size_t tile_pixels() const { return tile_height() * tile_width(); }

    void validate() const;  // divisibility and permutation validity

    bool operator==(const TilingSpec&) const = default;
};

// Flattened tile vectors (row-major within each tile), emitted in spec.order.
std::vector<std::vector<double>> tile_image(const Image& image,
                                            const TilingSpec& spec);

// ---------------------------------------------------------------------------
// Feature lists
// ---------------------------------------------------------------------------

// Entry for a tile without an L1 winner.
inline constexpr double kNoWinnerSentinel = 1.0;

// Spatially ordered list of L1 winner indices, one per tile, normalized by
// the capacity constant K_cap; exactly 1.0 where the tile had no winner.
struct FeatureList {
    std::vector<double> values;

    bool operator==(const FeatureList&) const = default;
};

enum class ReorderOp { Identity, Reverse, MirrorH, MirrorV };

// Permutes the list on the grid_rows x grid_cols grid. Reverse is the 180
// degree tile-order rotation; both mirrors and Reverse are involutions.
FeatureList reorder_features(const FeatureList& list, ReorderOp op,
                             const TilingSpec& spec);

// ---------------------------------------------------------------------------
// Input perturbation and masking
// ---------------------------------------------------------------------------

// Rotation about the image center, nearest-neighbor resampling, background 0.
// |angle_degrees| <= 15.
Image perturb_image(const Image& image, double angle_degrees);

struct MaskedTile {
    std::vector<std::uint32_t> kept;  // indices with value > pixel_floor
    std::vector<double> values;
};

MaskedTile mask_tile(std::span<const double> tile, double pixel_floor);

// ---------------------------------------------------------------------------
// Classification outcome
// ---------------------------------------------------------------------------

enum class RecognitionStatus { Correct, Wrong, Multiple, Unrecognized };

struct ClassificationOutcome {
    RecognitionStatus status = RecognitionStatus::Unrecognized;
    // Distinct labels tied at the top output, ascending; weight 1/m each.
    std::vector<int> labels;

    std::size_t share_count() const { return labels.size(); }
    bool recognized() const { return !labels.empty(); }
    bool includes(int label) const;
};

struct TraceEntry {
    std::uint32_t tile = 0;
    std::optional<std::uint32_t> l1_winner;
    double l1_output = 0.0;
};

// Per-recognition record of winning nodes across both layers. Holds the tile
// vectors so the decision can be replayed against the (unchanged) model.
struct TracePath {
    std::vector<TraceEntry> tiles;
    FeatureList features;
    std::optional<std::uint32_t> l2_winner;
    double l2_output = 0.0;
    std::optional<int> predicted_label;
    std::uint64_t revision = 0;
    std::vector<std::vector<double>> tile_inputs;
};

// ---------------------------------------------------------------------------
// Two-layer network
// ---------------------------------------------------------------------------

struct NetworkConfig {
    TilingSpec tiling;
    // Recognition threshold on the normalized scale; applies to the class
    // layer and is the value swept in threshold experiments.
    double threshold = 0.9;
    // Feature-layer threshold; <= 0 derives 0.7 + 0.3 * threshold, which
    // keeps features near-exact at the default threshold.
    double l1_threshold = 0.0;
    // Minimum normalized output an L1 feature must reach to contribute to a
    // class node (a node below its trigger passes nothing upward); <= 0
    // derives the half-power point 1/sqrt(2).
    double contribution_gate = 0.0;
    double rho = 2.42;
    double k = 1.0;
    double k_cap = 65536.0;
    TuningPolicy l1_tuning = TuningPolicy::Frozen;
    std::uint64_t min_hits_for_tuning = 5;
    double rho_min = 0.5;
    double rho_max = 50.0;
    double sigma_floor = 1e-3;
    double tie_epsilon = 1e-6;
    double relax_factor = 0.95;
    std::optional<double> mask_floor;   // input masking disabled when absent
    std::vector<double> perturb_angles; // augmentation rotations, degrees
    int max_consolidation_passes = 32;

    double effective_l1_threshold() const {
        return l1_threshold > 0.0 ? l1_threshold : 0.7 + 0.3 * threshold;
    }
    double effective_gate() const {
        return contribution_gate > 0.0 ? contribution_gate : 0.70710678118654752;
    }
    void validate() const;

    bool operator==(const NetworkConfig&) const = default;
};

// Labeled class node. Each tile position holds an append-only list of L1
// feature references; the position's resonance on an image is the maximum
// triggered output among its references, so absorbing a matching image
// dilates the node's coverage without ever raising its peak above 1.
struct ClassNode {
    std::uint32_t id = 0;
    int label = 0;
    std::uint64_t hit_count = 0;
    std::vector<std::vector<std::uint32_t>> refs;  // [tile] -> L1 node ids

    bool operator==(const ClassNode&) const = default;
};

struct TrainingReport {
    std::size_t images = 0;          // original training images
    std::size_t augmented = 0;       // perturbed copies added
    std::size_t skipped = 0;         // unrepresentable (fully masked) images
    int consolidation_passes = 0;
    std::size_t unresolved = 0;      // still failing self-recognition at cap
    std::size_t l1_nodes = 0;
    std::size_t l2_nodes = 0;
    double seconds = 0.0;
};

class Network {
public:
    explicit Network(NetworkConfig cfg);

    const NetworkConfig& config() const { return cfg_; }
    const Layer& l1() const { return l1_; }
    const std::vector<ClassNode>& l2() const { return l2_; }
    bool trained() const { return !l1_.empty() && !l2_.empty(); }
    std::uint64_t revision() const { return l1_.revision() + l2_revision_; }

    // Supervised training: every image runs tile -> L1 growth -> feature
    // list -> class-layer growth/absorption, followed by grow-only
    // consolidation passes until every training image is self-recognized.
    TrainingReport train(const LabeledImageSet& data);

    // One training step; exposed for incremental use.
    void train_image(const Image& image, int label, bool grow_only = false,
                     bool force_exact = false);

    std::pair<ClassificationOutcome, TracePath> classify(
        const Image& image, std::optional<int> true_label = std::nullopt) const;

    // Human-readable rendering of a trace; replays the recorded outputs
    // against the current model and throws VersionError if the model changed
    // since the trace was taken.
    std::string trace_explain(const TracePath& path) const;

    // Deserialization hooks.
    Layer& mutable_l1() { return l1_; }
    void restore_class_node(ClassNode node);
    void set_l2_revision(std::uint64_t r) { l2_revision_ = r; }
    std::uint64_t l2_revision() const { return l2_revision_; }

private:
    struct TileStep {
        std::optional<std::uint32_t> feature;  // winner or created id
        bool sentinel = false;                 // fully masked tile
    };

    std::vector<double> class_outputs(
        const std::vector<std::vector<double>>& tile_outputs) const;
    TileStep step_tile(std::span<const double> tile, bool grow_only,
                       bool force_exact);
    bool self_recognized(const Image& image, int label) const;

    NetworkConfig cfg_;
    Layer l1_;
    std::vector<ClassNode> l2_;
    std::uint64_t l2_revision_ = 0;
};

// Deterministic helper: runs fn(i) for i in [0, n) across `workers` threads,
// each result slot written exactly once (merge order is by index).
void parallel_for_index(std::size_t n, unsigned workers,
                        const std::function<void(std::size_t)>& fn);

}  // namespace arn

#endif
