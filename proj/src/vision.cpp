#include "arn/vision.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "arn/errors.hpp"

namespace arn {

// ---------------------------------------------------------------------------
// Tiling
// ---------------------------------------------------------------------------

void TilingSpec::validate() const {
    if (grid_rows == 0 || grid_cols == 0) {
        throw ParameterError("tiling grid must be non-empty");
    }
    if (image_height % grid_rows != 0 || image_width % grid_cols != 0) {
        throw ParameterError("image dimensions must be divisible by the grid");
    }
    if (!order.empty()) {
        if (order.size() != tile_count()) {
            throw ParameterError("tile order length must equal the tile count");
        }
        std::vector<bool> seen(order.size(), false);
        for (std::uint32_t t : order) {
            if (t >= order.size() || seen[t]) {
                throw ParameterError("tile order is not a permutation");
            }
            seen[t] = true;
        }
    }
}

std::vector<std::vector<double>> tile_image(const Image& image,
                                            const TilingSpec& spec) {
    spec.validate();
    if (image.height != spec.image_height || image.width != spec.image_width) {
        throw StructureError("image dimensions do not match the tiling spec");
    }
    const std::size_t th = spec.tile_height();
    const std::size_t tw = spec.tile_width();
    std::vector<std::vector<double>> tiles;
    tiles.reserve(spec.tile_count());
    for (std::size_t t = 0; t < spec.tile_count(); ++t) {
        const std::size_t idx = spec.order.empty() ? t : spec.order[t];
        const std::size_t gr = idx / spec.grid_cols;
        const std::size_t gc = idx % spec.grid_cols;
        std::vector<double> tile;
        tile.reserve(th * tw);
        for (std::size_t r = 0; r < th; ++r) {
            for (std::size_t c = 0; c < tw; ++c) {
                tile.push_back(image.at(gr * th + r, gc * tw + c));
            }
        }
        tiles.push_back(std::move(tile));
    }
    return tiles;
}

// ---------------------------------------------------------------------------
// Feature list reordering
// ---------------------------------------------------------------------------

FeatureList reorder_features(const FeatureList& list, ReorderOp op,
                             const TilingSpec& spec) {
    spec.validate();
    const std::size_t rows = spec.grid_rows;
    const std::size_t cols = spec.grid_cols;
    if (list.values.size() != rows * cols) {
        throw StructureError("feature list length does not match the grid");
    }
    FeatureList out;
    out.values.resize(list.values.size());
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            std::size_t sr = r, sc = c;
            switch (op) {
                case ReorderOp::Identity: break;
                case ReorderOp::Reverse:   // 180 degree rotation of tile order
                    sr = rows - 1 - r;
                    sc = cols - 1 - c;
                    break;
                case ReorderOp::MirrorH:
                    sc = cols - 1 - c;
                    break;
                case ReorderOp::MirrorV:
                    sr = rows - 1 - r;
                    break;
            }
            out.values[r * cols + c] = list.values[sr * cols + sc];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Perturbation and masking
// ---------------------------------------------------------------------------

Image perturb_image(const Image& image, double angle_degrees) {
    if (std::abs(angle_degrees) > 15.0) {
        throw ParameterError("perturbation angle must satisfy |angle| <= 15");
    }
    const double rad = angle_degrees * std::acos(-1.0) / 180.0;
    const double cy = (static_cast<double>(image.height) - 1.0) / 2.0;
    const double cx = (static_cast<double>(image.width) - 1.0) / 2.0;
    const double cs = std::cos(rad), sn = std::sin(rad);
    Image out;
    out.height = image.height;
    out.width = image.width;
    out.pixels.assign(image.pixels.size(), 0.0);
    for (std::size_t r = 0; r < image.height; ++r) {
        for (std::size_t c = 0; c < image.width; ++c) {
            // inverse mapping with nearest-neighbor sampling
            const double dy = static_cast<double>(r) - cy;
            const double dx = static_cast<double>(c) - cx;
            const double sy = cy + dy * cs - dx * sn;
            const double sx = cx + dy * sn + dx * cs;
            const long ry = std::lround(sy);
            const long rx = std::lround(sx);
            if (ry >= 0 && ry < static_cast<long>(image.height) && rx >= 0 &&
                rx < static_cast<long>(image.width)) {
                out.at(r, c) = image.at(ry, rx);
            }
        }
    }
    return out;
}

MaskedTile mask_tile(std::span<const double> tile, double pixel_floor) {
    if (!(pixel_floor >= 0.0 && pixel_floor < 1.0)) {
        throw ParameterError("pixel floor must lie in [0, 1)");
    }
    MaskedTile out;
    for (std::size_t i = 0; i < tile.size(); ++i) {
        if (tile[i] > pixel_floor) {
            out.kept.push_back(static_cast<std::uint32_t>(i));
            out.values.push_back(tile[i]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

bool ClassificationOutcome::includes(int label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
}

void NetworkConfig::validate() const {
    tiling.validate();
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ParameterError("threshold must lie in (0, 1)");
    }
    if (!(rho > 0.0)) throw ParameterError("rho must be positive");
    if (!(k_cap > 0.0)) throw ParameterError("k_cap must be positive");
    if (l1_threshold > 0.0 && !(l1_threshold < 1.0)) {
        throw ParameterError("l1 threshold must lie in (0, 1)");
    }
    if (mask_floor && !(*mask_floor >= 0.0 && *mask_floor < 1.0)) {
        throw ParameterError("mask floor must lie in [0, 1)");
    }
    for (double a : perturb_angles) {
        if (std::abs(a) > 15.0) {
            throw ParameterError("perturbation angles must satisfy |angle| <= 15");
        }
    }
    if (max_consolidation_passes < 0) {
        throw ParameterError("max_consolidation_passes must be >= 0");
    }
}

namespace {

LayerConfig feature_layer_config(const NetworkConfig& cfg) {
    LayerConfig lc;
    lc.input_arity = cfg.tiling.tile_pixels();
    lc.threshold = cfg.effective_l1_threshold();
    lc.default_rho = cfg.rho;
    lc.k = cfg.k;
    lc.tuning = cfg.l1_tuning;
    lc.min_hits_for_tuning = cfg.min_hits_for_tuning;
    lc.rho_min = cfg.rho_min;
    lc.rho_max = cfg.rho_max;
    lc.sigma_floor = cfg.sigma_floor;
    lc.tie_epsilon = cfg.tie_epsilon;
    lc.relax_factor = cfg.relax_factor;
    return lc;
}

}  // namespace

Network::Network(NetworkConfig cfg)
    : cfg_(std::move(cfg)), l1_(feature_layer_config(cfg_)) {
    cfg_.validate();
}

std::vector<double> Network::class_outputs(
    const std::vector<std::vector<double>>& tile_outputs) const {
    const double gate = cfg_.effective_gate();
    std::vector<double> out(l2_.size(), 0.0);
    for (std::size_t j = 0; j < l2_.size(); ++j) {
        const ClassNode& node = l2_[j];
        double sum = 0.0;
        std::size_t active = 0;
        for (std::size_t t = 0; t < node.refs.size(); ++t) {
            if (node.refs[t].empty()) continue;  // masked-away position
            ++active;
            double best = 0.0;
            for (std::uint32_t id : node.refs[t]) {
                best = std::max(best, tile_outputs[t][id]);
            }
            if (best >= gate) sum += best;  // untriggered features pass nothing
        }
        out[j] = active ? sum / static_cast<double>(active) : 0.0;
    }
    return out;
}

Network::TileStep Network::step_tile(std::span<const double> tile,
                                     bool grow_only, bool force_exact) {
    TileStep step;
    if (cfg_.mask_floor) {
        MaskedTile m = mask_tile(tile, *cfg_.mask_floor);
        if (m.kept.empty()) {
            step.sentinel = true;
            return step;
        }
        Recognition rec = l1_.present(tile);
        const bool exact = rec.winner && rec.output == 1.0;
        if (rec.winner && (exact || !force_exact)) {
            step.feature = *rec.winner;
            return step;
        }
        // No (exact enough) match: grow a masked feature unless it already
        // exists.
        for (const Node& n : l1_.nodes()) {
            if (n.dims == m.kept) {
                bool same = true;
                for (std::size_t i = 0; same && i < m.values.size(); ++i) {
                    same = n.resonators[i].center == m.values[i];
                }
                if (same) {
                    step.feature = n.id;
                    return step;
                }
            }
        }
        step.feature = l1_.create_node_masked(m.kept, m.values);
        return step;
    }

    if (force_exact) {
        Recognition rec = l1_.present(tile);
        if (rec.winner && rec.output == 1.0) {
            step.feature = *rec.winner;
        } else if (auto dup = l1_.find_center(tile)) {
            step.feature = *dup;
        } else {
            step.feature = l1_.create_node(tile);
        }
        return step;
    }
    if (grow_only) {
        Recognition rec = l1_.present(tile);
        step.feature = rec.winner ? *rec.winner : l1_.create_node(tile);
        return step;
    }
    Recognition rec = l1_.train_step(tile);
    step.feature = rec.winner ? *rec.winner : *rec.created;
    return step;
}

void Network::train_image(const Image& image, int label, bool grow_only,
                          bool force_exact) {
    const auto tiles = tile_image(image, cfg_.tiling);
    const std::size_t n_tiles = tiles.size();

    std::vector<TileStep> steps;
    steps.reserve(n_tiles);
    for (const auto& t : tiles) steps.push_back(step_tile(t, grow_only, force_exact));

    bool any_feature = false;
    for (const auto& s : steps) any_feature |= !s.sentinel;
    if (!any_feature) {
        throw StateError("image is fully masked; nothing to learn from");
    }

    std::vector<std::vector<double>> touts;
    touts.reserve(n_tiles);
    for (const auto& t : tiles) touts.push_back(l1_.outputs(t));

    const std::vector<double> out = class_outputs(touts);

    // Best same-label candidate at or above the recognition threshold, under
    // the (output desc, hits desc, id asc) order.
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < l2_.size(); ++j) {
        if (l2_[j].label != label || out[j] < cfg_.threshold) continue;
        if (!best) {
            best = j;
            continue;
        }
        const ClassNode& a = l2_[j];
        const ClassNode& b = l2_[*best];
        if (out[j] > out[*best] ||
            (out[j] == out[*best] &&
             (a.hit_count > b.hit_count ||
              (a.hit_count == b.hit_count && a.id < b.id)))) {
            best = j;
        }
    }

    if (best) {
        // Absorb: dilate the node's per-position coverage with this image's
        // features. Output stays bounded by 1, so strengthening never
        // destabilizes the node.
        ClassNode& node = l2_[*best];
        ++node.hit_count;
        for (std::size_t t = 0; t < n_tiles; ++t) {
            if (!steps[t].feature) continue;
            auto& r = node.refs[t];
            if (std::find(r.begin(), r.end(), *steps[t].feature) == r.end()) {
                r.push_back(*steps[t].feature);
            }
        }
        ++l2_revision_;
        return;
    }

    ClassNode node;
    node.id = static_cast<std::uint32_t>(l2_.size());
    node.label = label;
    node.hit_count = 1;
    node.refs.resize(n_tiles);
    for (std::size_t t = 0; t < n_tiles; ++t) {
        if (steps[t].feature) node.refs[t].push_back(*steps[t].feature);
    }
    l2_.push_back(std::move(node));
    ++l2_revision_;
}

std::pair<ClassificationOutcome, TracePath> Network::classify(
    const Image& image, std::optional<int> true_label) const {
    if (!trained()) {
        throw StateError("classify requires a trained network");
    }
    const auto tiles = tile_image(image, cfg_.tiling);

    TracePath path;
    path.revision = revision();
    path.tile_inputs = tiles;
    path.features.values.reserve(tiles.size());

    std::vector<std::vector<double>> touts;
    touts.reserve(tiles.size());
    const double t1 = cfg_.effective_l1_threshold();
    for (std::size_t t = 0; t < tiles.size(); ++t) {
        touts.push_back(l1_.outputs(tiles[t]));
        // L1 winner for the trace and the feature list artifact.
        const auto& outs = touts.back();
        std::optional<std::uint32_t> win;
        for (std::uint32_t id = 0; id < outs.size(); ++id) {
            if (outs[id] < t1) continue;
            if (!win || outs[id] > outs[*win] ||
                (outs[id] == outs[*win] &&
                 (l1_.node(id).hit_count > l1_.node(*win).hit_count))) {
                win = id;
            }
        }
        TraceEntry e;
        e.tile = static_cast<std::uint32_t>(t);
        e.l1_winner = win;
        e.l1_output = win ? outs[*win] : 0.0;
        path.tiles.push_back(e);
        if (win && static_cast<double>(*win) >= cfg_.k_cap) {
            throw StructureError("feature id exceeds K_cap");
        }
        path.features.values.push_back(
            win ? static_cast<double>(*win) / cfg_.k_cap : kNoWinnerSentinel);
    }

    const std::vector<double> out = class_outputs(touts);

    ClassificationOutcome outcome;
    std::optional<std::size_t> top;
    for (std::size_t j = 0; j < l2_.size(); ++j) {
        if (out[j] < cfg_.threshold) continue;
        if (!top || out[j] > out[*top] ||
            (out[j] == out[*top] &&
             (l2_[j].hit_count > l2_[*top].hit_count ||
              (l2_[j].hit_count == l2_[*top].hit_count && j < *top)))) {
            top = j;
        }
    }
    if (!top) {
        outcome.status = RecognitionStatus::Unrecognized;
        return {outcome, path};
    }

    for (std::size_t j = 0; j < l2_.size(); ++j) {
        if (out[j] < cfg_.threshold) continue;
        if (out[*top] - out[j] <= cfg_.tie_epsilon) {
            if (std::find(outcome.labels.begin(), outcome.labels.end(),
                          l2_[j].label) == outcome.labels.end()) {
                outcome.labels.push_back(l2_[j].label);
            }
        }
    }
    std::sort(outcome.labels.begin(), outcome.labels.end());

    path.l2_winner = l2_[*top].id;
    path.l2_output = out[*top];
    path.predicted_label = l2_[*top].label;

    if (outcome.labels.size() > 1) {
        outcome.status = RecognitionStatus::Multiple;
    } else if (!true_label || outcome.labels.front() == *true_label) {
        outcome.status = RecognitionStatus::Correct;
    } else {
        outcome.status = RecognitionStatus::Wrong;
    }
    return {outcome, path};
}

bool Network::self_recognized(const Image& image, int label) const {
    const auto [outcome, path] = classify(image, label);
    if (outcome.status == RecognitionStatus::Correct) return true;
    return outcome.status == RecognitionStatus::Multiple && outcome.includes(label);
}

TrainingReport Network::train(const LabeledImageSet& data) {
    const auto t0 = std::chrono::steady_clock::now();
    if (data.size() == 0) throw ParameterError("training dataset is empty");

    TrainingReport report;
    report.images = data.size();

    // The training stream: each image followed by its perturbed copies.
    std::vector<std::pair<Image, int>> stream;
    stream.reserve(data.size() * (1 + cfg_.perturb_angles.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        stream.emplace_back(data.images[i], data.labels[i]);
        for (double a : cfg_.perturb_angles) {
            stream.emplace_back(perturb_image(data.images[i], a), data.labels[i]);
            ++report.augmented;
        }
    }

    for (const auto& [img, lab] : stream) {
        try {
            train_image(img, lab);
        } catch (const StateError&) {
            ++report.skipped;
        }
    }

    // Grow-only consolidation until every representable stream image is
    // recognized as (or tied with) its own label.
    for (int pass = 0; pass < cfg_.max_consolidation_passes; ++pass) {
        std::size_t fails = 0;
        for (const auto& [img, lab] : stream) {
            bool ok = false;
            try {
                ok = self_recognized(img, lab);
            } catch (const StateError&) {
                continue;  // unrepresentable image
            }
            if (!ok) {
                ++fails;
                try {
                    train_image(img, lab, /*grow_only=*/true, /*force_exact=*/true);
                } catch (const StateError&) {
                }
            }
        }
        report.consolidation_passes = pass + 1;
        if (fails == 0) break;
        report.unresolved = fails;
    }
    if (report.consolidation_passes > 0) {
        // A clean final pass leaves unresolved at zero.
        std::size_t fails = 0;
        for (const auto& [img, lab] : stream) {
            try {
                if (!self_recognized(img, lab)) ++fails;
            } catch (const StateError&) {
            }
        }
        report.unresolved = fails;
    }

    report.l1_nodes = l1_.size();
    report.l2_nodes = l2_.size();
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::string Network::trace_explain(const TracePath& path) const {
    if (path.revision != revision()) {
        throw VersionError("trace was recorded against revision " +
                           std::to_string(path.revision) +
                           " but the model is now at " + std::to_string(revision()));
    }
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    std::size_t missing = 0;
    for (const TraceEntry& e : path.tiles) {
        os << "tile " << e.tile;
        if (e.l1_winner) {
            // replay: the stored model must reproduce the recorded output
            const double y =
                l1_.aggregate(l1_.node(*e.l1_winner), path.tile_inputs[e.tile]);
            if (y != e.l1_output) {
                throw VersionError("replayed L1 output differs from the trace");
            }
            os << "  feature #" << *e.l1_winner << "  output " << e.l1_output;
        } else {
            os << "  no feature winner";
            ++missing;
        }
        os << "\n";
    }
    if (path.l2_winner) {
        os << "class node #" << *path.l2_winner << "  output " << path.l2_output
           << "  label " << *path.predicted_label << "\n";
    } else {
        os << "unrecognized (" << missing << " of " << path.tiles.size()
           << " tiles without winners)\n";
    }
    return os.str();
}

void Network::restore_class_node(ClassNode node) {
    if (node.id != l2_.size()) {
        throw StructureError("restored class node ids must be dense and ordered");
    }
    if (node.refs.size() != cfg_.tiling.tile_count()) {
        throw StructureError("restored class node has wrong tile count");
    }
    l2_.push_back(std::move(node));
}

void parallel_for_index(std::size_t n, unsigned workers,
                        const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace arn
