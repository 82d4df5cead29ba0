#include "arn/layer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "arn/errors.hpp"

namespace arn {

void LayerConfig::validate() const {
    if (input_arity == 0) throw ParameterError("layer arity must be positive");
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ParameterError("layer threshold must lie in (0, 1), got " +
                             std::to_string(threshold));
    }
    if (!(default_rho > 0.0)) throw ParameterError("default_rho must be positive");
    if (!(k > 0.0 && k < 2.0)) {
        throw ParameterError("layer k must lie in (0, 2) for sigmoid resonators");
    }
    if (!(rho_min > 0.0 && rho_max >= rho_min)) {
        throw ParameterError("invalid rho clamp range");
    }
    if (!(sigma_floor > 0.0)) throw ParameterError("sigma_floor must be positive");
    if (!(tie_epsilon >= 0.0)) throw ParameterError("tie_epsilon must be >= 0");
    if (!(relax_factor > 0.0 && relax_factor <= 1.0)) {
        throw ParameterError("relax_factor must lie in (0, 1]");
    }
}

Layer::Layer(LayerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void Layer::check_arity(std::size_t got) const {
    if (got != cfg_.input_arity) {
        throw StructureError("input arity " + std::to_string(got) +
                             " does not match layer arity " +
                             std::to_string(cfg_.input_arity));
    }
}

double Layer::aggregate(const Node& node, std::span<const double> input) const {
    check_arity(input.size());
    const std::size_t n = node.arity();
    if (n == 0) throw StructureError("node has no resonators");
    const double k = cfg_.k;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = input[node.dims.empty() ? j : node.dims[j]];
        const ResonatorSpec& r = node.resonators[j];
        const double X = 1.0 / (1.0 + std::exp(-r.rho * (x - r.center)));
        sum += X * (k - X);
    }
    return 4.0 * sum / (static_cast<double>(n) * k * k);
}

std::vector<double> Layer::outputs(std::span<const double> input) const {
    std::vector<double> out;
    out.reserve(nodes_.size());
    for (const Node& n : nodes_) out.push_back(aggregate(n, input));
    return out;
}

bool Layer::ordered_before(const Candidate& a, const Candidate& b) const {
    if (a.output != b.output) return a.output > b.output;
    const std::uint64_t ha = nodes_[a.id].hit_count;
    const std::uint64_t hb = nodes_[b.id].hit_count;
    if (ha != hb) return ha > hb;
    return a.id < b.id;
}

Recognition Layer::present(std::span<const double> input) const {
    check_arity(input.size());
    Recognition rec;
    for (const Node& n : nodes_) {
        const double y = aggregate(n, input);
        if (y >= cfg_.threshold) rec.candidates.push_back({n.id, y});
    }
    std::sort(rec.candidates.begin(), rec.candidates.end(),
              [this](const Candidate& a, const Candidate& b) {
                  return ordered_before(a, b);
              });
    if (!rec.candidates.empty()) {
        rec.winner = rec.candidates.front().id;
        rec.output = rec.candidates.front().output;
    }
    return rec;
}

std::uint32_t Layer::resolve_ambiguity(const std::vector<Candidate>& candidates) const {
    if (candidates.empty()) {
        throw StructureError("resolve_ambiguity on empty candidate list");
    }
    const Candidate* best = &candidates.front();
    for (const Candidate& c : candidates) {
        if (ordered_before(c, *best)) best = &c;
    }
    return best->id;
}

std::optional<std::uint32_t> Layer::find_center(std::span<const double> input) const {
    check_arity(input.size());
    for (const Node& n : nodes_) {
        if (!n.dims.empty()) continue;  // masked nodes never equal a full vector
        bool same = n.arity() == input.size();
        for (std::size_t j = 0; same && j < input.size(); ++j) {
            same = n.resonators[j].center == input[j];
        }
        if (same) return n.id;
    }
    return std::nullopt;
}

std::uint32_t Layer::create_node(std::span<const double> input,
                                 std::optional<int> label) {
    check_arity(input.size());
    if (find_center(input)) {
        throw StructureError("node with identical center vector already exists");
    }
    Node n;
    n.id = static_cast<std::uint32_t>(nodes_.size());
    n.label = label;
    n.hit_count = 1;
    n.resonators.reserve(input.size());
    for (double v : input) {
        n.resonators.push_back(ResonatorSpec::sigmoid(v, cfg_.default_rho, cfg_.k));
    }
    n.stats.reset(input);
    nodes_.push_back(std::move(n));
    ++revision_;
    return nodes_.back().id;
}

std::uint32_t Layer::create_node_masked(std::span<const std::uint32_t> dims,
                                        std::span<const double> values,
                                        std::optional<int> label) {
    if (dims.empty()) throw StructureError("masked node needs at least one dimension");
    if (dims.size() != values.size()) {
        throw StructureError("masked node dims/values size mismatch");
    }
    for (std::uint32_t d : dims) {
        if (d >= cfg_.input_arity) throw StructureError("masked dim out of range");
    }
    for (const Node& n : nodes_) {
        if (n.dims.size() != dims.size()) continue;
        bool same = std::equal(n.dims.begin(), n.dims.end(), dims.begin());
        for (std::size_t j = 0; same && j < values.size(); ++j) {
            same = n.resonators[j].center == values[j];
        }
        if (same) throw StructureError("masked node duplicates an existing one");
    }
    Node n;
    n.id = static_cast<std::uint32_t>(nodes_.size());
    n.label = label;
    n.hit_count = 1;
    n.dims.assign(dims.begin(), dims.end());
    n.resonators.reserve(values.size());
    for (double v : values) {
        n.resonators.push_back(ResonatorSpec::sigmoid(v, cfg_.default_rho, cfg_.k));
    }
    n.stats.reset(values);
    nodes_.push_back(std::move(n));
    ++revision_;
    return nodes_.back().id;
}

void Layer::tune_node(std::uint32_t id) {
    Node& n = nodes_.at(id);
    if (n.stats.count < 2) return;  // variance undefined, leave untouched
    for (std::size_t j = 0; j < n.arity(); ++j) {
        ResonatorSpec& r = n.resonators[j];
        r.center = n.stats.mean[j];
        const double sigma = std::max(n.stats.stddev(j), cfg_.sigma_floor);
        r.rho = std::clamp(kRhoSigmaRatio / sigma, cfg_.rho_min, cfg_.rho_max);
    }
    ++revision_;
}

Recognition Layer::train_step(std::span<const double> input,
                              std::optional<int> label) {
    Recognition rec = present(input);
    if (!rec.winner) {
        rec.created = create_node(input, label);
        return rec;
    }
    Node& w = nodes_[*rec.winner];
    if (label && w.label && *w.label != *label) {
        // Conflicting label: grow a correctly labeled node instead of
        // retuning, unless the input duplicates an existing center exactly
        // (contradictory training data cannot be represented).
        if (!find_center(input)) {
            rec.created = create_node(input, label);
        }
        return rec;
    }
    if (label && !w.label) w.label = label;
    ++w.hit_count;
    w.stats.add(input);
    ++revision_;
    if (cfg_.tuning == TuningPolicy::StatsTuning) {
        if (w.hit_count >= std::max<std::uint64_t>(2, cfg_.min_hits_for_tuning)) {
            tune_node(w.id);
        }
        // A same-label runner-up inside the tie band relaxes the winner's
        // resonance to strengthen future separation.
        if (rec.candidates.size() > 1) {
            const Candidate& runner = rec.candidates[1];
            if (rec.output - runner.output <= cfg_.tie_epsilon &&
                nodes_[runner.id].label == w.label) {
                for (ResonatorSpec& r : w.resonators) {
                    r.rho = std::max(r.rho * cfg_.relax_factor, cfg_.rho_min);
                }
            }
        }
    }
    return rec;
}

void Layer::restore_node(Node node) {
    if (node.id != nodes_.size()) {
        throw StructureError("restored node ids must be dense and ordered");
    }
    nodes_.push_back(std::move(node));
}

}  // namespace arn
