#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ndnfwd/errors.hpp"
#include "ndnfwd/rng.hpp"
#include "ndnfwd/strategy.hpp"

namespace ndnfwd {

// Everything a forwarding policy may look at when picking an egress face.
// `candidates`, `states` and `costs` are index-aligned; candidate entries are
// face indices on the owning node.
struct PolicyContext {
    int content_class = 0;
    std::span<const std::size_t> candidates;
    std::span<const InterfaceState> states;
    std::span<const unsigned> costs;  // FIB path cost per candidate, in hops
    Rng* rng = nullptr;
};

class ForwarderPolicy {
public:
    virtual ~ForwarderPolicy() = default;

    // Returns the chosen face index. `ctx.candidates` is never empty.
    virtual std::size_t choose_face(const PolicyContext& ctx) = 0;

    // Data came back for an Interest the node forwarded on `face`.
    virtual void on_data(int content_class, std::size_t face, double rtt) {
        (void)content_class;
        (void)face;
        (void)rtt;
    }

    // The pending Interest forwarded on `face` timed out.
    virtual void on_timeout(int content_class, std::size_t face) {
        (void)content_class;
        (void)face;
    }
};

// The adaptive strategy this project is built around: reward-driven
// probability updates with smoothed per-face delay estimates.
class DrrMdpfPolicy final : public ForwarderPolicy {
public:
    DrrMdpfPolicy(std::size_t face_count, double lambda_r, double lambda_smooth,
                  RewardMode reward_mode, SelectionMode selection_mode)
        : table_(face_count, lambda_r, lambda_smooth, reward_mode, selection_mode) {}

    std::size_t choose_face(const PolicyContext& ctx) override {
        table_.init_class(ctx.content_class);
        std::vector<InterfaceState> states(ctx.states.begin(), ctx.states.end());
        // The policy's own delay estimate overrides the caller's placeholder.
        for (std::size_t i = 0; i < ctx.candidates.size(); ++i)
            states[i].delay = table_.delay(ctx.content_class, ctx.candidates[i]);
        return select_interface(table_, ctx.content_class, ctx.candidates,
                                normalized_state(states), *ctx.rng);
    }

    void on_data(int content_class, std::size_t face, double rtt) override {
        table_.init_class(content_class);
        if (rtt > 0.0)
            record_rtt(table_, content_class, face, rtt);
        positive_feedback(table_, content_class, face);
    }

    void on_timeout(int content_class, std::size_t face) override {
        table_.init_class(content_class);
        negative_feedback(table_, content_class, face);
    }

    StrategyTable& table() { return table_; }
    const StrategyTable& table() const { return table_; }

private:
    StrategyTable table_;
};

// Single lowest-cost face, ties to the lowest index. No adaptation.
class BestRoutePolicy final : public ForwarderPolicy {
public:
    std::size_t choose_face(const PolicyContext& ctx) override {
        std::size_t best = 0;
        for (std::size_t i = 1; i < ctx.candidates.size(); ++i) {
            if (ctx.costs[i] < ctx.costs[best] ||
                (ctx.costs[i] == ctx.costs[best] &&
                 ctx.candidates[i] < ctx.candidates[best]))
                best = i;
        }
        return ctx.candidates[best];
    }
};

// Uniform draw over the candidate faces on every Interest.
class UniformRandomPolicy final : public ForwarderPolicy {
public:
    std::size_t choose_face(const PolicyContext& ctx) override {
        return ctx.candidates[std::size_t(
            ctx.rng->below(std::uint64_t(ctx.candidates.size())))];
    }
};

// Spreads Interests of a class evenly: always the candidate that has carried
// the fewest Interests of that class so far, ties to the lowest face index.
class MultipathRankPolicy final : public ForwarderPolicy {
public:
    std::size_t choose_face(const PolicyContext& ctx) override {
        std::vector<std::uint64_t>& counts = counts_[ctx.content_class];
        std::size_t best = 0;
        for (std::size_t i = 1; i < ctx.candidates.size(); ++i) {
            const std::uint64_t cb = count(counts, ctx.candidates[best]);
            const std::uint64_t ci = count(counts, ctx.candidates[i]);
            if (ci < cb || (ci == cb && ctx.candidates[i] < ctx.candidates[best]))
                best = i;
        }
        const std::size_t face = ctx.candidates[best];
        if (counts.size() <= face)
            counts.resize(face + 1, 0);
        ++counts[face];
        return face;
    }

private:
    static std::uint64_t count(const std::vector<std::uint64_t>& counts,
                               std::size_t face) {
        return face < counts.size() ? counts[face] : 0;
    }

    std::unordered_map<int, std::vector<std::uint64_t>> counts_;
};

// Per-face success weight, sampled proportionally. Data renews the weight
// toward 1, a timeout decays it multiplicatively.
class StochasticAdaptivePolicy final : public ForwarderPolicy {
public:
    std::size_t choose_face(const PolicyContext& ctx) override {
        std::vector<double>& w = weights_[ctx.content_class];
        double total = 0.0;
        for (std::size_t c : ctx.candidates)
            total += weight(w, c);
        const double u = ctx.rng->uniform() * total;
        double cumulative = 0.0;
        for (std::size_t i = 0; i + 1 < ctx.candidates.size(); ++i) {
            cumulative += weight(w, ctx.candidates[i]);
            if (u < cumulative)
                return ctx.candidates[i];
        }
        return ctx.candidates.back();
    }

    void on_data(int content_class, std::size_t face, double) override {
        double& w = slot(weights_[content_class], face);
        w = kDecay * w + (1.0 - kDecay);
    }

    void on_timeout(int content_class, std::size_t face) override {
        double& w = slot(weights_[content_class], face);
        w = kDecay * w;
    }

private:
    static constexpr double kDecay = 0.9;

    static double weight(const std::vector<double>& w, std::size_t face) {
        return face < w.size() ? w[face] : 1.0;
    }
    static double& slot(std::vector<double>& w, std::size_t face) {
        if (w.size() <= face)
            w.resize(face + 1, 1.0);
        return w[face];
    }

    std::unordered_map<int, std::vector<double>> weights_;
};

enum class StrategyName {
    DrrMdpf,
    BestRoute,
    UniformRandom,
    MultipathRank,
    StochasticAdaptive,
};

inline std::string to_string(StrategyName s) {
    switch (s) {
    case StrategyName::DrrMdpf: return "drr-mdpf";
    case StrategyName::BestRoute: return "best-route";
    case StrategyName::UniformRandom: return "uniform-random";
    case StrategyName::MultipathRank: return "rfa-like";
    case StrategyName::StochasticAdaptive: return "saf-like";
    }
    throw UsageError("to_string: bad StrategyName");
}

inline StrategyName strategy_from_string(const std::string& s) {
    if (s == "drr-mdpf") return StrategyName::DrrMdpf;
    if (s == "best-route") return StrategyName::BestRoute;
    if (s == "uniform-random") return StrategyName::UniformRandom;
    if (s == "rfa-like") return StrategyName::MultipathRank;
    if (s == "saf-like") return StrategyName::StochasticAdaptive;
    throw UsageError("unknown strategy '" + s + "'");
}

struct PolicyParams {
    double lambda_r = 0.9;
    double lambda_smooth = 0.1;
    RewardMode reward_mode = RewardMode::AsWritten;
    SelectionMode selection_mode = SelectionMode::Argmax;
};

inline std::unique_ptr<ForwarderPolicy> make_policy(StrategyName name,
                                                    std::size_t face_count,
                                                    const PolicyParams& params) {
    switch (name) {
    case StrategyName::DrrMdpf:
        return std::make_unique<DrrMdpfPolicy>(face_count, params.lambda_r,
                                               params.lambda_smooth,
                                               params.reward_mode,
                                               params.selection_mode);
    case StrategyName::BestRoute:
        return std::make_unique<BestRoutePolicy>();
    case StrategyName::UniformRandom:
        return std::make_unique<UniformRandomPolicy>();
    case StrategyName::MultipathRank:
        return std::make_unique<MultipathRankPolicy>();
    case StrategyName::StochasticAdaptive:
        return std::make_unique<StochasticAdaptivePolicy>();
    }
    throw UsageError("make_policy: bad StrategyName");
}

} // namespace ndnfwd
