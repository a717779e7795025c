#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ndnfwd/errors.hpp"
#include "ndnfwd/prob.hpp"
#include "ndnfwd/rng.hpp"

namespace ndnfwd {

// Observation triple for one face: spare link capacity, Interests forwarded
// on the face that are still pending, and smoothed round-trip delay.
struct InterfaceState {
    double bandwidth_avail = 0.0;  // bits/second
    double unsatisfied = 0.0;      // pending Interest count
    double delay = 0.0;            // seconds
};

// Per-criterion normalization of a set of InterfaceStates: each column is
// scaled to sum to 1 across faces, an all-zero column becoming uniform.
struct NormalizedState {
    std::vector<double> beta;   // bandwidth share
    std::vector<double> theta;  // pending-Interest share
    std::vector<double> delta;  // delay share
};

inline NormalizedState normalized_state(const std::vector<InterfaceState>& raw) {
    if (raw.empty())
        throw UsageError("normalized_state: need at least one face");
    std::vector<double> b(raw.size()), c(raw.size()), d(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i].bandwidth_avail) || raw[i].bandwidth_avail < 0.0 ||
            !std::isfinite(raw[i].unsatisfied) || raw[i].unsatisfied < 0.0 ||
            !std::isfinite(raw[i].delay) || raw[i].delay < 0.0)
            throw UsageError("normalized_state: fields must be finite and non-negative");
        b[i] = raw[i].bandwidth_avail;
        c[i] = raw[i].unsatisfied;
        d[i] = raw[i].delay;
    }
    return NormalizedState{normalize(b).entries(), normalize(c).entries(),
                           normalize(d).entries()};
}

enum class RewardMode {
    AsWritten,   // R_l = delta_l + beta_l * theta_l
    Qualitative, // favors high bandwidth, low delay, few pending Interests
};

enum class SelectionMode { Argmax, Sample };

// Per-face reward scores from a normalized state.
//
// AsWritten applies the published combination verbatim. Qualitative is a
// documented alternative that scores the stated goal directly: each criterion
// contributes a share that sums to 1 across faces (bandwidth as-is, delay and
// pending counts through their complements), and the blended score is
// rescaled onto the simplex.
inline std::vector<double> interface_rewards(const NormalizedState& norm,
                                             RewardMode mode) {
    const std::size_t n = norm.beta.size();
    if (n == 0 || norm.theta.size() != n || norm.delta.size() != n)
        throw UsageError("interface_rewards: malformed normalized state");
    std::vector<double> rewards(n);
    if (mode == RewardMode::AsWritten) {
        for (std::size_t l = 0; l < n; ++l)
            rewards[l] = norm.delta[l] + norm.beta[l] * norm.theta[l];
        return rewards;
    }
    if (n == 1)
        return {1.0};
    for (std::size_t l = 0; l < n; ++l)
        rewards[l] = norm.beta[l] + (1.0 - norm.delta[l]) / double(n - 1) +
                     (1.0 - norm.theta[l]);
    return normalize(rewards).entries();
}

// Reward-weighted redistribution of selection probabilities:
// wpro_l = R_l * p_l / sum_j R_j * p_j. A zero denominator yields uniform.
inline ProbabilityVector weighted_probabilities(const std::vector<double>& rewards,
                                                const ProbabilityVector& probs) {
    if (rewards.size() != probs.size())
        throw UsageError("weighted_probabilities: length mismatch");
    std::vector<double> weighted(rewards.size());
    for (std::size_t l = 0; l < rewards.size(); ++l) {
        if (!std::isfinite(rewards[l]) || rewards[l] < 0.0)
            throw UsageError("weighted_probabilities: rewards must be non-negative");
        weighted[l] = rewards[l] * probs[l];
    }
    return normalize(weighted);
}

// Linear reward-inaction step: scale every loser by lambda_r and give the
// winner whatever mass that releases. Re-anchors the sum to exactly 1.
inline std::vector<double> linear_reward_inaction(const std::vector<double>& probs,
                                                  std::size_t winner, double lambda_r) {
    if (winner >= probs.size())
        throw UsageError("linear_reward_inaction: winner index out of range");
    std::vector<double> out(probs.size());
    double losers = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (j == winner)
            continue;
        out[j] = lambda_r * probs[j];
        losers += out[j];
    }
    out[winner] = 1.0 - losers;
    return out;
}

struct Feedback {
    int content_class = 0;
    std::size_t face = 0;
    bool positive = false;
    std::optional<double> rtt_sample;  // seconds, present iff positive
};

// Per-content-class selection probabilities plus the learning state that
// drives them. One table per node; faces are indexed 0..face_count-1.
class StrategyTable {
public:
    StrategyTable(std::size_t face_count, double lambda_r = 0.9,
                  double lambda_smooth = 0.1,
                  RewardMode reward_mode = RewardMode::AsWritten,
                  SelectionMode selection_mode = SelectionMode::Argmax)
        : face_count_(face_count),
          lambda_r_(lambda_r),
          lambda_smooth_(lambda_smooth),
          reward_mode_(reward_mode),
          selection_mode_(selection_mode) {
        if (face_count_ == 0)
            throw UsageError("StrategyTable: need at least one face");
        if (!(lambda_r_ > 0.0 && lambda_r_ < 1.0))
            throw UsageError("StrategyTable: lambda_r must lie in (0, 1)");
        if (!(lambda_smooth_ >= 0.0 && lambda_smooth_ <= 1.0))
            throw UsageError("StrategyTable: lambda_smooth must lie in [0, 1]");
    }

    std::size_t face_count() const { return face_count_; }
    double lambda_r() const { return lambda_r_; }
    double lambda_smooth() const { return lambda_smooth_; }
    RewardMode reward_mode() const { return reward_mode_; }
    SelectionMode selection_mode() const { return selection_mode_; }

    // Creates the class row at the cold-start state: uniform probabilities,
    // no delay samples.
    void init_class(int content_class) {
        if (rows_.count(content_class))
            return;
        Row row;
        row.probs.assign(face_count_, 1.0 / double(face_count_));
        row.delay.assign(face_count_, 0.0);
        row.delay_sampled.assign(face_count_, 0);
        rows_.emplace(content_class, std::move(row));
    }

    bool has_class(int content_class) const { return rows_.count(content_class) != 0; }

    ProbabilityVector probabilities(int content_class) const {
        return ProbabilityVector(row(content_class).probs);
    }

    void set_probabilities(int content_class, const ProbabilityVector& pv) {
        if (pv.size() != face_count_)
            throw UsageError("StrategyTable: probability vector length mismatch");
        row(content_class).probs = pv.entries();
    }

    double delay(int content_class, std::size_t face) const {
        const Row& r = row(content_class);
        check_face(face);
        return r.delay[face];
    }

    struct Row {
        std::vector<double> probs;
        std::vector<double> delay;
        std::vector<char> delay_sampled;
    };

    Row& row(int content_class) {
        auto it = rows_.find(content_class);
        if (it == rows_.end())
            throw UsageError("StrategyTable: unknown content class " +
                             std::to_string(content_class));
        return it->second;
    }
    const Row& row(int content_class) const {
        auto it = rows_.find(content_class);
        if (it == rows_.end())
            throw UsageError("StrategyTable: unknown content class " +
                             std::to_string(content_class));
        return it->second;
    }

    void check_face(std::size_t face) const {
        if (face >= face_count_)
            throw UsageError("StrategyTable: face index out of range");
    }

private:
    std::size_t face_count_;
    double lambda_r_;
    double lambda_smooth_;
    RewardMode reward_mode_;
    SelectionMode selection_mode_;
    std::unordered_map<int, Row> rows_;
};

// Core of the selection step, taking the per-candidate rewards directly.
//
// The stored probabilities are first pulled toward the reward-weighted
// distribution: p_c <- (1 - lambda) p_c + lambda * wpro_c * mass(C), where
// mass(C) is the probability mass the candidate set held before the update.
// Scaling by mass(C) keeps the full vector on the simplex; with all faces
// eligible it is the plain smoothing update. Selection then takes the argmax
// of the updated entries (ties to the lowest face index) or samples from
// them, depending on the table's selection mode.
inline std::size_t select_with_rewards(StrategyTable& table, int content_class,
                                       std::span<const std::size_t> candidates,
                                       const std::vector<double>& rewards, Rng& rng) {
    StrategyTable::Row& row = table.row(content_class);
    if (candidates.empty())
        throw UsageError("select_with_rewards: empty candidate set");
    if (rewards.size() != candidates.size())
        throw UsageError("select_with_rewards: rewards do not match candidates");
    for (std::size_t c : candidates)
        table.check_face(c);

    double mass = 0.0;
    std::vector<double> weighted(candidates.size());
    double weighted_sum = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double p = row.probs[candidates[i]];
        mass += p;
        weighted[i] = rewards[i] * p;
        weighted_sum += weighted[i];
    }

    const double lambda = table.lambda_smooth();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double wpro = weighted_sum > 0.0 ? weighted[i] / weighted_sum
                                               : 1.0 / double(candidates.size());
        double& p = row.probs[candidates[i]];
        p = (1.0 - lambda) * p + lambda * wpro * mass;
    }
    // Catches any drift off the simplex immediately.
    ProbabilityVector checked(row.probs);

    if (table.selection_mode() == SelectionMode::Argmax) {
        std::size_t best = candidates[0];
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            const std::size_t face = candidates[i];
            if (row.probs[face] > row.probs[best] ||
                (row.probs[face] == row.probs[best] && face < best))
                best = face;
        }
        return best;
    }

    double updated_mass = 0.0;
    for (std::size_t c : candidates)
        updated_mass += row.probs[c];
    const double u = rng.uniform();
    if (updated_mass <= 0.0)
        return candidates[std::size_t(u * double(candidates.size())) %
                          candidates.size()];
    double cumulative = 0.0;
    for (std::size_t i = 0; i + 1 < candidates.size(); ++i) {
        cumulative += row.probs[candidates[i]] / updated_mass;
        if (u < cumulative)
            return candidates[i];
    }
    return candidates.back();
}

// Picks the egress face for one Interest of the given class, restricted to
// `candidates` (the FIB-eligible faces, in the same order as `norm`).
inline std::size_t select_interface(StrategyTable& table, int content_class,
                                    std::span<const std::size_t> candidates,
                                    const NormalizedState& norm, Rng& rng) {
    if (norm.beta.size() != candidates.size())
        throw UsageError("select_interface: normalized state does not match candidates");
    return select_with_rewards(table, content_class, candidates,
                               interface_rewards(norm, table.reward_mode()), rng);
}

// Data arrived for an Interest sent on `face`: reinforce it.
inline void positive_feedback(StrategyTable& table, int content_class,
                              std::size_t face) {
    StrategyTable::Row& row = table.row(content_class);
    table.check_face(face);
    std::vector<double> updated =
        linear_reward_inaction(row.probs, face, table.lambda_r());
    ProbabilityVector checked(updated);
    row.probs = std::move(updated);
}

// Timeout on `face`: the probabilities are kept as they are.
inline void negative_feedback(StrategyTable& table, int content_class,
                              std::size_t face) {
    table.row(content_class);
    table.check_face(face);
}

// Folds one round-trip sample into the smoothed per-face delay estimate.
inline void record_rtt(StrategyTable& table, int content_class, std::size_t face,
                       double sample) {
    constexpr double kRttSmoothing = 0.125;
    if (!(sample > 0.0) || !std::isfinite(sample))
        throw UsageError("record_rtt: sample must be positive");
    StrategyTable::Row& row = table.row(content_class);
    table.check_face(face);
    if (!row.delay_sampled[face]) {
        row.delay[face] = sample;
        row.delay_sampled[face] = 1;
    } else {
        row.delay[face] = (1.0 - kRttSmoothing) * row.delay[face] + kRttSmoothing * sample;
    }
}

inline void apply_feedback(StrategyTable& table, const Feedback& fb) {
    if (fb.positive) {
        if (fb.rtt_sample)
            record_rtt(table, fb.content_class, fb.face, *fb.rtt_sample);
        positive_feedback(table, fb.content_class, fb.face);
    } else {
        negative_feedback(table, fb.content_class, fb.face);
    }
}

} // namespace ndnfwd
