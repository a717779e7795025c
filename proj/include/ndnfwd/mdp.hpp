#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ndnfwd/errors.hpp"
#include "ndnfwd/prob.hpp"

namespace ndnfwd {

// Finite Markov decision process with dense transition and reward tensors,
// both indexed [state][action][next_state]. Every (state, action) row of the
// transition tensor must be a probability distribution.
class FiniteMdp {
public:
    FiniteMdp(std::size_t state_count, std::size_t action_count,
              std::vector<double> transition, std::vector<double> reward,
              double discount)
        : states_(state_count),
          actions_(action_count),
          transition_(std::move(transition)),
          reward_(std::move(reward)),
          discount_(discount) {
        if (states_ == 0 || actions_ == 0)
            throw UsageError("FiniteMdp: state and action counts must be positive");
        if (!(discount_ >= 0.0 && discount_ < 1.0))
            throw UsageError("FiniteMdp: discount must lie in [0, 1)");
        const std::size_t expected = states_ * actions_ * states_;
        if (transition_.size() != expected || reward_.size() != expected)
            throw UsageError("FiniteMdp: tensor size mismatch");
        for (std::size_t s = 0; s < states_; ++s) {
            for (std::size_t a = 0; a < actions_; ++a) {
                double row_sum = 0.0;
                for (std::size_t t = 0; t < states_; ++t) {
                    const double p = probability(s, a, t);
                    if (!(p >= 0.0 && p <= 1.0))
                        throw UsageError("FiniteMdp: transition entry outside [0, 1]");
                    row_sum += p;
                }
                if (std::fabs(row_sum - 1.0) > kSimplexTolerance)
                    throw UsageError("FiniteMdp: transition row for (s=" +
                                     std::to_string(s) + ", a=" + std::to_string(a) +
                                     ") sums to " + std::to_string(row_sum));
            }
        }
    }

    std::size_t state_count() const { return states_; }
    std::size_t action_count() const { return actions_; }
    double discount() const { return discount_; }

    double probability(std::size_t s, std::size_t a, std::size_t t) const {
        return transition_[index(s, a, t)];
    }
    double reward(std::size_t s, std::size_t a, std::size_t t) const {
        return reward_[index(s, a, t)];
    }

private:
    std::size_t index(std::size_t s, std::size_t a, std::size_t t) const {
        return (s * actions_ + a) * states_ + t;
    }

    std::size_t states_;
    std::size_t actions_;
    std::vector<double> transition_;
    std::vector<double> reward_;
    double discount_;
};

// Expected one-step reward of taking action a in state s.
inline double expected_reward(const FiniteMdp& mdp, std::size_t s, std::size_t a) {
    if (s >= mdp.state_count() || a >= mdp.action_count())
        throw UsageError("expected_reward: state or action index out of range");
    double sum = 0.0;
    for (std::size_t t = 0; t < mdp.state_count(); ++t)
        sum += mdp.reward(s, a, t) * mdp.probability(s, a, t);
    return sum;
}

struct ValueIterationResult {
    std::vector<double> values;
    int iterations = 0;
};

// Standard value iteration on the Bellman optimality operator. Stops when the
// sup-norm residual between sweeps drops below tol; throws ConvergenceError
// carrying the last residual if max_iter sweeps are exhausted first.
//
// This is a verification utility, not part of the forwarding path.
inline ValueIterationResult value_iteration(const FiniteMdp& mdp, double tol = 1e-6,
                                            int max_iter = 10000) {
    if (!(tol > 0.0))
        throw UsageError("value_iteration: tol must be positive");
    if (max_iter <= 0)
        throw UsageError("value_iteration: max_iter must be positive");

    const std::size_t n = mdp.state_count();
    std::vector<double> values(n, 0.0);
    std::vector<double> next(n, 0.0);
    double residual = 0.0;

    for (int iter = 1; iter <= max_iter; ++iter) {
        for (std::size_t s = 0; s < n; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < mdp.action_count(); ++a) {
                double q = 0.0;
                for (std::size_t t = 0; t < n; ++t)
                    q += mdp.probability(s, a, t) *
                         (mdp.reward(s, a, t) + mdp.discount() * values[t]);
                best = std::max(best, q);
            }
            next[s] = best;
        }
        residual = 0.0;
        for (std::size_t s = 0; s < n; ++s)
            residual = std::max(residual, std::fabs(next[s] - values[s]));
        values.swap(next);
        if (residual < tol)
            return {std::move(values), iter};
    }
    throw ConvergenceError("value_iteration: no convergence after " +
                               std::to_string(max_iter) + " iterations",
                           residual);
}

} // namespace ndnfwd
