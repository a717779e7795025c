#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ndnfwd/errors.hpp"
#include "ndnfwd/rng.hpp"

namespace ndnfwd {

inline constexpr double kSimplexTolerance = 1e-9;

// Discrete probability distribution over action/face indices.
// Invariants: length >= 1, every entry in [0, 1], entries sum to 1
// within kSimplexTolerance. Enforced on every construction and assignment.
class ProbabilityVector {
public:
    explicit ProbabilityVector(std::vector<double> entries) {
        assign(std::move(entries));
    }

    static ProbabilityVector uniform(std::size_t n) {
        if (n == 0)
            throw UsageError("probability vector must have at least one entry");
        return ProbabilityVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    void assign(std::vector<double> entries) {
        validate(entries);
        entries_ = std::move(entries);
    }

    double operator[](std::size_t i) const { return entries_[i]; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<double>& entries() const { return entries_; }

    bool operator==(const ProbabilityVector& other) const = default;

private:
    static void validate(const std::vector<double>& entries) {
        if (entries.empty())
            throw UsageError("probability vector must have at least one entry");
        double sum = 0.0;
        for (double p : entries) {
            if (!std::isfinite(p) || p < 0.0 || p > 1.0)
                throw UsageError("probability entry outside [0, 1]: " + std::to_string(p));
            sum += p;
        }
        if (std::fabs(sum - 1.0) > kSimplexTolerance)
            throw UsageError("probabilities sum to " + std::to_string(sum) + ", not 1");
    }

    std::vector<double> entries_;
};

// Scales non-negative weights to sum to 1. An all-zero input yields the
// uniform distribution, which is also the cold-start state of every
// strategy table.
inline ProbabilityVector normalize(const std::vector<double>& weights) {
    if (weights.empty())
        throw UsageError("normalize: empty weight vector");
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw UsageError("normalize: weights must be finite and non-negative");
        sum += w;
    }
    if (sum == 0.0)
        return ProbabilityVector::uniform(weights.size());
    std::vector<double> out(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i)
        out[i] = weights[i] / sum;
    return ProbabilityVector(std::move(out));
}

// Draws an index distributed according to pv, consuming one uniform draw.
inline std::size_t sample_index(const ProbabilityVector& pv, Rng& rng) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    for (std::size_t i = 0; i + 1 < pv.size(); ++i) {
        cumulative += pv[i];
        if (u < cumulative)
            return i;
    }
    return pv.size() - 1;
}

} // namespace ndnfwd
