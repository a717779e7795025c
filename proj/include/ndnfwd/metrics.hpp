#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "ndnfwd/errors.hpp"

namespace ndnfwd {

// Raw totals accumulated over one run. Consumer-level fates partition
// interests_sent exactly: satisfied + timed out + dropped-at-source +
// pending-at-end (the reconciliation identity; the engine asserts it).
struct RunCounters {
    std::uint64_t interests_sent = 0;
    std::uint64_t data_received = 0;      // satisfied consumer requests
    std::uint64_t consumer_timeouts = 0;
    std::uint64_t dropped_at_source = 0;  // unroutable at the consumer's own node
    std::uint64_t pending_at_end = 0;

    std::uint64_t queue_drops = 0;        // network-wide, all nodes
    std::uint64_t unroutable_drops = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t retransmissions = 0;    // subset of interests_sent

    double total_retrieval_time = 0.0;    // sum over satisfied requests
    std::vector<std::uint64_t> per_node_forwards;  // Interests sent per node
};

struct MetricsReport {
    std::string scenario;
    std::string strategy;
    std::uint64_t seed = 0;
    double rate = 0.0;
    double cache_frac = 0.0;

    double throughput = 0.0;      // Data/s delivered to consumers
    double isr = 0.0;             // satisfied / sent
    double drop_rate = 0.0;       // packets dropped per second, network-wide
    double mean_retrieval = 0.0;  // seconds; NaN when nothing was satisfied
    double cov_load = 0.0;

    RunCounters counters;
};

// Population standard deviation over mean. All-zero counts give 0 by
// convention (an idle network is perfectly balanced).
inline double coefficient_of_variation(const std::vector<std::uint64_t>& counts) {
    if (counts.empty())
        throw UsageError("coefficient_of_variation: empty input");
    double mean = 0.0;
    for (std::uint64_t c : counts)
        mean += double(c);
    mean /= double(counts.size());
    if (mean == 0.0)
        return 0.0;
    double var = 0.0;
    for (std::uint64_t c : counts) {
        const double d = double(c) - mean;
        var += d * d;
    }
    var /= double(counts.size());
    return std::sqrt(var) / mean;
}

// Turns raw counters into the five evaluation metrics. `duration` is the
// Interest-generation interval, not the (longer) drain time.
inline MetricsReport finalize_report(const RunCounters& counters, double duration) {
    if (!(duration > 0.0))
        throw UsageError("finalize_report: duration must be positive");
    MetricsReport r;
    r.counters = counters;
    r.throughput = double(counters.data_received) / duration;
    r.isr = counters.interests_sent == 0
                ? 0.0
                : double(counters.data_received) / double(counters.interests_sent);
    r.drop_rate =
        double(counters.queue_drops + counters.unroutable_drops) / duration;
    r.mean_retrieval = counters.data_received == 0
                           ? std::numeric_limits<double>::quiet_NaN()
                           : counters.total_retrieval_time /
                                 double(counters.data_received);
    r.cov_load = counters.per_node_forwards.empty()
                     ? 0.0
                     : coefficient_of_variation(counters.per_node_forwards);
    return r;
}

namespace detail {

inline std::string format_sig6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace detail

inline std::string csv_header() {
    return "scenario,strategy,seed,rate,cache_frac,throughput,isr,drop_rate,"
           "mean_retrieval,cov_load";
}

inline std::string csv_row(const MetricsReport& r) {
    std::string row;
    row += r.scenario;
    row += ',';
    row += r.strategy;
    row += ',';
    row += std::to_string(r.seed);
    row += ',';
    row += detail::format_sig6(r.rate);
    row += ',';
    row += detail::format_sig6(r.cache_frac);
    row += ',';
    row += detail::format_sig6(r.throughput);
    row += ',';
    row += detail::format_sig6(r.isr);
    row += ',';
    row += detail::format_sig6(r.drop_rate);
    row += ',';
    row += detail::format_sig6(r.mean_retrieval);
    row += ',';
    row += detail::format_sig6(r.cov_load);
    return row;
}

inline std::string write_csv(const std::vector<MetricsReport>& reports) {
    std::string out = csv_header();
    out += '\n';
    for (const MetricsReport& r : reports) {
        out += csv_row(r);
        out += '\n';
    }
    return out;
}

// Human-readable mirror of the CSV fields plus the raw counters.
inline std::string write_text(const MetricsReport& r) {
    std::string out;
    auto line = [&out](const char* key, const std::string& value) {
        out += key;
        out += ": ";
        out += value;
        out += '\n';
    };
    line("scenario", r.scenario);
    line("strategy", r.strategy);
    line("seed", std::to_string(r.seed));
    line("rate", detail::format_sig6(r.rate));
    line("cache_frac", detail::format_sig6(r.cache_frac));
    line("throughput", detail::format_sig6(r.throughput));
    line("isr", detail::format_sig6(r.isr));
    line("drop_rate", detail::format_sig6(r.drop_rate));
    line("mean_retrieval", detail::format_sig6(r.mean_retrieval));
    line("cov_load", detail::format_sig6(r.cov_load));
    line("interests_sent", std::to_string(r.counters.interests_sent));
    line("data_received", std::to_string(r.counters.data_received));
    line("consumer_timeouts", std::to_string(r.counters.consumer_timeouts));
    line("dropped_at_source", std::to_string(r.counters.dropped_at_source));
    line("pending_at_end", std::to_string(r.counters.pending_at_end));
    line("queue_drops", std::to_string(r.counters.queue_drops));
    line("unroutable_drops", std::to_string(r.counters.unroutable_drops));
    line("cache_hits", std::to_string(r.counters.cache_hits));
    line("retransmissions", std::to_string(r.counters.retransmissions));
    return out;
}

} // namespace ndnfwd
