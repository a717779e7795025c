#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ndnfwd/baselines.hpp"
#include "ndnfwd/errors.hpp"

namespace ndnfwd {

enum class ArrivalProcess { Poisson, Periodic };

struct LinkDownEvent {
    std::string a;
    std::string b;
    double at = 0.0;
};

// Complete description of one simulation run, minus the topology itself
// (which is loaded separately from `topology_path`). Defaults reflect the
// documented reference configuration: 150 s runs, 100-packet queues,
// 2000 Interests/s per consumer.
struct Scenario {
    std::string name = "scenario";
    std::string topology_path;
    double duration = 150.0;
    std::uint64_t seed = 1;
    StrategyName strategy = StrategyName::DrrMdpf;

    double interest_rate = 2000.0;  // Interests/second per consumer
    ArrivalProcess arrival = ArrivalProcess::Poisson;
    unsigned consumer_retries = 0;
    std::size_t catalog_size = 10000;
    std::size_t content_classes = 10;
    double popularity = 1.0;  // Zipf exponent
    double cache_fraction = 0.1;
    std::uint32_t payload_size = 1024;
    std::uint32_t interest_size = 64;

    std::size_t queue_capacity = 100;
    std::uint32_t quantum = 1500;
    double pit_timeout = 2.0;
    std::optional<LinkDownEvent> link_down;

    PolicyParams policy;

    bool operator==(const Scenario& other) const {
        auto key = [](const Scenario& s) {
            return std::tuple(s.name, s.topology_path, s.duration, s.seed, s.strategy,
                              s.interest_rate, s.arrival, s.consumer_retries,
                              s.catalog_size, s.content_classes, s.popularity,
                              s.cache_fraction, s.payload_size, s.interest_size,
                              s.queue_capacity, s.quantum, s.pit_timeout,
                              s.policy.lambda_r, s.policy.lambda_smooth,
                              s.policy.reward_mode, s.policy.selection_mode);
        };
        if (key(*this) != key(other))
            return false;
        if (link_down.has_value() != other.link_down.has_value())
            return false;
        if (link_down)
            return link_down->a == other.link_down->a &&
                   link_down->b == other.link_down->b &&
                   link_down->at == other.link_down->at;
        return true;
    }
};

inline void validate_scenario(const Scenario& s) {
    if (s.name.empty() ||
        s.name.find_first_of(", \t\n") != std::string::npos)
        throw UsageError("scenario name must be non-empty without spaces or commas");
    if (s.duration < 0.0)
        throw UsageError("duration must be >= 0");
    if (!(s.interest_rate > 0.0))
        throw UsageError("interest_rate must be positive");
    if (s.catalog_size == 0)
        throw UsageError("catalog_size must be positive");
    if (s.content_classes == 0 || s.content_classes > s.catalog_size)
        throw UsageError("content_classes must lie in [1, catalog_size]");
    if (s.popularity < 0.0)
        throw UsageError("popularity must be >= 0");
    if (s.cache_fraction < 0.0 || s.cache_fraction > 1.0)
        throw UsageError("cache_fraction must lie in [0, 1]");
    if (s.payload_size == 0 || s.interest_size == 0)
        throw UsageError("packet sizes must be positive");
    if (s.queue_capacity == 0)
        throw UsageError("queue_capacity must be positive");
    if (s.quantum == 0)
        throw UsageError("quantum must be positive");
    if (!(s.pit_timeout > 0.0))
        throw UsageError("pit_timeout must be positive");
    if (!(s.policy.lambda_r > 0.0 && s.policy.lambda_r < 1.0))
        throw UsageError("lambda_r must lie in (0, 1)");
    if (s.policy.lambda_smooth < 0.0 || s.policy.lambda_smooth > 1.0)
        throw UsageError("lambda_smooth must lie in [0, 1]");
    if (s.link_down && s.link_down->at < 0.0)
        throw UsageError("link_down time must be >= 0");
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double to_double(const std::string& v) {
    std::size_t used = 0;
    double out;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("expected a number, got '" + v + "'");
    }
    if (used != v.size())
        throw std::invalid_argument("trailing junk after number '" + v + "'");
    return out;
}

inline std::uint64_t to_u64(const std::string& v) {
    if (!v.empty() && v[0] == '-')
        throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
    std::size_t used = 0;
    std::uint64_t out;
    try {
        out = std::stoull(v, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
    }
    if (used != v.size())
        throw std::invalid_argument("trailing junk after integer '" + v + "'");
    return out;
}

inline std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

struct ScenarioKey {
    const char* key;
    const char* section;  // "" = top level
    std::function<void(Scenario&, const std::string&)> set;
    std::function<std::string(const Scenario&)> get;  // "" = omit from dumps
};

inline const std::vector<ScenarioKey>& scenario_keys() {
    static const std::vector<ScenarioKey> keys = {
        {"name", "",
         [](Scenario& s, const std::string& v) { s.name = v; },
         [](const Scenario& s) { return s.name; }},
        {"topology", "",
         [](Scenario& s, const std::string& v) { s.topology_path = v; },
         [](const Scenario& s) { return s.topology_path; }},
        {"duration", "",
         [](Scenario& s, const std::string& v) { s.duration = to_double(v); },
         [](const Scenario& s) { return format_double(s.duration); }},
        {"seed", "",
         [](Scenario& s, const std::string& v) { s.seed = to_u64(v); },
         [](const Scenario& s) { return std::to_string(s.seed); }},
        {"interest_rate", "traffic",
         [](Scenario& s, const std::string& v) { s.interest_rate = to_double(v); },
         [](const Scenario& s) { return format_double(s.interest_rate); }},
        {"arrival_process", "traffic",
         [](Scenario& s, const std::string& v) {
             if (v == "poisson")
                 s.arrival = ArrivalProcess::Poisson;
             else if (v == "periodic")
                 s.arrival = ArrivalProcess::Periodic;
             else
                 throw std::invalid_argument("arrival_process must be poisson or periodic");
         },
         [](const Scenario& s) {
             return std::string(s.arrival == ArrivalProcess::Poisson ? "poisson"
                                                                     : "periodic");
         }},
        {"consumer_retries", "traffic",
         [](Scenario& s, const std::string& v) {
             s.consumer_retries = unsigned(to_u64(v));
         },
         [](const Scenario& s) { return std::to_string(s.consumer_retries); }},
        {"catalog_size", "traffic",
         [](Scenario& s, const std::string& v) { s.catalog_size = to_u64(v); },
         [](const Scenario& s) { return std::to_string(s.catalog_size); }},
        {"content_classes", "traffic",
         [](Scenario& s, const std::string& v) { s.content_classes = to_u64(v); },
         [](const Scenario& s) { return std::to_string(s.content_classes); }},
        {"popularity", "traffic",
         [](Scenario& s, const std::string& v) { s.popularity = to_double(v); },
         [](const Scenario& s) { return format_double(s.popularity); }},
        {"cache_fraction", "traffic",
         [](Scenario& s, const std::string& v) {
             const double f = to_double(v);
             if (f < 0.0 || f > 1.0)
                 throw std::invalid_argument("cache_fraction must lie in [0, 1]");
             s.cache_fraction = f;
         },
         [](const Scenario& s) { return format_double(s.cache_fraction); }},
        {"payload_size", "traffic",
         [](Scenario& s, const std::string& v) {
             s.payload_size = std::uint32_t(to_u64(v));
         },
         [](const Scenario& s) { return std::to_string(s.payload_size); }},
        {"interest_size", "traffic",
         [](Scenario& s, const std::string& v) {
             s.interest_size = std::uint32_t(to_u64(v));
         },
         [](const Scenario& s) { return std::to_string(s.interest_size); }},
        {"queue_capacity", "network",
         [](Scenario& s, const std::string& v) { s.queue_capacity = to_u64(v); },
         [](const Scenario& s) { return std::to_string(s.queue_capacity); }},
        {"quantum", "network",
         [](Scenario& s, const std::string& v) { s.quantum = std::uint32_t(to_u64(v)); },
         [](const Scenario& s) { return std::to_string(s.quantum); }},
        {"pit_timeout", "network",
         [](Scenario& s, const std::string& v) { s.pit_timeout = to_double(v); },
         [](const Scenario& s) { return format_double(s.pit_timeout); }},
        {"link_down", "network",
         [](Scenario& s, const std::string& v) {
             std::istringstream in(v);
             LinkDownEvent e;
             std::string at;
             if (!(in >> e.a >> e.b >> at) || !(in >> std::ws).eof())
                 throw std::invalid_argument("link_down needs '<a> <b> <time>'");
             e.at = to_double(at);
             s.link_down = e;
         },
         [](const Scenario& s) {
             if (!s.link_down)
                 return std::string();
             return s.link_down->a + " " + s.link_down->b + " " +
                    format_double(s.link_down->at);
         }},
        {"strategy", "strategy",
         [](Scenario& s, const std::string& v) { s.strategy = strategy_from_string(v); },
         [](const Scenario& s) { return to_string(s.strategy); }},
        {"lambda_r", "strategy",
         [](Scenario& s, const std::string& v) { s.policy.lambda_r = to_double(v); },
         [](const Scenario& s) { return format_double(s.policy.lambda_r); }},
        {"lambda_smooth", "strategy",
         [](Scenario& s, const std::string& v) { s.policy.lambda_smooth = to_double(v); },
         [](const Scenario& s) { return format_double(s.policy.lambda_smooth); }},
        {"reward_mode", "strategy",
         [](Scenario& s, const std::string& v) {
             if (v == "as-written")
                 s.policy.reward_mode = RewardMode::AsWritten;
             else if (v == "qualitative")
                 s.policy.reward_mode = RewardMode::Qualitative;
             else
                 throw std::invalid_argument("reward_mode must be as-written or qualitative");
         },
         [](const Scenario& s) {
             return std::string(s.policy.reward_mode == RewardMode::AsWritten
                                    ? "as-written"
                                    : "qualitative");
         }},
        {"selection_mode", "strategy",
         [](Scenario& s, const std::string& v) {
             if (v == "argmax")
                 s.policy.selection_mode = SelectionMode::Argmax;
             else if (v == "sample")
                 s.policy.selection_mode = SelectionMode::Sample;
             else
                 throw std::invalid_argument("selection_mode must be argmax or sample");
         },
         [](const Scenario& s) {
             return std::string(s.policy.selection_mode == SelectionMode::Argmax
                                    ? "argmax"
                                    : "sample");
         }},
    };
    return keys;
}

inline const ScenarioKey* find_scenario_key(const std::string& key) {
    for (const ScenarioKey& def : scenario_keys())
        if (key == def.key)
            return &def;
    return nullptr;
}

} // namespace detail

// Parses the `key = value` scenario format: one assignment per line, `#`
// comments, optional `[traffic]`/`[network]`/`[strategy]` section headers
// (organizational only; every key name is globally unique). Unknown keys,
// unknown sections, duplicate keys and malformed values are hard errors.
// `fallback_name` applies when the file has no `name` key (the CLI passes
// the config file's stem).
inline Scenario parse_scenario(const std::string& text,
                               const std::string& fallback_name = "scenario") {
    Scenario s;
    s.name = fallback_name;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string stripped = detail::trim(line);
        if (stripped.empty())
            continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ParseError(line_no, "unterminated section header");
            const std::string section = stripped.substr(1, stripped.size() - 2);
            if (section != "traffic" && section != "network" && section != "strategy")
                throw ParseError(line_no, "unknown section '" + section + "'");
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ParseError(line_no, "expected 'key = value'");
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        const detail::ScenarioKey* def = detail::find_scenario_key(key);
        if (!def)
            throw ParseError(line_no, "unknown key '" + key + "'");
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ParseError(line_no, "duplicate key '" + key + "'");
        seen.push_back(key);
        if (value.empty())
            throw ParseError(line_no, "empty value for '" + key + "'");
        try {
            def->set(s, value);
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
    }
    try {
        validate_scenario(s);
    } catch (const UsageError& e) {
        throw ParseError(line_no, e.what());
    }
    return s;
}

// Applies one `key=value` command-line override.
inline void apply_override(Scenario& s, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw UsageError("override must look like key=value, got '" + assignment + "'");
    const std::string key = detail::trim(assignment.substr(0, eq));
    const std::string value = detail::trim(assignment.substr(eq + 1));
    const detail::ScenarioKey* def = detail::find_scenario_key(key);
    if (!def)
        throw UsageError("unknown override key '" + key + "'");
    try {
        def->set(s, value);
    } catch (const std::invalid_argument& e) {
        throw UsageError("override " + key + ": " + e.what());
    }
}

// Full dump; parses back to an equal Scenario.
inline std::string format_scenario(const Scenario& s) {
    std::ostringstream out;
    const char* sections[] = {"", "traffic", "network", "strategy"};
    for (const char* section : sections) {
        bool header_done = section[0] == '\0';
        for (const auto& def : detail::scenario_keys()) {
            if (std::string(def.section) != section)
                continue;
            const std::string value = def.get(s);
            if (value.empty())
                continue;
            if (!header_done) {
                out << "\n[" << section << "]\n";
                header_done = true;
            }
            out << def.key << " = " << value << '\n';
        }
    }
    return out.str();
}

} // namespace ndnfwd
