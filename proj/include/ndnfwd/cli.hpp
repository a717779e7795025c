#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ndnfwd/engine.hpp"
#include "ndnfwd/errors.hpp"
#include "ndnfwd/metrics.hpp"
#include "ndnfwd/scenario.hpp"
#include "ndnfwd/topology.hpp"

namespace ndnfwd::cli {

namespace detail {

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Writes the whole payload or nothing: a failed write removes the file so a
// truncated output can never be mistaken for a result.
inline void write_output(const std::string* path, const std::string& content,
                         std::ostream& fallback) {
    if (!path || path->empty()) {
        fallback << content;
        return;
    }
    {
        std::ofstream out(*path, std::ios::binary);
        if (!out)
            throw SimulationError("cannot open '" + *path + "' for writing");
        out << content;
        out.flush();
        if (out)
            return;
    }
    std::error_code ec;
    std::filesystem::remove(*path, ec);
    throw SimulationError("failed while writing '" + *path + "'");
}

inline std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, ','))
        parts.push_back(cur);
    return parts;
}

struct Bundle {
    Scenario scenario;
    Topology topology;
};

inline Bundle load_bundle(const std::string& scenario_path,
                          const std::vector<std::string>& overrides,
                          const std::uint64_t* seed) {
    const std::filesystem::path spath(scenario_path);
    Bundle b;
    b.scenario = parse_scenario(slurp(scenario_path), spath.stem().string());
    for (const std::string& ov : overrides)
        apply_override(b.scenario, ov);
    if (seed)
        b.scenario.seed = *seed;
    validate_scenario(b.scenario);
    if (b.scenario.topology_path.empty())
        throw UsageError("scenario '" + scenario_path + "' does not set topology=");
    std::filesystem::path tpath(b.scenario.topology_path);
    if (tpath.is_relative())
        tpath = spath.parent_path() / tpath;
    b.topology = parse_topology(slurp(tpath.string()));
    return b;
}

} // namespace detail

// Runs one CLI invocation (argv without the program name). Returns the
// process exit code: 0 success, 1 usage or config error, 2 runtime failure.
inline int execute(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
    CLI::App app{"Discrete-event simulator for adaptive NDN forwarding"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;
    std::string format = "csv";
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_set = false;
    auto add_common = [&](CLI::App* cmd, bool with_format) {
        cmd->add_option("--scenario", scenario_path, "Scenario config file")
            ->required();
        cmd->add_option("--out", out_path, "Output file (default: stdout)");
        cmd->add_option("--override", overrides,
                        "key=value scenario override (repeatable)");
        cmd->add_option("--seed", seed, "Replaces the scenario seed")
            ->each([&seed_set](const std::string&) { seed_set = true; });
        if (with_format)
            cmd->add_option("--format", format, "csv or text")
                ->check(CLI::IsMember({"csv", "text"}));
    };

    CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario");
    add_common(run_cmd, true);

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Run a scenario across a parameter range");
    add_common(sweep_cmd, false);
    std::string sweep_param;
    std::string sweep_values;
    std::string sweep_strategies;
    sweep_cmd->add_option("--param", sweep_param, "Swept parameter")
        ->required()
        ->check(CLI::IsMember({"rate", "cache_frac"}));
    sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")
        ->required();
    sweep_cmd->add_option("--strategies", sweep_strategies,
                          "Comma-separated strategies (default: the scenario's)");

    CLI::App* compare_cmd =
        app.add_subcommand("compare", "Run one scenario under several strategies");
    add_common(compare_cmd, false);
    std::string compare_strategies;
    compare_cmd
        ->add_option("--strategies", compare_strategies, "Comma-separated strategies")
        ->required();

    CLI::App* gen_cmd = app.add_subcommand("gen-topology", "Emit a topology file");
    std::string gen_kind = "random";
    std::size_t gen_nodes = 0, gen_links = 0, gen_rows = 0, gen_cols = 0,
                gen_levels = 0;
    std::uint64_t gen_seed = 1;
    double gen_bandwidth = 1e7;
    double gen_delay_ms = 10.0;
    std::string gen_out;
    gen_cmd->add_option("--kind", gen_kind, "random, line, grid or tree")
        ->check(CLI::IsMember({"random", "line", "grid", "tree"}));
    gen_cmd->add_option("--nodes", gen_nodes, "Node count (random, line)");
    gen_cmd->add_option("--links", gen_links, "Link count (random)");
    gen_cmd->add_option("--rows", gen_rows, "Grid rows");
    gen_cmd->add_option("--cols", gen_cols, "Grid columns");
    gen_cmd->add_option("--levels", gen_levels, "Tree levels");
    gen_cmd->add_option("--seed", gen_seed, "Generator seed (random)");
    gen_cmd->add_option("--bandwidth-bps", gen_bandwidth, "Link bandwidth");
    gen_cmd->add_option("--delay-ms", gen_delay_ms, "Link delay");
    gen_cmd->add_option("--out", gen_out, "Output file (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run_cmd) {
            detail::Bundle b = detail::load_bundle(scenario_path, overrides,
                                                   seed_set ? &seed : nullptr);
            const MetricsReport report = run_scenario(b.scenario, b.topology);
            const std::string content =
                format == "csv" ? write_csv({report}) : write_text(report);
            detail::write_output(&out_path, content, out);
        } else if (*sweep_cmd) {
            detail::Bundle b = detail::load_bundle(scenario_path, overrides,
                                                   seed_set ? &seed : nullptr);
            std::vector<double> values;
            for (const std::string& tok : detail::split_csv_list(sweep_values)) {
                double v;
                try {
                    v = std::stod(tok);
                } catch (const std::exception&) {
                    throw UsageError("--values: bad number '" + tok + "'");
                }
                if (std::find(values.begin(), values.end(), v) != values.end())
                    throw UsageError("--values: duplicate value '" + tok + "'");
                values.push_back(v);
            }
            if (values.empty())
                throw UsageError("--values: empty list");
            std::vector<StrategyName> strategies;
            if (sweep_strategies.empty()) {
                strategies.push_back(b.scenario.strategy);
            } else {
                for (const std::string& tok : detail::split_csv_list(sweep_strategies))
                    strategies.push_back(strategy_from_string(tok));
            }
            for (std::size_t i = 0; i < strategies.size(); ++i)
                for (std::size_t j = i + 1; j < strategies.size(); ++j)
                    if (strategies[i] == strategies[j])
                        throw UsageError("--strategies: duplicate entry");

            std::vector<MetricsReport> rows;
            for (StrategyName st : strategies) {
                for (double v : values) {
                    Scenario point = b.scenario;
                    point.strategy = st;
                    if (sweep_param == "rate")
                        point.interest_rate = v;
                    else
                        point.cache_fraction = v;
                    validate_scenario(point);
                    rows.push_back(run_scenario(point, b.topology));
                }
            }
            const bool by_rate = sweep_param == "rate";
            std::sort(rows.begin(), rows.end(),
                      [by_rate](const MetricsReport& x, const MetricsReport& y) {
                          if (x.strategy != y.strategy)
                              return x.strategy < y.strategy;
                          return by_rate ? x.rate < y.rate
                                         : x.cache_frac < y.cache_frac;
                      });
            detail::write_output(&out_path, write_csv(rows), out);
        } else if (*compare_cmd) {
            detail::Bundle b = detail::load_bundle(scenario_path, overrides,
                                                   seed_set ? &seed : nullptr);
            std::vector<StrategyName> strategies;
            for (const std::string& tok : detail::split_csv_list(compare_strategies))
                strategies.push_back(strategy_from_string(tok));
            if (strategies.empty())
                throw UsageError("--strategies: empty list");
            for (std::size_t i = 0; i < strategies.size(); ++i)
                for (std::size_t j = i + 1; j < strategies.size(); ++j)
                    if (strategies[i] == strategies[j])
                        throw UsageError("--strategies: duplicate entry");
            std::vector<MetricsReport> rows;
            for (StrategyName st : strategies) {
                Scenario point = b.scenario;
                point.strategy = st;
                rows.push_back(run_scenario(point, b.topology));
            }
            std::sort(rows.begin(), rows.end(),
                      [](const MetricsReport& x, const MetricsReport& y) {
                          return x.strategy < y.strategy;
                      });
            detail::write_output(&out_path, write_csv(rows), out);
        } else if (*gen_cmd) {
            Topology topo;
            if (gen_kind == "random") {
                if (gen_nodes == 0 || gen_links == 0)
                    throw UsageError("gen-topology random needs --nodes and --links");
                topo = make_random(gen_nodes, gen_links, gen_seed, gen_bandwidth,
                                   gen_delay_ms / 1000.0);
            } else if (gen_kind == "line") {
                if (gen_nodes == 0)
                    throw UsageError("gen-topology line needs --nodes");
                topo = make_line(gen_nodes, gen_bandwidth, gen_delay_ms / 1000.0);
            } else if (gen_kind == "grid") {
                if (gen_rows == 0 || gen_cols == 0)
                    throw UsageError("gen-topology grid needs --rows and --cols");
                topo = make_grid(gen_rows, gen_cols, gen_bandwidth,
                                 gen_delay_ms / 1000.0);
            } else {
                if (gen_levels == 0)
                    throw UsageError("gen-topology tree needs --levels");
                topo = make_tree(gen_levels, gen_bandwidth, gen_delay_ms / 1000.0);
            }
            std::ostringstream text;
            write_topology(text, topo);
            detail::write_output(&gen_out, text.str(), out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

} // namespace ndnfwd::cli
