#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "ndnfwd/event_queue.hpp"
#include "ndnfwd/metrics.hpp"
#include "ndnfwd/node.hpp"
#include "ndnfwd/rng.hpp"
#include "ndnfwd/scenario.hpp"
#include "ndnfwd/topology.hpp"

namespace ndnfwd {

// Ceiling on processed events per run; a scenario that exceeds it is treated
// as livelocked rather than allowed to spin forever.
constexpr std::uint64_t kMaxEventsPerRun = 100'000'000;

// One discrete-event run: builds the node graph from a topology, drives
// consumer/producer applications, and reduces the counters to a report.
// Strictly single-threaded; a fixed scenario and seed reproduce the report
// byte for byte.
class SimEngine {
public:
    SimEngine(const Scenario& sc, const Topology& topo) : sc_(sc) {
        validate_scenario(sc_);
        if (topo.nodes.empty())
            throw UsageError("run_scenario: topology has no nodes");
        build_network(topo);
        build_fib(topo);
        build_catalog();
        if (sc_.link_down)
            arm_link_down(topo);
    }

    MetricsReport run() {
        for (std::size_t i = 0; i < consumers_.size(); ++i)
            schedule_first_send(i);
        std::uint64_t events = 0;
        while (eq_.step()) {
            if (++events > kMaxEventsPerRun)
                throw SimulationError("event cap exceeded; scenario looks livelocked");
        }
        return collect();
    }

private:
    struct DirectedLink {
        std::size_t from_node = 0;
        std::size_t from_face = 0;
        std::size_t to_node = 0;
        std::size_t to_face = 0;
        double bandwidth_bps = 0.0;
        double delay_s = 0.0;
        bool busy = false;
        bool down = false;
    };

    struct Pending {
        double send_time = 0.0;
        EventId timer = 0;
        unsigned retries_left = 0;
    };

    struct ConsumerApp {
        std::size_t node = 0;
        std::size_t app_face = 0;
        Rng rng{0};
        std::unordered_map<std::string, std::deque<Pending>> pending;
        std::uint64_t pending_count = 0;
        std::uint64_t sent = 0;
        std::uint64_t satisfied = 0;
        std::uint64_t timeouts = 0;
        std::uint64_t dropped = 0;
        std::uint64_t retransmissions = 0;
        std::uint64_t stray_data = 0;
        std::uint64_t periodic_ticks = 0;
        double retrieval_sum = 0.0;
    };

    void build_network(const Topology& topo) {
        const std::size_t n = topo.nodes.size();
        std::vector<std::vector<double>> face_caps(n);
        face_link_.assign(n, {});
        links_.reserve(topo.links.size() * 2);
        for (const TopoLink& l : topo.links) {
            const std::size_t fa = face_caps[l.a].size();
            const std::size_t fb = face_caps[l.b].size();
            face_caps[l.a].push_back(l.bandwidth_bps);
            face_caps[l.b].push_back(l.bandwidth_bps);
            links_.push_back(DirectedLink{l.a, fa, l.b, fb, l.bandwidth_bps, l.delay_s});
            links_.push_back(DirectedLink{l.b, fb, l.a, fa, l.bandwidth_bps, l.delay_s});
            face_link_[l.a].push_back(links_.size() - 2);
            face_link_[l.b].push_back(links_.size() - 1);
        }

        NodeConfig cfg;
        cfg.cs_capacity = std::size_t(
            std::llround(sc_.cache_fraction * double(sc_.catalog_size)));
        cfg.queue_capacity = sc_.queue_capacity;
        cfg.quantum = sc_.quantum;
        cfg.pit_timeout = sc_.pit_timeout;
        cfg.strategy = sc_.strategy;
        cfg.policy = sc_.policy;

        node_rngs_.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            node_rngs_.push_back(Rng::fork(sc_.seed, 0x10000 + i));

        consumer_app_of_node_.assign(n, -1);
        nodes_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const bool with_app = topo.nodes[i].role != NodeRole::Router;
            nodes_.push_back(std::make_unique<NdnNode>(topo.nodes[i].id, face_caps[i],
                                                       with_app, cfg, &node_rngs_[i]));
            if (topo.nodes[i].role == NodeRole::Consumer) {
                ConsumerApp app;
                app.node = i;
                app.app_face = *nodes_[i]->app_face();
                app.rng = Rng::fork(sc_.seed, 0x20000 + i);
                consumer_app_of_node_[i] = int(consumers_.size());
                consumers_.push_back(std::move(app));
            }
        }
    }

    // Hop-count BFS from all producers at once; every strictly-downhill face
    // becomes a FIB candidate, so equal-cost multipath falls out naturally
    // and Interests can never loop.
    void build_fib(const Topology& topo) {
        const std::size_t n = topo.nodes.size();
        constexpr unsigned kInf = std::numeric_limits<unsigned>::max();
        std::vector<unsigned> dist(n, kInf);
        std::deque<std::size_t> frontier;
        for (std::size_t i = 0; i < n; ++i) {
            if (topo.nodes[i].role == NodeRole::Producer) {
                dist[i] = 0;
                frontier.push_back(i);
            }
        }
        while (!frontier.empty()) {
            const std::size_t u = frontier.front();
            frontier.pop_front();
            for (std::size_t li : face_link_[u]) {
                const std::size_t v = links_[li].to_node;
                if (dist[v] == kInf) {
                    dist[v] = dist[u] + 1;
                    frontier.push_back(v);
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (topo.nodes[i].role == NodeRole::Producer) {
                nodes_[i]->add_fib_entry("/", {*nodes_[i]->app_face()}, {0});
                continue;
            }
            if (dist[i] == kInf)
                continue;  // unreachable; Interests die as unroutable
            std::vector<std::size_t> faces;
            std::vector<unsigned> costs;
            for (std::size_t f = 0; f < face_link_[i].size(); ++f) {
                const std::size_t v = links_[face_link_[i][f]].to_node;
                if (dist[v] + 1 == dist[i]) {
                    faces.push_back(f);
                    costs.push_back(dist[i]);
                }
            }
            if (!faces.empty())
                nodes_[i]->add_fib_entry("/", std::move(faces), std::move(costs));
        }
    }

    void build_catalog() {
        zipf_cum_.resize(sc_.catalog_size);
        double total = 0.0;
        for (std::size_t i = 0; i < sc_.catalog_size; ++i) {
            total += std::pow(double(i + 1), -sc_.popularity);
            zipf_cum_[i] = total;
        }
        for (double& c : zipf_cum_)
            c /= total;
    }

    void arm_link_down(const Topology& topo) {
        const std::size_t a = topo.index_of(sc_.link_down->a);
        const std::size_t b = topo.index_of(sc_.link_down->b);
        std::vector<std::size_t> hits;
        for (std::size_t li = 0; li < links_.size(); ++li) {
            if ((links_[li].from_node == a && links_[li].to_node == b) ||
                (links_[li].from_node == b && links_[li].to_node == a))
                hits.push_back(li);
        }
        if (hits.empty())
            throw UsageError("link_down: no link between '" + sc_.link_down->a +
                             "' and '" + sc_.link_down->b + "'");
        eq_.schedule_at(sc_.link_down->at, [this, hits] {
            for (std::size_t li : hits)
                links_[li].down = true;
        });
    }

    std::string draw_name(ConsumerApp& app) {
        const double u = app.rng.uniform();
        const auto it = std::upper_bound(zipf_cum_.begin(), zipf_cum_.end(), u);
        const std::size_t obj =
            it == zipf_cum_.end() ? sc_.catalog_size - 1
                                  : std::size_t(it - zipf_cum_.begin());
        return "/c" + std::to_string(obj % sc_.content_classes) + "/o" +
               std::to_string(obj);
    }

    void schedule_first_send(std::size_t app_idx) {
        if (sc_.duration <= 0.0)
            return;
        const double t0 = sc_.arrival == ArrivalProcess::Poisson
                              ? consumers_[app_idx].rng.exponential(1.0 / sc_.interest_rate)
                              : 0.0;
        if (t0 < sc_.duration)
            eq_.schedule_at(t0, [this, app_idx] { consumer_tick(app_idx); });
    }

    void consumer_tick(std::size_t app_idx) {
        ConsumerApp& app = consumers_[app_idx];
        send_interest(app_idx, draw_name(app), sc_.consumer_retries, false);
        // Periodic send times come from a tick counter rather than repeated
        // addition, so the grid never drifts and the last send stays strictly
        // inside [0, duration).
        const double next =
            sc_.arrival == ArrivalProcess::Poisson
                ? eq_.now() + app.rng.exponential(1.0 / sc_.interest_rate)
                : double(++app.periodic_ticks) / sc_.interest_rate;
        if (next < sc_.duration)
            eq_.schedule_at(next, [this, app_idx] { consumer_tick(app_idx); });
    }

    void send_interest(std::size_t app_idx, const std::string& pkt_name,
                       unsigned retries_left, bool is_retransmission) {
        ConsumerApp& app = consumers_[app_idx];
        const double now = eq_.now();
        ++app.sent;
        if (is_retransmission)
            ++app.retransmissions;
        const EventId timer = eq_.schedule_at(
            now + sc_.pit_timeout,
            [this, app_idx, pkt_name] { consumer_timeout(app_idx, pkt_name); });
        app.pending[pkt_name].push_back(Pending{now, timer, retries_left});
        ++app.pending_count;

        Packet pkt;
        pkt.name = pkt_name;
        pkt.kind = PacketKind::Interest;
        pkt.size = sc_.interest_size;
        pkt.created_at = now;
        NodeEffects fx = nodes_[app.node]->handle_interest(app.app_face, pkt, now);
        if (fx.unroutable) {
            // Killed synchronously at the source; retract the pending record.
            auto it = app.pending.find(pkt_name);
            eq_.cancel(it->second.back().timer);
            it->second.pop_back();
            if (it->second.empty())
                app.pending.erase(it);
            --app.pending_count;
            ++app.dropped;
            return;
        }
        apply_effects(app.node, fx);
    }

    void consumer_timeout(std::size_t app_idx, const std::string& pkt_name) {
        ConsumerApp& app = consumers_[app_idx];
        auto it = app.pending.find(pkt_name);
        if (it == app.pending.end() || it->second.empty())
            throw SimulationError("consumer timeout with no pending request");
        const Pending p = it->second.front();
        it->second.pop_front();
        if (it->second.empty())
            app.pending.erase(it);
        --app.pending_count;
        if (p.retries_left > 0) {
            send_interest(app_idx, pkt_name, p.retries_left - 1, true);
        } else {
            ++app.timeouts;
        }
    }

    // Oldest pending request for the name wins the Data; any younger
    // duplicates stay pending until their own Data or timer arrives.
    void consumer_receive(std::size_t app_idx, const Packet& pkt) {
        ConsumerApp& app = consumers_[app_idx];
        auto it = app.pending.find(pkt.name);
        if (it == app.pending.end() || it->second.empty()) {
            ++app.stray_data;
            return;
        }
        const Pending p = it->second.front();
        it->second.pop_front();
        if (it->second.empty())
            app.pending.erase(it);
        --app.pending_count;
        eq_.cancel(p.timer);
        ++app.satisfied;
        app.retrieval_sum += eq_.now() - p.send_time;
    }

    void apply_effects(std::size_t node_idx, const NodeEffects& fx) {
        for (const Packet& pkt : fx.app_deliveries) {
            if (pkt.kind == PacketKind::Interest) {
                produce_data(node_idx, pkt);
            } else {
                const int app_idx = consumer_app_of_node_[node_idx];
                if (app_idx < 0)
                    throw SimulationError("Data delivered to a node with no consumer");
                consumer_receive(std::size_t(app_idx), pkt);
            }
        }
        if (fx.schedule_pit_timer) {
            const auto& [pkt_name, at] = *fx.schedule_pit_timer;
            const std::string key = timer_key(node_idx, pkt_name);
            pit_timers_[key] = eq_.schedule_at(at, [this, node_idx, pkt_name, key] {
                pit_timers_.erase(key);
                NodeEffects out = nodes_[node_idx]->handle_timeout(pkt_name, eq_.now());
                apply_effects(node_idx, out);
            });
        }
        if (fx.cancel_pit_timer) {
            auto it = pit_timers_.find(timer_key(node_idx, *fx.cancel_pit_timer));
            if (it != pit_timers_.end()) {
                eq_.cancel(it->second);
                pit_timers_.erase(it);
            }
        }
        for (std::size_t face : fx.faces_kicked)
            try_transmit(node_idx, face);
    }

    void produce_data(std::size_t node_idx, const Packet& interest) {
        NdnNode& node = *nodes_[node_idx];
        if (!node.app_face())
            throw SimulationError("Interest delivered to a node with no application");
        Packet data;
        data.name = interest.name;
        data.kind = PacketKind::Data;
        data.size = sc_.payload_size;
        data.created_at = eq_.now();
        // New event rather than a nested handler call, so the node is never
        // re-entered while handle_interest is still on the stack.
        eq_.schedule_at(eq_.now(), [this, node_idx, data] {
            NodeEffects fx = nodes_[node_idx]->handle_data(
                *nodes_[node_idx]->app_face(), data, eq_.now());
            apply_effects(node_idx, fx);
        });
    }

    void try_transmit(std::size_t node_idx, std::size_t face) {
        DirectedLink& link = links_[face_link_[node_idx][face]];
        if (link.busy || link.down)
            return;
        auto popped = nodes_[node_idx]->egress(face).next_packet();
        if (!popped)
            return;
        const Packet pkt = std::move(popped->second);
        link.busy = true;
        nodes_[node_idx]->note_transmitted(face, pkt.size, eq_.now());
        const double tx_done = eq_.now() + double(pkt.size) * 8.0 / link.bandwidth_bps;
        eq_.schedule_at(tx_done, [this, node_idx, face, pkt] {
            DirectedLink& l = links_[face_link_[node_idx][face]];
            eq_.schedule_at(eq_.now() + l.delay_s, [this, li = face_link_[node_idx][face],
                                                    pkt] { arrive(li, pkt); });
            l.busy = false;
            try_transmit(node_idx, face);
        });
    }

    void arrive(std::size_t link_idx, const Packet& pkt) {
        const DirectedLink& link = links_[link_idx];
        NdnNode& node = *nodes_[link.to_node];
        NodeEffects fx = pkt.kind == PacketKind::Interest
                             ? node.handle_interest(link.to_face, pkt, eq_.now())
                             : node.handle_data(link.to_face, pkt, eq_.now());
        apply_effects(link.to_node, fx);
    }

    static std::string timer_key(std::size_t node_idx, const std::string& pkt_name) {
        return std::to_string(node_idx) + '\x1f' + pkt_name;
    }

    MetricsReport collect() {
        RunCounters rc;
        for (const ConsumerApp& app : consumers_) {
            rc.interests_sent += app.sent;
            rc.data_received += app.satisfied;
            rc.consumer_timeouts += app.timeouts;
            rc.dropped_at_source += app.dropped;
            rc.pending_at_end += app.pending_count;
            rc.retransmissions += app.retransmissions;
            rc.total_retrieval_time += app.retrieval_sum;
            if (app.sent != app.satisfied + app.timeouts + app.dropped +
                                app.pending_count)
                throw SimulationError("consumer accounting identity violated on node " +
                                      nodes_[app.node]->id());
        }
        for (const auto& node : nodes_) {
            const NodeCounters& c = node->counters();
            rc.queue_drops += c.queue_drops;
            rc.unroutable_drops += c.unroutable_drops;
            rc.cache_hits += c.cache_hits;
            rc.per_node_forwards.push_back(c.interests_forwarded);
            if (c.pit_created != c.pit_satisfied + c.pit_expired + node->pit_size())
                throw SimulationError("PIT accounting identity violated on node " +
                                      node->id());
        }

        MetricsReport report;
        if (sc_.duration > 0.0) {
            report = finalize_report(rc, sc_.duration);
        } else {
            report.counters = rc;
            report.mean_retrieval = std::numeric_limits<double>::quiet_NaN();
        }
        report.scenario = sc_.name;
        report.strategy = to_string(sc_.strategy);
        report.seed = sc_.seed;
        report.rate = sc_.interest_rate;
        report.cache_frac = sc_.cache_fraction;
        return report;
    }

    Scenario sc_;
    EventQueue eq_;
    std::vector<Rng> node_rngs_;
    std::vector<std::unique_ptr<NdnNode>> nodes_;
    std::vector<DirectedLink> links_;
    std::vector<std::vector<std::size_t>> face_link_;  // [node][face] -> link
    std::vector<int> consumer_app_of_node_;
    std::vector<ConsumerApp> consumers_;
    std::unordered_map<std::string, EventId> pit_timers_;
    std::vector<double> zipf_cum_;
};

inline MetricsReport run_scenario(const Scenario& sc, const Topology& topo) {
    SimEngine engine(sc, topo);
    return engine.run();
}

} // namespace ndnfwd
