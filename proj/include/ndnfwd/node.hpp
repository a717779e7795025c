#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <list>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ndnfwd/baselines.hpp"
#include "ndnfwd/drr.hpp"
#include "ndnfwd/errors.hpp"
#include "ndnfwd/name.hpp"
#include "ndnfwd/rng.hpp"
#include "ndnfwd/strategy.hpp"

namespace ndnfwd {

// Fixed-capacity LRU cache of Data packets keyed by full name. A lookup hit
// refreshes recency; inserting into a full store evicts the least recently
// used entry. Capacity 0 disables caching entirely.
class ContentStore {
public:
    explicit ContentStore(std::size_t capacity) : capacity_(capacity) {}

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return order_.size(); }

    const Packet* lookup(const std::string& name) {
        auto it = index_.find(name);
        if (it == index_.end())
            return nullptr;
        order_.splice(order_.begin(), order_, it->second);
        return &it->second->second;
    }

    void insert(const Packet& data) {
        if (capacity_ == 0)
            return;
        auto it = index_.find(data.name);
        if (it != index_.end()) {
            order_.splice(order_.begin(), order_, it->second);
            it->second->second = data;
            return;
        }
        if (order_.size() == capacity_) {
            index_.erase(order_.back().first);
            order_.pop_back();
        }
        order_.emplace_front(data.name, data);
        index_.emplace(data.name, order_.begin());
    }

private:
    std::size_t capacity_;
    std::list<std::pair<std::string, Packet>> order_;  // front = most recent
    std::unordered_map<std::string, std::list<std::pair<std::string, Packet>>::iterator>
        index_;
};

struct PitEntry {
    std::vector<std::size_t> in_faces;  // arrival order, no duplicates
    std::size_t out_face = 0;
    int content_class = 0;
    double created_at = 0.0;
    double expiry = 0.0;
};

struct FibEntry {
    std::string prefix;
    std::vector<std::size_t> faces;
    std::vector<unsigned> costs;  // hops to the nearest producer via each face
};

struct NodeCounters {
    std::uint64_t interests_received = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t malformed_drops = 0;
    std::uint64_t unroutable_drops = 0;
    std::uint64_t queue_drops = 0;
    std::uint64_t interests_forwarded = 0;  // onto network faces only
    std::uint64_t pit_created = 0;
    std::uint64_t pit_satisfied = 0;
    std::uint64_t pit_expired = 0;
    std::uint64_t unsolicited_data = 0;
};

struct NodeConfig {
    std::size_t cs_capacity = 0;
    std::size_t queue_capacity = 100;
    std::uint32_t quantum = 1500;
    double pit_timeout = 2.0;
    StrategyName strategy = StrategyName::DrrMdpf;
    PolicyParams policy;
};

// What one packet handler asks the surrounding simulation to do. The node
// itself never touches links, timers, or applications.
struct NodeEffects {
    std::vector<Packet> app_deliveries;           // up the local stack
    std::vector<std::size_t> faces_kicked;        // egress queues that grew
    std::optional<std::pair<std::string, double>> schedule_pit_timer;
    std::optional<std::string> cancel_pit_timer;
    bool unroutable = false;  // Interest killed here, synchronously
};

// One NDN forwarder: Content Store, PIT, FIB, strategy, and a DRR scheduler
// per face. Faces [0, network_face_count) attach to links; an optional app
// face with the last index feeds the local application. All state transitions
// happen in the three handle_* methods, which return the side effects for the
// caller to realize.
class NdnNode {
public:
    NdnNode(std::string id, const std::vector<double>& face_capacity_bps,
            bool with_app_face, const NodeConfig& config, Rng* rng)
        : id_(std::move(id)),
          config_(config),
          cs_(config.cs_capacity),
          rng_(rng),
          network_faces_(face_capacity_bps.size()) {
        const std::size_t total = network_faces_ + (with_app_face ? 1 : 0);
        if (total == 0)
            throw UsageError("NdnNode: node needs at least one face");
        app_face_ = with_app_face ? std::optional<std::size_t>(network_faces_)
                                  : std::nullopt;
        faces_.reserve(total);
        for (double bps : face_capacity_bps)
            faces_.push_back(Face{bps, DrrScheduler(config.queue_capacity), {}, 0});
        if (with_app_face)
            faces_.push_back(Face{0.0, DrrScheduler(config.queue_capacity), {}, 0});
        policy_ = make_policy(config.strategy, total, config.policy);
        unsatisfied_.assign(total, {});
    }

    const std::string& id() const { return id_; }
    std::size_t face_count() const { return faces_.size(); }
    std::optional<std::size_t> app_face() const { return app_face_; }

    void add_fib_entry(std::string prefix, std::vector<std::size_t> faces,
                       std::vector<unsigned> costs) {
        if (faces.empty() || faces.size() != costs.size())
            throw UsageError("add_fib_entry: need matching non-empty face/cost lists");
        for (std::size_t f : faces)
            check_face(f);
        fib_.push_back(FibEntry{std::move(prefix), std::move(faces), std::move(costs)});
    }

    const FibEntry* fib_lookup(const std::string& pkt_name) const {
        const FibEntry* best = nullptr;
        std::size_t best_len = 0;
        for (const FibEntry& e : fib_) {
            if (!name::is_prefix_of(e.prefix, pkt_name))
                continue;
            const std::size_t len = name::component_count(e.prefix);
            if (!best || len > best_len) {
                best = &e;
                best_len = len;
            }
        }
        return best;
    }

    NodeEffects handle_interest(std::size_t in_face, const Packet& pkt, double now) {
        check_face(in_face);
        NodeEffects fx;
        ++counters_.interests_received;

        if (pkt.name.empty() || pkt.name.front() != '/') {
            ++counters_.malformed_drops;
            fx.unroutable = true;
            return fx;
        }

        if (const Packet* cached = cs_.lookup(pkt.name)) {
            ++counters_.cache_hits;
            emit(fx, in_face, *cached);
            return fx;
        }

        if (auto it = pit_.find(pkt.name); it != pit_.end()) {
            std::vector<std::size_t>& in = it->second.in_faces;
            if (std::find(in.begin(), in.end(), in_face) == in.end())
                in.push_back(in_face);
            return fx;
        }

        const FibEntry* entry = fib_lookup(pkt.name);
        std::vector<std::size_t> candidates;
        std::vector<unsigned> costs;
        if (entry) {
            for (std::size_t i = 0; i < entry->faces.size(); ++i) {
                if (entry->faces[i] == in_face)
                    continue;
                candidates.push_back(entry->faces[i]);
                costs.push_back(entry->costs[i]);
            }
        }
        if (candidates.empty()) {
            ++counters_.unroutable_drops;
            fx.unroutable = true;
            return fx;
        }

        const int k = class_of(pkt.name);
        std::vector<InterfaceState> states(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            states[i].bandwidth_avail = available_bandwidth(candidates[i], now);
            states[i].unsatisfied = double(unsatisfied_count(candidates[i], k));
            states[i].delay = 0.0;  // adaptive policies track their own estimate
        }
        PolicyContext ctx;
        ctx.content_class = k;
        ctx.candidates = candidates;
        ctx.states = states;
        ctx.costs = costs;
        ctx.rng = rng_;
        const std::size_t chosen = policy_->choose_face(ctx);

        PitEntry pe;
        pe.in_faces.push_back(in_face);
        pe.out_face = chosen;
        pe.content_class = k;
        pe.created_at = now;
        pe.expiry = now + config_.pit_timeout;
        pit_.emplace(pkt.name, std::move(pe));
        ++counters_.pit_created;
        bump_unsatisfied(chosen, k, +1);
        fx.schedule_pit_timer = {pkt.name, now + config_.pit_timeout};

        Packet fwd = pkt;
        fwd.content_class = k;
        if (app_face_ && chosen == *app_face_) {
            fx.app_deliveries.push_back(fwd);
        } else if (enqueue_egress(fx, chosen, fwd)) {
            ++counters_.interests_forwarded;
        }
        return fx;
    }

    NodeEffects handle_data(std::size_t in_face, const Packet& pkt, double now) {
        check_face(in_face);
        NodeEffects fx;
        auto it = pit_.find(pkt.name);
        if (it == pit_.end()) {
            ++counters_.unsolicited_data;
            return fx;
        }
        PitEntry entry = std::move(it->second);
        pit_.erase(it);
        ++counters_.pit_satisfied;
        bump_unsatisfied(entry.out_face, entry.content_class, -1);

        cs_.insert(pkt);
        policy_->on_data(entry.content_class, entry.out_face, now - entry.created_at);

        for (std::size_t f : entry.in_faces)
            emit(fx, f, pkt);
        fx.cancel_pit_timer = pkt.name;
        return fx;
    }

    NodeEffects handle_timeout(const std::string& pkt_name, double now) {
        NodeEffects fx;
        auto it = pit_.find(pkt_name);
        if (it == pit_.end() || it->second.expiry > now)
            return fx;  // stale timer; Data already consumed the entry
        const PitEntry entry = std::move(it->second);
        pit_.erase(it);
        ++counters_.pit_expired;
        bump_unsatisfied(entry.out_face, entry.content_class, -1);
        policy_->on_timeout(entry.content_class, entry.out_face);
        return fx;
    }

    // The caller transmitted `bytes` on `face`; feeds the availability window.
    void note_transmitted(std::size_t face, std::uint32_t bytes, double now) {
        check_face(face);
        Face& f = faces_[face];
        f.window.emplace_back(now, bytes);
        f.window_bytes += bytes;
    }

    // Link capacity minus the bits serialized over the last 100 ms, floored
    // at zero. App faces report 0.
    double available_bandwidth(std::size_t face, double now) {
        check_face(face);
        Face& f = faces_[face];
        while (!f.window.empty() && f.window.front().first < now - kWindowSeconds) {
            f.window_bytes -= f.window.front().second;
            f.window.pop_front();
        }
        const double used_bps = double(f.window_bytes) * 8.0 / kWindowSeconds;
        return used_bps >= f.capacity_bps ? 0.0 : f.capacity_bps - used_bps;
    }

    DrrScheduler& egress(std::size_t face) {
        check_face(face);
        return faces_[face].scheduler;
    }

    ForwarderPolicy& policy() { return *policy_; }
    const NodeCounters& counters() const { return counters_; }
    std::size_t pit_size() const { return pit_.size(); }
    const PitEntry* pit_entry(const std::string& pkt_name) const {
        auto it = pit_.find(pkt_name);
        return it == pit_.end() ? nullptr : &it->second;
    }
    ContentStore& content_store() { return cs_; }

    std::uint64_t unsatisfied_count(std::size_t face, int content_class) const {
        const std::vector<std::uint64_t>& row = unsatisfied_[face];
        return std::size_t(content_class) < row.size() ? row[content_class] : 0;
    }

    // Cross-checks the incremental unsatisfied counters against a full PIT
    // scan. Test hook; not called on the hot path.
    bool verify_unsatisfied_counts() const {
        std::vector<std::unordered_map<int, std::uint64_t>> scan(faces_.size());
        for (const auto& [pkt_name, entry] : pit_)
            ++scan[entry.out_face][entry.content_class];
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            for (std::size_t k = 0; k < unsatisfied_[f].size(); ++k) {
                const auto it = scan[f].find(int(k));
                const std::uint64_t expect = it == scan[f].end() ? 0 : it->second;
                if (unsatisfied_[f][k] != expect)
                    return false;
            }
            for (const auto& [k, count] : scan[f])
                if (unsatisfied_count(f, k) != count)
                    return false;
        }
        return true;
    }

    // Dense id for the first name component, allocating on first sight.
    int class_of(const std::string& pkt_name) {
        const std::string key(name::first_component(pkt_name));
        auto it = classes_.find(key);
        if (it != classes_.end())
            return it->second;
        const int k = int(classes_.size());
        classes_.emplace(key, k);
        for (Face& f : faces_)
            f.scheduler.register_flow(k, config_.quantum);
        return k;
    }

private:
    static constexpr double kWindowSeconds = 0.1;

    struct Face {
        double capacity_bps;
        DrrScheduler scheduler;
        std::deque<std::pair<double, std::uint32_t>> window;  // (time, bytes)
        std::uint64_t window_bytes;
    };

    void check_face(std::size_t face) const {
        if (face >= faces_.size())
            throw UsageError("NdnNode: face index out of range");
    }

    void bump_unsatisfied(std::size_t face, int content_class, int delta) {
        std::vector<std::uint64_t>& row = unsatisfied_[face];
        if (row.size() <= std::size_t(content_class))
            row.resize(content_class + 1, 0);
        if (delta < 0 && row[content_class] == 0)
            throw SimulationError("unsatisfied counter underflow on node " + id_);
        row[content_class] += delta;
    }

    // Sends a packet out `face`: up the stack for the app face, through the
    // DRR scheduler otherwise. Returns true if the packet was accepted.
    bool emit(NodeEffects& fx, std::size_t face, const Packet& pkt) {
        if (app_face_ && face == *app_face_) {
            fx.app_deliveries.push_back(pkt);
            return true;
        }
        return enqueue_egress(fx, face, pkt);
    }

    bool enqueue_egress(NodeEffects& fx, std::size_t face, const Packet& pkt) {
        Packet out = pkt;
        out.content_class = class_of(pkt.name);
        if (faces_[face].scheduler.enqueue(out.content_class, out) ==
            EnqueueResult::Dropped) {
            ++counters_.queue_drops;
            return false;
        }
        fx.faces_kicked.push_back(face);
        return true;
    }

    std::string id_;
    NodeConfig config_;
    ContentStore cs_;
    Rng* rng_;
    std::size_t network_faces_;
    std::optional<std::size_t> app_face_;
    std::vector<Face> faces_;
    std::vector<FibEntry> fib_;
    std::unordered_map<std::string, PitEntry> pit_;
    std::unordered_map<std::string, int> classes_;
    std::vector<std::vector<std::uint64_t>> unsatisfied_;  // [face][class]
    std::unique_ptr<ForwarderPolicy> policy_;
    NodeCounters counters_;
};

} // namespace ndnfwd
