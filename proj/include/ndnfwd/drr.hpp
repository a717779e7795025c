#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ndnfwd/errors.hpp"

namespace ndnfwd {

enum class PacketKind { Interest, Data };

struct Packet {
    std::string name;
    PacketKind kind = PacketKind::Interest;
    std::uint32_t size = 0;       // bytes
    int content_class = 0;        // flow key
    double created_at = 0.0;      // simulation seconds
};

enum class EnqueueResult { Accepted, Dropped };

// Deficit round-robin scheduler over per-class FIFO flow queues.
//
// Each flow holds a byte quantum and a deficit counter. A round-robin cursor
// walks the flows that currently have backlog; a visited flow is served while
// its deficit covers the head packet, the deficit is charged per packet, and
// when the deficit runs short the flow banks one quantum and the cursor moves
// on. A flow that empties forfeits its remaining deficit.
//
// Queues tail-drop at a fixed per-flow packet capacity.
class DrrScheduler {
public:
    explicit DrrScheduler(std::size_t capacity = 100) : capacity_(capacity) {}

    void register_flow(int flow_id, std::uint32_t quantum) {
        if (quantum == 0)
            throw UsageError("DrrScheduler: quantum must be positive");
        if (flows_.count(flow_id))
            throw UsageError("DrrScheduler: flow already registered");
        FlowQueue queue;
        queue.quantum = quantum;
        flows_.emplace(flow_id, std::move(queue));
    }

    bool has_flow(int flow_id) const { return flows_.count(flow_id) != 0; }

    EnqueueResult enqueue(int flow_id, Packet pkt) {
        auto it = flows_.find(flow_id);
        if (it == flows_.end())
            throw UsageError("DrrScheduler: unknown flow id " + std::to_string(flow_id));
        if (pkt.size == 0)
            throw UsageError("DrrScheduler: packet size must be positive");
        FlowQueue& flow = it->second;
        ++total_enqueued_;
        if (flow.packets.size() >= capacity_) {
            ++total_dropped_;
            return EnqueueResult::Dropped;
        }
        if (flow.packets.empty())
            active_ring_.push_back(flow_id);
        flow.packets.push_back(std::move(pkt));
        return EnqueueResult::Accepted;
    }

    // Serves the next packet under DRR order, or nullopt when all queues are
    // empty. A single call may credit several flows before one becomes
    // eligible; it always returns a packet if any queue has backlog.
    std::optional<std::pair<int, Packet>> next_packet() {
        if (active_ring_.empty())
            return std::nullopt;
        for (;;) {
            if (cursor_ >= active_ring_.size())
                cursor_ = 0;
            const int flow_id = active_ring_[cursor_];
            FlowQueue& flow = flows_.at(flow_id);
            const std::uint32_t head_size = flow.packets.front().size;
            if (flow.deficit >= head_size) {
                Packet pkt = std::move(flow.packets.front());
                flow.packets.pop_front();
                flow.deficit -= head_size;
                ++total_served_;
                if (flow.packets.empty()) {
                    flow.deficit = 0;
                    active_ring_.erase(active_ring_.begin() + cursor_);
                }
                return std::make_pair(flow_id, std::move(pkt));
            }
            flow.deficit += flow.quantum;
            ++cursor_;
        }
    }

    bool idle() const { return active_ring_.empty(); }

    std::size_t backlog(int flow_id) const {
        auto it = flows_.find(flow_id);
        if (it == flows_.end())
            throw UsageError("DrrScheduler: unknown flow id " + std::to_string(flow_id));
        return it->second.packets.size();
    }

    std::uint64_t deficit(int flow_id) const {
        auto it = flows_.find(flow_id);
        if (it == flows_.end())
            throw UsageError("DrrScheduler: unknown flow id " + std::to_string(flow_id));
        return it->second.deficit;
    }

    std::size_t capacity() const { return capacity_; }
    std::uint64_t total_dropped() const { return total_dropped_; }
    std::uint64_t total_served() const { return total_served_; }
    // Counts every enqueue attempt, so served + dropped + backlog adds up.
    std::uint64_t total_enqueued() const { return total_enqueued_; }
    std::size_t total_backlog() const {
        std::size_t n = 0;
        for (const auto& [id, flow] : flows_)
            n += flow.packets.size();
        return n;
    }

private:
    struct FlowQueue {
        std::uint32_t quantum = 0;
        std::uint64_t deficit = 0;
        std::deque<Packet> packets;
    };

    std::size_t capacity_;
    std::unordered_map<int, FlowQueue> flows_;
    std::vector<int> active_ring_;  // flow ids with backlog, rotation order
    std::size_t cursor_ = 0;
    std::uint64_t total_dropped_ = 0;
    std::uint64_t total_served_ = 0;
    std::uint64_t total_enqueued_ = 0;
};

} // namespace ndnfwd
