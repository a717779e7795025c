#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ndnfwd/errors.hpp"

namespace ndnfwd {

using EventId = std::uint64_t;
using EventFn = std::function<void()>;

// Time-ordered callback queue. Events at equal times run in the order they
// were scheduled, so a run is fully determined by the schedule calls made.
// Cancellation is lazy: cancelled entries stay in the heap and are skipped
// when they surface.
class EventQueue {
public:
    double now() const { return now_; }

    std::size_t pending() const { return heap_.size() - cancelled_.size(); }
    bool empty() const { return pending() == 0; }

    EventId schedule_at(double time, EventFn fn) {
        if (time < now_)
            throw UsageError("EventQueue: cannot schedule into the past");
        const EventId id = next_id_++;
        heap_.push(Entry{time, id});
        callbacks_.emplace(id, std::move(fn));
        return id;
    }

    EventId schedule_in(double delay, EventFn fn) {
        if (delay < 0.0)
            throw UsageError("EventQueue: negative delay");
        return schedule_at(now_ + delay, std::move(fn));
    }

    // True if the event was still pending.
    bool cancel(EventId id) {
        if (!callbacks_.count(id) || cancelled_.count(id))
            return false;
        cancelled_.insert(id);
        callbacks_.erase(id);
        return true;
    }

    // Time of the next live event; pre: !empty().
    double peek_time() {
        skip_cancelled();
        return heap_.top().time;
    }

    // Runs the next event. Returns false when the queue is drained.
    bool step() {
        skip_cancelled();
        if (heap_.empty())
            return false;
        const Entry top = heap_.top();
        heap_.pop();
        auto it = callbacks_.find(top.id);
        EventFn fn = std::move(it->second);
        callbacks_.erase(it);
        now_ = top.time;
        fn();
        return true;
    }

private:
    struct Entry {
        double time;
        EventId id;
        bool operator>(const Entry& other) const {
            if (time != other.time)
                return time > other.time;
            return id > other.id;
        }
    };

    void skip_cancelled() {
        while (!heap_.empty() && cancelled_.count(heap_.top().id)) {
            cancelled_.erase(heap_.top().id);
            heap_.pop();
        }
    }

    double now_ = 0.0;
    EventId next_id_ = 1;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap_;
    std::unordered_map<EventId, EventFn> callbacks_;
    std::unordered_set<EventId> cancelled_;
};

} // namespace ndnfwd
