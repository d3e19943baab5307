// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_EVENT_ENGINE_HPP_
#define QHERALD_EVENT_ENGINE_HPP_

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qherald/errors.hpp"

namespace qherald {

// Simulation timestamps are integer nanoseconds.
using SimTime = std::uint64_t;
using EventId = std::uint64_t;

// Deterministic discrete-event scheduler.
//
// Events are totally ordered by (timestamp, insertion sequence): ties at the
// same timestamp dispatch in FIFO scheduling order. Cancellation is lazy;
// cancelled entries stay in the heap until popped but their handlers are
// released immediately, so live memory is bounded by pending events.
class EventEngine {
 public:
  using Handler = std::function<void()>;

  // Registers `fn` to run at `at`. `at == now()` is allowed and runs after
  // the current event. Throws SchedulingInPast if `at` is behind the clock.
  EventId schedule(SimTime at, Handler fn) {
    if (at < now_) {
      throw SchedulingInPast(at, now_);
    }
    EventId id = next_seq_++;
    queue_.push(Entry{at, id});
    handlers_.emplace(id, std::move(fn));
    if (handlers_.size() > max_pending_) {
      max_pending_ = handlers_.size();
    }
    return id;
  }

  // Cancels a pending event. Returns false if `id` was already dispatched
  // or cancelled. A cancelled event is never dispatched and never counted.
  bool cancel(EventId id) { return handlers_.erase(id) > 0; }

  // Dispatches every pending event with timestamp <= until, in total order,
  // including events scheduled by handlers during this call. Returns the
  // number dispatched. Afterwards the clock sits on the last dispatched
  // timestamp, or on `until` if nothing has ever been dispatched.
  std::uint64_t run(SimTime until) {
    std::uint64_t dispatched = 0;
    while (!queue_.empty() && queue_.top().at <= until) {
      Entry entry = queue_.top();
      queue_.pop();
      auto it = handlers_.find(entry.seq);
      if (it == handlers_.end()) {
        continue;  // cancelled; heap entry was stale
      }
      Handler fn = std::move(it->second);
      handlers_.erase(it);
      now_ = entry.at;
      ++dispatched;
      ++dispatched_total_;
      fn();
    }
    if (dispatched_total_ == 0 && until > now_) {
      now_ = until;
    }
    return dispatched;
  }

  // Dispatches until the queue is empty. The clock is only ever advanced by
  // dispatches, so an already-empty queue leaves it untouched.
  std::uint64_t drain() {
    std::uint64_t dispatched = 0;
    while (!queue_.empty()) {
      dispatched += run(queue_.top().at);
    }
    return dispatched;
  }

  // The timestamp of the event being dispatched, or of the last dispatched
  // event between runs. Zero before anything has run.
  SimTime now() const { return now_; }

  // Live (scheduled, not yet dispatched or cancelled) event count.
  std::size_t pending() const { return handlers_.size(); }

  // High-water mark of pending(); lets callers check queue depth stayed
  // bounded over a long run.
  std::size_t max_pending() const { return max_pending_; }

  std::uint64_t total_dispatched() const { return dispatched_total_; }

 private:
  struct Entry {
    SimTime at;
    EventId seq;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::unordered_map<EventId, Handler> handlers_;
  SimTime now_ = 0;
  EventId next_seq_ = 1;
  std::uint64_t dispatched_total_ = 0;
  std::size_t max_pending_ = 0;
};

}  // namespace qherald

#endif  // QHERALD_EVENT_ENGINE_HPP_
