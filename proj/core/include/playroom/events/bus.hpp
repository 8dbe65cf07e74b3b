#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "playroom/events/event.hpp"

namespace playroom::events {

// Broker semantics over in-process queues: same routing, per-sender FIFO,
// sender exclusion. Used by the scenario harness and by tests that do not
// need a socket.
class InProcessBus {
 public:
  void subscribe(const std::string& client,
                 const std::vector<std::string>& patterns);

  // Routes and enqueues; returns the recipient list.
  std::vector<std::string> publish(const Event& e);

  std::optional<Event> poll(const std::string& client);

  size_t pending(const std::string& client) const;

 private:
  mutable std::mutex mu_;
  std::vector<Subscription> subs_;
  std::map<std::string, std::deque<Event>> queues_;
};

}  // namespace playroom::events
