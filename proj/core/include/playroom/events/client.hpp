#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "playroom/events/event.hpp"

namespace playroom::events {

// Blocking line-oriented broker client. Sequence numbers are assigned here,
// one stream per connection. A connection has one logical writer at a time;
// the internal mutex only protects against accidental interleaving.
class BrokerClient {
 public:
  BrokerClient() = default;
  ~BrokerClient();

  BrokerClient(const BrokerClient&) = delete;
  BrokerClient& operator=(const BrokerClient&) = delete;

  void connect(const std::string& host, uint16_t port, const std::string& name,
               const std::vector<std::string>& subs);
  void close();
  bool connected() const { return fd_ >= 0; }

  const std::string& name() const { return name_; }

  // Fills sender/seq/ts (ts only when unset) and writes one frame.
  void send(Event e);

  // Next event, or nullopt on timeout/EOF. timeout_ms < 0 blocks forever.
  std::optional<Event> receive(int timeout_ms);

 private:
  int fd_ = -1;
  std::string name_;
  int64_t next_seq_ = 1;
  std::string rx_buffer_;
  std::mutex write_mu_;
};

}  // namespace playroom::events
