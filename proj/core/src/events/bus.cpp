#include "playroom/events/bus.hpp"

namespace playroom::events {

void InProcessBus::subscribe(const std::string& client,
                             const std::vector<std::string>& patterns) {
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& p : patterns) {
    if (!valid_pattern(p)) throw BadPattern(p);
    subs_.push_back({client, p});
  }
  queues_.try_emplace(client);
}

std::vector<std::string> InProcessBus::publish(const Event& e) {
  validate_event(e);
  std::lock_guard<std::mutex> lock(mu_);
  auto recipients = broker_route(e, subs_);
  for (const auto& r : recipients) queues_[r].push_back(e);
  return recipients;
}

std::optional<Event> InProcessBus::poll(const std::string& client) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = queues_.find(client);
  if (it == queues_.end() || it->second.empty()) return std::nullopt;
  Event e = it->second.front();
  it->second.pop_front();
  return e;
}

size_t InProcessBus::pending(const std::string& client) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = queues_.find(client);
  return it == queues_.end() ? 0 : it->second.size();
}

}  // namespace playroom::events
