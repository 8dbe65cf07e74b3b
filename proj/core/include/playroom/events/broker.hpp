#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "playroom/events/event.hpp"

namespace playroom::events {

// TCP event broker. Clients connect, send one hello line
//   {"hello":{"client":"<name>","subs":["<pattern>",...]}}
// and then exchange newline-delimited event frames. Frames that fail to
// decode are never forwarded; the sender gets a monitor.broker.error event.
class Broker {
 public:
  explicit Broker(BrokerConfig config);
  ~Broker();

  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  // Binds and starts the accept loop. Throws Error on bind failure.
  void start();
  void stop();

  // Port actually bound (useful when config.port == 0).
  uint16_t port() const { return bound_port_; }

 private:
  struct Client {
    std::string name;
    int fd = -1;
    std::mutex write_mu;   // serializes frames to this recipient
    int64_t last_seq = 0;  // per-sender FIFO enforcement
    std::atomic<bool> dead{false};
  };

  void accept_loop();
  void serve_client(int fd);
  void handle_frame(const std::shared_ptr<Client>& from, const std::string& line);
  void deliver(const std::shared_ptr<Client>& to, const std::string& line);
  void drop_client(const std::string& name, const std::string& reason);
  void send_monitor(const std::shared_ptr<Client>& to, const std::string& name,
                    const Params& params);

  std::shared_ptr<Client> find_client(const std::string& name);

  BrokerConfig config_;
  int listen_fd_ = -1;
  uint16_t bound_port_ = 0;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::vector<std::thread> client_threads_;

  std::mutex table_mu_;  // guards subs_ and clients_
  std::vector<Subscription> subs_;
  std::map<std::string, std::shared_ptr<Client>> clients_;
  std::atomic<int64_t> broker_seq_{0};
};

}  // namespace playroom::events
