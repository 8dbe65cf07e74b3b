#include "playroom/events/broker.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>

namespace playroom::events {
namespace {

int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch())
      .count();
}

// Reads one '\n'-terminated line; empty optional on EOF/error/oversize.
bool read_line(int fd, std::string& out, size_t max_len, int idle_timeout_s) {
  out.clear();
  char c;
  while (true) {
    if (idle_timeout_s > 0) {
      pollfd p{fd, POLLIN, 0};
      int r = ::poll(&p, 1, idle_timeout_s * 1000);
      if (r <= 0) return false;
    }
    ssize_t n = ::recv(fd, &c, 1, 0);
    if (n <= 0) return false;
    if (c == '\n') return true;
    out.push_back(c);
    if (out.size() > max_len) return false;
  }
}

}  // namespace

Broker::Broker(BrokerConfig config) : config_(std::move(config)) {
  if (config_.max_frame_bytes < 1024)
    throw Error("max frame bytes must be >= 1024");
}

Broker::~Broker() { stop(); }

void Broker::start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error("socket() failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(config_.port);
  if (::inet_pton(AF_INET, config_.bind_address.c_str(), &addr.sin_addr) != 1)
    throw Error("bad bind address: " + config_.bind_address);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
    throw Error("bind failed on " + config_.bind_address + ":" +
                std::to_string(config_.port));
  if (::listen(listen_fd_, 16) != 0) throw Error("listen failed");

  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  bound_port_ = ntohs(bound.sin_port);

  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void Broker::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  {
    std::lock_guard<std::mutex> lock(table_mu_);
    for (auto& [name, client] : clients_) {
      (void)name;
      client->dead = true;
      ::shutdown(client->fd, SHUT_RDWR);
    }
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  for (auto& t : client_threads_)
    if (t.joinable()) t.join();
  client_threads_.clear();
  std::lock_guard<std::mutex> lock(table_mu_);
  for (auto& [name, client] : clients_) {
    (void)name;
    ::close(client->fd);
  }
  clients_.clear();
  subs_.clear();
}

void Broker::accept_loop() {
  while (running_) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (!running_) break;
      continue;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    client_threads_.emplace_back([this, fd] { serve_client(fd); });
  }
}

void Broker::serve_client(int fd) {
  std::string line;
  if (!read_line(fd, line, config_.max_frame_bytes, config_.idle_timeout_s)) {
    ::close(fd);
    return;
  }

  std::shared_ptr<Client> client;
  try {
    auto hello = nlohmann::json::parse(line);
    const auto& h = hello.at("hello");
    client = std::make_shared<Client>();
    client->name = h.at("client").get<std::string>();
    client->fd = fd;
    if (client->name.empty()) throw Error("empty client name");

    std::vector<Subscription> new_subs;
    for (const auto& p : h.value("subs", std::vector<std::string>{})) {
      if (!valid_pattern(p)) throw BadPattern(p);
      new_subs.push_back({client->name, p});
    }
    std::lock_guard<std::mutex> lock(table_mu_);
    if (clients_.count(client->name)) throw Error("duplicate client name");
    clients_[client->name] = client;
    for (auto& s : new_subs) subs_.push_back(std::move(s));
  } catch (const std::exception&) {
    ::close(fd);
    return;
  }

  while (running_ && !client->dead) {
    if (!read_line(fd, line, config_.max_frame_bytes, config_.idle_timeout_s))
      break;
    handle_frame(client, line);
  }
  drop_client(client->name, "disconnect");
}

void Broker::handle_frame(const std::shared_ptr<Client>& from,
                          const std::string& line) {
  Event e;
  try {
    e = decode_event(line + "\n");
  } catch (const MalformedFrame& ex) {
    send_monitor(from, "monitor.broker.error",
                 {{"reason", ex.what()}, {"key", ex.key()}});
    return;  // never forward a frame that failed to decode
  }
  if (e.sender != from->name) {
    send_monitor(from, "monitor.broker.error",
                 {{"reason", "sender does not match hello name"}});
    return;
  }
  if (e.seq <= from->last_seq) {
    send_monitor(from, "monitor.broker.error",
                 {{"reason", "seq must strictly increase"},
                  {"seq", e.seq},
                  {"last", from->last_seq}});
    return;
  }
  from->last_seq = e.seq;

  std::vector<std::shared_ptr<Client>> targets;
  {
    std::lock_guard<std::mutex> lock(table_mu_);
    for (const auto& name : broker_route(e, subs_)) {
      auto it = clients_.find(name);
      if (it != clients_.end()) targets.push_back(it->second);
    }
  }
  const std::string frame = line + "\n";
  for (const auto& t : targets) deliver(t, frame);
}

void Broker::deliver(const std::shared_ptr<Client>& to,
                     const std::string& line) {
  if (to->dead) return;
  std::lock_guard<std::mutex> lock(to->write_mu);
  const char* data = line.data();
  size_t left = line.size();
  while (left > 0) {
    ssize_t n = ::send(to->fd, data, left, MSG_NOSIGNAL);
    if (n <= 0) {
      to->dead = true;
      drop_client(to->name, "write failed");
      return;
    }
    data += n;
    left -= static_cast<size_t>(n);
  }
}

void Broker::drop_client(const std::string& name, const std::string& reason) {
  std::shared_ptr<Client> victim;
  {
    std::lock_guard<std::mutex> lock(table_mu_);
    auto it = clients_.find(name);
    if (it == clients_.end()) return;
    victim = it->second;
    clients_.erase(it);
    std::erase_if(subs_, [&](const Subscription& s) { return s.client == name; });
  }
  victim->dead = true;
  ::shutdown(victim->fd, SHUT_RDWR);

  // Report the drop to everyone subscribed to broker monitors.
  Event note;
  note.cls = EventClass::kMonitor;
  note.name = "monitor.broker.drop";
  note.params = {{"client", name}, {"reason", reason}};
  note.sender = "broker";
  note.seq = ++broker_seq_;
  note.ts_ms = now_ms();
  std::vector<std::shared_ptr<Client>> targets;
  {
    std::lock_guard<std::mutex> lock(table_mu_);
    for (const auto& n : broker_route(note, subs_)) {
      auto it = clients_.find(n);
      if (it != clients_.end()) targets.push_back(it->second);
    }
  }
  const std::string frame = encode_event(note, config_.max_frame_bytes);
  for (const auto& t : targets) deliver(t, frame);
}

void Broker::send_monitor(const std::shared_ptr<Client>& to,
                          const std::string& name, const Params& params) {
  Event e;
  e.cls = EventClass::kMonitor;
  e.name = name;
  e.params = params;
  e.sender = "broker";
  e.seq = ++broker_seq_;
  e.ts_ms = now_ms();
  try {
    deliver(to, encode_event(e, config_.max_frame_bytes));
  } catch (const Error&) {
    // best effort; diagnostics must not take the broker down
  }
}

std::shared_ptr<Broker::Client> Broker::find_client(const std::string& name) {
  std::lock_guard<std::mutex> lock(table_mu_);
  auto it = clients_.find(name);
  return it == clients_.end() ? nullptr : it->second;
}

}  // namespace playroom::events
