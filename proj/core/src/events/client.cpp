#include "playroom/events/client.hpp"

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

}  // namespace

BrokerClient::~BrokerClient() { close(); }

void BrokerClient::connect(const std::string& host, uint16_t port,
                           const std::string& name,
                           const std::vector<std::string>& subs) {
  close();
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw Error("socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
    throw Error("bad broker host: " + host);
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error("connect failed to " + host + ":" + std::to_string(port));
  }
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

  name_ = name;
  next_seq_ = 1;
  rx_buffer_.clear();

  nlohmann::ordered_json hello;
  hello["hello"] = {{"client", name}, {"subs", subs}};
  std::string line = hello.dump();
  line.push_back('\n');
  if (::send(fd_, line.data(), line.size(), MSG_NOSIGNAL) !=
      static_cast<ssize_t>(line.size()))
    throw Error("hello write failed");
}

void BrokerClient::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

void BrokerClient::send(Event e) {
  if (fd_ < 0) throw Error("client is not connected");
  std::lock_guard<std::mutex> lock(write_mu_);
  e.sender = name_;
  e.seq = next_seq_++;
  if (e.ts_ms == 0) e.ts_ms = now_ms();
  const std::string line = encode_event(e);
  if (::send(fd_, line.data(), line.size(), MSG_NOSIGNAL) !=
      static_cast<ssize_t>(line.size()))
    throw Error("event write failed");
}

std::optional<Event> BrokerClient::receive(int timeout_ms) {
  if (fd_ < 0) return std::nullopt;
  while (true) {
    auto nl = rx_buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = rx_buffer_.substr(0, nl + 1);
      rx_buffer_.erase(0, nl + 1);
      return decode_event(line);
    }
    pollfd p{fd_, POLLIN, 0};
    int r = ::poll(&p, 1, timeout_ms);
    if (r <= 0) return std::nullopt;
    char chunk[4096];
    ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n <= 0) return std::nullopt;
    rx_buffer_.append(chunk, static_cast<size_t>(n));
  }
}

}  // namespace playroom::events
