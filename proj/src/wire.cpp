#include "ripbench/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <json.hpp>

namespace ripbench {
namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void sys_fail(const std::string& what) { throw WireError(what + ": " + std::strerror(errno)); }

WireOp parse_op(const std::string& s) {
  if (s == "predict") return WireOp::Predict;
  if (s == "labels") return WireOp::Labels;
  if (s == "reset") return WireOp::Reset;
  if (s == "ack") return WireOp::Ack;
  if (s == "error") return WireOp::Error;
  throw WireError("unknown op '" + s + "'");
}

}  // namespace

std::string to_string(WireOp op) {
  switch (op) {
    case WireOp::Predict: return "predict";
    case WireOp::Labels: return "labels";
    case WireOp::Reset: return "reset";
    case WireOp::Ack: return "ack";
    case WireOp::Error: return "error";
  }
  return "?";
}

std::string encode_message(const WireMessage& msg) {
  ojson j;
  j["op"] = to_string(msg.op);
  j["id"] = msg.id;
  switch (msg.op) {
    case WireOp::Predict: {
      ojson rows = ojson::array();
      for (const auto& r : msg.batch) {
        for (double v : r)
          if (!std::isfinite(v)) throw WireError("cannot encode non-finite feature");
        rows.push_back(r);
      }
      j["batch"] = std::move(rows);
      break;
    }
    case WireOp::Labels: j["labels"] = msg.labels; break;
    case WireOp::Error: j["message"] = msg.message; break;
    case WireOp::Reset:
    case WireOp::Ack: break;
  }
  return j.dump() + "\n";
}

WireMessage decode_message(const std::string& line) {
  std::string text = line;
  if (!text.empty() && text.back() == '\n') text.pop_back();
  if (!text.empty() && text.back() == '\r') text.pop_back();
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const std::exception& e) {
    throw WireError(std::string("malformed json: ") + e.what());
  }
  if (!j.is_object()) throw WireError("message must be a JSON object");
  if (!j.contains("op") || !j["op"].is_string()) throw WireError("missing op");
  if (!j.contains("id") || !j["id"].is_number_integer()) throw WireError("missing integer id");
  WireMessage m;
  m.op = parse_op(j["op"].get<std::string>());
  m.id = j["id"].get<std::int64_t>();
  try {
    switch (m.op) {
      case WireOp::Predict: {
        const auto& rows = j.at("batch");
        if (!rows.is_array()) throw WireError("batch must be an array");
        std::size_t width = 0;
        for (const auto& r : rows) {
          if (!r.is_array()) throw WireError("batch rows must be arrays");
          FeatureVector x;
          for (const auto& v : r) {
            if (!v.is_number()) throw WireError("features must be numbers");
            x.push_back(v.get<double>());
          }
          if (m.batch.empty()) width = x.size();
          else if (x.size() != width) throw WireError("ragged batch");
          m.batch.push_back(std::move(x));
        }
        break;
      }
      case WireOp::Labels:
        for (const auto& v : j.at("labels")) {
          if (!v.is_number_integer()) throw WireError("labels must be integers");
          m.labels.push_back(v.get<ClassLabel>());
        }
        break;
      case WireOp::Error: m.message = j.at("message").get<std::string>(); break;
      case WireOp::Reset:
      case WireOp::Ack: break;
    }
  } catch (const nlohmann::json::exception& e) {
    throw WireError(std::string("bad payload: ") + e.what());
  }
  return m;
}

WireMessage make_predict(std::int64_t id, std::vector<FeatureVector> batch) {
  WireMessage m;
  m.op = WireOp::Predict;
  m.id = id;
  m.batch = std::move(batch);
  return m;
}

WireMessage make_labels(std::int64_t id, std::vector<ClassLabel> labels) {
  WireMessage m;
  m.op = WireOp::Labels;
  m.id = id;
  m.labels = std::move(labels);
  return m;
}

WireMessage make_error(std::int64_t id, std::string message) {
  WireMessage m;
  m.op = WireOp::Error;
  m.id = id;
  m.message = std::move(message);
  return m;
}

LineChannel::LineChannel(int fd) : fd_(fd) {
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

LineChannel::~LineChannel() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<LineChannel> LineChannel::connect(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
    throw WireError("resolve " + host + ": " + ::gai_strerror(rc));
  int fd = -1;
  for (addrinfo* p = res; p != nullptr; p = p->ai_next) {
    fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) sys_fail("connect " + host + ":" + service);
  return std::make_unique<LineChannel>(fd);
}

void LineChannel::send_line(const std::string& line) {
  std::size_t off = 0;
  while (off < line.size()) {
    ssize_t n = ::send(fd_, line.data() + off, line.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_fail("send");
    }
    off += static_cast<std::size_t>(n);
  }
}

bool LineChannel::recv_line(std::string& line) {
  for (;;) {
    auto nl = buf_.find('\n');
    if (nl != std::string::npos) {
      line = buf_.substr(0, nl + 1);
      buf_.erase(0, nl + 1);
      return true;
    }
    char chunk[65536];
    ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_fail("recv");
    }
    if (n == 0) {
      if (buf_.empty()) return false;
      line = std::move(buf_);
      buf_.clear();
      return true;
    }
    buf_.append(chunk, static_cast<std::size_t>(n));
  }
}

Listener::Listener(int port, const std::string& host) : fd_(-1), port_(port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) sys_fail("socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw WireError("bad listen address " + host);
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd_);
    sys_fail("bind");
  }
  if (::listen(fd_, 1) != 0) {
    ::close(fd_);
    sys_fail("listen");
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<LineChannel> Listener::accept() {
  for (;;) {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<LineChannel>(fd);
    if (errno != EINTR) sys_fail("accept");
  }
}

}  // namespace ripbench
