#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ripbench/core.hpp"

namespace ripbench {

enum class WireOp { Predict, Labels, Reset, Ack, Error };

// One NDJSON line. Payload key depends on op: predict -> "batch", labels -> "labels",
// error -> "message"; reset and ack carry none.
struct WireMessage {
  WireOp op = WireOp::Ack;
  std::int64_t id = 0;
  std::vector<FeatureVector> batch;
  std::vector<ClassLabel> labels;
  std::string message;

  bool operator==(const WireMessage&) const = default;
};

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_string(WireOp op);
// Newline-terminated JSON with keys in the order op, id, payload.
std::string encode_message(const WireMessage& msg);
// Accepts a line with or without the trailing newline; throws WireError on anything malformed.
WireMessage decode_message(const std::string& line);

WireMessage make_predict(std::int64_t id, std::vector<FeatureVector> batch);
WireMessage make_labels(std::int64_t id, std::vector<ClassLabel> labels);
WireMessage make_error(std::int64_t id, std::string message);

// Blocking line-oriented TCP stream.
class LineChannel {
 public:
  explicit LineChannel(int fd);
  ~LineChannel();
  LineChannel(const LineChannel&) = delete;
  LineChannel& operator=(const LineChannel&) = delete;

  static std::unique_ptr<LineChannel> connect(const std::string& host, int port);

  // Writes the bytes as given; callers supply the trailing newline.
  void send_line(const std::string& line);
  // The returned line keeps its newline. False on orderly shutdown by the peer.
  bool recv_line(std::string& line);

 private:
  int fd_;
  std::string buf_;
};

// Listening socket on 127.0.0.1 unless host says otherwise; port 0 picks a free port.
class Listener {
 public:
  explicit Listener(int port, const std::string& host = "127.0.0.1");
  ~Listener();
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  int port() const { return port_; }
  std::unique_ptr<LineChannel> accept();

 private:
  int fd_;
  int port_;
};

}  // namespace ripbench
