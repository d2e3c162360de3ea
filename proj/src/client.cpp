#include "ripbench/client.hpp"

namespace ripbench {

WireMessage RemoteVictim::roundtrip(const WireMessage& req) {
  ch_.send_line(encode_message(req));
  std::string line;
  if (!ch_.recv_line(line)) throw TransportError("victim closed the connection");
  WireMessage rep;
  try {
    rep = decode_message(line);
  } catch (const WireError& e) {
    throw TransportError(std::string("bad reply: ") + e.what());
  }
  if (rep.op == WireOp::Error) throw TransportError("victim error: " + rep.message);
  if (rep.id != req.id) throw TransportError("reply id does not match request id");
  return rep;
}

std::vector<ClassLabel> RemoteVictim::submit(const std::vector<FeatureVector>& batch) {
  WireMessage rep = roundtrip(make_predict((*ids_)++, batch));
  if (rep.op != WireOp::Labels) throw TransportError("expected labels reply");
  if (rep.labels.size() != batch.size()) throw TransportError("labels reply has the wrong length");
  return rep.labels;
}

void RemoteVictim::reset() {
  WireMessage req;
  req.op = WireOp::Reset;
  req.id = (*ids_)++;
  if (roundtrip(req).op != WireOp::Ack) throw TransportError("expected ack for reset");
}

VictimFactory remote_factory(LineChannel& channel, std::ostream* label_log) {
  auto ids = std::make_shared<std::int64_t>(1);
  return [&channel, label_log, ids](int trial) {
    auto remote = std::make_unique<RemoteVictim>(channel, ids);
    if (trial > 0) remote->reset();
    VictimSession s;
    s.victim = std::make_unique<RecordingVictim>(std::move(remote), label_log);
    return s;
  };
}

}  // namespace ripbench
