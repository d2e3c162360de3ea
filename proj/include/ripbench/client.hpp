#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

#include "ripbench/attack.hpp"
#include "ripbench/wire.hpp"

namespace ripbench {

// Victim reached over the NDJSON protocol. Labels are the only thing that crosses back.
class RemoteVictim : public VictimHandle {
 public:
  // Request ids come from `ids` so they stay unique across trials on one connection.
  explicit RemoteVictim(LineChannel& channel, std::shared_ptr<std::int64_t> ids = std::make_shared<std::int64_t>(1))
      : ch_(channel), ids_(std::move(ids)) {}
  std::vector<ClassLabel> submit(const std::vector<FeatureVector>& batch) override;
  // Asks the server to restore its source weights; needs a server started with reset allowed.
  void reset();

 private:
  WireMessage roundtrip(const WireMessage& req);

  LineChannel& ch_;
  std::shared_ptr<std::int64_t> ids_;
};

// Trial 0 uses the connection as is; later trials reset the server first.
VictimFactory remote_factory(LineChannel& channel, std::ostream* label_log = nullptr);

}  // namespace ripbench
