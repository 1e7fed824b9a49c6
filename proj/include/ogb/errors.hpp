#pragma once

#include <stdexcept>
#include <string>

namespace ogb {

// Invalid or inconsistent configuration (empty search space, missing files, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Misuse of a stateful protocol (e.g. stepping a finished episode).
struct ProtocolError : std::logic_error {
  using std::logic_error::logic_error;
};

// Remote victim transport failure after retries. Carries the attempt count.
struct TransportError : std::runtime_error {
  TransportError(const std::string& msg, int attempts_made)
      : std::runtime_error(msg), attempts(attempts_made) {}
  int attempts;
};

// Token bridging into a vocabulary that cannot encode.
struct BridgeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ogb
