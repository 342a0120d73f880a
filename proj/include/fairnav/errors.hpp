#pragma once

#include <stdexcept>
#include <string>

namespace fairnav {

// Bad scenario / world / formation configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rejection sampling could not fit every entity into the arena.
struct PlacementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument shapes disagree (e.g. action count vs agent count).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// External policy process misbehaved: bad message, timeout, bad action code.
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fairnav
