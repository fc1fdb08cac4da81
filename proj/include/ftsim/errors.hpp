#pragma once

#include <stdexcept>

namespace ftsim {

// Bad or inconsistent configuration (file syntax, invalid values, model
// parameters that cannot be realized).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Replica placement cannot satisfy the distinct-LP constraint, or an
// instance lookup failed (which indicates an engine bug).
struct PlacementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed frame on the wire (truncated, length mismatch, oversized).
struct WireError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Socket-level failure in process mode.
struct NetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The run cannot continue: an LP went silent without a scheduled fault,
// a worker process died, or a model handler threw.
struct SimAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ftsim
