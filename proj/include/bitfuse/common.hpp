#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace bitfuse {

// Error taxonomy. Configuration errors cover bad specs/manifests, usage
// errors cover contract violations at call sites, protocol errors cover
// malformed agent traffic (e.g. abstentions on a one-bit channel).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

using PointView = std::span<const double>;

inline double squared_distance(PointView a, PointView b) {
    if (a.size() != b.size())
        throw UsageError("dimension mismatch: " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Closed ball, matching the B_r(x) = { x' : ||x - x'||_2 <= r } convention:
// boundary points are inside.
inline bool in_closed_ball(PointView x, PointView center, double radius) {
    return squared_distance(x, center) <= radius * radius;
}

}  // namespace bitfuse
