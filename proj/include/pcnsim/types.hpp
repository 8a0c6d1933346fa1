#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace pcnsim {

/// Amounts are millisatoshi throughout.
using Msat = std::int64_t;
/// Simulated time, nanoseconds since simulation start.
using TimeNs = std::int64_t;

using NodeIndex = std::uint32_t;
using ChannelIndex = std::uint32_t;

inline constexpr Msat kMsatPerSat = 1000;
inline constexpr TimeNs kNsPerMs = 1'000'000;

struct NodeId {
    std::string value;

    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct ChannelId {
    std::string value;

    friend auto operator<=>(const ChannelId&, const ChannelId&) = default;
};

/// Correlation handle standing in for the payment hash H(r).
struct PaymentId {
    std::uint64_t value = 0;

    friend auto operator<=>(const PaymentId&, const PaymentId&) = default;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition.
class ContractViolation : public Error {
public:
    using Error::Error;
};

} // namespace pcnsim

template <>
struct std::hash<pcnsim::PaymentId> {
    std::size_t operator()(const pcnsim::PaymentId& id) const noexcept
    {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
