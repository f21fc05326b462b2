#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fbl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested power exceeds the link power budget (blocklength too short).
struct InfeasiblePowerError : Error {
    using Error::Error;
};

/// tau = Qinv(eps)/sqrt(m_hat) outside [0, sqrt(3)/3): the strict-convexity
/// threshold does not exist.
struct TauOutOfRangeError : Error {
    using Error::Error;
};

/// The constraint set of a scheduling problem is empty.
struct InfeasibleError : Error {
    using Error::Error;
};

struct NotConvexModeError : Error {
    using Error::Error;
};

/// Instance construction failure; `kind` names the violated assumption.
struct ValidationError : Error {
    enum class Kind { BadPacket, BadLink, NotFifo, NotSingleSchedulingInterval };
    Kind kind;
    ValidationError(Kind k, const std::string& what) : Error(what), kind(k) {}
};

/// One packet: payload size, release window and link quality.
/// Times are in channel symbols; the channel gain is |h~|^2 with unit
/// noise power, constant for the packet (quasi-static block fading).
struct Packet {
    double bits = 0;      // N, payload bits
    double arrival = 0;   // G, symbols
    double deadline = 0;  // D, symbols
    double epsilon = 0;   // target packet error probability
    double gain = 0;      // h > 0

    void validate() const {
        if (!(bits > 0))
            throw ValidationError(ValidationError::Kind::BadPacket, "packet bits must be > 0");
        if (!(arrival >= 0) || !(deadline > arrival))
            throw ValidationError(ValidationError::Kind::BadPacket,
                                  "packet times must satisfy 0 <= arrival < deadline");
        // eps = 0.5 is admitted: it is the Shannon-capacity reference design.
        if (!(epsilon > 0 && epsilon <= 0.5))
            throw ValidationError(ValidationError::Kind::BadPacket,
                                  "packet error probability must lie in (0, 0.5]");
        if (!(gain > 0))
            throw ValidationError(ValidationError::Kind::BadPacket, "channel gain must be > 0");
    }
};

/// Static link parameters shared by all packets.
struct Link {
    double min_blocklength = 200.0;    // m_hat, symbols; normal approximation valid above
    double max_power = 398.10717055349725; // watts (26 dBW default)
    double symbol_duration = 66.7e-6;  // seconds (LTE symbol)

    void validate() const {
        if (!(min_blocklength >= 100.0))
            throw ValidationError(ValidationError::Kind::BadLink,
                                  "min blocklength must be >= 100 symbols");
        if (!(max_power > 0) || !(symbol_duration > 0))
            throw ValidationError(ValidationError::Kind::BadLink,
                                  "max power and symbol duration must be > 0");
    }
};

/// A (blocklength, power) pair lying on the finite-blocklength rate curve.
struct CapacityPoint {
    double blocklength = 0; // m, symbols (continuous)
    double power = 0;       // p, watts
    double snr = 0;         // x = p * h
};

} // namespace fbl
