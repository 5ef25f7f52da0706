#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ecgauth/features.hpp"

namespace ecgauth::proto {

// Framed binary protocol between acquisition nodes and the verification
// server. Frame layout (all integers big-endian):
//
//   magic   4 bytes  "ECGA" (45 43 47 41)
//   version 1 byte   0x01
//   type    1 byte   message type
//   len     u32      payload length, at most kMaxPayload
//   payload len bytes
//   crc     u32      CRC-32/ISO-HDLC of the payload
//
// Field encodings inside payloads: string = u16 length + UTF-8 bytes;
// real array = u32 count + count IEEE-754 binary64 values; fingerprint =
// n u32, m u32, pipeline_version u16.

inline constexpr std::uint8_t kMagic[4] = {0x45, 0x43, 0x47, 0x41};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::uint32_t kMaxPayload = 1048576;

enum class MsgType : std::uint8_t {
    enroll_req = 0x01,
    enroll_ok = 0x02,
    auth_begin = 0x03,
    session_ok = 0x04,
    feature = 0x05,
    auth_status = 0x06,
    ident_begin = 0x07,
    ident_result = 0x08,
    error = 0x7F,
};

// Wire error codes carried by Error frames.
enum WireErrc : std::uint16_t {
    wire_malformed = 1,
    wire_duplicate_subject = 2,
    wire_unknown_subject = 3,
    wire_fingerprint_mismatch = 4,
    wire_session_terminal = 5,
    wire_internal = 6,
};

struct EnrollReq {
    std::string subject;
    PipelineFingerprint fingerprint;
    std::vector<double> coeffs;
    friend bool operator==(const EnrollReq&, const EnrollReq&) = default;
};
struct EnrollOk {
    friend bool operator==(const EnrollOk&, const EnrollOk&) = default;
};
struct AuthBegin {
    std::string subject;
    PipelineFingerprint fingerprint;
    friend bool operator==(const AuthBegin&, const AuthBegin&) = default;
};
struct SessionOk {
    std::uint32_t session_nonce = 0;
    friend bool operator==(const SessionOk&, const SessionOk&) = default;
};
struct Feature {
    std::uint32_t t_signal_ms = 0;
    std::vector<double> coeffs;
    friend bool operator==(const Feature&, const Feature&) = default;
};
struct AuthStatus {
    std::uint8_t state = 0; // 0 pending, 1 accepted, 2 rejected
    bool has_cf = false;
    double cf = 0.0; // present on the wire iff has_cf
    std::uint8_t window_fill = 0;
    friend bool operator==(const AuthStatus&, const AuthStatus&) = default;
};
struct IdentBegin {
    PipelineFingerprint fingerprint;
    friend bool operator==(const IdentBegin&, const IdentBegin&) = default;
};
struct IdentResult {
    bool found = false;
    std::string subject; // present on the wire iff found
    friend bool operator==(const IdentResult&, const IdentResult&) = default;
};
struct ErrorMsg {
    std::uint16_t code = 0;
    std::string message;
    friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

using Message = std::variant<EnrollReq, EnrollOk, AuthBegin, SessionOk, Feature, AuthStatus,
                             IdentBegin, IdentResult, ErrorMsg>;

MsgType msg_type(const Message& m);

/// CRC-32/ISO-HDLC (the zlib polynomial, reflected, init and xorout
/// 0xFFFFFFFF). crc32(empty) == 0.
std::uint32_t crc32(const std::uint8_t* data, std::size_t n);

/// Serialize one message into a complete frame.
/// Throws Error(payload_too_large).
std::vector<std::uint8_t> encode(const Message& m);

/// Outcome of decoding from a (possibly partial) byte stream.
struct DecodeResult {
    bool complete = false; // false: need more bytes, nothing consumed
    Message message;
    std::size_t consumed = 0;
};

/// Decode one frame from the front of `buf`. Returns complete=false while
/// the buffer holds less than one whole frame. Throws Error with code
/// bad_magic / bad_version / crc_mismatch / unknown_type / malformed_payload;
/// each is distinct so peers can tell protocol errors from line corruption.
DecodeResult decode(const std::vector<std::uint8_t>& buf);

} // namespace ecgauth::proto
