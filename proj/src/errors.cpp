#include "ecgauth/errors.hpp"

namespace ecgauth {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::truncated_input: return "truncated input";
    case Errc::unsupported_format: return "unsupported format";
    case Errc::malformed_header: return "malformed header";
    case Errc::empty_input: return "empty input";
    case Errc::parse_error: return "parse error";
    case Errc::input_too_short: return "input too short";
    case Errc::not_enough_peaks: return "not enough peaks";
    case Errc::flat_segment: return "flat segment";
    case Errc::length_mismatch: return "length mismatch";
    case Errc::degenerate_input: return "degenerate input";
    case Errc::fingerprint_mismatch: return "fingerprint mismatch";
    case Errc::session_terminal: return "session terminal";
    case Errc::invalid_budget: return "invalid budget";
    case Errc::invalid_threshold: return "invalid threshold";
    case Errc::empty_template_set: return "empty template set";
    case Errc::corrupt_store: return "corrupt store";
    case Errc::duplicate_subject: return "duplicate subject";
    case Errc::payload_too_large: return "payload too large";
    case Errc::bad_magic: return "bad magic";
    case Errc::bad_version: return "bad version";
    case Errc::crc_mismatch: return "crc mismatch";
    case Errc::unknown_type: return "unknown type";
    case Errc::malformed_payload: return "malformed payload";
    case Errc::connection_failed: return "connection failed";
    case Errc::protocol_error: return "protocol error";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::io_error: return "io error";
    }
    return "unknown error";
}

} // namespace ecgauth
