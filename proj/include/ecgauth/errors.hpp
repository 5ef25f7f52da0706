#pragma once

#include <stdexcept>
#include <string>

namespace ecgauth {

enum class Errc {
    // ingest
    truncated_input,
    unsupported_format,
    malformed_header,
    empty_input,
    parse_error,
    // dsp
    input_too_short,
    not_enough_peaks,
    flat_segment,
    // matching
    length_mismatch,
    degenerate_input,
    fingerprint_mismatch,
    // authflow
    session_terminal,
    invalid_budget,
    invalid_threshold,
    empty_template_set,
    // store
    corrupt_store,
    duplicate_subject,
    // proto
    payload_too_large,
    bad_magic,
    bad_version,
    crc_mismatch,
    unknown_type,
    malformed_payload,
    connection_failed,
    protocol_error,
    // generic
    invalid_argument,
    io_error,
};

const char* errc_name(Errc c);

/// Single exception type for the whole library; `code()` identifies the
/// failure class and `detail()` carries an optional 1-based line number
/// (parse and store errors) or wire error code.
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message, long detail = -1)
        : std::runtime_error(std::move(message)), code_(code), detail_(detail) {}

    Errc code() const noexcept { return code_; }
    long detail() const noexcept { return detail_; }

private:
    Errc code_;
    long detail_;
};

} // namespace ecgauth
