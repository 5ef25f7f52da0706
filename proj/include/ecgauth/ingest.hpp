#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ecgauth {

enum class SignalSource { csv, wfdb212, synthetic };

/// A sampled single-channel ECG signal, amplitudes in millivolts.
/// Invariants: fs_hz > 0, at least one sample, every sample finite.
struct EcgRecord {
    std::string record_id;
    double fs_hz = 0.0;
    std::vector<double> samples;
    SignalSource source = SignalSource::synthetic;

    double duration_ms() const { return 1000.0 * static_cast<double>(samples.size()) / fs_hz; }
};

/// Throws Error(invalid_argument) if the record violates its invariants.
void validate(const EcgRecord& rec);

/// Unpack WFDB format-212 samples: each 3-byte group (b0,b1,b2) holds two
/// 12-bit two's-complement values,
///   s1 = ((b1 & 0x0F) << 8) | b0
///   s2 = ((b1 & 0xF0) << 4) | b2
/// An odd count consumes only the first two bytes of the final group.
/// Throws Error(truncated_input) if fewer than ceil(n_samples*3/2) bytes.
std::vector<int> decode_212(const std::vector<std::uint8_t>& bytes, std::size_t n_samples);

/// Read channel 0 of a WFDB record through its header file. Supported header
/// subset: first non-comment line "name n_sig fs n_samples"; per-signal lines
/// with field 1 = signal file, 2 = format code (must be 212), 3 = gain in ADC
/// units per mV, 5 = baseline. Samples are converted to mV as
/// (raw - baseline) / gain.
EcgRecord read_wfdb(const std::filesystem::path& header_path);

/// Read a CSV of one amplitude (mV) per line; an optional second column is
/// ignored. Throws Error(empty_input) or Error(parse_error) with the 1-based
/// line number.
EcgRecord read_csv(const std::filesystem::path& path, double fs_hz);

} // namespace ecgauth
