#include "ecgauth/ingest.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ecgauth/errors.hpp"

namespace ecgauth {

namespace {

int sign_extend_12(int v) { return (v & 0x800) ? v - 4096 : v; }

// Leading numeric part of a token ("212" from "212", "360" from "360/..."),
// requiring at least one digit.
bool parse_leading_long(const std::string& tok, long& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin)
        return false;
    out = v;
    return true;
}

bool parse_leading_double(const std::string& tok, double& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin)
        return false;
    out = v;
    return true;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok)
        out.push_back(tok);
    return out;
}

} // namespace

void validate(const EcgRecord& rec) {
    if (!(rec.fs_hz > 0.0))
        throw Error(Errc::invalid_argument, "sampling frequency must be positive");
    if (rec.samples.empty())
        throw Error(Errc::invalid_argument, "record has no samples");
    for (double v : rec.samples)
        if (!std::isfinite(v))
            throw Error(Errc::invalid_argument, "record contains a non-finite sample");
}

std::vector<int> decode_212(const std::vector<std::uint8_t>& bytes, std::size_t n_samples) {
    const std::size_t needed = (n_samples * 3 + 1) / 2;
    if (bytes.size() < needed)
        throw Error(Errc::truncated_input, "format 212 stream shorter than sample count requires");

    std::vector<int> out;
    out.reserve(n_samples);
    std::size_t pos = 0;
    while (out.size() < n_samples) {
        const int b0 = bytes[pos];
        const int b1 = bytes[pos + 1];
        out.push_back(sign_extend_12(((b1 & 0x0F) << 8) | b0));
        if (out.size() == n_samples)
            break;
        const int b2 = bytes[pos + 2];
        out.push_back(sign_extend_12(((b1 & 0xF0) << 4) | b2));
        pos += 3;
    }
    return out;
}

EcgRecord read_wfdb(const std::filesystem::path& header_path) {
    std::ifstream in(header_path);
    if (!in)
        throw Error(Errc::io_error, "cannot open header: " + header_path.string());

    std::string line;
    std::vector<std::string> record_line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        record_line = split_ws(line);
        break;
    }
    if (record_line.size() < 4)
        throw Error(Errc::malformed_header, "record line needs name, signal count, fs, samples");

    const std::string name = record_line[0];
    long n_sig = 0;
    double fs = 0.0;
    long n_samples = 0;
    if (!parse_leading_long(record_line[1], n_sig) || n_sig < 1)
        throw Error(Errc::malformed_header, "bad signal count: " + record_line[1]);
    if (!parse_leading_double(record_line[2], fs) || fs <= 0.0)
        throw Error(Errc::malformed_header, "bad sampling frequency: " + record_line[2]);
    if (!parse_leading_long(record_line[3], n_samples) || n_samples < 1)
        throw Error(Errc::malformed_header, "bad sample count: " + record_line[3]);

    // First signal line describes channel 0.
    std::vector<std::string> sig_line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        sig_line = split_ws(line);
        break;
    }
    if (sig_line.size() < 5)
        throw Error(Errc::malformed_header, "signal line needs file, format, gain, .., baseline");

    long format = 0;
    if (!parse_leading_long(sig_line[1], format))
        throw Error(Errc::malformed_header, "bad format code: " + sig_line[1]);
    if (format != 212)
        throw Error(Errc::unsupported_format, "only format 212 is supported, got " + sig_line[1]);

    double gain = 0.0;
    if (!parse_leading_double(sig_line[2], gain) || gain <= 0.0)
        throw Error(Errc::malformed_header, "bad gain: " + sig_line[2]);
    long baseline = 0;
    if (!parse_leading_long(sig_line[4], baseline))
        throw Error(Errc::malformed_header, "bad baseline: " + sig_line[4]);

    const std::filesystem::path dat_path = header_path.parent_path() / sig_line[0];
    std::ifstream dat(dat_path, std::ios::binary);
    if (!dat)
        throw Error(Errc::io_error, "cannot open signal file: " + dat_path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(dat)),
                                    std::istreambuf_iterator<char>());

    // Format 212 interleaves channels sample-frame by sample-frame; pull
    // every n_sig-th value starting at 0 to isolate channel 0.
    const std::size_t total = static_cast<std::size_t>(n_samples) * static_cast<std::size_t>(n_sig);
    const std::vector<int> raw = decode_212(bytes, total);

    EcgRecord rec;
    rec.record_id = name;
    rec.fs_hz = fs;
    rec.source = SignalSource::wfdb212;
    rec.samples.reserve(static_cast<std::size_t>(n_samples));
    for (std::size_t i = 0; i < total; i += static_cast<std::size_t>(n_sig))
        rec.samples.push_back((raw[i] - static_cast<double>(baseline)) / gain);
    validate(rec);
    return rec;
}

EcgRecord read_csv(const std::filesystem::path& path, double fs_hz) {
    if (fs_hz <= 0.0)
        throw Error(Errc::invalid_argument, "sampling frequency must be positive");
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io_error, "cannot open csv: " + path.string());

    EcgRecord rec;
    rec.record_id = path.stem().string();
    rec.fs_hz = fs_hz;
    rec.source = SignalSource::csv;

    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        // First comma-separated field only; anything after it is ignored.
        const std::size_t comma = line.find(',');
        const std::string field = comma == std::string::npos ? line : line.substr(0, comma);
        const char* begin = field.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin || !std::isfinite(v))
            throw Error(Errc::parse_error, "bad sample on line " + std::to_string(line_no),
                        line_no);
        // Only whitespace may trail the number.
        for (; *end != '\0'; ++end)
            if (*end != ' ' && *end != '\t')
                throw Error(Errc::parse_error, "bad sample on line " + std::to_string(line_no),
                            line_no);
        rec.samples.push_back(v);
    }
    if (rec.samples.empty())
        throw Error(Errc::empty_input, "csv has no samples: " + path.string());
    validate(rec);
    return rec;
}

} // namespace ecgauth
