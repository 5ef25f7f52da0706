#include "ecgauth/proto.hpp"

#include <bit>
#include <cstring>

#include "ecgauth/errors.hpp"

namespace ecgauth::proto {

namespace {

struct CrcTable {
    std::uint32_t entry[256];
    CrcTable() {
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            entry[i] = c;
        }
    }
};

const CrcTable kCrc;

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) {
        buf_.push_back(static_cast<std::uint8_t>(v >> 8));
        buf_.push_back(static_cast<std::uint8_t>(v));
    }
    void u32(std::uint32_t v) {
        buf_.push_back(static_cast<std::uint8_t>(v >> 24));
        buf_.push_back(static_cast<std::uint8_t>(v >> 16));
        buf_.push_back(static_cast<std::uint8_t>(v >> 8));
        buf_.push_back(static_cast<std::uint8_t>(v));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int shift = 56; shift >= 0; shift -= 8)
            buf_.push_back(static_cast<std::uint8_t>(bits >> shift));
    }
    void str(const std::string& s) {
        if (s.size() > 0xFFFF)
            throw Error(Errc::payload_too_large, "string longer than a u16 length allows");
        u16(static_cast<std::uint16_t>(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }
    void reals(const std::vector<double>& v) {
        u32(static_cast<std::uint32_t>(v.size()));
        for (double d : v)
            f64(d);
    }
    void fingerprint(const PipelineFingerprint& fp) {
        u32(fp.n_resample);
        u32(fp.m_coeffs);
        u16(fp.pipeline_version);
    }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t n) : data_(data), n_(n) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        const std::uint16_t v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v = (v << 8) | data_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits = (bits << 8) | data_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 8;
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::string str() {
        const std::uint16_t len = u16();
        need(len);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), len);
        pos_ += len;
        return s;
    }
    std::vector<double> reals() {
        const std::uint32_t count = u32();
        if (static_cast<std::size_t>(count) * 8 > n_ - pos_)
            throw Error(Errc::malformed_payload, "real array count exceeds payload");
        std::vector<double> v(count);
        for (std::uint32_t i = 0; i < count; ++i)
            v[i] = f64();
        return v;
    }
    PipelineFingerprint fingerprint() {
        PipelineFingerprint fp;
        fp.n_resample = u32();
        fp.m_coeffs = u32();
        fp.pipeline_version = u16();
        return fp;
    }
    void done() const {
        if (pos_ != n_)
            throw Error(Errc::malformed_payload, "payload has trailing bytes");
    }

private:
    void need(std::size_t k) const {
        if (n_ - pos_ < k)
            throw Error(Errc::malformed_payload, "payload ends mid-field");
    }
    const std::uint8_t* data_;
    std::size_t n_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> encode_payload(const Message& m) {
    Writer w;
    std::visit(
        [&w](const auto& msg) {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, EnrollReq>) {
                w.str(msg.subject);
                w.fingerprint(msg.fingerprint);
                w.reals(msg.coeffs);
            } else if constexpr (std::is_same_v<T, EnrollOk>) {
                // empty payload
            } else if constexpr (std::is_same_v<T, AuthBegin>) {
                w.str(msg.subject);
                w.fingerprint(msg.fingerprint);
            } else if constexpr (std::is_same_v<T, SessionOk>) {
                w.u32(msg.session_nonce);
            } else if constexpr (std::is_same_v<T, Feature>) {
                w.u32(msg.t_signal_ms);
                w.reals(msg.coeffs);
            } else if constexpr (std::is_same_v<T, AuthStatus>) {
                w.u8(msg.state);
                w.u8(msg.has_cf ? 1 : 0);
                if (msg.has_cf)
                    w.f64(msg.cf);
                w.u8(msg.window_fill);
            } else if constexpr (std::is_same_v<T, IdentBegin>) {
                w.fingerprint(msg.fingerprint);
            } else if constexpr (std::is_same_v<T, IdentResult>) {
                w.u8(msg.found ? 1 : 0);
                if (msg.found)
                    w.str(msg.subject);
            } else if constexpr (std::is_same_v<T, ErrorMsg>) {
                w.u16(msg.code);
                w.str(msg.message);
            }
        },
        m);
    return w.take();
}

Message decode_payload(MsgType type, const std::uint8_t* data, std::size_t n) {
    Reader r(data, n);
    Message m;
    switch (type) {
    case MsgType::enroll_req: {
        EnrollReq msg;
        msg.subject = r.str();
        msg.fingerprint = r.fingerprint();
        msg.coeffs = r.reals();
        m = std::move(msg);
        break;
    }
    case MsgType::enroll_ok:
        m = EnrollOk{};
        break;
    case MsgType::auth_begin: {
        AuthBegin msg;
        msg.subject = r.str();
        msg.fingerprint = r.fingerprint();
        m = std::move(msg);
        break;
    }
    case MsgType::session_ok: {
        SessionOk msg;
        msg.session_nonce = r.u32();
        m = msg;
        break;
    }
    case MsgType::feature: {
        Feature msg;
        msg.t_signal_ms = r.u32();
        msg.coeffs = r.reals();
        m = std::move(msg);
        break;
    }
    case MsgType::auth_status: {
        AuthStatus msg;
        msg.state = r.u8();
        msg.has_cf = r.u8() != 0;
        if (msg.has_cf)
            msg.cf = r.f64();
        msg.window_fill = r.u8();
        m = msg;
        break;
    }
    case MsgType::ident_begin: {
        IdentBegin msg;
        msg.fingerprint = r.fingerprint();
        m = msg;
        break;
    }
    case MsgType::ident_result: {
        IdentResult msg;
        msg.found = r.u8() != 0;
        if (msg.found)
            msg.subject = r.str();
        m = std::move(msg);
        break;
    }
    case MsgType::error: {
        ErrorMsg msg;
        msg.code = r.u16();
        msg.message = r.str();
        m = std::move(msg);
        break;
    }
    default:
        throw Error(Errc::unknown_type, "unknown message type");
    }
    r.done();
    return m;
}

} // namespace

MsgType msg_type(const Message& m) {
    return std::visit(
        [](const auto& msg) {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, EnrollReq>) return MsgType::enroll_req;
            else if constexpr (std::is_same_v<T, EnrollOk>) return MsgType::enroll_ok;
            else if constexpr (std::is_same_v<T, AuthBegin>) return MsgType::auth_begin;
            else if constexpr (std::is_same_v<T, SessionOk>) return MsgType::session_ok;
            else if constexpr (std::is_same_v<T, Feature>) return MsgType::feature;
            else if constexpr (std::is_same_v<T, AuthStatus>) return MsgType::auth_status;
            else if constexpr (std::is_same_v<T, IdentBegin>) return MsgType::ident_begin;
            else if constexpr (std::is_same_v<T, IdentResult>) return MsgType::ident_result;
            else return MsgType::error;
        },
        m);
}

std::uint32_t crc32(const std::uint8_t* data, std::size_t n) {
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < n; ++i)
        c = kCrc.entry[(c ^ data[i]) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::vector<std::uint8_t> encode(const Message& m) {
    const std::vector<std::uint8_t> payload = encode_payload(m);
    if (payload.size() > kMaxPayload)
        throw Error(Errc::payload_too_large, "payload exceeds the frame limit");

    std::vector<std::uint8_t> frame;
    frame.reserve(14 + payload.size());
    frame.insert(frame.end(), std::begin(kMagic), std::end(kMagic));
    frame.push_back(kVersion);
    frame.push_back(static_cast<std::uint8_t>(msg_type(m)));
    const auto len = static_cast<std::uint32_t>(payload.size());
    frame.push_back(static_cast<std::uint8_t>(len >> 24));
    frame.push_back(static_cast<std::uint8_t>(len >> 16));
    frame.push_back(static_cast<std::uint8_t>(len >> 8));
    frame.push_back(static_cast<std::uint8_t>(len));
    frame.insert(frame.end(), payload.begin(), payload.end());
    const std::uint32_t crc = crc32(payload.data(), payload.size());
    frame.push_back(static_cast<std::uint8_t>(crc >> 24));
    frame.push_back(static_cast<std::uint8_t>(crc >> 16));
    frame.push_back(static_cast<std::uint8_t>(crc >> 8));
    frame.push_back(static_cast<std::uint8_t>(crc));
    return frame;
}

DecodeResult decode(const std::vector<std::uint8_t>& buf) {
    // Magic can be rejected as soon as any of its bytes disagree.
    const std::size_t magic_avail = std::min<std::size_t>(buf.size(), 4);
    for (std::size_t i = 0; i < magic_avail; ++i)
        if (buf[i] != kMagic[i])
            throw Error(Errc::bad_magic, "frame does not start with the protocol magic");

    DecodeResult res;
    if (buf.size() < 10)
        return res; // need more data

    if (buf[4] != kVersion)
        throw Error(Errc::bad_version, "unsupported protocol version");

    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i)
        len = (len << 8) | buf[6 + static_cast<std::size_t>(i)];
    if (len > kMaxPayload)
        throw Error(Errc::malformed_payload, "declared payload length exceeds the frame limit");

    const std::size_t total = 10 + static_cast<std::size_t>(len) + 4;
    if (buf.size() < total)
        return res; // need more data

    const std::uint8_t* payload = buf.data() + 10;
    std::uint32_t declared_crc = 0;
    for (int i = 0; i < 4; ++i)
        declared_crc = (declared_crc << 8) | buf[10 + len + static_cast<std::size_t>(i)];
    if (crc32(payload, len) != declared_crc)
        throw Error(Errc::crc_mismatch, "payload checksum mismatch");

    const std::uint8_t type = buf[5];
    switch (type) {
    case 0x01: case 0x02: case 0x03: case 0x04: case 0x05:
    case 0x06: case 0x07: case 0x08: case 0x7F:
        break;
    default:
        throw Error(Errc::unknown_type, "unknown message type");
    }

    res.message = decode_payload(static_cast<MsgType>(type), payload, len);
    res.consumed = total;
    res.complete = true;
    return res;
}

} // namespace ecgauth::proto
