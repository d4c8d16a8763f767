#pragma once
// RIFF/WAVE reading and writing: mono PCM 16-bit or IEEE float 32-bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "lamit/util.hpp"

namespace lamit {

struct AudioBuffer {
    std::vector<double> samples;  // [-1, 1]
    double sample_rate = 16000;

    double duration() const { return sample_rate > 0 ? samples.size() / sample_rate : 0.0; }
};

inline void validate_audio(const AudioBuffer& a) {
    if (a.sample_rate < 16000) throw validation_error("sample rate must be at least 16000 Hz");
    for (double s : a.samples)
        if (!std::isfinite(s)) throw validation_error("audio contains non-finite samples");
}

namespace wav_detail {
inline uint32_t u32(const std::string& b, size_t o) {
    return uint32_t((unsigned char)b[o]) | uint32_t((unsigned char)b[o + 1]) << 8 |
           uint32_t((unsigned char)b[o + 2]) << 16 | uint32_t((unsigned char)b[o + 3]) << 24;
}
inline uint16_t u16(const std::string& b, size_t o) {
    return uint16_t((unsigned char)b[o] | ((unsigned char)b[o + 1] << 8));
}
inline void put32(std::string& b, uint32_t v) {
    for (int i = 0; i < 4; ++i) b += static_cast<char>((v >> (8 * i)) & 0xFF);
}
inline void put16(std::string& b, uint16_t v) {
    b += static_cast<char>(v & 0xFF);
    b += static_cast<char>(v >> 8);
}
}  // namespace wav_detail

inline AudioBuffer decode_wav(const std::string& b) {
    using namespace wav_detail;
    if (b.size() < 12 || b.compare(0, 4, "RIFF") != 0 || b.compare(8, 4, "WAVE") != 0)
        throw io_error("not a RIFF/WAVE file");
    size_t pos = 12;
    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    bool have_fmt = false;
    const char* data = nullptr;
    size_t data_len = 0;
    while (pos + 8 <= b.size()) {
        std::string id = b.substr(pos, 4);
        uint32_t len = u32(b, pos + 4);
        size_t body = pos + 8;
        if (body + len > b.size()) len = static_cast<uint32_t>(b.size() - body);
        if (id == "fmt ") {
            if (len < 16) throw io_error("WAV fmt chunk too short");
            format = u16(b, body);
            channels = u16(b, body + 2);
            rate = u32(b, body + 4);
            bits = u16(b, body + 14);
            if (format == 0xFFFE && len >= 26) format = u16(b, body + 24);  // extensible: sub-format GUID
            have_fmt = true;
        } else if (id == "data") {
            data = b.data() + body;
            data_len = len;
        }
        pos = body + len + (len & 1);
    }
    if (!have_fmt || !data) throw io_error("WAV file lacks fmt or data chunk");
    if (channels != 1) throw io_error("WAV file has " + std::to_string(channels) + " channels; mono required");
    AudioBuffer a;
    a.sample_rate = rate;
    if (format == 1 && bits == 16) {
        size_t n = data_len / 2;
        a.samples.resize(n);
        for (size_t i = 0; i < n; ++i) {
            int16_t v;
            std::memcpy(&v, data + 2 * i, 2);
            a.samples[i] = v / 32768.0;
        }
    } else if (format == 3 && bits == 32) {
        size_t n = data_len / 4;
        a.samples.resize(n);
        for (size_t i = 0; i < n; ++i) {
            float v;
            std::memcpy(&v, data + 4 * i, 4);
            a.samples[i] = v;
        }
    } else {
        throw io_error("unsupported WAV encoding (format " + std::to_string(format) + ", " + std::to_string(bits) +
                       " bits); PCM 16-bit or float 32-bit required");
    }
    if (rate < 16000) throw io_error("WAV sample rate " + std::to_string(rate) + " Hz is below 16000 Hz");
    return a;
}

inline AudioBuffer read_wav(const std::string& path) { return decode_wav(util::read_file(path)); }

inline std::string encode_wav(const AudioBuffer& a, bool float32 = false, uint16_t channels = 1) {
    using namespace wav_detail;
    const uint16_t bits = float32 ? 32 : 16;
    const uint32_t frames = static_cast<uint32_t>(a.samples.size() / channels);
    const uint32_t data_len = frames * channels * (bits / 8);
    std::string b = "RIFF";
    put32(b, 36 + data_len);
    b += "WAVEfmt ";
    put32(b, 16);
    put16(b, float32 ? 3 : 1);
    put16(b, channels);
    put32(b, static_cast<uint32_t>(a.sample_rate));
    put32(b, static_cast<uint32_t>(a.sample_rate) * channels * (bits / 8));
    put16(b, static_cast<uint16_t>(channels * (bits / 8)));
    put16(b, bits);
    b += "data";
    put32(b, data_len);
    for (uint32_t i = 0; i < frames * channels; ++i) {
        double s = a.samples[i];
        if (float32) {
            float f = static_cast<float>(s);
            char c[4];
            std::memcpy(c, &f, 4);
            b.append(c, 4);
        } else {
            double c = std::max(-1.0, std::min(1.0, s));
            put16(b, static_cast<uint16_t>(static_cast<int16_t>(std::lround(c * 32767.0))));
        }
    }
    return b;
}

inline void write_wav(const std::string& path, const AudioBuffer& a, bool float32 = false) {
    util::write_file(path, encode_wav(a, float32));
}

}  // namespace lamit
