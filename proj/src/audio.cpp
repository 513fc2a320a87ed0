#include "tonal/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "tonal/errors.hpp"

namespace tonal {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 24) & 0xff);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot open WAV file: " + path.string());

    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw CorruptHeader("not a RIFF/WAVE file: " + path.string());
    }

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;

    // Walk the chunk list; chunks are word-aligned.
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        std::uint32_t chunk_len = read_u32(hdr + 4);
        std::size_t body = pos + 8;
        if (body + chunk_len > bytes.size()) {
            throw CorruptHeader("chunk overruns file: " + path.string());
        }
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw CorruptHeader("fmt chunk too short");
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            if (format == kFormatExtensible && chunk_len >= 40) {
                // sub-format GUID starts with the ordinary format code
                format = read_u16(bytes.data() + body + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data = bytes.data() + body;
            data_len = chunk_len;
        }
        pos = body + chunk_len + (chunk_len & 1);
    }

    if (!have_fmt || data == nullptr) {
        throw CorruptHeader("missing fmt or data chunk: " + path.string());
    }
    if (channels == 0 || rate == 0) throw CorruptHeader("zero channels or sample rate");
    if (format == kFormatPcm && bits != 16) {
        throw UnsupportedFormat("only 16-bit integer PCM supported, got " +
                                std::to_string(bits) + "-bit");
    }
    if (format == kFormatFloat && bits != 32) {
        throw UnsupportedFormat("only 32-bit float supported, got " +
                                std::to_string(bits) + "-bit");
    }
    if (format != kFormatPcm && format != kFormatFloat) {
        throw UnsupportedFormat("unsupported WAV format code " + std::to_string(format));
    }

    const std::size_t bytes_per_sample = bits / 8;
    const std::size_t frame_size = bytes_per_sample * channels;
    const std::size_t n_frames = data_len / frame_size;
    if (n_frames == 0) throw CorruptHeader("empty data chunk");

    AudioBuffer out;
    out.sample_rate_hz = static_cast<int>(rate);
    out.samples.resize(n_frames);

    for (std::size_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            const unsigned char* s = data + i * frame_size + c * bytes_per_sample;
            if (format == kFormatPcm) {
                std::int16_t v = static_cast<std::int16_t>(s[0] | (s[1] << 8));
                acc += static_cast<double>(v) / 32768.0;
            } else {
                float f;
                std::uint32_t u = read_u32(s);
                std::memcpy(&f, &u, 4);
                acc += static_cast<double>(f);
            }
        }
        out.samples[i] = std::clamp(acc / channels, -1.0, 1.0);
    }
    return out;
}

namespace {

std::vector<unsigned char> wav_header(std::uint16_t format, int channels, int rate,
                                      int bits, std::uint32_t data_len) {
    std::vector<unsigned char> out;
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_len);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, format);
    put_u16(out, static_cast<std::uint16_t>(channels));
    put_u32(out, static_cast<std::uint32_t>(rate));
    put_u32(out, static_cast<std::uint32_t>(rate * channels * bits / 8));
    put_u16(out, static_cast<std::uint16_t>(channels * bits / 8));
    put_u16(out, static_cast<std::uint16_t>(bits));
    put_tag(out, "data");
    put_u32(out, data_len);
    return out;
}

}  // namespace

void write_wav_pcm16(const std::filesystem::path& path, const AudioBuffer& audio,
                     int channels) {
    const std::uint32_t data_len =
        static_cast<std::uint32_t>(audio.samples.size() * channels * 2);
    std::vector<unsigned char> out =
        wav_header(kFormatPcm, channels, audio.sample_rate_hz, 16, data_len);
    for (double v : audio.samples) {
        // symmetric with the reader's /32768 so the round trip stays within
        // half an LSB (one LSB at the clipped positive end)
        const long scaled = std::lrint(std::clamp(v, -1.0, 1.0) * 32768.0);
        auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768L, 32767L));
        for (int c = 0; c < channels; ++c) {
            out.push_back(static_cast<unsigned char>(q & 0xff));
            out.push_back(static_cast<unsigned char>((q >> 8) & 0xff));
        }
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

void write_wav_float32(const std::filesystem::path& path, const AudioBuffer& audio) {
    const std::uint32_t data_len = static_cast<std::uint32_t>(audio.samples.size() * 4);
    std::vector<unsigned char> out =
        wav_header(kFormatFloat, 1, audio.sample_rate_hz, 32, data_len);
    for (double v : audio.samples) {
        float f = static_cast<float>(v);
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        put_u32(out, u);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

}  // namespace tonal
