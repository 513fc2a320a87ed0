#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tonal/audio.hpp"
#include "tonal/errors.hpp"
#include "tonal/synth.hpp"

using namespace tonal;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    fs::path dir = fs::temp_directory_path() / "tonal_audio_tests";
    fs::create_directories(dir);
    return dir;
}

void write_bytes(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("pcm16 wav round trip is lossless up to quantization") {
    AudioBuffer buf = synth::gen_sine(220.0, 0.25, 16000);
    const fs::path path = temp_dir() / "sine.wav";
    write_wav_pcm16(path, buf);
    AudioBuffer back = read_wav(path);
    REQUIRE(back.sample_rate_hz == 16000);
    REQUIRE(back.samples.size() == buf.samples.size());
    double max_err = 0.0;
    for (std::size_t i = 0; i < buf.samples.size(); ++i) {
        max_err = std::max(max_err, std::abs(back.samples[i] - buf.samples[i]));
    }
    CHECK(max_err <= std::pow(2.0, -15.0));
}

TEST_CASE("float32 wav round trip") {
    AudioBuffer buf = synth::gen_chirp(120.0, 240.0, 0.2, 16000);
    const fs::path path = temp_dir() / "chirp_f32.wav";
    write_wav_float32(path, buf);
    AudioBuffer back = read_wav(path);
    REQUIRE(back.samples.size() == buf.samples.size());
    double max_err = 0.0;
    for (std::size_t i = 0; i < buf.samples.size(); ++i) {
        max_err = std::max(max_err, std::abs(back.samples[i] - buf.samples[i]));
    }
    CHECK(max_err < 1e-7);  // float32 mantissa on values in [-1,1]
}

TEST_CASE("sample count and rate survive the container") {
    AudioBuffer buf = synth::gen_sine(220.0, 1.0, 44100);
    REQUIRE(buf.samples.size() == 44100);
    const fs::path path = temp_dir() / "one_second.wav";
    write_wav_pcm16(path, buf);
    AudioBuffer back = read_wav(path);
    CHECK(back.samples.size() == 44100);
    CHECK(back.sample_rate_hz == 44100);
}

namespace {

void push_u16(std::string& s, unsigned v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}

void push_u32(std::string& s, unsigned long v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

TEST_CASE("stereo channels average to mono") {
    // L = +0.5, R = -0.5 everywhere -> all samples 0 after downmix
    const int frames = 800;
    std::string s;
    s += "RIFF";
    push_u32(s, 36 + frames * 4);
    s += "WAVEfmt ";
    push_u32(s, 16);
    push_u16(s, 1);     // PCM
    push_u16(s, 2);     // channels
    push_u32(s, 8000);  // rate
    push_u32(s, 8000 * 4);
    push_u16(s, 4);
    push_u16(s, 16);
    s += "data";
    push_u32(s, frames * 4);
    for (int i = 0; i < frames; ++i) {
        push_u16(s, 16384);                     // +0.5
        push_u16(s, static_cast<unsigned>(static_cast<std::uint16_t>(-16384)));  // -0.5
    }
    const fs::path path = temp_dir() / "stereo.wav";
    write_bytes(path, s);
    AudioBuffer mono = read_wav(path);
    REQUIRE(mono.samples.size() == static_cast<std::size_t>(frames));
    for (double v : mono.samples) CHECK(v == 0.0);
}

TEST_CASE("wrong RIFF magic -> CorruptHeader") {
    const fs::path path = temp_dir() / "bad_magic.wav";
    write_bytes(path, std::string("JUNKxxxxWAVEfmt ") + std::string(64, '\0'));
    CHECK_THROWS_AS(read_wav(path), CorruptHeader);
}

TEST_CASE("truncated container -> CorruptHeader") {
    const fs::path path = temp_dir() / "truncated.wav";
    write_bytes(path, "RIFF\x10\x00\x00\x00WAVE");
    CHECK_THROWS_AS(read_wav(path), CorruptHeader);
}

TEST_CASE("compressed or odd bit-depth formats -> UnsupportedFormat") {
    AudioBuffer buf = synth::gen_sine(100.0, 0.05, 8000);
    const fs::path ok_path = temp_dir() / "ok.wav";
    write_wav_pcm16(ok_path, buf);

    // flip the AudioFormat field (offset 20 in the canonical header) to 7 (mu-law)
    std::ifstream in(ok_path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    bytes[20] = 7;
    const fs::path mulaw = temp_dir() / "mulaw.wav";
    write_bytes(mulaw, bytes);
    CHECK_THROWS_AS(read_wav(mulaw), UnsupportedFormat);

    // 8-bit PCM: format 1 but BitsPerSample (offset 34) = 8
    bytes[20] = 1;
    bytes[34] = 8;
    const fs::path pcm8 = temp_dir() / "pcm8.wav";
    write_bytes(pcm8, bytes);
    CHECK_THROWS_AS(read_wav(pcm8), UnsupportedFormat);
}

TEST_CASE("missing file -> MissingFile") {
    CHECK_THROWS_AS(read_wav(temp_dir() / "does_not_exist.wav"), MissingFile);
}
