#pragma once

#include <filesystem>
#include <vector>

namespace tonal {

// Mono PCM samples in [-1, 1].
struct AudioBuffer {
    std::vector<double> samples;
    int sample_rate_hz = 0;

    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
};

// Reads a RIFF/WAVE file. Accepts 16-bit integer PCM and 32-bit float,
// mono or multichannel; channels are averaged down to mono.
// Throws CorruptHeader on malformed containers and UnsupportedFormat on
// compressed or other bit-depth files.
AudioBuffer read_wav(const std::filesystem::path& path);

// Writers used by the test fixtures and the synth command.
void write_wav_pcm16(const std::filesystem::path& path, const AudioBuffer& audio,
                     int channels = 1);
void write_wav_float32(const std::filesystem::path& path, const AudioBuffer& audio);

}  // namespace tonal
