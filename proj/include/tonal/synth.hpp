#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tonal/audio.hpp"
#include "tonal/contour_io.hpp"
#include "tonal/pitch.hpp"

namespace tonal::synth {

// Piecewise-linear pitch shape on a normalized time axis. Control point
// positions must be strictly increasing, starting at 0 and ending at 1.
struct ToneTemplate {
    std::string name;
    std::vector<std::pair<double, double>> control_points;  // (position, level)
};

struct SynthConfig {
    std::vector<ToneTemplate> templates;  // empty -> mandarin_like_templates()
    int per_class_count = 100;
    double jitter_sd = 0.03;
    double level_shift_sd = 0.05;
    std::uint64_t seed = 0;
};

// Four fixtures imitating the classic Mandarin shapes: T1 high level,
// T2 rising, T3 dipping, T4 falling.
std::vector<ToneTemplate> mandarin_like_templates();

AudioBuffer gen_sine(double f_hz, double duration_s, int sample_rate);
// Linear sweep of instantaneous frequency from f0_hz to f1_hz.
AudioBuffer gen_chirp(double f0_hz, double f1_hz, double duration_s, int sample_rate);
AudioBuffer gen_silence(double duration_s, int sample_rate);

// Template evaluated on the 40-point contour grid (positions i/39).
std::vector<double> sample_template(const ToneTemplate& tmpl, int n_points = kContourPoints);

// Labeled contours: per-point Gaussian jitter plus a per-contour constant
// level shift, clamped to [0,1]. Each contour is its own single-syllable word.
std::vector<LabeledContour> gen_contour_corpus(const SynthConfig& cfg);

}  // namespace tonal::synth
