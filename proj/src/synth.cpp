#include "tonal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tonal/errors.hpp"
#include "tonal/rng.hpp"

namespace tonal::synth {

namespace {

void check_audio_args(double duration_s, int sample_rate) {
    if (duration_s <= 0.0) throw ConfigError("duration must be positive");
    if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
}

void check_frequency(double f_hz, int sample_rate) {
    if (!(f_hz > 0.0) || !(f_hz < sample_rate / 2.0)) {
        throw InvalidFrequency("frequency " + std::to_string(f_hz) +
                               " Hz outside (0, " + std::to_string(sample_rate / 2.0) + ")");
    }
}

void validate_template(const ToneTemplate& tmpl) {
    if (tmpl.control_points.size() < 2 || tmpl.control_points.front().first != 0.0 ||
        tmpl.control_points.back().first != 1.0) {
        throw ConfigError("tone template '" + tmpl.name +
                          "' must span positions 0 to 1");
    }
    for (std::size_t i = 1; i < tmpl.control_points.size(); ++i) {
        if (!(tmpl.control_points[i - 1].first < tmpl.control_points[i].first)) {
            throw ConfigError("tone template '" + tmpl.name +
                              "' positions must be strictly increasing");
        }
    }
}

}  // namespace

std::vector<ToneTemplate> mandarin_like_templates() {
    return {
        {"T1", {{0.0, 0.9}, {1.0, 0.9}}},
        {"T2", {{0.0, 0.3}, {1.0, 0.8}}},
        {"T3", {{0.0, 0.35}, {0.5, 0.1}, {1.0, 0.6}}},
        {"T4", {{0.0, 0.95}, {1.0, 0.15}}},
    };
}

AudioBuffer gen_sine(double f_hz, double duration_s, int sample_rate) {
    check_audio_args(duration_s, sample_rate);
    check_frequency(f_hz, sample_rate);
    AudioBuffer out;
    out.sample_rate_hz = sample_rate;
    const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.samples[i] = std::sin(2.0 * M_PI * f_hz * static_cast<double>(i) / sample_rate);
    }
    return out;
}

AudioBuffer gen_chirp(double f0_hz, double f1_hz, double duration_s, int sample_rate) {
    check_audio_args(duration_s, sample_rate);
    check_frequency(f0_hz, sample_rate);
    check_frequency(f1_hz, sample_rate);
    AudioBuffer out;
    out.sample_rate_hz = sample_rate;
    const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        // instantaneous frequency f0 + (f1-f0)*t/T, integrated to phase
        const double phase = 2.0 * M_PI * (f0_hz * t + 0.5 * (f1_hz - f0_hz) * t * t / duration_s);
        out.samples[i] = std::sin(phase);
    }
    return out;
}

AudioBuffer gen_silence(double duration_s, int sample_rate) {
    check_audio_args(duration_s, sample_rate);
    AudioBuffer out;
    out.sample_rate_hz = sample_rate;
    out.samples.assign(static_cast<std::size_t>(std::llround(duration_s * sample_rate)), 0.0);
    return out;
}

std::vector<double> sample_template(const ToneTemplate& tmpl, int n_points) {
    validate_template(tmpl);
    if (n_points < 2) throw ConfigError("template sampling needs at least 2 points");
    std::vector<double> out(n_points);
    std::size_t seg = 0;
    for (int i = 0; i < n_points; ++i) {
        const double p = static_cast<double>(i) / (n_points - 1);
        while (seg + 2 < tmpl.control_points.size() && tmpl.control_points[seg + 1].first < p) {
            ++seg;
        }
        const auto& [p0, v0] = tmpl.control_points[seg];
        const auto& [p1, v1] = tmpl.control_points[seg + 1];
        const double u = (p - p0) / (p1 - p0);
        out[i] = v0 * (1.0 - u) + v1 * u;
    }
    return out;
}

std::vector<LabeledContour> gen_contour_corpus(const SynthConfig& cfg) {
    if (cfg.per_class_count < 1) throw ConfigError("per_class_count must be at least 1");
    if (cfg.jitter_sd < 0.0 || cfg.level_shift_sd < 0.0) {
        throw ConfigError("noise standard deviations must be non-negative");
    }
    const std::vector<ToneTemplate> templates =
        cfg.templates.empty() ? mandarin_like_templates() : cfg.templates;

    std::mt19937_64 rng(cfg.seed);
    std::vector<LabeledContour> out;
    out.reserve(templates.size() * static_cast<std::size_t>(cfg.per_class_count));
    for (const ToneTemplate& tmpl : templates) {
        const std::vector<double> base = sample_template(tmpl);
        for (int rep = 0; rep < cfg.per_class_count; ++rep) {
            const double shift = gaussian(rng) * cfg.level_shift_sd;
            LabeledContour lc;
            lc.tone = tmpl.name;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "_%03d", rep);
            lc.contour.word_id = tmpl.name + buf;
            lc.contour.syllable_index = 0;
            lc.contour.values.resize(base.size());
            for (std::size_t i = 0; i < base.size(); ++i) {
                const double jitter = gaussian(rng) * cfg.jitter_sd;
                lc.contour.values[i] = std::clamp(base[i] + jitter + shift, 0.0, 1.0);
            }
            out.push_back(std::move(lc));
        }
    }
    return out;
}

}  // namespace tonal::synth
