#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tonal/audio.hpp"
#include "tonal/ingest.hpp"

namespace tonal {

inline constexpr int kContourPoints = 40;

// Autocorrelation pitch tracker parameters. The 75-500 Hz search range is
// the analysis default; the remaining knobs are the reference defaults of
// the classic autocorrelation method (Boersma-style costs).
struct PitchParams {
    double f0_min_hz = 75.0;
    double f0_max_hz = 500.0;
    double frame_hop_s = 0.01;
    int candidates_per_frame = 15;
    double voicing_threshold = 0.45;
    double silence_threshold = 0.03;
    double octave_cost = 0.01;
    double octave_jump_cost = 0.35;
    double voiced_unvoiced_cost = 0.14;

    // Analysis window covers three periods of f0_min (40 ms at 75 Hz).
    double window_s() const { return 3.0 / f0_min_hz; }
};

struct F0Frame {
    double time_s = 0.0;
    std::optional<double> f0_hz;  // absent on unvoiced frames
    double strength = 0.0;        // autocorrelation peak height, clamped to [0,1]
};

struct F0Track {
    std::vector<F0Frame> frames;

    std::size_t voiced_count() const;
};

struct SpeakerRange {
    double lo_hz = 0.0;
    double hi_hz = 0.0;
};

struct TimedValue {
    double t = 0.0;
    double v = 0.0;
};

struct NormalizedContour {
    std::vector<double> values;  // exactly kContourPoints, each in [0,1]
    std::string word_id;
    int syllable_index = 0;

    void validate() const;  // throws DataError on invariant violation
};

// Frame-wise F0 estimation. Per frame: local mean removal, Hann window,
// normalized autocorrelation divided by the window's own autocorrelation,
// candidate peaks in the [1/f0_max, 1/f0_min] lag range refined by parabolic
// interpolation, plus an unvoiced candidate; the final track is the cheapest
// candidate path under octave / octave-jump / voiced-unvoiced costs
// (dynamic programming over frames).
F0Track estimate_f0(const AudioBuffer& audio, const PitchParams& params = {});

// 5th/95th percentile (nearest-rank) of all voiced F0 values across a
// speaker's corpus. Requires at least 100 voiced frames and a non-degenerate
// spread.
SpeakerRange speaker_range(const std::vector<F0Track>& tracks);

// Voiced frames inside the span, mapped to [0,1] by the speaker range
// (clamped affine map). Unvoiced frames are dropped.
std::vector<TimedValue> normalize_segment(const F0Track& track, const SyllableSpan& span,
                                          const SpeakerRange& range);

// Linear resampling at n equally spaced times across the input's time span;
// interior unvoiced gaps are bridged by the same interpolation. Sampling a
// 40-point output again with n=40 reproduces it exactly.
std::vector<double> resample_values(const std::vector<TimedValue>& points, int n);

NormalizedContour resample_contour(const std::vector<TimedValue>& points,
                                   std::string word_id = "", int syllable_index = 0);

}  // namespace tonal
