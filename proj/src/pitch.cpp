#include "tonal/pitch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tonal/errors.hpp"

namespace tonal {

namespace {

struct Candidate {
    double f0 = 0.0;       // 0 marks the unvoiced candidate
    double strength = 0.0; // peak height for voiced, threshold score for unvoiced
    bool voiced() const { return f0 > 0.0; }
};

// Strength of the unvoiced candidate. Quiet frames (local peak small
// relative to the global peak and the silence threshold) score well above
// the voicing threshold, so silence always goes unvoiced.
double unvoiced_strength(double local_peak, double global_peak, const PitchParams& p) {
    double ratio = global_peak > 0.0 ? local_peak / global_peak : 0.0;
    double quiet = 2.0 - ratio / (p.silence_threshold / (1.0 + p.voicing_threshold));
    return p.voicing_threshold + std::max(0.0, quiet);
}

}  // namespace

std::size_t F0Track::voiced_count() const {
    return static_cast<std::size_t>(std::count_if(
        frames.begin(), frames.end(), [](const F0Frame& f) { return f.f0_hz.has_value(); }));
}

F0Track estimate_f0(const AudioBuffer& audio, const PitchParams& params) {
    const int rate = audio.sample_rate_hz;
    const auto& s = audio.samples;
    const int win_n = static_cast<int>(std::lround(params.window_s() * rate));
    const int hop_n = static_cast<int>(std::lround(params.frame_hop_s * rate));
    if (static_cast<int>(s.size()) < win_n) {
        throw AudioTooShort("audio shorter than one analysis window (" +
                            std::to_string(win_n) + " samples)");
    }

    const int lag_min = std::max(2, static_cast<int>(std::floor(rate / params.f0_max_hz)));
    const int lag_max =
        std::min(win_n - 2, static_cast<int>(std::ceil(rate / params.f0_min_hz)));

    // Hann window and its normalized autocorrelation (precomputed once).
    std::vector<double> window(win_n);
    for (int j = 0; j < win_n; ++j) {
        window[j] = 0.5 * (1.0 - std::cos(2.0 * M_PI * j / (win_n - 1)));
    }
    std::vector<double> win_ac(lag_max + 2, 0.0);
    for (int tau = 0; tau <= lag_max + 1; ++tau) {
        double acc = 0.0;
        for (int j = 0; j + tau < win_n; ++j) acc += window[j] * window[j + tau];
        win_ac[tau] = acc;
    }
    for (int tau = lag_max + 1; tau >= 0; --tau) win_ac[tau] /= win_ac[0];

    const double global_mean = std::accumulate(s.begin(), s.end(), 0.0) / s.size();
    double global_peak = 0.0;
    for (double v : s) global_peak = std::max(global_peak, std::abs(v - global_mean));

    const int n_frames = (static_cast<int>(s.size()) - win_n) / hop_n + 1;
    std::vector<std::vector<Candidate>> frame_cands(n_frames);
    std::vector<double> frame_times(n_frames);

    std::vector<double> seg(win_n), r(lag_max + 2, 0.0);
    for (int i = 0; i < n_frames; ++i) {
        const int off = i * hop_n;
        frame_times[i] = (off + 0.5 * win_n) / rate;

        double local_mean = 0.0;
        for (int j = 0; j < win_n; ++j) local_mean += s[off + j];
        local_mean /= win_n;
        double local_peak = 0.0;
        for (int j = 0; j < win_n; ++j) {
            local_peak = std::max(local_peak, std::abs(s[off + j] - local_mean));
            seg[j] = (s[off + j] - local_mean) * window[j];
        }

        auto& cands = frame_cands[i];
        cands.push_back({0.0, unvoiced_strength(local_peak, global_peak, params)});

        double r0 = 0.0;
        for (int j = 0; j < win_n; ++j) r0 += seg[j] * seg[j];
        if (r0 <= 0.0) continue;  // silent frame: unvoiced candidate only

        for (int tau = lag_min - 1; tau <= lag_max + 1; ++tau) {
            double acc = 0.0;
            for (int j = 0; j + tau < win_n; ++j) acc += seg[j] * seg[j + tau];
            r[tau] = acc / (r0 * win_ac[tau]);
        }

        std::vector<Candidate> peaks;
        for (int tau = lag_min; tau <= lag_max; ++tau) {
            if (!(r[tau] > r[tau - 1] && r[tau] >= r[tau + 1])) continue;
            // parabolic refinement through the three lags around the peak
            double denom = r[tau - 1] - 2.0 * r[tau] + r[tau + 1];
            double delta = 0.0, height = r[tau];
            if (denom < 0.0) {
                delta = 0.5 * (r[tau - 1] - r[tau + 1]) / denom;
                delta = std::clamp(delta, -0.5, 0.5);
                height = r[tau] - 0.25 * (r[tau - 1] - r[tau + 1]) * delta;
            }
            double period = tau + delta;
            double f0 = std::clamp(rate / period, params.f0_min_hz, params.f0_max_hz);
            peaks.push_back({f0, height});
        }
        std::stable_sort(peaks.begin(), peaks.end(), [](const Candidate& a, const Candidate& b) {
            return a.strength > b.strength;
        });
        if (static_cast<int>(peaks.size()) > params.candidates_per_frame) {
            peaks.resize(params.candidates_per_frame);
        }
        cands.insert(cands.end(), peaks.begin(), peaks.end());
    }

    // Viterbi over candidates: maximize local strength minus transition
    // costs. Voiced candidates get an octave-cost bonus for higher F0.
    const double inv_log2 = 1.0 / std::log(2.0);
    auto local_score = [&](const Candidate& c) {
        if (!c.voiced()) return c.strength;
        return c.strength + params.octave_cost * std::log(c.f0 / params.f0_min_hz) * inv_log2;
    };
    auto transition_cost = [&](const Candidate& a, const Candidate& b) {
        if (!a.voiced() && !b.voiced()) return 0.0;
        if (a.voiced() != b.voiced()) return params.voiced_unvoiced_cost;
        return params.octave_jump_cost * std::abs(std::log(a.f0 / b.f0)) * inv_log2;
    };

    std::vector<std::vector<double>> score(n_frames);
    std::vector<std::vector<int>> back(n_frames);
    for (int i = 0; i < n_frames; ++i) {
        const auto& cands = frame_cands[i];
        score[i].resize(cands.size());
        back[i].assign(cands.size(), -1);
        for (std::size_t c = 0; c < cands.size(); ++c) {
            if (i == 0) {
                score[i][c] = local_score(cands[c]);
                continue;
            }
            double best = -1e300;
            int best_prev = 0;
            for (std::size_t p = 0; p < frame_cands[i - 1].size(); ++p) {
                double v = score[i - 1][p] - transition_cost(frame_cands[i - 1][p], cands[c]);
                if (v > best) {
                    best = v;
                    best_prev = static_cast<int>(p);
                }
            }
            score[i][c] = best + local_score(cands[c]);
            back[i][c] = best_prev;
        }
    }

    F0Track track;
    track.frames.resize(n_frames);
    if (n_frames > 0) {
        int best = 0;
        for (std::size_t c = 1; c < score[n_frames - 1].size(); ++c) {
            if (score[n_frames - 1][c] > score[n_frames - 1][best]) best = static_cast<int>(c);
        }
        for (int i = n_frames - 1; i >= 0; --i) {
            const Candidate& chosen = frame_cands[i][best];
            F0Frame& f = track.frames[i];
            f.time_s = frame_times[i];
            if (chosen.voiced()) {
                f.f0_hz = chosen.f0;
                f.strength = std::clamp(chosen.strength, 0.0, 1.0);
            }
            best = back[i][best] >= 0 ? back[i][best] : 0;
        }
    }
    return track;
}

SpeakerRange speaker_range(const std::vector<F0Track>& tracks) {
    std::vector<double> voiced;
    for (const auto& t : tracks) {
        for (const auto& f : t.frames) {
            if (f.f0_hz) voiced.push_back(*f.f0_hz);
        }
    }
    if (voiced.size() < 100) {
        throw InsufficientVoicedFrames("need at least 100 voiced frames, got " +
                                       std::to_string(voiced.size()));
    }
    std::sort(voiced.begin(), voiced.end());
    auto nearest_rank = [&](double pct) {
        std::size_t rank = static_cast<std::size_t>(
            std::ceil(pct / 100.0 * static_cast<double>(voiced.size())));
        rank = std::clamp<std::size_t>(rank, 1, voiced.size());
        return voiced[rank - 1];
    };
    SpeakerRange range{nearest_rank(5.0), nearest_rank(95.0)};
    if (!(range.lo_hz < range.hi_hz)) {
        throw InsufficientRange("degenerate speaker range: lo == hi == " +
                                std::to_string(range.lo_hz) + " Hz");
    }
    return range;
}

std::vector<TimedValue> normalize_segment(const F0Track& track, const SyllableSpan& span,
                                          const SpeakerRange& range) {
    std::vector<TimedValue> out;
    const double scale = 1.0 / (range.hi_hz - range.lo_hz);
    for (const auto& f : track.frames) {
        if (!f.f0_hz || f.time_s < span.start_s || f.time_s > span.end_s) continue;
        double v = std::clamp((*f.f0_hz - range.lo_hz) * scale, 0.0, 1.0);
        out.push_back({f.time_s, v});
    }
    if (out.size() < 4) {
        throw TooFewVoicedFrames("syllable " + span.word_id + "#" +
                                 std::to_string(span.syllable_index) + " has only " +
                                 std::to_string(out.size()) + " voiced frames");
    }
    return out;
}

std::vector<double> resample_values(const std::vector<TimedValue>& points, int n) {
    if (points.size() < 4) {
        throw TooFewPoints("need at least 4 points, got " + std::to_string(points.size()));
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].t > points[i - 1].t)) {
            throw DataError("resample input times must be strictly increasing");
        }
    }

    const double t0 = points.front().t;
    const double t1 = points.back().t;
    std::vector<double> out(n);
    std::size_t seg = 0;
    for (int i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / (n - 1);
        const double t = t0 * (1.0 - u) + t1 * u;
        while (seg + 2 < points.size() && points[seg + 1].t < t) ++seg;
        const TimedValue& a = points[seg];
        const TimedValue& b = points[seg + 1];
        // exact node hits reproduce the node value bit-for-bit
        if (t == a.t) {
            out[i] = a.v;
        } else if (t == b.t) {
            out[i] = b.v;
        } else {
            out[i] = a.v + (t - a.t) / (b.t - a.t) * (b.v - a.v);
        }
    }
    return out;
}

NormalizedContour resample_contour(const std::vector<TimedValue>& points, std::string word_id,
                                   int syllable_index) {
    NormalizedContour c;
    c.values = resample_values(points, kContourPoints);
    c.word_id = std::move(word_id);
    c.syllable_index = syllable_index;
    c.validate();
    return c;
}

void NormalizedContour::validate() const {
    if (static_cast<int>(values.size()) != kContourPoints) {
        throw DataError("contour must have exactly " + std::to_string(kContourPoints) +
                        " values, got " + std::to_string(values.size()));
    }
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DataError("contour value " + std::to_string(v) + " outside [0,1]");
        }
    }
}

}  // namespace tonal
