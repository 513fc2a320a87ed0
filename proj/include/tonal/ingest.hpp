#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tonal/audio.hpp"

namespace tonal {

struct WordEntry {
    std::string word_id;
    std::filesystem::path audio_path;
    std::filesystem::path segmentation_path;
};

struct Manifest {
    std::string language_id;
    std::string speaker_id;
    std::vector<WordEntry> entries;
};

struct SyllableSpan {
    std::string word_id;
    int syllable_index = 0;
    double start_s = 0.0;
    double end_s = 0.0;
    std::optional<std::string> tone_label;
    // Set for neutral-tone syllables: they stay in the clustering input but
    // are skipped by evaluation.
    bool excluded_from_eval = false;
};

// Loads and validates a manifest JSON file:
//   {"language": str, "speaker": str,
//    "words": [{"id": str, "audio": str, "segmentation": str}]}
// Relative paths are resolved against the manifest's directory. Every
// referenced file must exist.
Manifest load_manifest(const std::filesystem::path& path);

// Loads a per-word segmentation TSV (header row required):
//   syllable_index \t start_s \t end_s \t tone_label
// tone_label may be empty. Spans are validated: indices contiguous from 0,
// 0 <= start < end, non-overlapping, ordered by start.
std::vector<SyllableSpan> load_segmentation(const std::filesystem::path& path,
                                            const std::string& word_id);

// Ground-truth label preprocessing. For Mandarin-tagged corpora every
// consecutive (T3, T3) pair in the original labels becomes (T2, T3) —
// evaluated against the original labels so a run of third tones rewrites
// to T2...T2,T3 — and neutral-tone syllables (T0/T5) are marked excluded
// from evaluation. Other languages pass through unchanged. Idempotent.
std::vector<SyllableSpan> apply_sandhi_labels(std::vector<SyllableSpan> spans,
                                              const std::string& language_id);

bool is_mandarin(const std::string& language_id);
bool is_neutral_tone(const std::string& label);

struct CorpusWord {
    std::string word_id;
    AudioBuffer audio;
    std::vector<SyllableSpan> spans;
    bool excluded = false;
    std::string exclusion_reason;
};

struct Corpus {
    std::string language_id;
    std::string speaker_id;
    std::vector<CorpusWord> words;

    std::size_t active_word_count() const;
};

// Full corpus assembly: manifest -> audio + segmentations + sandhi-adjusted
// labels. Words longer than four syllables are kept but flagged excluded.
// With drop_neutral, neutral-tone syllables are removed from the spans
// entirely instead of just being marked.
Corpus load_corpus(const std::filesystem::path& manifest_path, bool drop_neutral = false);

inline constexpr int kMaxSyllablesPerWord = 4;

}  // namespace tonal
