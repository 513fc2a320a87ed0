#include "tonal/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tonal/errors.hpp"

namespace tonal {

namespace fs = std::filesystem;

Manifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open manifest: " + path.string());

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedManifest("manifest parse error in " + path.string() + ": " + e.what());
    }

    Manifest m;
    try {
        m.language_id = doc.at("language").get<std::string>();
        m.speaker_id = doc.at("speaker").get<std::string>();
        const fs::path base = path.parent_path();
        for (const auto& w : doc.at("words")) {
            WordEntry e;
            e.word_id = w.at("id").get<std::string>();
            e.audio_path = base / w.at("audio").get<std::string>();
            e.segmentation_path = base / w.at("segmentation").get<std::string>();
            m.entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw MalformedManifest("manifest field error in " + path.string() + ": " + e.what());
    }

    std::set<std::string> seen;
    for (const auto& e : m.entries) {
        if (!seen.insert(e.word_id).second) {
            throw DuplicateWordId("duplicate word id \"" + e.word_id + "\" in " + path.string());
        }
        if (!fs::exists(e.audio_path)) {
            throw MissingFile(e.audio_path.string());
        }
        if (!fs::exists(e.segmentation_path)) {
            throw MissingFile(e.segmentation_path.string());
        }
    }
    return m;
}

std::vector<SyllableSpan> load_segmentation(const fs::path& path, const std::string& word_id) {
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open segmentation: " + path.string());

    std::string line;
    if (!std::getline(in, line)) {
        throw MalformedRow("empty segmentation file: " + path.string());
    }
    if (line.rfind("syllable_index", 0) != 0) {
        throw MalformedRow("missing header row in " + path.string());
    }

    std::vector<SyllableSpan> spans;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() < 3 || fields.size() > 4) {
            throw MalformedRow(path.string() + ":" + std::to_string(line_no) +
                               ": expected 3 or 4 tab-separated fields");
        }
        SyllableSpan s;
        s.word_id = word_id;
        try {
            std::size_t used = 0;
            s.syllable_index = std::stoi(fields[0], &used);
            if (used != fields[0].size()) throw std::invalid_argument(fields[0]);
            s.start_s = std::stod(fields[1], &used);
            if (used != fields[1].size()) throw std::invalid_argument(fields[1]);
            s.end_s = std::stod(fields[2], &used);
            if (used != fields[2].size()) throw std::invalid_argument(fields[2]);
        } catch (const std::exception&) {
            throw MalformedRow(path.string() + ":" + std::to_string(line_no) +
                               ": non-numeric field");
        }
        if (fields.size() == 4 && !fields[3].empty()) {
            s.tone_label = fields[3];
        }
        if (s.start_s < 0.0 || s.start_s >= s.end_s) {
            throw MalformedRow(path.string() + ":" + std::to_string(line_no) +
                               ": need 0 <= start < end");
        }
        spans.push_back(std::move(s));
    }

    std::sort(spans.begin(), spans.end(),
              [](const SyllableSpan& a, const SyllableSpan& b) { return a.start_s < b.start_s; });

    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (spans[i].syllable_index != static_cast<int>(i)) {
            throw NonContiguousIndices(path.string() + ": syllable indices must be 0.." +
                                       std::to_string(spans.size() - 1) +
                                       " in start order");
        }
        if (i > 0 && spans[i].start_s < spans[i - 1].end_s) {
            throw OverlappingSpans(path.string() + ": spans " + std::to_string(i - 1) +
                                   " and " + std::to_string(i) + " overlap");
        }
    }
    return spans;
}

bool is_mandarin(const std::string& language_id) {
    std::string low;
    low.reserve(language_id.size());
    for (char c : language_id) low.push_back(static_cast<char>(std::tolower(c)));
    return low.rfind("cmn", 0) == 0 || low.rfind("zh", 0) == 0 || low.rfind("mandarin", 0) == 0;
}

bool is_neutral_tone(const std::string& label) {
    return label == "T0" || label == "T5" || label == "t0" || label == "t5";
}

std::vector<SyllableSpan> apply_sandhi_labels(std::vector<SyllableSpan> spans,
                                              const std::string& language_id) {
    if (!is_mandarin(language_id)) return spans;

    // Pair test runs on the labels as given, not on already-rewritten ones:
    // T3,T3,T3 -> T2,T2,T3.
    std::vector<std::optional<std::string>> original;
    original.reserve(spans.size());
    for (const auto& s : spans) original.push_back(s.tone_label);

    for (std::size_t i = 0; i + 1 < spans.size(); ++i) {
        if (original[i] && original[i + 1] && *original[i] == "T3" && *original[i + 1] == "T3") {
            spans[i].tone_label = "T2";
        }
    }
    for (auto& s : spans) {
        if (s.tone_label && is_neutral_tone(*s.tone_label)) {
            s.excluded_from_eval = true;
        }
    }
    return spans;
}

std::size_t Corpus::active_word_count() const {
    return static_cast<std::size_t>(
        std::count_if(words.begin(), words.end(), [](const CorpusWord& w) { return !w.excluded; }));
}

Corpus load_corpus(const fs::path& manifest_path, bool drop_neutral) {
    Manifest m = load_manifest(manifest_path);
    Corpus corpus;
    corpus.language_id = m.language_id;
    corpus.speaker_id = m.speaker_id;

    for (const auto& entry : m.entries) {
        CorpusWord w;
        w.word_id = entry.word_id;
        w.audio = read_wav(entry.audio_path);
        w.spans = load_segmentation(entry.segmentation_path, entry.word_id);
        w.spans = apply_sandhi_labels(std::move(w.spans), m.language_id);
        if (drop_neutral) {
            std::erase_if(w.spans, [](const SyllableSpan& s) { return s.excluded_from_eval; });
        }
        if (w.spans.size() > kMaxSyllablesPerWord) {
            w.excluded = true;
            w.exclusion_reason = "word has " + std::to_string(w.spans.size()) +
                                 " syllables (limit " + std::to_string(kMaxSyllablesPerWord) + ")";
        }
        corpus.words.push_back(std::move(w));
    }
    return corpus;
}

}  // namespace tonal
