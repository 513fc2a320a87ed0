#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "tonal/audio.hpp"
#include "tonal/errors.hpp"
#include "tonal/ingest.hpp"
#include "tonal/synth.hpp"

using namespace tonal;
namespace fs = std::filesystem;

namespace {

struct FixtureDir {
    fs::path dir;

    explicit FixtureDir(const std::string& name) {
        dir = fs::temp_directory_path() / "tonal_ingest_tests" / name;
        fs::remove_all(dir);
        fs::create_directories(dir);
    }

    fs::path write(const std::string& rel, const std::string& text) const {
        fs::path p = dir / rel;
        std::ofstream out(p);
        out << text;
        return p;
    }

    fs::path wav(const std::string& rel, double seconds = 1.0) const {
        fs::path p = dir / rel;
        write_wav_pcm16(p, synth::gen_sine(220.0, seconds, 16000));
        return p;
    }
};

SyllableSpan span(int idx, double a, double b, std::optional<std::string> tone) {
    SyllableSpan s;
    s.word_id = "w";
    s.syllable_index = idx;
    s.start_s = a;
    s.end_s = b;
    s.tone_label = std::move(tone);
    return s;
}

std::vector<std::optional<std::string>> labels_of(const std::vector<SyllableSpan>& spans) {
    std::vector<std::optional<std::string>> out;
    for (const auto& s : spans) out.push_back(s.tone_label);
    return out;
}

}  // namespace

TEST_CASE("well-formed manifest loads with resolved paths") {
    FixtureDir fx("manifest_ok");
    fx.wav("w01.wav");
    fx.wav("w02.wav");
    fx.write("w01.tsv", "syllable_index\tstart_s\tend_s\ttone_label\n0\t0.1\t0.4\tT1\n");
    fx.write("w02.tsv", "syllable_index\tstart_s\tend_s\ttone_label\n0\t0.1\t0.4\tT2\n");
    fs::path mpath = fx.write(
        "manifest.json",
        R"({"language": "cmn", "speaker": "spk1", "words": [)"
        R"({"id": "w01", "audio": "w01.wav", "segmentation": "w01.tsv"},)"
        R"({"id": "w02", "audio": "w02.wav", "segmentation": "w02.tsv"}]})");

    Manifest m = load_manifest(mpath);
    CHECK(m.language_id == "cmn");
    CHECK(m.speaker_id == "spk1");
    REQUIRE(m.entries.size() == 2);
    CHECK(m.entries[0].word_id == "w01");
    CHECK(fs::exists(m.entries[0].audio_path));
    CHECK(fs::exists(m.entries[1].segmentation_path));
}

TEST_CASE("duplicate word id -> DuplicateWordId") {
    FixtureDir fx("manifest_dup");
    fx.wav("w01.wav");
    fx.write("w01.tsv", "syllable_index\tstart_s\tend_s\ttone_label\n0\t0.1\t0.4\tT1\n");
    fs::path mpath = fx.write(
        "manifest.json",
        R"({"language": "cmn", "speaker": "s", "words": [)"
        R"({"id": "w01", "audio": "w01.wav", "segmentation": "w01.tsv"},)"
        R"({"id": "w01", "audio": "w01.wav", "segmentation": "w01.tsv"}]})");
    CHECK_THROWS_AS(load_manifest(mpath), DuplicateWordId);
}

TEST_CASE("missing referenced audio -> MissingFile naming the path") {
    FixtureDir fx("manifest_missing");
    fx.write("w03.tsv", "syllable_index\tstart_s\tend_s\ttone_label\n0\t0.1\t0.4\tT1\n");
    fs::path mpath = fx.write("manifest.json",
                              R"({"language": "cmn", "speaker": "s", "words": [)"
                              R"({"id": "w03", "audio": "w03.wav", "segmentation": "w03.tsv"}]})");
    try {
        load_manifest(mpath);
        FAIL("expected MissingFile");
    } catch (const MissingFile& e) {
        CHECK(std::string(e.what()).find("w03.wav") != std::string::npos);
    }
}

TEST_CASE("malformed manifest schemas -> MalformedManifest") {
    FixtureDir fx("manifest_bad");
    CHECK_THROWS_AS(load_manifest(fx.write("notjson.json", "{nope")), MalformedManifest);
    CHECK_THROWS_AS(load_manifest(fx.write("nowords.json", R"({"language":"x","speaker":"s"})")),
                    MalformedManifest);
    CHECK_THROWS_AS(
        load_manifest(fx.write("badword.json",
                               R"({"language":"x","speaker":"s","words":[{"id":"w"}]})")),
        MalformedManifest);
    CHECK_THROWS_AS(load_manifest(fx.dir / "absent.json"), MissingFile);
}

TEST_CASE("segmentation TSV round trip") {
    FixtureDir fx("seg_ok");
    fs::path p = fx.write("w.tsv",
                          "syllable_index\tstart_s\tend_s\ttone_label\n"
                          "0\t0.10\t0.32\tT1\n"
                          "1\t0.35\t0.60\tT4\n");
    auto spans = load_segmentation(p, "w");
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].word_id == "w");
    CHECK(spans[0].syllable_index == 0);
    CHECK(spans[0].start_s == doctest::Approx(0.10));
    CHECK(spans[0].end_s == doctest::Approx(0.32));
    CHECK(spans[0].tone_label == std::optional<std::string>("T1"));
    CHECK(spans[1].syllable_index == 1);
    CHECK(spans[1].tone_label == std::optional<std::string>("T4"));
}

TEST_CASE("empty tone label column becomes nullopt") {
    FixtureDir fx("seg_unlabeled");
    fs::path p = fx.write("w.tsv",
                          "syllable_index\tstart_s\tend_s\ttone_label\n"
                          "0\t0.10\t0.32\t\n");
    auto spans = load_segmentation(p, "w");
    REQUIRE(spans.size() == 1);
    CHECK(!spans[0].tone_label.has_value());
}

TEST_CASE("segmentation validation errors") {
    FixtureDir fx("seg_bad");
    CHECK_THROWS_AS(load_segmentation(fx.write("overlap.tsv",
                                               "syllable_index\tstart_s\tend_s\ttone_label\n"
                                               "0\t0.1\t0.4\tT1\n"
                                               "1\t0.3\t0.6\tT2\n"),
                                      "w"),
                    OverlappingSpans);
    CHECK_THROWS_AS(load_segmentation(fx.write("gap.tsv",
                                               "syllable_index\tstart_s\tend_s\ttone_label\n"
                                               "0\t0.1\t0.2\tT1\n"
                                               "2\t0.3\t0.4\tT2\n"),
                                      "w"),
                    NonContiguousIndices);
    CHECK_THROWS_AS(load_segmentation(fx.write("badrow.tsv",
                                               "syllable_index\tstart_s\tend_s\ttone_label\n"
                                               "0\tnot_a_number\t0.4\tT1\n"),
                                      "w"),
                    MalformedRow);
    CHECK_THROWS_AS(load_segmentation(fx.write("backwards.tsv",
                                               "syllable_index\tstart_s\tend_s\ttone_label\n"
                                               "0\t0.5\t0.2\tT1\n"),
                                      "w"),
                    MalformedRow);
    CHECK_THROWS_AS(load_segmentation(fx.write("noheader.tsv", "0\t0.1\t0.4\tT1\n"), "w"),
                    MalformedRow);
}

TEST_CASE("mandarin third-tone sandhi rewrites on original labels, right to left") {
    std::vector<SyllableSpan> two = {span(0, 0.0, 0.2, "T3"), span(1, 0.2, 0.4, "T3")};
    auto out2 = apply_sandhi_labels(two, "cmn");
    CHECK(labels_of(out2) ==
          std::vector<std::optional<std::string>>{"T2", "T3"});

    std::vector<SyllableSpan> three = {span(0, 0.0, 0.2, "T3"), span(1, 0.2, 0.4, "T3"),
                                       span(2, 0.4, 0.6, "T3")};
    auto out3 = apply_sandhi_labels(three, "cmn");
    CHECK(labels_of(out3) ==
          std::vector<std::optional<std::string>>{"T2", "T2", "T3"});

    // non-Mandarin corpora pass through unchanged
    std::vector<SyllableSpan> canto = {span(0, 0.0, 0.2, "T1"), span(1, 0.2, 0.4, "T6")};
    auto outc = apply_sandhi_labels(canto, "yue");
    CHECK(labels_of(outc) ==
          std::vector<std::optional<std::string>>{"T1", "T6"});
    auto out33 = apply_sandhi_labels({span(0, 0.0, 0.2, "T3"), span(1, 0.2, 0.4, "T3")}, "yue");
    CHECK(labels_of(out33) ==
          std::vector<std::optional<std::string>>{"T3", "T3"});
}

TEST_CASE("sandhi is idempotent") {
    std::vector<SyllableSpan> spans = {span(0, 0.0, 0.2, "T3"), span(1, 0.2, 0.4, "T3"),
                                       span(2, 0.4, 0.6, "T3"), span(3, 0.6, 0.8, "T1")};
    auto once = apply_sandhi_labels(spans, "cmn");
    auto twice = apply_sandhi_labels(once, "cmn");
    CHECK(labels_of(once) == labels_of(twice));
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once[i].excluded_from_eval == twice[i].excluded_from_eval);
    }
}

TEST_CASE("neutral tones are marked excluded from eval") {
    std::vector<SyllableSpan> spans = {span(0, 0.0, 0.2, "T1"), span(1, 0.2, 0.4, "T0"),
                                       span(2, 0.4, 0.6, "T5")};
    auto out = apply_sandhi_labels(spans, "cmn");
    CHECK(!out[0].excluded_from_eval);
    CHECK(out[1].excluded_from_eval);
    CHECK(out[2].excluded_from_eval);

    CHECK(is_neutral_tone("T0"));
    CHECK(is_neutral_tone("T5"));
    CHECK(!is_neutral_tone("T1"));
    CHECK(!is_neutral_tone("T4"));
}

TEST_CASE("missing labels pass through sandhi untouched") {
    std::vector<SyllableSpan> spans = {span(0, 0.0, 0.2, std::nullopt),
                                       span(1, 0.2, 0.4, "T3"), span(2, 0.4, 0.6, "T3")};
    auto out = apply_sandhi_labels(spans, "cmn");
    CHECK(!out[0].tone_label.has_value());
    CHECK(labels_of(out)[1] == std::optional<std::string>("T2"));
    CHECK(labels_of(out)[2] == std::optional<std::string>("T3"));
}

TEST_CASE("language tags recognized as Mandarin") {
    CHECK(is_mandarin("cmn"));
    CHECK(is_mandarin("zh"));
    CHECK(is_mandarin("mandarin"));
    CHECK(is_mandarin("Mandarin"));
    CHECK(!is_mandarin("yue"));
    CHECK(!is_mandarin("synthetic"));
}

TEST_CASE("corpus assembly excludes words longer than four syllables") {
    FixtureDir fx("corpus_long");
    fx.wav("short.wav", 1.2);
    fx.wav("long.wav", 2.0);
    fx.write("short.tsv",
             "syllable_index\tstart_s\tend_s\ttone_label\n"
             "0\t0.1\t0.4\tT1\n"
             "1\t0.5\t0.9\tT2\n");
    std::string long_tsv = "syllable_index\tstart_s\tend_s\ttone_label\n";
    for (int i = 0; i < 5; ++i) {
        long_tsv += std::to_string(i) + "\t" + std::to_string(0.1 + 0.3 * i) + "\t" +
                    std::to_string(0.3 + 0.3 * i) + "\tT1\n";
    }
    fx.write("long.tsv", long_tsv);
    fs::path mpath = fx.write(
        "manifest.json",
        R"({"language": "cmn", "speaker": "s", "words": [)"
        R"({"id": "short", "audio": "short.wav", "segmentation": "short.tsv"},)"
        R"({"id": "long", "audio": "long.wav", "segmentation": "long.tsv"}]})");

    Corpus corpus = load_corpus(mpath);
    REQUIRE(corpus.words.size() == 2);
    const CorpusWord* short_w = &corpus.words[0];
    const CorpusWord* long_w = &corpus.words[1];
    if (short_w->word_id != "short") std::swap(short_w, long_w);
    CHECK(!short_w->excluded);
    CHECK(long_w->excluded);
    CHECK(!long_w->exclusion_reason.empty());
    CHECK(corpus.active_word_count() == 1);
}

TEST_CASE("corpus assembly applies sandhi and handles neutral tones per flag") {
    FixtureDir fx("corpus_sandhi");
    fx.wav("w.wav", 1.4);
    fx.write("w.tsv",
             "syllable_index\tstart_s\tend_s\ttone_label\n"
             "0\t0.1\t0.4\tT3\n"
             "1\t0.5\t0.8\tT3\n"
             "2\t0.9\t1.2\tT0\n");
    fs::path mpath = fx.write("manifest.json",
                              R"({"language": "cmn", "speaker": "s", "words": [)"
                              R"({"id": "w", "audio": "w.wav", "segmentation": "w.tsv"}]})");

    Corpus kept = load_corpus(mpath, /*drop_neutral=*/false);
    REQUIRE(kept.words.size() == 1);
    REQUIRE(kept.words[0].spans.size() == 3);
    CHECK(kept.words[0].spans[0].tone_label == std::optional<std::string>("T2"));
    CHECK(kept.words[0].spans[1].tone_label == std::optional<std::string>("T3"));
    CHECK(kept.words[0].spans[2].excluded_from_eval);

    Corpus dropped = load_corpus(mpath, /*drop_neutral=*/true);
    REQUIRE(dropped.words[0].spans.size() == 2);
    CHECK(dropped.words[0].spans[1].tone_label == std::optional<std::string>("T3"));
}
