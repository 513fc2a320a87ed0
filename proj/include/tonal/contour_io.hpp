#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tonal/pitch.hpp"

namespace tonal {

// One syllable's contour plus its (optional) ground-truth tone. This record
// is what flows between the pipeline stages once audio has been processed.
struct LabeledContour {
    NormalizedContour contour;
    std::optional<std::string> tone;
};

// JSONL contour cache, one record per line:
//   {"word": str, "syll": int, "tone": str|null, "values": [40 reals]}
// Writing is deterministic (fixed key order, shortest-round-trip numbers),
// so identical corpora produce byte-identical files.
void write_contours(const std::filesystem::path& path,
                    const std::vector<LabeledContour>& contours);

std::vector<LabeledContour> read_contours(const std::filesystem::path& path);

}  // namespace tonal
