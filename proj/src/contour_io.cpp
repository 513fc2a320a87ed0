#include "tonal/contour_io.hpp"

#include <fstream>

#include <json.hpp>

#include "tonal/errors.hpp"

namespace tonal {

void write_contours(const std::filesystem::path& path,
                    const std::vector<LabeledContour>& contours) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& c : contours) {
        nlohmann::ordered_json rec;
        rec["word"] = c.contour.word_id;
        rec["syll"] = c.contour.syllable_index;
        if (c.tone) {
            rec["tone"] = *c.tone;
        } else {
            rec["tone"] = nullptr;
        }
        rec["values"] = c.contour.values;
        out << rec.dump() << "\n";
    }
}

std::vector<LabeledContour> read_contours(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("cannot open contour cache: " + path.string());

    std::vector<LabeledContour> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
            LabeledContour c;
            c.contour.word_id = rec.at("word").get<std::string>();
            c.contour.syllable_index = rec.at("syll").get<int>();
            if (!rec.at("tone").is_null()) {
                c.tone = rec.at("tone").get<std::string>();
            }
            c.contour.values = rec.at("values").get<std::vector<double>>();
            c.contour.validate();
            out.push_back(std::move(c));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": bad contour record: " + e.what());
        }
    }
    return out;
}

}  // namespace tonal
