#include "tonal/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tonal/contour_io.hpp"
#include "tonal/errors.hpp"
#include "tonal/eval.hpp"
#include "tonal/ingest.hpp"
#include "tonal/rng.hpp"
#include "tonal/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace tonal::pipeline {

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
        }
    }
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string report_language(const PipelineConfig& cfg) {
    if (cfg.manifest.empty()) return cfg.language;
    try {
        json doc = json::parse(read_text(cfg.manifest));
        return doc.at("language").get<std::string>();
    } catch (const json::exception& e) {
        throw MalformedManifest("manifest " + cfg.manifest.string() + ": " + e.what());
    }
}

struct ClustersArtifact {
    int k = 0;
    double bandwidth = 0.0;
    int threshold = 0;
    std::vector<int> assignments;
    std::vector<cluster::Point> centers;
    std::vector<int> sizes;
    std::vector<int> raw_sizes;
    std::vector<std::vector<double>> prototypes;
    int unclustered = 0;
};

ClustersArtifact load_clusters(const fs::path& path) {
    ClustersArtifact art;
    try {
        json doc = json::parse(read_text(path));
        if (doc.at("format_version").get<int>() != 1) {
            throw DataError("clusters artifact: unsupported format_version");
        }
        art.k = doc.at("k").get<int>();
        art.bandwidth = doc.at("bandwidth").get<double>();
        art.threshold = doc.at("threshold").get<int>();
        art.assignments = doc.at("assignments").get<std::vector<int>>();
        for (const auto& c : doc.at("centers")) {
            art.centers.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
        }
        art.sizes = doc.at("sizes").get<std::vector<int>>();
        art.raw_sizes = doc.at("raw_sizes").get<std::vector<int>>();
        art.prototypes = doc.at("prototypes").get<std::vector<std::vector<double>>>();
        art.unclustered = doc.at("unclustered").get<int>();
    } catch (const json::exception& e) {
        throw DataError("clusters artifact " + path.string() + ": " + e.what());
    }
    return art;
}

// Encode every contour and rotate onto the principal axes; identical inputs
// give bit-identical results, so cluster and figures stages agree.
std::vector<cluster::Point> pca_latents(const ae::Model& model,
                                        const std::vector<LabeledContour>& contours,
                                        cluster::PcaTransform& pca) {
    std::vector<cluster::Point> latents;
    latents.reserve(contours.size());
    for (const LabeledContour& lc : contours) {
        const auto z = ae::encode(model, lc.contour.values);
        latents.push_back({z[0], z[1]});
    }
    return cluster::pca_fit_apply(latents, pca);
}

int resolve_threshold(const cluster::MeanShiftConfig& cfg, std::size_t n) {
    return cfg.min_cluster_size > 0 ? cfg.min_cluster_size : static_cast<int>(n / 20);
}

}  // namespace

PipelineConfig load_config(const fs::path& path) {
    json doc;
    try {
        doc = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }

    PipelineConfig cfg;
    const fs::path base = path.parent_path();
    auto resolve = [&base](const std::string& p) {
        const fs::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    try {
        reject_unknown_keys(doc, {"dataset", "language", "output_dir", "seed", "pitch",
                                  "training", "clustering", "eval"},
                            "config");
        const json& ds = doc.at("dataset");
        reject_unknown_keys(ds, {"manifest", "contours"}, "dataset");
        if (ds.contains("manifest") == ds.contains("contours")) {
            throw ConfigError("config: dataset needs exactly one of 'manifest'/'contours'");
        }
        if (ds.contains("manifest")) cfg.manifest = resolve(ds["manifest"].get<std::string>());
        if (ds.contains("contours")) cfg.contours = resolve(ds["contours"].get<std::string>());

        if (doc.contains("language")) cfg.language = doc["language"].get<std::string>();
        if (doc.contains("output_dir")) cfg.output_dir = resolve(doc["output_dir"].get<std::string>());
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();

        if (doc.contains("pitch")) {
            const json& p = doc["pitch"];
            reject_unknown_keys(p,
                                {"f0_min_hz", "f0_max_hz", "frame_hop_s", "candidates_per_frame",
                                 "voicing_threshold", "silence_threshold", "octave_cost",
                                 "octave_jump_cost", "voiced_unvoiced_cost"},
                                "pitch");
            if (p.contains("f0_min_hz")) cfg.pitch.f0_min_hz = p["f0_min_hz"].get<double>();
            if (p.contains("f0_max_hz")) cfg.pitch.f0_max_hz = p["f0_max_hz"].get<double>();
            if (p.contains("frame_hop_s")) cfg.pitch.frame_hop_s = p["frame_hop_s"].get<double>();
            if (p.contains("candidates_per_frame")) {
                cfg.pitch.candidates_per_frame = p["candidates_per_frame"].get<int>();
            }
            if (p.contains("voicing_threshold")) {
                cfg.pitch.voicing_threshold = p["voicing_threshold"].get<double>();
            }
            if (p.contains("silence_threshold")) {
                cfg.pitch.silence_threshold = p["silence_threshold"].get<double>();
            }
            if (p.contains("octave_cost")) cfg.pitch.octave_cost = p["octave_cost"].get<double>();
            if (p.contains("octave_jump_cost")) {
                cfg.pitch.octave_jump_cost = p["octave_jump_cost"].get<double>();
            }
            if (p.contains("voiced_unvoiced_cost")) {
                cfg.pitch.voiced_unvoiced_cost = p["voiced_unvoiced_cost"].get<double>();
            }
        }
        if (doc.contains("training")) {
            const json& t = doc["training"];
            reject_unknown_keys(t, {"epochs", "batch_size", "lr"}, "training");
            if (t.contains("epochs")) cfg.training.epochs = t["epochs"].get<int>();
            if (t.contains("batch_size")) cfg.training.batch_size = t["batch_size"].get<int>();
            if (t.contains("lr")) cfg.training.lr = t["lr"].get<double>();
        }
        if (doc.contains("clustering")) {
            const json& c = doc["clustering"];
            reject_unknown_keys(c,
                                {"bandwidth", "max_iters", "convergence_tol",
                                 "mode_merge_radius", "min_cluster_size", "kernel"},
                                "clustering");
            if (c.contains("bandwidth")) cfg.clustering.bandwidth = c["bandwidth"].get<double>();
            if (c.contains("max_iters")) cfg.clustering.max_iters = c["max_iters"].get<int>();
            if (c.contains("convergence_tol")) {
                cfg.clustering.convergence_tol = c["convergence_tol"].get<double>();
            }
            if (c.contains("mode_merge_radius")) {
                cfg.clustering.mode_merge_radius = c["mode_merge_radius"].get<double>();
            }
            if (c.contains("min_cluster_size")) {
                cfg.clustering.min_cluster_size = c["min_cluster_size"].get<int>();
            }
            if (c.contains("kernel")) {
                const std::string k = c["kernel"].get<std::string>();
                if (k == "flat") {
                    cfg.clustering.kernel = cluster::Kernel::flat;
                } else if (k == "gaussian") {
                    cfg.clustering.kernel = cluster::Kernel::gaussian;
                } else {
                    throw ConfigError("config: unknown kernel '" + k + "'");
                }
            }
        }
        if (doc.contains("eval")) {
            const json& e = doc["eval"];
            reject_unknown_keys(e, {"drop_neutral"}, "eval");
            if (e.contains("drop_neutral")) cfg.drop_neutral = e["drop_neutral"].get<bool>();
        }
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return cfg;
}

fs::path contours_path(const PipelineConfig& cfg) { return cfg.output_dir / "contours.jsonl"; }
fs::path checkpoint_path(const PipelineConfig& cfg) { return cfg.output_dir / "checkpoint.json"; }
fs::path loss_path(const PipelineConfig& cfg) { return cfg.output_dir / "loss.csv"; }
fs::path clusters_path(const PipelineConfig& cfg) { return cfg.output_dir / "clusters.json"; }
fs::path reports_dir(const PipelineConfig& cfg) { return cfg.output_dir / "reports"; }
fs::path figures_dir(const PipelineConfig& cfg) { return cfg.output_dir / "figures"; }

void run_extract(const PipelineConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    std::vector<LabeledContour> contours;
    std::ostringstream log;

    if (!cfg.contours.empty()) {
        contours = read_contours(cfg.contours);
        log << "source: contour cache " << cfg.contours.string() << '\n';
    } else if (!cfg.manifest.empty()) {
        log << "source: manifest " << cfg.manifest.string() << '\n';
        const Corpus corpus = load_corpus(cfg.manifest);
        log << "language: " << corpus.language_id << ", speaker: " << corpus.speaker_id << '\n';
        log << "words: " << corpus.words.size() << " total, " << corpus.active_word_count()
            << " active\n";

        std::vector<F0Track> tracks(corpus.words.size());
        std::vector<F0Track> active_tracks;
        for (std::size_t w = 0; w < corpus.words.size(); ++w) {
            const CorpusWord& word = corpus.words[w];
            if (word.excluded) {
                log << "dropped word " << word.word_id << ": " << word.exclusion_reason << '\n';
                continue;
            }
            try {
                tracks[w] = estimate_f0(word.audio, cfg.pitch);
            } catch (const DataError& e) {
                throw DataError("word " + word.word_id + ": " + e.what());
            }
            active_tracks.push_back(tracks[w]);
        }
        const SpeakerRange range = speaker_range(active_tracks);
        log << "speaker range: " << fmt_double(range.lo_hz) << " - " << fmt_double(range.hi_hz)
            << " Hz\n";

        for (std::size_t w = 0; w < corpus.words.size(); ++w) {
            const CorpusWord& word = corpus.words[w];
            if (word.excluded) continue;
            for (const SyllableSpan& span : word.spans) {
                try {
                    const auto timed = normalize_segment(tracks[w], span, range);
                    LabeledContour lc;
                    lc.contour = resample_contour(timed, word.word_id, span.syllable_index);
                    lc.tone = span.tone_label;
                    contours.push_back(std::move(lc));
                } catch (const DataError& e) {
                    log << "dropped " << word.word_id << "[" << span.syllable_index
                        << "]: " << e.what() << '\n';
                }
            }
        }
    } else {
        throw ConfigError("extract: no dataset configured");
    }

    log << "kept: " << contours.size() << " contours\n";
    write_contours(contours_path(cfg), contours);
    write_text(cfg.output_dir / "extract.log", log.str());
}

void run_train(const PipelineConfig& cfg) {
    const std::vector<LabeledContour> contours = read_contours(contours_path(cfg));
    std::vector<std::vector<double>> inputs;
    inputs.reserve(contours.size());
    for (const LabeledContour& lc : contours) inputs.push_back(lc.contour.values);

    ae::Model model = ae::build_model(derive_seed(cfg.seed, "init"));
    ae::TrainConfig tc = cfg.training;
    tc.seed = derive_seed(cfg.seed, "train");
    const ae::TrainResult result = ae::train(model, inputs, tc);

    ae::save_checkpoint(model, checkpoint_path(cfg));
    std::ostringstream csv;
    csv << "epoch,mean_mse\n";
    for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
        csv << e << ',' << fmt_double(result.loss_history[e]) << '\n';
    }
    write_text(loss_path(cfg), csv.str());
}

void run_cluster(const PipelineConfig& cfg) {
    const std::vector<LabeledContour> contours = read_contours(contours_path(cfg));
    const ae::Model model = ae::load_checkpoint(checkpoint_path(cfg));

    cluster::PcaTransform pca;
    const std::vector<cluster::Point> rotated = pca_latents(model, contours, pca);
    const cluster::MeanShiftRaw raw = cluster::mean_shift(rotated, cfg.clustering);
    const int threshold = resolve_threshold(cfg.clustering, rotated.size());
    cluster::ClusterResult result;
    try {
        result = cluster::apply_threshold(raw, threshold);
    } catch (const AllClustersSpurious& e) {
        throw AllClustersSpurious(std::string(e.what()) +
                                  " (try a lower min_cluster_size or a larger bandwidth)");
    }
    cluster::decode_prototypes(result, pca, model);

    ordered_json doc;
    doc["format_version"] = 1;
    doc["k"] = result.k();
    doc["bandwidth"] = cfg.clustering.bandwidth;
    doc["threshold"] = threshold;
    doc["assignments"] = result.assignments;
    doc["centers"] = ordered_json::array();
    for (const auto& c : result.centers) doc["centers"].push_back({c[0], c[1]});
    doc["sizes"] = result.sizes;
    doc["raw_sizes"] = result.raw_sizes;
    doc["prototypes"] = result.prototypes;
    doc["unclustered"] = result.unclustered;
    write_text(clusters_path(cfg), doc.dump(2) + "\n");

    const cluster::PlausibilityReport report =
        cluster::plausibility_check(result, static_cast<int>(rotated.size()));
    std::ostringstream txt;
    for (const auto& item : report.items) {
        txt << (item.pass ? "PASS " : "WARN ") << item.name << ": " << item.detail << '\n';
    }
    fs::create_directories(reports_dir(cfg));
    write_text(reports_dir(cfg) / "plausibility.txt", txt.str());
}

namespace {

ordered_json report_json(const eval::EvalReport& report) {
    ordered_json doc;
    doc["format_version"] = 1;
    doc["language"] = report.language;
    doc["method"] = report.method;
    doc["split"] = report.split;
    doc["nmi"] = report.nmi;
    doc["nmi_variants"] = {{"arithmetic", report.nmi},
                           {"geometric", report.nmi_geometric},
                           {"min", report.nmi_min}};
    doc["coverage"] = report.coverage;
    doc["evaluated"] = report.table.total();
    doc["table"] = {{"clusters", report.table.cluster_names},
                    {"tones", report.table.tone_names},
                    {"counts", report.table.counts}};
    return doc;
}

}  // namespace

void run_eval(const PipelineConfig& cfg) {
    const std::vector<LabeledContour> contours = read_contours(contours_path(cfg));
    const ClustersArtifact clusters = load_clusters(clusters_path(cfg));
    if (clusters.assignments.size() != contours.size()) {
        throw DataError("eval: clusters.json covers " +
                        std::to_string(clusters.assignments.size()) + " syllables but cache has " +
                        std::to_string(contours.size()));
    }

    std::vector<cluster::Point> features;
    features.reserve(contours.size());
    for (const LabeledContour& lc : contours) {
        const auto f = cluster::baseline_features(lc.contour.values);
        features.push_back({f.mean_pitch, f.ols_slope});
    }
    const std::vector<int> km =
        cluster::kmeans(features, clusters.k, derive_seed(cfg.seed, "kmeans"));

    // evaluated syllables: labeled, and non-neutral unless configured otherwise
    std::vector<std::size_t> all_idx;
    for (std::size_t i = 0; i < contours.size(); ++i) {
        const auto& tone = contours[i].tone;
        if (!tone.has_value()) continue;
        if (cfg.drop_neutral && is_neutral_tone(*tone)) continue;
        all_idx.push_back(i);
    }
    if (all_idx.empty()) {
        throw DataError("eval: no labeled syllables; evaluation needs ground-truth tones");
    }
    std::set<std::string> classes;
    for (std::size_t i : all_idx) classes.insert(*contours[i].tone);
    if (classes.size() < 2) {
        throw DataError("eval: needs tone labels from at least 2 classes, found " +
                        std::to_string(classes.size()));
    }
    const std::set<std::size_t> eligible(all_idx.begin(), all_idx.end());
    std::vector<std::size_t> first_idx;
    for (std::size_t i : eval::split_first(contours)) {
        if (eligible.count(i)) first_idx.push_back(i);
    }

    const std::string language = report_language(cfg);
    fs::create_directories(reports_dir(cfg));
    std::ostringstream tables;
    for (const auto& [method, assignments] :
         {std::pair<std::string, const std::vector<int>*>{"autoencoder", &clusters.assignments},
          {"kmeans", &km}}) {
        for (const auto& [split, idx] :
             {std::pair<std::string, const std::vector<std::size_t>*>{"first", &first_idx},
              {"all", &all_idx}}) {
            std::vector<int> a;
            std::vector<std::string> l;
            a.reserve(idx->size());
            l.reserve(idx->size());
            for (std::size_t i : *idx) {
                a.push_back((*assignments)[i]);
                l.push_back(*contours[i].tone);
            }
            const eval::EvalReport report = eval::make_report(language, method, split, a, l);
            write_text(reports_dir(cfg) / ("eval_" + method + "_" + split + ".json"),
                       report_json(report).dump(2) + "\n");
            char nmi_line[160];
            std::snprintf(nmi_line, sizeof(nmi_line),
                          "NMI %.6f (arithmetic; geometric %.6f, min %.6f), coverage %.4f, n=%lld",
                          report.nmi, report.nmi_geometric, report.nmi_min, report.coverage,
                          report.table.total());
            tables << "== " << language << " / " << method << " / " << split << " ==\n"
                   << nmi_line << '\n'
                   << eval::render_table(report.table) << '\n';
        }
    }
    write_text(reports_dir(cfg) / "eval_tables.txt", tables.str());
}

void run_figures(const PipelineConfig& cfg) {
    const std::vector<LabeledContour> contours = read_contours(contours_path(cfg));
    const ae::Model model = ae::load_checkpoint(checkpoint_path(cfg));
    const ClustersArtifact clusters = load_clusters(clusters_path(cfg));

    cluster::PcaTransform pca;
    const std::vector<cluster::Point> rotated = pca_latents(model, contours, pca);

    fs::create_directories(figures_dir(cfg));
    write_text(figures_dir(cfg) / "latent.svg",
               svg::scatter(rotated, clusters.assignments, clusters.centers,
                            "Latent space (PCA), colored by cluster"));
    write_text(figures_dir(cfg) / "prototypes.svg",
               svg::prototype_panels(clusters.prototypes, clusters.sizes,
                                     "Prototype contours (largest cluster first)"));
    write_text(figures_dir(cfg) / "sizes.svg",
               svg::size_bars(clusters.raw_sizes, clusters.threshold, "Cluster sizes"));

    std::vector<double> losses;
    std::istringstream csv(read_text(loss_path(cfg)));
    std::string line;
    std::getline(csv, line);  // header
    while (std::getline(csv, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        losses.push_back(std::stod(line.substr(comma + 1)));
    }
    write_text(figures_dir(cfg) / "loss.svg",
               svg::line_chart(losses, "Training loss", "epoch", "mean MSE"));
}

void run_all(const PipelineConfig& cfg) {
    run_extract(cfg);
    run_train(cfg);
    run_cluster(cfg);
    run_eval(cfg);
    run_figures(cfg);
}

}  // namespace tonal::pipeline
