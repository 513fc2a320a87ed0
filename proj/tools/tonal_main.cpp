// tonal: unsupervised tone clustering pipeline.
//
// Stages (extract, train, cluster, eval, figures) read and write artifacts
// under the configured output directory; `run` chains all of them and
// `synth` generates a labeled synthetic contour corpus.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tonal/contour_io.hpp"
#include "tonal/errors.hpp"
#include "tonal/pipeline.hpp"
#include "tonal/synth.hpp"

namespace {

struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> output_dir;
    std::optional<std::string> manifest;
    std::optional<std::string> contours;
    std::optional<std::string> language;
    std::optional<std::uint64_t> seed;
    std::optional<double> bandwidth;
    std::optional<int> min_cluster_size;
    std::optional<int> epochs;
    std::optional<int> batch_size;
    std::optional<double> lr;
    bool keep_neutral = false;
};

void add_common_options(CLI::App& cmd, Overrides& o) {
    cmd.add_option("-c,--config", o.config, "pipeline config JSON");
    cmd.add_option("-o,--output-dir", o.output_dir, "artifact directory");
    cmd.add_option("--seed", o.seed, "master seed (stages derive their own)");
    cmd.add_option("--manifest", o.manifest, "dataset: audio manifest JSON");
    cmd.add_option("--contours", o.contours, "dataset: pre-extracted contour cache");
    cmd.add_option("--language", o.language, "report label when no manifest is used");
    cmd.add_option("--bandwidth", o.bandwidth, "mean shift bandwidth");
    cmd.add_option("--min-cluster-size", o.min_cluster_size,
                   "spurious-cluster threshold (default: N/20)");
    cmd.add_option("--epochs", o.epochs, "training epochs");
    cmd.add_option("--batch-size", o.batch_size, "training batch size");
    cmd.add_option("--lr", o.lr, "Adam learning rate");
    cmd.add_flag("--keep-neutral", o.keep_neutral,
                 "evaluate neutral-tone syllables instead of skipping them");
}

tonal::pipeline::PipelineConfig make_config(const Overrides& o) {
    using tonal::pipeline::PipelineConfig;
    PipelineConfig cfg = o.config ? tonal::pipeline::load_config(*o.config) : PipelineConfig{};
    if (o.manifest && o.contours) {
        throw tonal::ConfigError("use exactly one of --manifest/--contours");
    }
    if (o.manifest) {
        cfg.manifest = *o.manifest;
        cfg.contours.clear();
    }
    if (o.contours) {
        cfg.contours = *o.contours;
        cfg.manifest.clear();
    }
    if (o.output_dir) cfg.output_dir = *o.output_dir;
    if (o.language) cfg.language = *o.language;
    if (o.seed) cfg.seed = *o.seed;
    if (o.bandwidth) cfg.clustering.bandwidth = *o.bandwidth;
    if (o.min_cluster_size) cfg.clustering.min_cluster_size = *o.min_cluster_size;
    if (o.epochs) cfg.training.epochs = *o.epochs;
    if (o.batch_size) cfg.training.batch_size = *o.batch_size;
    if (o.lr) cfg.training.lr = *o.lr;
    if (o.keep_neutral) cfg.drop_neutral = false;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unsupervised tone clustering pipeline"};
    app.require_subcommand(1);

    Overrides o;
    CLI::App* extract = app.add_subcommand("extract", "pitch contours from audio or cache");
    CLI::App* train = app.add_subcommand("train", "train the contour autoencoder");
    CLI::App* cluster = app.add_subcommand("cluster", "PCA + mean shift on the latents");
    CLI::App* eval = app.add_subcommand("eval", "NMI reports vs ground-truth tones");
    CLI::App* figures = app.add_subcommand("figures", "SVG figures from the artifacts");
    CLI::App* run = app.add_subcommand("run", "all stages in order");
    for (CLI::App* cmd : {extract, train, cluster, eval, figures, run}) {
        add_common_options(*cmd, o);
    }

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic labeled corpus");
    std::string synth_out;
    std::uint64_t synth_seed = 1;
    tonal::synth::SynthConfig synth_cfg;
    synth->add_option("-o,--out", synth_out, "directory for contours.jsonl")->required();
    synth->add_option("--seed", synth_seed, "corpus seed");
    synth->add_option("--per-class", synth_cfg.per_class_count, "contours per tone class");
    synth->add_option("--jitter", synth_cfg.jitter_sd, "per-point Gaussian jitter SD");
    synth->add_option("--level-shift", synth_cfg.level_shift_sd, "per-contour level shift SD");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) {
            synth_cfg.seed = synth_seed;
            const auto corpus = tonal::synth::gen_contour_corpus(synth_cfg);
            std::filesystem::create_directories(synth_out);
            const auto path = std::filesystem::path(synth_out) / "contours.jsonl";
            tonal::write_contours(path, corpus);
            std::cout << "wrote " << corpus.size() << " contours to " << path.string() << '\n';
            return 0;
        }

        const tonal::pipeline::PipelineConfig cfg = make_config(o);
        if (extract->parsed()) {
            tonal::pipeline::run_extract(cfg);
        } else if (train->parsed()) {
            tonal::pipeline::run_train(cfg);
        } else if (cluster->parsed()) {
            tonal::pipeline::run_cluster(cfg);
        } else if (eval->parsed()) {
            tonal::pipeline::run_eval(cfg);
        } else if (figures->parsed()) {
            tonal::pipeline::run_figures(cfg);
        } else if (run->parsed()) {
            tonal::pipeline::run_all(cfg);
        }
        return 0;
    } catch (const tonal::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const tonal::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const tonal::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
