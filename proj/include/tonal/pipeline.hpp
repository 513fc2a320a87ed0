#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "tonal/autoencoder.hpp"
#include "tonal/cluster.hpp"
#include "tonal/pitch.hpp"

namespace tonal::pipeline {

// One config drives every stage; all stage seeds are derived from the single
// top-level seed, so each stage is independently reproducible.
struct PipelineConfig {
    // Exactly one dataset source: a manifest of audio + segmentations, or a
    // pre-extracted contour cache.
    std::filesystem::path manifest;
    std::filesystem::path contours;
    std::string language = "synthetic";  // report label; manifest overrides

    PitchParams pitch;
    ae::TrainConfig training;
    cluster::MeanShiftConfig clustering;
    bool drop_neutral = true;  // exclude neutral-tone syllables from eval
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
};

// JSON config file; every field optional except the dataset source.
// Unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& path);

std::filesystem::path contours_path(const PipelineConfig& cfg);
std::filesystem::path checkpoint_path(const PipelineConfig& cfg);
std::filesystem::path loss_path(const PipelineConfig& cfg);
std::filesystem::path clusters_path(const PipelineConfig& cfg);
std::filesystem::path reports_dir(const PipelineConfig& cfg);
std::filesystem::path figures_dir(const PipelineConfig& cfg);

// Stage entry points. Each consumes the previous stage's on-disk artifact
// under output_dir and writes its own.
void run_extract(const PipelineConfig& cfg);
void run_train(const PipelineConfig& cfg);
void run_cluster(const PipelineConfig& cfg);
void run_eval(const PipelineConfig& cfg);
void run_figures(const PipelineConfig& cfg);
void run_all(const PipelineConfig& cfg);

}  // namespace tonal::pipeline
