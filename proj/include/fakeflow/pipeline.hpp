#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fakeflow/types.hpp"

namespace fakeflow {

inline constexpr const char* kToolVersion = "fakeflow 1.0.0";

struct DatasetConfig {
    std::filesystem::path images_dir;  // video mode: frames directory
    std::filesystem::path depths_dir;
    std::filesystem::path output_dir;
    std::uint64_t global_seed = 0;
    bool emit_flo = false;
    bool emit_png = true;
    bool shared_reverse = false;
    int variants = 1;  // flows per image; >1 appends "_v<i>" to sample ids
    int jobs = 1;

    /// Throws ConfigError unless at least one output is enabled, jobs >= 1
    /// and variants >= 1.
    void validate() const;
};

struct SamplePair {
    std::string sample_id;
    std::filesystem::path image_path;
    std::filesystem::path depth_path;
};

struct MatchResult {
    std::vector<SamplePair> pairs;  // sorted by sample_id
    std::vector<std::filesystem::path> unmatched_images;
    std::vector<std::filesystem::path> unmatched_depths;
};

/// Pairs files by exact stem, sorted by sample_id. Unpaired files on either
/// side are returned and warned about. Throws ConfigError when no pair
/// matches or a directory is missing.
MatchResult match_pairs(const std::filesystem::path& images_dir,
                        const std::filesystem::path& depths_dir);

bool is_image_extension(const std::filesystem::path& path);

enum class SampleStatus { Ok, Failed };

struct SampleRecord {
    std::string sample_id;
    std::filesystem::path image_path;
    std::filesystem::path depth_path;
    std::optional<std::filesystem::path> flow_png_path;  // relative to output_dir
    std::optional<std::filesystem::path> flo_path;       // relative to output_dir
    std::uint64_t seed = 0;                              // derived per-sample seed
    AugmentationParams params;
    bool degenerate = false;
    std::uint64_t checksum = 0;  // FNV-1a-64 over every byte written, PNG then .flo
    SampleStatus status = SampleStatus::Ok;
    std::string error_kind;
    std::string error;

    bool ok() const { return status == SampleStatus::Ok; }
};

enum class RunMode { Dataset, Video };

/// Wall-clock and scheduling facts that never influence outputs.
struct RunInfo {
    std::string created_at;  // ISO-8601 UTC
    int jobs = 1;
    std::filesystem::path output_dir;
    double wall_seconds = 0.0;
};

struct DatasetManifest {
    std::string tool_version = kToolVersion;
    RunMode mode = RunMode::Dataset;
    DatasetConfig config;
    RunInfo run;
    std::vector<SampleRecord> records;
    std::vector<std::filesystem::path> unmatched_images;
    std::vector<std::filesystem::path> unmatched_depths;

    std::size_t succeeded() const;
    std::size_t failed() const;
    std::size_t degenerate() const;
};

/// Seed derivation, augmentation sampling, depth normalization, conversion
/// and rendering for one sample, writing outputs under config.output_dir.
/// Failures are captured in the returned record, never thrown.
SampleRecord generate_sample(const std::filesystem::path& image_path,
                             const std::filesystem::path& depth_path, const std::string& sample_id,
                             const DatasetConfig& config);

/// Whole-dataset run over matched pairs with config.jobs workers. Writes
/// <output_dir>/manifest.json. Throws ConfigError for bad configuration or
/// no pairs, and PipelineError (after writing the manifest) when more than
/// half of the samples fail.
DatasetManifest run_dataset(const DatasetConfig& config);

/// Video mode: config.images_dir holds one sub-directory of frames per
/// sequence (or frames directly, forming one sequence named after the
/// directory); sample ids are "<sequence>/<frame stem>".
DatasetManifest simulate_video_flows(const std::filesystem::path& frames_dir,
                                     const std::filesystem::path& depths_dir,
                                     const DatasetConfig& config);

nlohmann::json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

std::string format_checksum(std::uint64_t checksum);

}  // namespace fakeflow
