#pragma once

#include "vtpseg/detection.hpp"
#include "vtpseg/manifest.hpp"
#include "vtpseg/metrics.hpp"
#include "vtpseg/prompts.hpp"
#include "vtpseg/scene.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vtpseg {

struct MockBackendSettings {
    std::string scene_file;
    int detector_duplicates = 1;
    double detector_jitter_px = 0.0;
    double scorer_epsilon = 0.0;
};

struct HttpBackendSettings {
    std::string detector_url;
    std::string scorer_url;
    std::string segmenter_url;
    int timeout_sec = 120;
};

struct RunConfig {
    std::string prompt_file;
    GdPlusConfig gd;
    std::vector<double> magnifications{1.2, 1.5};
    bool filter_enabled = true;
    std::string backend = "mock";  // "mock" | "http"
    MockBackendSettings mock;
    HttpBackendSettings http;
    std::uint64_t seed = 0;
    bool debug_patches = false;
    std::optional<std::string> template_override;

    void validate() const;
};

// JSON run configuration; relative paths resolve against the file's directory.
RunConfig load_run_config(const std::string& path);

struct RunResult {
    std::vector<ImageRecord> records;
    int images_ok = 0;
    int images_failed = 0;
};

// Full pipeline over every image in images_dir (.png/.tif/.tiff, processed
// in filename order). Writes one label PNG per input (same stem) plus
// manifest.jsonl into out_dir. Unreadable images are recorded and skipped.
RunResult run(const RunConfig& cfg, const std::string& images_dir, const std::string& out_dir);

// Accumulates the confusion matrix over matching stems and reports the five
// aggregate metrics. Missing counterparts and dimension mismatches fail the
// evaluation with the offending files named.
EvalReport evaluate(const std::string& pred_dir, const std::string& gt_dir, const PromptSet& ps);

struct AblationRow {
    std::string label;
    RunConfig config;
    EvalReport report;
    RunResult run;
};

// Incremental-component comparison, four rows:
//   (a) detector+segmenter only (single scale, suppression off, filter off)
//   (b) + multi-scale views, NMS and oversized-box pruning
//   (c) + prompt filter at the first magnification only
//   (d) full pipeline with magnification-averaged filtering
std::vector<AblationRow> ablate(const RunConfig& cfg, const std::string& images_dir,
                                const std::string& gt_dir, const std::string& out_dir);

std::string format_ablation_table(const std::vector<AblationRow>& rows);

// Synthetic mock corpus: rendered scene images, ground-truth label masks and
// the scene file the mock backends consume.
struct CorpusSpec {
    int image_count = 20;
    int width = 256;
    int height = 256;
    int objects_per_image = 3;
    int distractors_per_image = 1;
    std::uint64_t seed = 0;
};

SceneDescription generate_scene(const PromptSet& ps, const CorpusSpec& spec, int image_index);

// Writes images/, gt/, scenes.json and a ready-to-run config.json + the
// prompt file into out_dir.
void generate_corpus(const PromptSet& ps, const CorpusSpec& spec, const std::string& out_dir);

}  // namespace vtpseg
