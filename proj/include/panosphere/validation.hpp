#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "panosphere/dataset.hpp"
#include "panosphere/image.hpp"
#include "panosphere/rotation.hpp"

namespace panosphere {

// The set of rotation situations to validate under: the Cartesian product of
// the three angle lists. Situations are enumerated pitch-outer, roll-middle,
// yaw-innermost, so with the default grid the first four rows share
// pitch=0, roll=0 while yaw steps through its four values.
struct RotationGrid {
    std::vector<double> yaw_values;
    std::vector<double> pitch_values;
    std::vector<double> roll_values;
};

// Defaults: yaw 0/90/180/270, pitch 0/5, roll 0/5 — sixteen situations.
RotationGrid default_rotation_grid();

// Validates each list: non-empty, finite, duplicate-free.
RotationGrid build_grid(std::vector<double> yaws, std::vector<double> pitches,
                        std::vector<double> rolls);

std::vector<RotationAngles> enumerate_situations(const RotationGrid& grid);

struct SituationResult {
    int index = 0;
    RotationAngles angles;
    bool failed = false;      // predictor broke on some sample; excluded from aggregates
    std::string error;        // why, when failed
    double miou = 0.0;
    double pixel_accuracy = 0.0;
    std::vector<double> per_class_iou;
    std::uint64_t evaluated_pixels = 0;
};

struct MetricAggregate {
    double mean = 0.0;
    double variance = 0.0;  // population variance (divide by N)
    double range = 0.0;     // max - min
    double min_value = 0.0;
    double max_value = 0.0;
};

// Mean / population variance / range of a value list. Population rather than
// sample variance is deliberate: it is the convention the reference
// aggregates reproduce, and the acceptance suite pins it.
MetricAggregate aggregate_values(const std::vector<double>& values);

struct SgaReport {
    std::vector<SituationResult> situations;
    int failed_count = 0;
    MetricAggregate miou_agg;
    MetricAggregate pacc_agg;
};

// Aggregates over the non-failed situations only; at least one must remain.
SgaReport aggregate(std::vector<SituationResult> results);

struct Sample {
    std::string id;
    std::optional<ErpImage> image;  // absent when the predictor never reads pixels
    LabelMap labels;
};

struct Dataset {
    std::vector<Sample> samples;
    int num_classes = 0;
};

Dataset load_dataset(const DatasetManifest& manifest, bool load_images);

// A predictor produces a label map for one sample under one rotation
// situation. The harness trains nothing; predictions are either precomputed
// on disk or produced by an external command per image.
class Predictor {
  public:
    virtual ~Predictor() = default;
    virtual bool needs_images() const = 0;
    // rotated is null iff needs_images() is false. dims is the expected
    // prediction size; a mismatch is a predictor failure.
    virtual LabelMap predict(const std::string& sample_id, int situation_index,
                             const ErpImage* rotated, ImageDims dims,
                             std::uint8_t ignore_id) = 0;
};

// Precomputed predictions laid out as <dir>/<sample_id>_s<situation_index>.png.
class DirPredictor : public Predictor {
  public:
    explicit DirPredictor(std::filesystem::path dir);
    bool needs_images() const override { return false; }
    LabelMap predict(const std::string& sample_id, int situation_index, const ErpImage* rotated,
                     ImageDims dims, std::uint8_t ignore_id) override;

  private:
    std::filesystem::path dir_;
};

// Shells out once per rotated image: the template's {input} and {output}
// tokens are replaced with PNG paths under work_dir, the command must exit 0
// and leave a label map at {output}.
class CommandPredictor : public Predictor {
  public:
    CommandPredictor(std::string command_template, std::filesystem::path work_dir);
    bool needs_images() const override { return true; }
    LabelMap predict(const std::string& sample_id, int situation_index, const ErpImage* rotated,
                     ImageDims dims, std::uint8_t ignore_id) override;

  private:
    std::string template_;
    std::filesystem::path work_dir_;
};

// Rotate every sample (image and ground truth through the same resampling
// map), run the predictor, pool a confusion matrix over the dataset. A
// predictor failure marks the situation failed instead of throwing.
SituationResult evaluate_situation(const Dataset& dataset, Predictor& predictor,
                                   const RotationAngles& angles, int situation_index,
                                   int jobs = 1);

// The whole protocol: every grid situation evaluated (in parallel when jobs
// allows — results are ordered by situation index regardless), failures
// flagged, aggregates over the rest.
SgaReport sga_validate(const Dataset& dataset, Predictor& predictor, const RotationGrid& grid,
                       int jobs = 1);

// Structured report: keys situations (with angles, metrics, failed/error per
// row), failed_count, and per-metric mean/variance/range/min/max blocks.
void save_report_json(const SgaReport& report, const std::filesystem::path& path);
SgaReport load_report_json(const std::filesystem::path& path);
// Delimited table: one situation per row, aggregate rows appended at the end.
void save_report_csv(const SgaReport& report, const std::filesystem::path& path);

}  // namespace panosphere
