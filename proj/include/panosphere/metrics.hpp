#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "panosphere/image.hpp"

namespace panosphere {

// Square count matrix, row = ground-truth class, column = predicted class.
// Ignore-labeled ground-truth pixels never enter the counts, so the total is
// exactly the number of evaluated pixels. Matrices over the same class count
// merge by element-wise addition, which makes per-image accumulation and
// dataset pooling interchangeable.
struct ConfusionMatrix {
    int num_classes = 0;
    std::vector<std::uint64_t> counts;  // row-major C x C

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int classes);

    std::uint64_t& at(int gt, int pred) {
        return counts[static_cast<std::size_t>(gt) * num_classes + pred];
    }
    std::uint64_t at(int gt, int pred) const {
        return counts[static_cast<std::size_t>(gt) * num_classes + pred];
    }
    std::uint64_t total() const;
    void merge(const ConfusionMatrix& other);
};

// Count pred-vs-gt pairs over all pixels whose ground truth is not ignore_id.
// Out-of-range ids (other than the gt ignore id) are an error, including
// predictions at ignored pixels' positions only when the pixel is evaluated.
ConfusionMatrix accumulate(const LabelMap& pred, const LabelMap& gt, int num_classes);
void accumulate_into(ConfusionMatrix& cm, const LabelMap& pred, const LabelMap& gt);

// IoU_c = TP / (TP + FP + FN). Classes that never appear in gt or pred have a
// zero denominator and come back as NaN; miou averages only the defined ones.
std::vector<double> iou_per_class(const ConfusionMatrix& cm);
double miou(const ConfusionMatrix& cm);
double pixel_accuracy(const ConfusionMatrix& cm);

// One evaluation's exported record.
struct EvalRecord {
    std::vector<double> per_class_iou;
    double miou = 0.0;
    double pixel_accuracy = 0.0;
    std::uint64_t evaluated_pixels = 0;
};

EvalRecord make_record(const ConfusionMatrix& cm);

}  // namespace panosphere
