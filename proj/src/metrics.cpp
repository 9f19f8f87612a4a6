#include "panosphere/metrics.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "panosphere/error.hpp"

namespace panosphere {

ConfusionMatrix::ConfusionMatrix(int classes) : num_classes(classes) {
    if (classes < 1) throw InvalidArgument("confusion matrix needs at least one class");
    counts.assign(static_cast<std::size_t>(classes) * classes, 0);
}

std::uint64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
    if (num_classes != other.num_classes)
        throw DimensionMismatch("cannot merge confusion matrices of different class counts");
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += other.counts[k];
}

void accumulate_into(ConfusionMatrix& cm, const LabelMap& pred, const LabelMap& gt) {
    if (!(pred.dims == gt.dims))
        throw DimensionMismatch("prediction and ground truth differ in size");
    const std::size_t n = gt.dims.pixels();
    for (std::size_t p = 0; p < n; ++p) {
        const std::uint8_t g = gt.data[p];
        if (g == gt.ignore_id) continue;  // skipped before the prediction is even looked at
        const std::uint8_t pr = pred.data[p];
        if (g >= cm.num_classes)
            throw InvalidArgument("ground-truth id " + std::to_string(g) +
                                  " outside the class range");
        if (pr >= cm.num_classes)
            throw InvalidArgument("predicted id " + std::to_string(pr) +
                                  " outside the class range");
        ++cm.at(g, pr);
    }
}

ConfusionMatrix accumulate(const LabelMap& pred, const LabelMap& gt, int num_classes) {
    ConfusionMatrix cm(num_classes);
    accumulate_into(cm, pred, gt);
    return cm;
}

std::vector<double> iou_per_class(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw UndefinedMetric("no evaluated pixels");
    std::vector<double> iou(static_cast<std::size_t>(cm.num_classes));
    for (int c = 0; c < cm.num_classes; ++c) {
        std::uint64_t tp = cm.at(c, c);
        std::uint64_t fp = 0, fn = 0;
        for (int k = 0; k < cm.num_classes; ++k) {
            if (k == c) continue;
            fp += cm.at(k, c);
            fn += cm.at(c, k);
        }
        const std::uint64_t denom = tp + fp + fn;
        iou[static_cast<std::size_t>(c)] =
            denom ? static_cast<double>(tp) / static_cast<double>(denom)
                  : std::numeric_limits<double>::quiet_NaN();
    }
    return iou;
}

double miou(const ConfusionMatrix& cm) {
    const std::vector<double> iou = iou_per_class(cm);
    double sum = 0.0;
    int defined = 0;
    for (double v : iou)
        if (!std::isnan(v)) {
            sum += v;
            ++defined;
        }
    if (defined == 0) throw UndefinedMetric("every class has an empty union");
    return sum / defined;
}

double pixel_accuracy(const ConfusionMatrix& cm) {
    const std::uint64_t total = cm.total();
    if (total == 0) throw UndefinedMetric("no evaluated pixels");
    std::uint64_t correct = 0;
    for (int c = 0; c < cm.num_classes; ++c) correct += cm.at(c, c);
    return static_cast<double>(correct) / static_cast<double>(total);
}

EvalRecord make_record(const ConfusionMatrix& cm) {
    EvalRecord rec;
    rec.per_class_iou = iou_per_class(cm);
    rec.miou = miou(cm);
    rec.pixel_accuracy = pixel_accuracy(cm);
    rec.evaluated_pixels = cm.total();
    return rec;
}

}  // namespace panosphere
