#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <vector>

#include "panosphere/error.hpp"
#include "panosphere/loss.hpp"
#include "panosphere/metrics.hpp"
#include "panosphere/projection.hpp"
#include "panosphere/rotation.hpp"
#include "panosphere/sdpe.hpp"
#include "panosphere/validation.hpp"

namespace py = pybind11;
namespace ps = panosphere;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

ps::ErpImage image_from_array(const DoubleArray& arr) {
    if (arr.ndim() != 2 && arr.ndim() != 3)
        throw ps::InvalidArgument("image array must be (H, W) or (H, W, C)");
    const int h = static_cast<int>(arr.shape(0));
    const int w = static_cast<int>(arr.shape(1));
    const int c = arr.ndim() == 3 ? static_cast<int>(arr.shape(2)) : 1;
    std::vector<double> data(arr.data(), arr.data() + arr.size());
    return ps::ErpImage(ps::ImageDims(h, w), c, std::move(data));
}

py::array image_to_array(const ps::ErpImage& img, bool squeeze) {
    if (img.channels == 1 && squeeze) {
        py::array_t<double> out({img.dims.h, img.dims.w});
        std::memcpy(out.mutable_data(), img.data.data(), img.data.size() * sizeof(double));
        return out;
    }
    py::array_t<double> out({img.dims.h, img.dims.w, img.channels});
    std::memcpy(out.mutable_data(), img.data.data(), img.data.size() * sizeof(double));
    return out;
}

ps::LabelMap labels_from_array(const LabelArray& arr, std::uint8_t ignore_id) {
    if (arr.ndim() != 2) throw ps::InvalidArgument("label array must be (H, W)");
    const int h = static_cast<int>(arr.shape(0));
    const int w = static_cast<int>(arr.shape(1));
    std::vector<std::uint8_t> data(arr.data(), arr.data() + arr.size());
    return ps::LabelMap(ps::ImageDims(h, w), std::move(data), ignore_id);
}

py::array_t<std::uint8_t> labels_to_array(const ps::LabelMap& lbl) {
    py::array_t<std::uint8_t> out({lbl.dims.h, lbl.dims.w});
    std::memcpy(out.mutable_data(), lbl.data.data(), lbl.data.size());
    return out;
}

ps::OffsetField offsets_from_array(const DoubleArray& arr, double clamp_factor) {
    if (arr.ndim() != 5 || arr.shape(4) != 2 || arr.shape(2) != arr.shape(3))
        throw ps::InvalidArgument("offset array must be (rows, cols, s, s, 2)");
    const ps::PatchGrid grid(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
                             static_cast<int>(arr.shape(2)), clamp_factor);
    std::vector<double> data(arr.data(), arr.data() + arr.size());
    return ps::OffsetField(grid, std::move(data));
}

py::array offsets_to_array(const ps::OffsetField& field) {
    py::array_t<double> out(
        {field.grid.rows, field.grid.cols, field.grid.patch, field.grid.patch, 2});
    std::memcpy(out.mutable_data(), field.data.data(), field.data.size() * sizeof(double));
    return out;
}

py::dict record_to_dict(const ps::EvalRecord& rec) {
    py::dict d;
    d["per_class_iou"] = rec.per_class_iou;
    d["miou"] = rec.miou;
    d["pixel_accuracy"] = rec.pixel_accuracy;
    d["evaluated_pixels"] = rec.evaluated_pixels;
    return d;
}

py::dict aggregate_to_dict(const ps::MetricAggregate& agg) {
    py::dict d;
    d["mean"] = agg.mean;
    d["variance"] = agg.variance;
    d["range"] = agg.range;
    d["min"] = agg.min_value;
    d["max"] = agg.max_value;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spherical panorama operations: rotation, weights, offset losses, metrics";

    m.def(
        "compose",
        [](double yaw, double pitch, double roll) {
            const ps::RotMat r = ps::compose(ps::RotationAngles{yaw, pitch, roll});
            py::array_t<double> out({3, 3});
            std::memcpy(out.mutable_data(), r.m.data(), sizeof r.m);
            return out;
        },
        py::arg("yaw"), py::arg("pitch"), py::arg("roll"),
        "3x3 rotation matrix for yaw/pitch/roll in degrees (z, then y, then x axis)");

    m.def(
        "rotate_image",
        [](const DoubleArray& img, double yaw, double pitch, double roll) {
            const ps::ErpImage src = image_from_array(img);
            const ps::RotMat r = ps::compose(ps::RotationAngles{yaw, pitch, roll});
            return image_to_array(ps::rotate_erp(src, r), img.ndim() == 2);
        },
        py::arg("image"), py::arg("yaw"), py::arg("pitch"), py::arg("roll"),
        "Rotate an equirectangular image on the sphere (nearest-neighbor)");

    m.def(
        "rotate_labels",
        [](const LabelArray& lbl, double yaw, double pitch, double roll,
           std::uint8_t ignore_id) {
            const ps::LabelMap src = labels_from_array(lbl, ignore_id);
            const ps::RotMat r = ps::compose(ps::RotationAngles{yaw, pitch, roll});
            return labels_to_array(ps::rotate_labels(src, r));
        },
        py::arg("labels"), py::arg("yaw"), py::arg("pitch"), py::arg("roll"),
        py::arg("ignore_id") = 255,
        "Rotate a class-id map on the sphere (nearest-neighbor)");

    m.def(
        "weight_rows",
        [](int height) {
            const ps::WeightMap wm = ps::weight_map(ps::ImageDims(height, 2 * height));
            py::array_t<double> out(height);
            std::memcpy(out.mutable_data(), wm.row_weights.data(), wm.row_weights.size() * sizeof(double));
            return out;
        },
        py::arg("height"), "Per-row panorama weights cos(|2m - H|/H * pi/2), m 1-based");

    m.def(
        "aggregate_values",
        [](const std::vector<double>& values) {
            return aggregate_to_dict(ps::aggregate_values(values));
        },
        py::arg("values"), "Mean / population variance / range of a metric list");

    m.def(
        "evaluate_pair",
        [](const LabelArray& pred, const LabelArray& gt, int num_classes,
           std::uint8_t ignore_id) {
            const ps::LabelMap p = labels_from_array(pred, ignore_id);
            const ps::LabelMap g = labels_from_array(gt, ignore_id);
            return record_to_dict(ps::make_record(ps::accumulate(p, g, num_classes)));
        },
        py::arg("pred"), py::arg("gt"), py::arg("num_classes"), py::arg("ignore_id") = 255,
        "Per-class IoU, mIoU and pixel accuracy of one prediction/ground-truth pair");

    m.def(
        "confusion_matrix",
        [](const LabelArray& pred, const LabelArray& gt, int num_classes,
           std::uint8_t ignore_id) {
            const ps::ConfusionMatrix cm = ps::accumulate(
                labels_from_array(pred, ignore_id), labels_from_array(gt, ignore_id), num_classes);
            py::array_t<std::uint64_t> out({num_classes, num_classes});
            std::memcpy(out.mutable_data(), cm.counts.data(),
                        cm.counts.size() * sizeof(std::uint64_t));
            return out;
        },
        py::arg("pred"), py::arg("gt"), py::arg("num_classes"), py::arg("ignore_id") = 255,
        "C x C count matrix, row = ground truth, column = prediction");

    m.def(
        "mirror_offsets",
        [](const DoubleArray& offsets) {
            return offsets_to_array(ps::mirror_offsets(offsets_from_array(offsets, 0.0)));
        },
        py::arg("offsets"), "Left-right mirror of a (rows, cols, s, s, 2) offset field");

    const auto loss_binding = [](ps::LossResult (*fn)(const ps::OffsetField&, bool)) {
        return [fn](const DoubleArray& offsets, bool normalize) {
            const ps::LossResult res = fn(offsets_from_array(offsets, 0.0), normalize);
            return py::make_tuple(res.value, offsets_to_array(res.grad));
        };
    };
    m.def("intra_loss", loss_binding(&ps::intra_loss), py::arg("offsets"),
          py::arg("normalize") = false,
          "Mirror-symmetry loss of an offset field: (value, gradient)");
    m.def("inter_loss", loss_binding(&ps::inter_loss), py::arg("offsets"),
          py::arg("normalize") = false,
          "Row-average consistency loss of an offset field: (value, gradient)");
    m.def("sdpe_loss", loss_binding(&ps::sdpe_loss), py::arg("offsets"),
          py::arg("normalize") = false, "Sum of both offset constraints: (value, gradient)");
}
