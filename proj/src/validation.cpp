#include "panosphere/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <utility>

#include <json.hpp>

#include "panosphere/error.hpp"
#include "panosphere/metrics.hpp"
#include "panosphere/parallel.hpp"
#include "panosphere/projection.hpp"

namespace panosphere {

using nlohmann::json;

RotationGrid default_rotation_grid() {
    return RotationGrid{{0.0, 90.0, 180.0, 270.0}, {0.0, 5.0}, {0.0, 5.0}};
}

namespace {

void check_angle_list(const std::vector<double>& values, const char* name) {
    if (values.empty())
        throw InvalidArgument(std::string(name) + " angle list must not be empty");
    for (std::size_t a = 0; a < values.size(); ++a) {
        if (!std::isfinite(values[a]))
            throw InvalidArgument(std::string(name) + " angle list contains a non-finite value");
        for (std::size_t b = a + 1; b < values.size(); ++b)
            if (values[a] == values[b])
                throw InvalidArgument(std::string(name) + " angle list contains duplicates");
    }
}

}  // namespace

RotationGrid build_grid(std::vector<double> yaws, std::vector<double> pitches,
                        std::vector<double> rolls) {
    check_angle_list(yaws, "yaw");
    check_angle_list(pitches, "pitch");
    check_angle_list(rolls, "roll");
    return RotationGrid{std::move(yaws), std::move(pitches), std::move(rolls)};
}

std::vector<RotationAngles> enumerate_situations(const RotationGrid& grid) {
    check_angle_list(grid.yaw_values, "yaw");
    check_angle_list(grid.pitch_values, "pitch");
    check_angle_list(grid.roll_values, "roll");
    std::vector<RotationAngles> out;
    out.reserve(grid.yaw_values.size() * grid.pitch_values.size() * grid.roll_values.size());
    for (double pitch : grid.pitch_values)
        for (double roll : grid.roll_values)
            for (double yaw : grid.yaw_values)
                out.push_back(RotationAngles{yaw, pitch, roll});
    return out;
}

MetricAggregate aggregate_values(const std::vector<double>& values) {
    if (values.empty()) throw InvalidArgument("cannot aggregate an empty value list");
    MetricAggregate agg;
    double sum = 0.0;
    agg.min_value = values.front();
    agg.max_value = values.front();
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument("aggregate input contains a non-finite value");
        sum += v;
        agg.min_value = std::min(agg.min_value, v);
        agg.max_value = std::max(agg.max_value, v);
    }
    agg.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - agg.mean) * (v - agg.mean);
    agg.variance = sq / static_cast<double>(values.size());
    agg.range = agg.max_value - agg.min_value;
    return agg;
}

SgaReport aggregate(std::vector<SituationResult> results) {
    if (results.empty()) throw InvalidArgument("cannot aggregate an empty situation list");
    SgaReport report;
    report.situations = std::move(results);
    std::vector<double> mious, paccs;
    for (const SituationResult& r : report.situations) {
        if (r.failed) {
            ++report.failed_count;
            continue;
        }
        mious.push_back(r.miou);
        paccs.push_back(r.pixel_accuracy);
    }
    if (mious.empty()) throw UndefinedMetric("every situation failed; nothing to aggregate");
    report.miou_agg = aggregate_values(mious);
    report.pacc_agg = aggregate_values(paccs);
    return report;
}

Dataset load_dataset(const DatasetManifest& manifest, bool load_images) {
    Dataset ds;
    ds.num_classes = manifest.num_classes;
    ds.samples.reserve(manifest.entries.size());
    for (const ManifestEntry& e : manifest.entries) {
        Sample s;
        s.id = e.sample_id;
        s.labels = load_labels(manifest.resolve_labels(e), manifest.ignore_id);
        if (load_images) {
            s.image = load_image(manifest.resolve_image(e));
            if (!(s.image->dims == s.labels.dims))
                throw ManifestError("sample '" + e.sample_id +
                                    "': image and label dimensions differ");
        }
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

DirPredictor::DirPredictor(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::is_directory(dir_))
        throw IoError("prediction directory " + dir_.string() + " does not exist");
}

LabelMap DirPredictor::predict(const std::string& sample_id, int situation_index,
                               const ErpImage*, ImageDims, std::uint8_t ignore_id) {
    const std::filesystem::path path =
        dir_ / (sample_id + "_s" + std::to_string(situation_index) + ".png");
    try {
        return load_labels(path, ignore_id);
    } catch (const Error& e) {
        throw PredictorError(std::string("precomputed prediction unusable: ") + e.what());
    }
}

namespace {

void replace_all(std::string& text, const std::string& token, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
}

}  // namespace

CommandPredictor::CommandPredictor(std::string command_template, std::filesystem::path work_dir)
    : template_(std::move(command_template)), work_dir_(std::move(work_dir)) {
    if (template_.find("{input}") == std::string::npos ||
        template_.find("{output}") == std::string::npos)
        throw InvalidArgument("predictor command must contain {input} and {output} tokens");
    std::filesystem::create_directories(work_dir_);
}

LabelMap CommandPredictor::predict(const std::string& sample_id, int situation_index,
                                   const ErpImage* rotated, ImageDims, std::uint8_t ignore_id) {
    if (!rotated) throw InvalidArgument("command predictors need the rotated image");
    const std::string stem = sample_id + "_s" + std::to_string(situation_index);
    const std::filesystem::path in_path = work_dir_ / (stem + "_in.png");
    const std::filesystem::path out_path = work_dir_ / (stem + "_pred.png");
    save_image(*rotated, in_path);

    std::string cmd = template_;
    replace_all(cmd, "{input}", in_path.string());
    replace_all(cmd, "{output}", out_path.string());
    const int rc = std::system(cmd.c_str());

    std::error_code ec;
    LabelMap result;
    try {
        if (rc != 0)
            throw PredictorError("predictor command exited with status " + std::to_string(rc));
        try {
            result = load_labels(out_path, ignore_id);
        } catch (const PredictorError&) {
            throw;
        } catch (const Error& e) {
            throw PredictorError(std::string("predictor output unusable: ") + e.what());
        }
    } catch (...) {
        std::filesystem::remove(in_path, ec);
        std::filesystem::remove(out_path, ec);
        throw;
    }
    std::filesystem::remove(in_path, ec);
    std::filesystem::remove(out_path, ec);
    return result;
}

SituationResult evaluate_situation(const Dataset& dataset, Predictor& predictor,
                                   const RotationAngles& angles, int situation_index,
                                   int jobs) {
    if (dataset.samples.empty()) throw InvalidArgument("dataset has no samples");
    if (dataset.num_classes < 1) throw InvalidArgument("dataset class count must be positive");

    SituationResult res;
    res.index = situation_index;
    res.angles = angles;

    const RotMat rot = compose(angles);

    // One resampling map per distinct raster size, built up front and shared
    // by every sample (and by both the image and its ground truth).
    std::vector<std::pair<ImageDims, ResampleMap>> maps;
    for (const Sample& s : dataset.samples) {
        const bool have = std::any_of(maps.begin(), maps.end(),
                                      [&](const auto& p) { return p.first == s.labels.dims; });
        if (!have) maps.emplace_back(s.labels.dims, build_rotation_map(s.labels.dims, rot));
    }
    const auto map_for = [&](ImageDims dims) -> const ResampleMap& {
        for (const auto& [d, m] : maps)
            if (d == dims) return m;
        throw InvalidArgument("no resampling map for these dimensions");  // unreachable
    };

    const std::size_t n = dataset.samples.size();
    std::vector<ConfusionMatrix> mats(n);
    std::vector<std::string> errors(n);
    parallel_for(n, jobs, [&](std::size_t k) {
        const Sample& s = dataset.samples[k];
        if (predictor.needs_images() && !s.image)
            throw InvalidArgument("sample '" + s.id +
                                  "' has no image pixels but the predictor needs them");
        const ResampleMap& map = map_for(s.labels.dims);
        const LabelMap rotated_gt = apply_resample(s.labels, map);
        try {
            LabelMap pred;
            if (predictor.needs_images()) {
                const ErpImage rotated_img = apply_resample(*s.image, map);
                pred = predictor.predict(s.id, situation_index, &rotated_img, s.labels.dims,
                                         s.labels.ignore_id);
            } else {
                pred = predictor.predict(s.id, situation_index, nullptr, s.labels.dims,
                                         s.labels.ignore_id);
            }
            if (!(pred.dims == s.labels.dims))
                throw PredictorError("prediction size does not match the input");
            mats[k] = accumulate(pred, rotated_gt, dataset.num_classes);
        } catch (const PredictorError& e) {
            errors[k] = e.what();
        } catch (const InvalidArgument& e) {
            // e.g. out-of-range class ids in the prediction
            errors[k] = e.what();
        }
    });

    for (std::size_t k = 0; k < n; ++k)
        if (!errors[k].empty()) {
            res.failed = true;
            res.error = "sample '" + dataset.samples[k].id + "': " + errors[k];
            return res;
        }

    ConfusionMatrix pooled(dataset.num_classes);
    for (const ConfusionMatrix& m : mats) pooled.merge(m);
    const EvalRecord rec = make_record(pooled);
    res.miou = rec.miou;
    res.pixel_accuracy = rec.pixel_accuracy;
    res.per_class_iou = rec.per_class_iou;
    res.evaluated_pixels = rec.evaluated_pixels;
    return res;
}

SgaReport sga_validate(const Dataset& dataset, Predictor& predictor, const RotationGrid& grid,
                       int jobs) {
    const std::vector<RotationAngles> situations = enumerate_situations(grid);
    std::vector<SituationResult> results(situations.size());
    if (jobs > 1 && situations.size() > 1) {
        parallel_for(situations.size(), jobs, [&](std::size_t k) {
            results[k] =
                evaluate_situation(dataset, predictor, situations[k], static_cast<int>(k), 1);
        });
    } else {
        for (std::size_t k = 0; k < situations.size(); ++k)
            results[k] =
                evaluate_situation(dataset, predictor, situations[k], static_cast<int>(k), jobs);
    }
    return aggregate(std::move(results));
}

namespace {

json aggregate_to_json(const MetricAggregate& a) {
    return json{{"mean", a.mean},
                {"variance", a.variance},
                {"range", a.range},
                {"min", a.min_value},
                {"max", a.max_value}};
}

MetricAggregate aggregate_from_json(const json& j) {
    MetricAggregate a;
    a.mean = j.at("mean").get<double>();
    a.variance = j.at("variance").get<double>();
    a.range = j.at("range").get<double>();
    a.min_value = j.at("min").get<double>();
    a.max_value = j.at("max").get<double>();
    return a;
}

}  // namespace

void save_report_json(const SgaReport& report, const std::filesystem::path& path) {
    json doc;
    doc["situations"] = json::array();
    for (const SituationResult& r : report.situations) {
        json row{{"index", r.index},        {"yaw", r.angles.yaw},
                 {"pitch", r.angles.pitch}, {"roll", r.angles.roll},
                 {"failed", r.failed},      {"miou", r.miou},
                 {"pixel_accuracy", r.pixel_accuracy},
                 {"per_class_iou", r.per_class_iou},
                 {"evaluated_pixels", r.evaluated_pixels}};
        if (r.failed) row["error"] = r.error;
        doc["situations"].push_back(std::move(row));
    }
    doc["failed_count"] = report.failed_count;
    doc["miou"] = aggregate_to_json(report.miou_agg);
    doc["pixel_accuracy"] = aggregate_to_json(report.pacc_agg);

    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write to " + path.string() + " failed");
}

SgaReport load_report_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    SgaReport report;
    try {
        for (const json& row : doc.at("situations")) {
            SituationResult r;
            r.index = row.at("index").get<int>();
            r.angles.yaw = row.at("yaw").get<double>();
            r.angles.pitch = row.at("pitch").get<double>();
            r.angles.roll = row.at("roll").get<double>();
            r.failed = row.at("failed").get<bool>();
            if (r.failed && row.contains("error")) r.error = row.at("error").get<std::string>();
            r.miou = row.at("miou").get<double>();
            r.pixel_accuracy = row.at("pixel_accuracy").get<double>();
            // absent classes have NaN IoU, which JSON stores as null
            for (const json& v : row.at("per_class_iou"))
                r.per_class_iou.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                      : v.get<double>());
            r.evaluated_pixels = row.at("evaluated_pixels").get<std::uint64_t>();
            report.situations.push_back(std::move(r));
        }
        report.failed_count = doc.at("failed_count").get<int>();
        report.miou_agg = aggregate_from_json(doc.at("miou"));
        report.pacc_agg = aggregate_from_json(doc.at("pixel_accuracy"));
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return report;
}

void save_report_csv(const SgaReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "row,pitch_deg,roll_deg,yaw_deg,miou,pixel_accuracy,evaluated_pixels,failed\n";
    out.precision(6);
    out << std::fixed;
    for (const SituationResult& r : report.situations) {
        out << "situation," << r.angles.pitch << ',' << r.angles.roll << ',' << r.angles.yaw
            << ',' << r.miou << ',' << r.pixel_accuracy << ',' << r.evaluated_pixels << ','
            << (r.failed ? 1 : 0) << '\n';
    }
    out << "mean,,,," << report.miou_agg.mean << ',' << report.pacc_agg.mean << ",,\n";
    out << "variance,,,," << report.miou_agg.variance << ',' << report.pacc_agg.variance
        << ",,\n";
    out << "range,,,," << report.miou_agg.range << ',' << report.pacc_agg.range << ",,\n";
    if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace panosphere
