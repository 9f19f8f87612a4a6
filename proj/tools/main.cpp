#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "panosphere/dataset.hpp"
#include "panosphere/error.hpp"
#include "panosphere/loss.hpp"
#include "panosphere/metrics.hpp"
#include "panosphere/parallel.hpp"
#include "panosphere/png_io.hpp"
#include "panosphere/projection.hpp"
#include "panosphere/rotation.hpp"
#include "panosphere/validation.hpp"

namespace ps = panosphere;
using nlohmann::json;

namespace {

std::vector<double> parse_angle_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "'" + item + "' is not a number");
        }
    }
    if (out.empty()) throw CLI::ValidationError(flag, "empty angle list");
    return out;
}

void print_aggregate(std::ostream& os, const std::string& prefix,
                     const ps::MetricAggregate& agg) {
    os << prefix << "mean " << agg.mean << '\n'
       << prefix << "variance " << agg.variance << '\n'
       << prefix << "range " << agg.range << '\n'
       << prefix << "min " << agg.min_value << '\n'
       << prefix << "max " << agg.max_value << '\n';
}

struct RotateOpts {
    std::string input, output, mode;
    double yaw = 0.0, pitch = 0.0, roll = 0.0;
};

void run_rotate(const RotateOpts& o) {
    const ps::RotMat r = ps::compose(ps::RotationAngles{o.yaw, o.pitch, o.roll});
    if (o.mode == "image") {
        ps::save_image(ps::rotate_erp(ps::load_image(o.input), r), o.output);
    } else {
        ps::save_labels(ps::rotate_labels(ps::load_labels(o.input), r), o.output);
    }
}

struct AugmentOpts {
    std::string manifest, out_dir;
    int count = 1;
    std::uint64_t seed = 0;
    double max_yaw = 360.0, max_pitch = 10.0, max_roll = 10.0, prob = 0.5;
    int jobs = 1;
};

void run_augment(const AugmentOpts& o) {
    const ps::DatasetManifest manifest = ps::load_manifest(o.manifest);
    if (o.count < 1) throw ps::InvalidArgument("--count must be at least 1");
    std::filesystem::create_directories(o.out_dir);

    ps::AugmentationConfig cfg;
    cfg.max_angles = ps::RotationAngles{o.max_yaw, o.max_pitch, o.max_roll};
    cfg.apply_probability = o.prob;

    // All draws come from one seeded stream, consumed entry-major then
    // copy-minor, before any worker starts; the job count cannot change them.
    struct Task {
        const ps::ManifestEntry* entry;
        int copy;
        ps::AugmentationDraw draw;
    };
    std::vector<Task> tasks;
    std::mt19937_64 rng(o.seed);
    for (const ps::ManifestEntry& e : manifest.entries)
        for (int k = 0; k < o.count; ++k)
            tasks.push_back(Task{&e, k, ps::sample_augmentation(cfg, rng)});

    ps::DatasetManifest out_manifest;
    out_manifest.num_classes = manifest.num_classes;
    out_manifest.ignore_id = manifest.ignore_id;
    out_manifest.root = o.out_dir;
    json log = json::array();
    for (const Task& t : tasks) {
        const std::string stem = t.entry->sample_id + "_aug" + std::to_string(t.copy);
        out_manifest.entries.push_back(
            ps::ManifestEntry{stem, stem + ".png", stem + "_labels.png"});
        log.push_back({{"sample_id", stem},
                       {"applied", t.draw.applied},
                       {"yaw", t.draw.angles.yaw},
                       {"pitch", t.draw.angles.pitch},
                       {"roll", t.draw.angles.roll}});
    }

    const std::filesystem::path out_root(o.out_dir);
    ps::parallel_for(tasks.size(), o.jobs, [&](std::size_t k) {
        const Task& t = tasks[k];
        const std::string stem = t.entry->sample_id + "_aug" + std::to_string(t.copy);
        ps::ErpImage img = ps::load_image(manifest.resolve_image(*t.entry));
        ps::LabelMap lbl = ps::load_labels(manifest.resolve_labels(*t.entry), manifest.ignore_id);
        if (t.draw.applied) {
            const ps::RotMat r = ps::compose(t.draw.angles);
            const ps::ResampleMap map = ps::build_rotation_map(lbl.dims, r);
            if (img.dims == lbl.dims) {
                img = ps::apply_resample(img, map);
            } else {
                img = ps::rotate_erp(img, r);
            }
            lbl = ps::apply_resample(lbl, map);
        }
        ps::save_image(img, out_root / (stem + ".png"));
        ps::save_labels(lbl, out_root / (stem + "_labels.png"));
    });

    ps::save_manifest(out_manifest, out_root / "manifest.json");
    std::ofstream log_out(out_root / "augment_log.json");
    if (!log_out) throw ps::IoError("cannot write augmentation log");
    log_out << log.dump(2) << '\n';
    std::cout << "wrote " << tasks.size() << " augmented samples to " << o.out_dir << '\n';
}

struct EvaluateOpts {
    std::string pred_dir, manifest, report;
    int classes = 0;
    int jobs = 1;
};

void run_evaluate(const EvaluateOpts& o) {
    const ps::DatasetManifest manifest = ps::load_manifest(o.manifest);
    const int num_classes = o.classes > 0 ? o.classes : manifest.num_classes;
    const ps::Dataset ds = ps::load_dataset(manifest, /*load_images=*/false);
    const std::filesystem::path pred_root(o.pred_dir);

    std::vector<ps::ConfusionMatrix> mats(ds.samples.size());
    ps::parallel_for(ds.samples.size(), o.jobs, [&](std::size_t k) {
        const ps::Sample& s = ds.samples[k];
        const ps::LabelMap pred =
            ps::load_labels(pred_root / (s.id + ".png"), s.labels.ignore_id);
        if (!(pred.dims == s.labels.dims))
            throw ps::DimensionMismatch("prediction for '" + s.id +
                                        "' does not match the ground-truth size");
        mats[k] = ps::accumulate(pred, s.labels, num_classes);
    });
    ps::ConfusionMatrix pooled(num_classes);
    for (const ps::ConfusionMatrix& m : mats) pooled.merge(m);
    const ps::EvalRecord rec = ps::make_record(pooled);

    std::cout << std::fixed << std::setprecision(6);
    std::cout << "miou " << rec.miou << '\n'
              << "pixel_accuracy " << rec.pixel_accuracy << '\n'
              << "evaluated_pixels " << rec.evaluated_pixels << '\n';

    if (!o.report.empty()) {
        json doc{{"miou", rec.miou},
                 {"pixel_accuracy", rec.pixel_accuracy},
                 {"evaluated_pixels", rec.evaluated_pixels},
                 {"per_class_iou", json::array()}};
        for (double v : rec.per_class_iou)
            doc["per_class_iou"].push_back(std::isnan(v) ? json(nullptr) : json(v));
        std::ofstream out(o.report);
        if (!out) throw ps::IoError("cannot open " + o.report + " for writing");
        out << doc.dump(2) << '\n';
    }
}

struct SgaOpts {
    std::string manifest, predictor, report, csv, work_dir;
    std::string grid_yaw = "0,90,180,270", grid_pitch = "0,5", grid_roll = "0,5";
    int jobs = 1;
};

void run_sga_validate(const SgaOpts& o) {
    const ps::RotationGrid grid =
        ps::build_grid(parse_angle_list(o.grid_yaw, "--grid-yaw"),
                       parse_angle_list(o.grid_pitch, "--grid-pitch"),
                       parse_angle_list(o.grid_roll, "--grid-roll"));

    const ps::DatasetManifest manifest = ps::load_manifest(o.manifest);
    std::unique_ptr<ps::Predictor> predictor;
    bool needs_images = false;
    if (o.predictor.rfind("dir:", 0) == 0) {
        predictor = std::make_unique<ps::DirPredictor>(o.predictor.substr(4));
    } else if (o.predictor.rfind("cmd:", 0) == 0) {
        std::filesystem::path work =
            o.work_dir.empty()
                ? std::filesystem::temp_directory_path() / "panosphere-predictor"
                : std::filesystem::path(o.work_dir);
        predictor = std::make_unique<ps::CommandPredictor>(o.predictor.substr(4), work);
        needs_images = true;
    } else {
        throw CLI::ValidationError("--predictor", "must start with dir: or cmd:");
    }

    const ps::Dataset ds = ps::load_dataset(manifest, needs_images);
    const ps::SgaReport report = ps::sga_validate(ds, *predictor, grid, o.jobs);

    if (!o.report.empty()) ps::save_report_json(report, o.report);
    if (!o.csv.empty()) ps::save_report_csv(report, o.csv);

    std::cout << std::fixed << std::setprecision(6);
    std::cout << "situations " << report.situations.size() << '\n'
              << "failed " << report.failed_count << '\n';
    print_aggregate(std::cout, "miou ", report.miou_agg);
    print_aggregate(std::cout, "pixel_accuracy ", report.pacc_agg);

    if (report.failed_count > 0) {
        for (const ps::SituationResult& r : report.situations)
            if (r.failed)
                std::cerr << "situation " << r.index << " (yaw " << r.angles.yaw << ", pitch "
                          << r.angles.pitch << ", roll " << r.angles.roll
                          << ") failed: " << r.error << '\n';
        throw ps::PredictorError(std::to_string(report.failed_count) +
                                 " situation(s) failed; excluded from aggregates");
    }
}

struct AggregateOpts {
    std::string values, report;
};

void run_aggregate(const AggregateOpts& o) {
    if (o.values.empty() == o.report.empty())
        throw CLI::ValidationError("aggregate", "give exactly one of --values or --report");
    std::cout << std::fixed << std::setprecision(6);
    if (!o.values.empty()) {
        const std::vector<double> vals = parse_angle_list(o.values, "--values");
        const ps::MetricAggregate agg = ps::aggregate_values(vals);
        std::cout << "count " << vals.size() << '\n';
        print_aggregate(std::cout, "", agg);
        return;
    }
    const ps::SgaReport loaded = ps::load_report_json(o.report);
    // Recompute from the per-situation rows rather than trusting stored blocks.
    const ps::SgaReport fresh = ps::aggregate(loaded.situations);
    std::cout << "situations " << fresh.situations.size() << '\n'
              << "failed " << fresh.failed_count << '\n';
    print_aggregate(std::cout, "miou ", fresh.miou_agg);
    print_aggregate(std::cout, "pixel_accuracy ", fresh.pacc_agg);
}

struct WeightsOpts {
    std::string output;
    int height = 0;
    int width = 0;
};

void run_weights(const WeightsOpts& o) {
    const int w = o.width > 0 ? o.width : 2 * o.height;
    const ps::WeightMap wm = ps::weight_map(ps::ImageDims(o.height, w));
    const std::filesystem::path out_path(o.output);
    if (out_path.extension() == ".png") {
        ps::PngBuffer buf;
        buf.width = w;
        buf.height = o.height;
        buf.channels = 1;
        buf.pixels.resize(static_cast<std::size_t>(w) * o.height);
        for (int i = 0; i < o.height; ++i) {
            const auto v = static_cast<std::uint8_t>(std::lround(wm.row_weights[i] * 255.0));
            std::fill_n(buf.pixels.begin() + static_cast<std::size_t>(i) * w, w, v);
        }
        ps::write_png(out_path, buf);
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ps::IoError("cannot open " + o.output + " for writing");
    out << std::setprecision(12);
    for (int i = 0; i < o.height; ++i) {
        for (int j = 0; j < w; ++j) out << (j ? " " : "") << wm.row_weights[i];
        out << '\n';
    }
    if (!out) throw ps::IoError("write to " + o.output + " failed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spherical panorama toolkit: rotation, augmentation, evaluation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read flag values from an INI/TOML file");

    RotateOpts rotate_opts;
    CLI::App* rotate = app.add_subcommand("rotate", "Rotate a panorama or label map on the sphere");
    rotate->add_option("--input", rotate_opts.input, "Input PNG")->required();
    rotate->add_option("--output", rotate_opts.output, "Output PNG")->required();
    rotate->add_option("--yaw", rotate_opts.yaw, "Yaw in degrees")->capture_default_str();
    rotate->add_option("--pitch", rotate_opts.pitch, "Pitch in degrees")->capture_default_str();
    rotate->add_option("--roll", rotate_opts.roll, "Roll in degrees")->capture_default_str();
    rotate->add_option("--mode", rotate_opts.mode, "image (bilinear-valued RGB/gray) or label (nearest class ids)")
        ->required()
        ->check(CLI::IsMember({"image", "label"}));
    rotate->callback([&] { run_rotate(rotate_opts); });

    AugmentOpts augment_opts;
    CLI::App* augment =
        app.add_subcommand("augment", "Write randomly rotated copies of a dataset");
    augment->add_option("--manifest", augment_opts.manifest, "Dataset manifest JSON")->required();
    augment->add_option("--out-dir", augment_opts.out_dir, "Output directory")->required();
    augment->add_option("--count", augment_opts.count, "Augmented copies per sample")
        ->capture_default_str();
    augment->add_option("--seed", augment_opts.seed, "RNG seed")->capture_default_str();
    augment->add_option("--max-yaw", augment_opts.max_yaw, "Max yaw in degrees")
        ->capture_default_str();
    augment->add_option("--max-pitch", augment_opts.max_pitch, "Max pitch in degrees")
        ->capture_default_str();
    augment->add_option("--max-roll", augment_opts.max_roll, "Max roll in degrees")
        ->capture_default_str();
    augment->add_option("--prob", augment_opts.prob, "Probability a copy is rotated at all")
        ->capture_default_str();
    augment->add_option("--jobs", augment_opts.jobs, "Worker threads")->capture_default_str();
    augment->callback([&] { run_augment(augment_opts); });

    EvaluateOpts eval_opts;
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Score precomputed predictions against ground truth");
    evaluate->add_option("--pred-dir", eval_opts.pred_dir, "Directory of <sample_id>.png predictions")
        ->required();
    evaluate->add_option("--manifest", eval_opts.manifest, "Dataset manifest JSON")->required();
    evaluate->add_option("--classes", eval_opts.classes, "Class count (default: from manifest)");
    evaluate->add_option("--report", eval_opts.report, "Write a JSON metrics record here");
    evaluate->add_option("--jobs", eval_opts.jobs, "Worker threads")->capture_default_str();
    evaluate->callback([&] { run_evaluate(eval_opts); });

    SgaOpts sga_opts;
    CLI::App* sga = app.add_subcommand(
        "sga-validate", "Evaluate a predictor over a grid of rotation situations");
    sga->add_option("--manifest", sga_opts.manifest, "Dataset manifest JSON")->required();
    sga->add_option("--predictor", sga_opts.predictor,
                    "dir:PATH of <sample_id>_s<index>.png files, or cmd:TEMPLATE with {input} and {output}")
        ->required();
    sga->add_option("--grid-yaw", sga_opts.grid_yaw, "Comma-separated yaw values in degrees")
        ->capture_default_str();
    sga->add_option("--grid-pitch", sga_opts.grid_pitch, "Comma-separated pitch values in degrees")
        ->capture_default_str();
    sga->add_option("--grid-roll", sga_opts.grid_roll, "Comma-separated roll values in degrees")
        ->capture_default_str();
    sga->add_option("--report", sga_opts.report, "Write the JSON report here");
    sga->add_option("--csv", sga_opts.csv, "Write the delimited table here");
    sga->add_option("--work-dir", sga_opts.work_dir, "Scratch directory for cmd: predictors");
    sga->add_option("--jobs", sga_opts.jobs, "Worker threads")->capture_default_str();
    sga->callback([&] { run_sga_validate(sga_opts); });

    AggregateOpts agg_opts;
    CLI::App* aggregate =
        app.add_subcommand("aggregate", "Mean / variance / range of a metric list or report");
    aggregate->add_option("--values", agg_opts.values, "Comma-separated metric values");
    aggregate->add_option("--report", agg_opts.report, "Recompute from a JSON report");
    aggregate->callback([&] { run_aggregate(agg_opts); });

    WeightsOpts weight_opts;
    CLI::App* weights =
        app.add_subcommand("weights", "Emit the per-row panorama weight map");
    weights->add_option("--height", weight_opts.height, "Image height in rows")->required();
    weights->add_option("--width", weight_opts.width, "Columns (default: 2 * height)");
    weights->add_option("--output", weight_opts.output,
                        "Output path; .png writes 8-bit grayscale, anything else a text matrix")
        ->required();
    weights->callback([&] { run_weights(weight_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ps::PredictorError& e) {
        std::cerr << "predictor failure: " << e.what() << '\n';
        return 3;
    } catch (const ps::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
