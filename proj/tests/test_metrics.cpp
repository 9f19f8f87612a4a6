#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <doctest.h>

#include "panosphere/error.hpp"
#include "panosphere/metrics.hpp"

using namespace panosphere;

namespace {

LabelMap map_of(ImageDims dims, std::vector<std::uint8_t> vals) {
    return LabelMap(dims, std::move(vals));
}

// Set-counting oracle: per class, intersection and union cardinalities over
// the evaluated pixels, nothing shared with the confusion-matrix code path.
struct OracleResult {
    std::vector<double> iou;
    double miou = 0.0;
    double pacc = 0.0;
};

OracleResult brute_metrics(const LabelMap& pred, const LabelMap& gt, int classes) {
    OracleResult out;
    std::uint64_t correct = 0, total = 0;
    for (int c = 0; c < classes; ++c) {
        std::uint64_t inter = 0, uni = 0;
        for (std::size_t p = 0; p < gt.data.size(); ++p) {
            if (gt.data[p] == gt.ignore_id) continue;
            const bool in_pred = pred.data[p] == c;
            const bool in_gt = gt.data[p] == c;
            if (in_pred && in_gt) ++inter;
            if (in_pred || in_gt) ++uni;
        }
        out.iou.push_back(uni ? static_cast<double>(inter) / static_cast<double>(uni)
                              : std::numeric_limits<double>::quiet_NaN());
    }
    for (std::size_t p = 0; p < gt.data.size(); ++p) {
        if (gt.data[p] == gt.ignore_id) continue;
        ++total;
        if (pred.data[p] == gt.data[p]) ++correct;
    }
    double sum = 0.0;
    int defined = 0;
    for (double v : out.iou)
        if (!std::isnan(v)) {
            sum += v;
            ++defined;
        }
    out.miou = sum / defined;
    out.pacc = static_cast<double>(correct) / static_cast<double>(total);
    return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("the four-pixel hand count") {
    const ImageDims dims(2, 2);
    const LabelMap gt = map_of(dims, {0, 0, 1, 1});
    const LabelMap pred = map_of(dims, {0, 1, 1, 1});
    const ConfusionMatrix cm = accumulate(pred, gt, 2);
    CHECK(cm.at(0, 0) == 1);
    CHECK(cm.at(0, 1) == 1);
    CHECK(cm.at(1, 0) == 0);
    CHECK(cm.at(1, 1) == 2);

    const std::vector<double> iou = iou_per_class(cm);
    CHECK(iou[0] == doctest::Approx(0.5));
    CHECK(iou[1] == doctest::Approx(2.0 / 3.0));
    CHECK(miou(cm) == doctest::Approx(7.0 / 12.0));
    CHECK(pixel_accuracy(cm) == doctest::Approx(0.75));
}

TEST_CASE("perfect and fully disjoint predictions") {
    const ImageDims dims(4, 4);
    std::vector<std::uint8_t> vals(16);
    for (std::size_t k = 0; k < 16; ++k) vals[k] = static_cast<std::uint8_t>(k % 3);
    const LabelMap gt = map_of(dims, vals);
    const ConfusionMatrix perfect = accumulate(gt, gt, 3);
    for (double v : iou_per_class(perfect)) CHECK(v == 1.0);
    CHECK(miou(perfect) == 1.0);
    CHECK(pixel_accuracy(perfect) == 1.0);

    const LabelMap zeros = map_of(dims, std::vector<std::uint8_t>(16, 0));
    const LabelMap ones = map_of(dims, std::vector<std::uint8_t>(16, 1));
    const ConfusionMatrix disjoint = accumulate(zeros, ones, 2);
    const std::vector<double> iou = iou_per_class(disjoint);
    CHECK(iou[0] == 0.0);
    CHECK(iou[1] == 0.0);
}

TEST_CASE("ignored ground truth is skipped before predictions are validated") {
    const ImageDims dims(2, 2);
    LabelMap gt = map_of(dims, {0, 255, 255, 1});
    // the prediction at ignored positions may be garbage, even out of range
    const LabelMap pred = map_of(dims, {0, 200, 77, 1});
    const ConfusionMatrix cm = accumulate(pred, gt, 2);
    CHECK(cm.total() == 2);
    CHECK(pixel_accuracy(cm) == 1.0);

    const LabelMap all_ignored = map_of(dims, {255, 255, 255, 255});
    const ConfusionMatrix empty = accumulate(pred, all_ignored, 2);
    CHECK(empty.total() == 0);
    CHECK_THROWS_AS(miou(empty), UndefinedMetric);
    CHECK_THROWS_AS(pixel_accuracy(empty), UndefinedMetric);
}

TEST_CASE("out-of-range ids on evaluated pixels are an error") {
    const ImageDims dims(2, 2);
    const LabelMap gt = map_of(dims, {0, 1, 0, 1});
    const LabelMap bad_pred = map_of(dims, {0, 5, 0, 1});
    CHECK_THROWS_AS(accumulate(bad_pred, gt, 2), InvalidArgument);
    const LabelMap bad_gt = map_of(dims, {0, 9, 0, 1});
    CHECK_THROWS_AS(accumulate(gt, bad_gt, 2), InvalidArgument);
}

TEST_CASE("absent classes come back as NaN and leave the mean") {
    const ImageDims dims(2, 2);
    const LabelMap gt = map_of(dims, {0, 0, 1, 1});
    const LabelMap pred = map_of(dims, {0, 0, 1, 1});
    const ConfusionMatrix cm = accumulate(pred, gt, 4);  // classes 2, 3 never appear
    const std::vector<double> iou = iou_per_class(cm);
    CHECK(std::isnan(iou[2]));
    CHECK(std::isnan(iou[3]));
    CHECK(miou(cm) == 1.0);  // mean over the two defined classes only
}

TEST_CASE("accumulation is additive across images") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> cls(0, 3);
    const ImageDims dims(8, 8);
    auto random_map = [&] {
        std::vector<std::uint8_t> v(dims.pixels());
        for (auto& x : v) x = static_cast<std::uint8_t>(cls(rng));
        return map_of(dims, v);
    };
    const LabelMap gt1 = random_map(), pred1 = random_map();
    const LabelMap gt2 = random_map(), pred2 = random_map();

    ConfusionMatrix merged = accumulate(pred1, gt1, 4);
    merged.merge(accumulate(pred2, gt2, 4));

    ConfusionMatrix streamed(4);
    accumulate_into(streamed, pred1, gt1);
    accumulate_into(streamed, pred2, gt2);
    CHECK(merged.counts == streamed.counts);
}

TEST_CASE("relabeling classes permutes IoU and fixes the aggregates") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> cls(0, 2);
    const ImageDims dims(8, 8);
    std::vector<std::uint8_t> g(dims.pixels()), p(dims.pixels());
    for (std::size_t k = 0; k < g.size(); ++k) {
        g[k] = static_cast<std::uint8_t>(cls(rng));
        p[k] = static_cast<std::uint8_t>(cls(rng));
    }
    const int perm[3] = {2, 0, 1};
    std::vector<std::uint8_t> gp(g.size()), pp(p.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        gp[k] = static_cast<std::uint8_t>(perm[g[k]]);
        pp[k] = static_cast<std::uint8_t>(perm[p[k]]);
    }
    const ConfusionMatrix a = accumulate(map_of(dims, p), map_of(dims, g), 3);
    const ConfusionMatrix b = accumulate(map_of(dims, pp), map_of(dims, gp), 3);
    const std::vector<double> iou_a = iou_per_class(a);
    const std::vector<double> iou_b = iou_per_class(b);
    for (int c = 0; c < 3; ++c) CHECK(iou_b[perm[c]] == iou_a[c]);
    CHECK(miou(a) == doctest::Approx(miou(b)).epsilon(1e-15));
    CHECK(pixel_accuracy(a) == pixel_accuracy(b));
}

TEST_CASE("exact agreement with the set-counting oracle on random maps") {
    std::mt19937_64 rng(4242);
    const ImageDims dims(16, 32);
    for (int trial = 0; trial < 200; ++trial) {
        const int classes = 2 + static_cast<int>(rng() % 4);  // 2..5
        std::uniform_int_distribution<int> cls(0, classes - 1);
        std::vector<std::uint8_t> g(dims.pixels()), p(dims.pixels());
        for (std::size_t k = 0; k < g.size(); ++k) {
            g[k] = (rng() % 10 == 0) ? 255 : static_cast<std::uint8_t>(cls(rng));
            p[k] = static_cast<std::uint8_t>(cls(rng));
        }
        const LabelMap gt = map_of(dims, g), pred = map_of(dims, p);
        const ConfusionMatrix cm = accumulate(pred, gt, classes);
        const OracleResult want = brute_metrics(pred, gt, classes);
        const std::vector<double> iou = iou_per_class(cm);
        for (int c = 0; c < classes; ++c) {
            if (std::isnan(want.iou[c])) {
                CHECK(std::isnan(iou[c]));
            } else {
                CHECK(iou[c] == want.iou[c]);  // same integer ratio, exact
            }
        }
        CHECK(miou(cm) == want.miou);
        CHECK(pixel_accuracy(cm) == want.pacc);
    }
}

TEST_CASE("records carry all exported fields") {
    const ImageDims dims(2, 2);
    const LabelMap gt = map_of(dims, {0, 0, 1, 255});
    const LabelMap pred = map_of(dims, {0, 1, 1, 1});
    const EvalRecord rec = make_record(accumulate(pred, gt, 2));
    CHECK(rec.per_class_iou.size() == 2);
    CHECK(rec.evaluated_pixels == 3);
    CHECK(rec.miou == doctest::Approx((0.5 + 0.5) / 2));
    CHECK(rec.pixel_accuracy == doctest::Approx(2.0 / 3.0));
}

}  // TEST_SUITE
