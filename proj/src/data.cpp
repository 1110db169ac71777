#include "amsim/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "amsim/rng.hpp"

namespace amsim {

namespace {

std::uint32_t read_be32(std::istream& is, const std::string& path) {
    std::array<unsigned char, 4> b{};
    is.read(reinterpret_cast<char*>(b.data()), 4);
    if (!is) throw DataError("truncated IDX file: " + path);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
           std::uint32_t(b[3]);
}

// Catmull-Rom cubic kernel (a = -0.5).
double cubic_weight(double t) {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t < 1.0) return (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0;
    if (t < 2.0) return a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a;
    return 0.0;
}

// Separable bicubic resample with edge clamping. Pixel centers map via
// src = (dst + 0.5) * in/out - 0.5.
Eigen::MatrixXd resize_bicubic(const Eigen::MatrixXd& src, int out_h, int out_w) {
    const auto in_h = static_cast<int>(src.rows());
    const auto in_w = static_cast<int>(src.cols());
    const double sy = static_cast<double>(in_h) / out_h;
    const double sx = static_cast<double>(in_w) / out_w;

    auto clampi = [](int v, int hi) { return std::clamp(v, 0, hi - 1); };

    // Rows first.
    Eigen::MatrixXd tmp(out_h, in_w);
    for (int i = 0; i < out_h; ++i) {
        const double fy = (i + 0.5) * sy - 0.5;
        const int iy = static_cast<int>(std::floor(fy));
        for (int j = 0; j < in_w; ++j) {
            double acc = 0.0;
            for (int k = -1; k <= 2; ++k)
                acc += cubic_weight(fy - (iy + k)) * src(clampi(iy + k, in_h), j);
            tmp(i, j) = acc;
        }
    }
    // Then columns.
    Eigen::MatrixXd out(out_h, out_w);
    for (int j = 0; j < out_w; ++j) {
        const double fx = (j + 0.5) * sx - 0.5;
        const int ix = static_cast<int>(std::floor(fx));
        for (int i = 0; i < out_h; ++i) {
            double acc = 0.0;
            for (int k = -1; k <= 2; ++k)
                acc += cubic_weight(fx - (ix + k)) * tmp(i, clampi(ix + k, in_w));
            out(i, j) = acc;
        }
    }
    return out;
}

}  // namespace

std::vector<ImageGrid> load_mnist(const std::string& images_path, const std::string& labels_path) {
    std::ifstream imgf(images_path, std::ios::binary);
    if (!imgf) throw DataError("cannot open IDX image file: " + images_path);

    const std::uint32_t magic = read_be32(imgf, images_path);
    if (magic != 2051)
        throw DataError("bad IDX magic " + std::to_string(magic) + " in " + images_path +
                        " (expected 2051)");
    const std::uint32_t count = read_be32(imgf, images_path);
    const std::uint32_t rows = read_be32(imgf, images_path);
    const std::uint32_t cols = read_be32(imgf, images_path);

    std::vector<std::uint8_t> labels;
    if (!labels_path.empty()) {
        std::ifstream labf(labels_path, std::ios::binary);
        if (!labf) throw DataError("cannot open IDX label file: " + labels_path);
        const std::uint32_t lmagic = read_be32(labf, labels_path);
        if (lmagic != 2049)
            throw DataError("bad IDX magic " + std::to_string(lmagic) + " in " + labels_path +
                            " (expected 2049)");
        const std::uint32_t lcount = read_be32(labf, labels_path);
        if (lcount != count)
            throw DataError("image/label count mismatch: " + std::to_string(count) + " images vs " +
                            std::to_string(lcount) + " labels");
        labels.resize(lcount);
        labf.read(reinterpret_cast<char*>(labels.data()), lcount);
        if (!labf) throw DataError("truncated IDX file: " + labels_path);
    }

    std::vector<ImageGrid> grids;
    grids.reserve(count);
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(rows) * cols);
    for (std::uint32_t k = 0; k < count; ++k) {
        imgf.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!imgf) throw DataError("truncated IDX file: " + images_path);
        ImageGrid g;
        g.pixels.resize(rows, cols);
        for (std::uint32_t i = 0; i < rows; ++i)
            for (std::uint32_t j = 0; j < cols; ++j)
                g.pixels(i, j) = buf[static_cast<std::size_t>(i) * cols + j] / 255.0;
        if (!labels.empty()) g.label = labels[k];
        grids.push_back(std::move(g));
    }
    return grids;
}

Pattern preprocess(const ImageGrid& img, int target_side, PatternKind kind) {
    constexpr int kCrop = 24;
    if (img.pixels.rows() < kCrop || img.pixels.cols() < kCrop)
        throw DataError("preprocess: image smaller than 24x24");

    const Eigen::Index r0 = (img.pixels.rows() - kCrop) / 2;
    const Eigen::Index c0 = (img.pixels.cols() - kCrop) / 2;
    Eigen::MatrixXd cropped = img.pixels.block(r0, c0, kCrop, kCrop);
    Eigen::MatrixXd small = resize_bicubic(cropped, target_side, target_side);
    // Cubic overshoot can leave the nominal range.
    small = small.cwiseMax(0.0).cwiseMin(1.0);

    Eigen::VectorXd v(target_side * target_side);
    for (int i = 0; i < target_side; ++i)
        for (int j = 0; j < target_side; ++j) {
            const double px = small(i, j);
            v[i * target_side + j] =
                kind == PatternKind::Binary ? (px >= 0.5 ? 1.0 : -1.0) : (px * 2.0 - 1.0) * 0.95;
        }
    return Pattern(std::move(v), kind);
}

PatternSet gen_random_patterns(int count, int n, PatternKind kind, std::uint64_t seed) {
    if (count <= 0 || n <= 0) throw std::invalid_argument("gen_random_patterns: count, N > 0");
    auto rng = make_rng(seed);
    PatternSet set;
    set.reserve(count);
    if (kind == PatternKind::Binary) {
        std::bernoulli_distribution coin(0.5);
        for (int m = 0; m < count; ++m) {
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v[i] = coin(rng) ? 1.0 : -1.0;
            set.emplace_back(std::move(v), kind);
        }
    } else {
        std::uniform_real_distribution<double> u(-0.95, 0.95);
        for (int m = 0; m < count; ++m) {
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v[i] = u(rng);
            set.emplace_back(std::move(v), kind);
        }
    }
    return set;
}

Pattern corrupt_flip(const Pattern& p, double flip_prob, std::uint64_t seed) {
    if (p.kind != PatternKind::Binary)
        throw std::invalid_argument("corrupt_flip: binary patterns only");
    if (flip_prob < 0.0 || flip_prob > 1.0)
        throw std::invalid_argument("corrupt_flip: flip_prob outside [0,1]");
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Pattern out = p;
    for (Eigen::Index i = 0; i < out.values.size(); ++i)
        if (u(rng) < flip_prob) out.values[i] = -out.values[i];
    return out;
}

Pattern corrupt_gaussian(const Pattern& p, double sigma, std::uint64_t seed) {
    if (p.kind != PatternKind::Continuous)
        throw std::invalid_argument("corrupt_gaussian: continuous patterns only");
    auto rng = make_rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    Pattern out = p;
    if (sigma > 0.0)
        for (Eigen::Index i = 0; i < out.values.size(); ++i)
            out.values[i] = std::clamp(out.values[i] + noise(rng), -1.0, 1.0);
    return out;
}

PatternSet select_patterns(const std::vector<ImageGrid>& dataset, const DatasetSpec& spec) {
    auto rng = make_rng(spec.seed);
    std::vector<std::size_t> chosen;

    if (spec.per_digit) {
        for (int d = 0; d <= 9; ++d) {
            std::vector<std::size_t> candidates;
            for (std::size_t k = 0; k < dataset.size(); ++k)
                if (dataset[k].label && *dataset[k].label == d) candidates.push_back(k);
            if (candidates.empty())
                throw DataError("select_patterns: no exemplar for digit " + std::to_string(d));
            std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
            chosen.push_back(candidates[pick(rng)]);
        }
    } else {
        if (static_cast<std::size_t>(spec.count) > dataset.size())
            throw DataError("select_patterns: dataset smaller than requested count");
        std::vector<std::size_t> all(dataset.size());
        std::iota(all.begin(), all.end(), 0);
        std::shuffle(all.begin(), all.end(), rng);
        chosen.assign(all.begin(), all.begin() + spec.count);
    }

    PatternSet set;
    set.reserve(chosen.size());
    for (std::size_t k : chosen) set.push_back(preprocess(dataset[k], spec.target_side, spec.kind));
    return set;
}

void write_patterns_csv(std::ostream& os, const PatternSet& set) {
    os << "pattern_id,element_index,value\n";
    char buf[64];
    for (std::size_t m = 0; m < set.size(); ++m)
        for (Eigen::Index i = 0; i < set[m].values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%lld,%.17g\n", m, static_cast<long long>(i),
                          set[m].values[i]);
            os << buf;
        }
}

PatternSet read_patterns_csv(std::istream& is, PatternKind kind) {
    std::string line;
    if (!std::getline(is, line)) throw DataError("patterns CSV: empty stream");
    PatternSet set;
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
            throw DataError("patterns CSV: malformed line: " + line);
        const auto id = static_cast<std::size_t>(std::stoull(a));
        const auto idx = static_cast<std::size_t>(std::stoull(b));
        if (rows.size() <= id) rows.resize(id + 1);
        if (rows[id].size() <= idx) rows[id].resize(idx + 1);
        rows[id][idx] = std::stod(c);
    }
    for (auto& r : rows) {
        Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
        set.emplace_back(std::move(v), kind);
    }
    return set;
}

}  // namespace amsim
