#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "amsim/pattern.hpp"

namespace amsim {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grayscale image with pixels in [0,1].
struct ImageGrid {
    Eigen::MatrixXd pixels;
    std::optional<int> label;
};

enum class DataSource { MnistIdx, Random };

struct DatasetSpec {
    DataSource source = DataSource::MnistIdx;
    std::string images_path;
    std::string labels_path;
    PatternKind kind = PatternKind::Binary;
    int target_side = 8;
    int count = 10;
    bool per_digit = false;
    std::uint64_t seed = 0;
};

// IDX container (big-endian, magic 2051 images / 2049 labels). Labels path
// may be empty, in which case grids carry no label.
std::vector<ImageGrid> load_mnist(const std::string& images_path,
                                  const std::string& labels_path = "");

// Center-crop to 24x24, bicubic (Catmull-Rom, a = -0.5, clamped edges) to
// target_side, then binarise at 0.5 or affine-map [0,1] -> [-0.95, 0.95].
Pattern preprocess(const ImageGrid& img, int target_side, PatternKind kind);

PatternSet gen_random_patterns(int count, int n, PatternKind kind, std::uint64_t seed);

// Each element negated independently with probability flip_prob.
Pattern corrupt_flip(const Pattern& p, double flip_prob, std::uint64_t seed);

// Adds N(0, sigma^2) per element, clamped to [-1, 1].
Pattern corrupt_gaussian(const Pattern& p, double sigma, std::uint64_t seed);

// per_digit: one random exemplar per digit 0..9; otherwise a uniform sample
// without replacement of spec.count grids.
PatternSet select_patterns(const std::vector<ImageGrid>& dataset, const DatasetSpec& spec);

// CSV schema: pattern_id, element_index, value.
void write_patterns_csv(std::ostream& os, const PatternSet& set);
PatternSet read_patterns_csv(std::istream& is, PatternKind kind);

}  // namespace amsim
