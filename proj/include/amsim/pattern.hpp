#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace amsim {

enum class PatternKind { Binary, Continuous };

// A stored memory or network state. Binary entries are exactly +-1;
// continuous entries lie strictly inside (-1, 1).
struct Pattern {
    Eigen::VectorXd values;
    PatternKind kind = PatternKind::Binary;

    Pattern() = default;
    Pattern(Eigen::VectorXd v, PatternKind k) : values(std::move(v)), kind(k) {}

    Eigen::Index size() const { return values.size(); }

    bool valid() const {
        if (values.size() == 0) return false;
        for (Eigen::Index i = 0; i < values.size(); ++i) {
            const double v = values[i];
            if (kind == PatternKind::Binary) {
                if (v != 1.0 && v != -1.0) return false;
            } else {
                if (!(v > -1.0 && v < 1.0)) return false;
            }
        }
        return true;
    }
};

using PatternSet = std::vector<Pattern>;

// Column-per-pattern matrix view of a set (N x M). All patterns must share
// one length.
inline Eigen::MatrixXd patterns_to_matrix(const PatternSet& set) {
    if (set.empty()) throw std::invalid_argument("patterns_to_matrix: empty set");
    const Eigen::Index n = set.front().size();
    Eigen::MatrixXd m(n, static_cast<Eigen::Index>(set.size()));
    for (std::size_t j = 0; j < set.size(); ++j) {
        if (set[j].size() != n)
            throw std::invalid_argument("patterns_to_matrix: inconsistent pattern length");
        m.col(static_cast<Eigen::Index>(j)) = set[j].values;
    }
    return m;
}

}  // namespace amsim
