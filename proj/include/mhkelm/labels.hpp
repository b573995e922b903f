#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mhkelm/error.hpp"

namespace mhkelm {

// Distinct label values in ascending order plus each sample's index into them.
struct LabelEncoding {
    std::vector<int> classes;
    std::vector<int> index;
};

inline LabelEncoding encode_labels(std::span<const int> labels) {
    LabelEncoding enc;
    enc.classes.assign(labels.begin(), labels.end());
    std::sort(enc.classes.begin(), enc.classes.end());
    enc.classes.erase(std::unique(enc.classes.begin(), enc.classes.end()), enc.classes.end());
    enc.index.reserve(labels.size());
    for (int v : labels)
        enc.index.push_back(static_cast<int>(std::lower_bound(enc.classes.begin(), enc.classes.end(), v) - enc.classes.begin()));
    return enc;
}

// N x M target matrix: +1 in the true class column, -1 elsewhere.
inline Eigen::MatrixXd one_hot_targets(std::span<const int> class_index, int num_classes) {
    if (num_classes < 1) throw ConfigError("one_hot_targets: need at least one class");
    Eigen::MatrixXd T = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(class_index.size()), num_classes, -1.0);
    for (std::size_t i = 0; i < class_index.size(); ++i) {
        const int c = class_index[i];
        if (c < 0 || c >= num_classes)
            throw ConfigError("class index " + std::to_string(c) + " out of range [0, " + std::to_string(num_classes) + ")");
        T(static_cast<Eigen::Index>(i), c) = 1.0;
    }
    return T;
}

// Index of the largest entry; ties go to the lowest index.
template <typename V>
int argmax_lowest(const Eigen::MatrixBase<V>& row) {
    int best = 0;
    for (Eigen::Index j = 1; j < row.size(); ++j)
        if (row(j) > row(best)) best = static_cast<int>(j);
    return best;
}

} // namespace mhkelm
