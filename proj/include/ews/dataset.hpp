#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ews/common.hpp"

namespace ews {

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix select_rows(std::span<const std::size_t> idx) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Training data for the classifiers: features, 0/1 labels and per-row loss
// weights (class weights expanded to rows).
struct Dataset {
    Matrix x;
    std::vector<int> y;
    std::vector<double> w;
    std::vector<std::string> feature_names;

    std::size_t size() const { return y.size(); }
    std::size_t num_features() const { return x.cols(); }
    Dataset subset(std::span<const std::size_t> idx) const;
    void validate() const;
};

inline Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto src = row(idx[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

inline Dataset Dataset::subset(std::span<const std::size_t> idx) const {
    Dataset d;
    d.x = x.select_rows(idx);
    d.y.reserve(idx.size());
    d.w.reserve(idx.size());
    for (std::size_t i : idx) {
        d.y.push_back(y[i]);
        d.w.push_back(w[i]);
    }
    d.feature_names = feature_names;
    return d;
}

inline void Dataset::validate() const {
    if (x.rows() != y.size() || y.size() != w.size()) throw Error("dataset size mismatch");
    if (!feature_names.empty() && feature_names.size() != x.cols()) throw Error("dataset schema mismatch");
    for (int v : y) {
        if (v != 0 && v != 1) throw Error("labels must be 0 or 1");
    }
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error("instance weights must be finite and non-negative");
    }
}

}  // namespace ews
