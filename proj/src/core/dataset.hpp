// SPDX-License-Identifier: Apache-2.0
#ifndef EARVERIFY_CORE_DATASET_HPP
#define EARVERIFY_CORE_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "preprocess.hpp"

namespace earverify {

// Row-major matrix of feature rows; the training hot path wants contiguous
// rows for the kernel dot products.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }
    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<double>& data() const { return data_; }

    void push_row(const std::vector<double>& v);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class Label : std::int8_t { Unauthorized = -1, Authorized = 1 };
enum class Origin : std::int8_t { Measured = 0, BcGenerated = 1 };

// Training table: features with authorized/unauthorized labels. Generated
// between-class rows are always labeled unauthorized.
struct LabeledDataset {
    Matrix features;
    std::vector<Label> labels;
    std::vector<Origin> origins;

    std::size_t size() const { return labels.size(); }
    void add(const std::vector<double>& row, Label label, Origin origin);
    void validate_for_training() const;
};

// On-disk dataset: manifest JSON + features CSV, one row per measurement.
struct StoredDataset {
    std::vector<std::string> subject_ids;
    std::vector<std::vector<std::vector<double>>> features; // [subject][measurement][dim]
    std::string digest; // FNV-1a of the features CSV bytes
    double sample_rate = kDefaultSampleRate;

    std::size_t n_subjects() const { return subject_ids.size(); }
    std::size_t total_rows() const;
};

std::string features_csv_string(const StoredDataset& ds);
void write_dataset(const StoredDataset& ds, const std::string& out_dir);
StoredDataset load_dataset(const std::string& manifest_path);

} // namespace earverify

#endif
