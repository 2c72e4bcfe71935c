// SPDX-License-Identifier: Apache-2.0
#include "dataset.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "common.hpp"

namespace earverify {

namespace fs = std::filesystem;
using nlohmann::json;

void Matrix::push_row(const std::vector<double>& v) {
    if (rows_ == 0 && cols_ == 0) cols_ = v.size();
    require(v.size() == cols_, ErrorKind::InvalidArgument,
            "Matrix::push_row: row width mismatch");
    data_.insert(data_.end(), v.begin(), v.end());
    ++rows_;
}

void LabeledDataset::add(const std::vector<double>& row, Label label, Origin origin) {
    features.push_row(row);
    labels.push_back(label);
    origins.push_back(origin);
}

void LabeledDataset::validate_for_training() const {
    require(size() >= 2, ErrorKind::InvalidArgument,
            "training set needs at least two rows");
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == Label::Authorized) has_pos = true;
        if (labels[i] == Label::Unauthorized) has_neg = true;
        require(!(origins[i] == Origin::BcGenerated && labels[i] == Label::Authorized),
                ErrorKind::InvalidArgument,
                "generated rows must be labeled unauthorized");
    }
    require(has_pos && has_neg, ErrorKind::InvalidArgument,
            "training set needs both labels");
}

std::size_t StoredDataset::total_rows() const {
    std::size_t n = 0;
    for (const auto& s : features) n += s.size();
    return n;
}

namespace {

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string features_csv_string(const StoredDataset& ds) {
    std::ostringstream out;
    out << "subject_id,measurement_id";
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
        char col[8];
        std::snprintf(col, sizeof(col), ",f%03zu", d);
        out << col;
    }
    out << "\n";
    for (std::size_t s = 0; s < ds.subject_ids.size(); ++s) {
        for (std::size_t m = 0; m < ds.features[s].size(); ++m) {
            out << ds.subject_ids[s] << ',' << (m + 1);
            for (double v : ds.features[s][m]) out << ',' << format_full(v);
            out << "\n";
        }
    }
    return out.str();
}

void write_dataset(const StoredDataset& ds, const std::string& out_dir) {
    require(!ds.subject_ids.empty(), ErrorKind::InvalidArgument,
            "write_dataset: empty dataset");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    require(!ec, ErrorKind::Io, "write_dataset: cannot create " + out_dir);

    const std::string csv = features_csv_string(ds);
    const std::string digest = to_hex16(fnv1a64(csv.data(), csv.size()));

    const fs::path csv_path = fs::path(out_dir) / "features.csv";
    {
        std::ofstream f(csv_path, std::ios::binary);
        require(f.good(), ErrorKind::Io, "write_dataset: cannot open " + csv_path.string());
        f << csv;
        require(f.good(), ErrorKind::Io, "write_dataset: write failed for " + csv_path.string());
    }

    json manifest;
    manifest["format"] = "earverify-dataset";
    manifest["version"] = 1;
    manifest["features_csv"] = "features.csv";
    manifest["feature_dim"] = kFeatureDim;
    manifest["sample_rate_hz"] = ds.sample_rate;
    manifest["digest"] = digest;
    json subjects = json::array();
    for (std::size_t s = 0; s < ds.subject_ids.size(); ++s) {
        subjects.push_back({{"id", ds.subject_ids[s]},
                            {"measurements", ds.features[s].size()}});
    }
    manifest["subjects"] = subjects;

    const fs::path man_path = fs::path(out_dir) / "manifest.json";
    std::ofstream f(man_path, std::ios::binary);
    require(f.good(), ErrorKind::Io, "write_dataset: cannot open " + man_path.string());
    f << manifest.dump(2) << "\n";
    require(f.good(), ErrorKind::Io, "write_dataset: write failed for " + man_path.string());
}

StoredDataset load_dataset(const std::string& manifest_path) {
    std::ifstream mf(manifest_path, std::ios::binary);
    require(mf.good(), ErrorKind::Io, "load_dataset: cannot open " + manifest_path);
    json manifest;
    try {
        mf >> manifest;
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, std::string("load_dataset: bad manifest: ") + e.what());
    }
    require(manifest.value("format", "") == "earverify-dataset", ErrorKind::Format,
            "load_dataset: not an earverify dataset manifest");

    StoredDataset ds;
    ds.sample_rate = manifest.value("sample_rate_hz", kDefaultSampleRate);
    std::vector<std::size_t> expected_counts;
    for (const auto& s : manifest.at("subjects")) {
        ds.subject_ids.push_back(s.at("id").get<std::string>());
        expected_counts.push_back(s.at("measurements").get<std::size_t>());
    }
    ds.features.assign(ds.subject_ids.size(), {});

    const fs::path csv_path =
        fs::path(manifest_path).parent_path() / manifest.at("features_csv").get<std::string>();
    std::ifstream cf(csv_path, std::ios::binary);
    require(cf.good(), ErrorKind::Io, "load_dataset: cannot open " + csv_path.string());
    std::stringstream buffer;
    buffer << cf.rdbuf();
    const std::string csv = buffer.str();
    ds.digest = to_hex16(fnv1a64(csv.data(), csv.size()));
    if (manifest.contains("digest")) {
        require(manifest["digest"].get<std::string>() == ds.digest, ErrorKind::Format,
                "load_dataset: features.csv does not match manifest digest");
    }

    std::map<std::string, std::size_t> subject_index;
    for (std::size_t s = 0; s < ds.subject_ids.size(); ++s) {
        subject_index[ds.subject_ids[s]] = s;
    }

    std::istringstream lines(csv);
    std::string line;
    require(static_cast<bool>(std::getline(lines, line)), ErrorKind::Format,
            "load_dataset: empty features csv");

    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string id, meas;
        require(static_cast<bool>(std::getline(cells, id, ',')) &&
                    static_cast<bool>(std::getline(cells, meas, ',')),
                ErrorKind::Format, "load_dataset: malformed row");
        const auto it = subject_index.find(id);
        require(it != subject_index.end(), ErrorKind::Format,
                "load_dataset: unknown subject id " + id);
        const std::size_t subject_idx = it->second;
        std::vector<double> row;
        row.reserve(kFeatureDim);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            require(end != cell.c_str() && std::isfinite(v), ErrorKind::Format,
                    "load_dataset: bad feature value '" + cell + "'");
            row.push_back(v);
        }
        require(row.size() == kFeatureDim, ErrorKind::Format,
                "load_dataset: row width != 256");
        ds.features[subject_idx].push_back(std::move(row));
    }

    for (std::size_t s = 0; s < ds.subject_ids.size(); ++s) {
        require(ds.features[s].size() == expected_counts[s], ErrorKind::Format,
                "load_dataset: measurement count mismatch for " + ds.subject_ids[s]);
    }
    return ds;
}

} // namespace earverify
