#pragma once

#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "clrbm/model.hpp"

namespace clrbm {

/// M observed visible configurations, row-major. Duplicate rows are kept
/// as-is so the empirical distribution is weighted by multiplicity.
struct Dataset {
    int n = 0;
    int num_rows = 0;
    std::vector<Spin> values; // num_rows * n

    std::span<const Spin> row(int mu) const {
        return {values.data() + static_cast<std::size_t>(mu) * n, static_cast<std::size_t>(n)};
    }

    void append_row(std::span<const Spin> r) {
        if (static_cast<int>(r.size()) != n) throw std::invalid_argument("dataset row length mismatch");
        check_spins(r);
        values.insert(values.end(), r.begin(), r.end());
        ++num_rows;
    }
};

inline Dataset make_dataset(int n) {
    if (n < 1) throw std::invalid_argument("dataset: need n >= 1");
    Dataset d;
    d.n = n;
    return d;
}

/// Per-coordinate sample means <x_i>_D.
inline std::vector<double> data_moments(const Dataset& data) {
    if (data.num_rows < 1) throw std::invalid_argument("data_moments: empty dataset");
    std::vector<double> mean(static_cast<std::size_t>(data.n), 0.0);
    for (int mu = 0; mu < data.num_rows; ++mu) {
        auto r = data.row(mu);
        for (int i = 0; i < data.n; ++i) mean[i] += r[i];
    }
    for (double& v : mean) v /= data.num_rows;
    return mean;
}

// CSV: one sample per line, entries -1 or 1, comma-separated, no header.

inline void save_dataset_csv(const Dataset& data, std::ostream& os) {
    for (int mu = 0; mu < data.num_rows; ++mu) {
        auto r = data.row(mu);
        for (int i = 0; i < data.n; ++i) {
            if (i > 0) os << ',';
            os << static_cast<int>(r[i]);
        }
        os << '\n';
    }
}

inline void save_dataset_csv(const Dataset& data, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open dataset file for writing: " + path);
    save_dataset_csv(data, os);
    if (!os) throw std::runtime_error("failed writing dataset file: " + path);
}

inline Dataset load_dataset_csv(std::istream& is) {
    Dataset data;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<Spin> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            if (cell == "1" || cell == "+1") {
                row.push_back(1);
            } else if (cell == "-1") {
                row.push_back(-1);
            } else {
                throw std::runtime_error("dataset line " + std::to_string(lineno) +
                                         ": entry '" + cell + "' is not -1 or 1");
            }
        }
        if (row.empty()) throw std::runtime_error("dataset line " + std::to_string(lineno) + ": no entries");
        if (data.num_rows == 0) {
            data.n = static_cast<int>(row.size());
        } else if (static_cast<int>(row.size()) != data.n) {
            throw std::runtime_error("dataset line " + std::to_string(lineno) + ": ragged row");
        }
        data.values.insert(data.values.end(), row.begin(), row.end());
        ++data.num_rows;
    }
    if (data.num_rows == 0) throw std::runtime_error("dataset file contains no samples");
    return data;
}

inline Dataset load_dataset_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open dataset file: " + path);
    return load_dataset_csv(is);
}

} // namespace clrbm
