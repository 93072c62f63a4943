#pragma once

// Reference top-k: normalize everything the same way the index does, score
// every entry, full sort by (score desc, id asc), cut at k.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline std::vector<double> unit(const std::vector<double>& v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

inline std::vector<std::pair<std::string, double>> knn(const std::vector<std::pair<std::string, std::vector<double>>>& data,
                                                       const std::vector<double>& query, std::size_t k) {
    const auto q = unit(query);
    std::vector<std::pair<std::string, double>> all;
    for (const auto& [id, v] : data) {
        const auto u = unit(v);
        double dot = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * q[i];
        all.emplace_back(id, std::clamp(dot, -1.0, 1.0));
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

}  // namespace oracle
