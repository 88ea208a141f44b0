#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bonnetforge/bonnetforge.hpp"

namespace testutil {

/// Shared parameter window: u stays strictly inside one period of the
/// rotational seeds, v spans a symmetric band.
inline bonnetforge::Grid param_window(int n, double v_lo = -1.0, double v_hi = 1.0) {
    return bonnetforge::Grid::from_range(n, n, 0.15, 6.1331853, v_lo, v_hi);
}

/// Least-squares slope of log(err) against log(h).
inline double fit_order(const std::vector<double>& hs, const std::vector<double>& errs) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const int n = static_cast<int>(hs.size());
    for (int k = 0; k < n; ++k) {
        const double x = std::log(hs[k]);
        const double y = std::log(errs[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline bonnetforge::Quat random_quat(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double w = u(rng), x = u(rng), y = u(rng), z = u(rng);
    return {w, x, y, z};
}

inline bonnetforge::ImQuat random_imquat(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double x = u(rng), y = u(rng), z = u(rng);
    return {x, y, z};
}

/// Straight-line profile r = t, h = t on [1, 2]; its surface of revolution
/// is a cone with conformal v-extent sqrt(2) log(2).
inline bonnetforge::ProfileCurve cone_profile() {
    std::vector<bonnetforge::ProfileSample> rows;
    for (int s = 0; s <= 20; ++s) {
        const double t = 1.0 + s / 20.0;
        rows.push_back({t, t, t});
    }
    return bonnetforge::ProfileCurve(rows);
}

/// Torus arc r = 2 + cos t, h = sin t sampled densely enough that the
/// interpolation error sits far below the finite-difference error.
inline bonnetforge::ProfileCurve torus_profile() {
    std::vector<bonnetforge::ProfileSample> rows;
    for (int s = 0; s <= 80; ++s) {
        const double t = 0.3 + 2.5 * s / 80.0;
        rows.push_back({t, 2.0 + std::cos(t), std::sin(t)});
    }
    return bonnetforge::ProfileCurve(rows);
}

inline double max_gap(const bonnetforge::QuatField& a, const bonnetforge::QuatField& b) {
    double worst = 0.0;
    for (std::size_t s = 0; s < a.values.size(); ++s)
        worst = std::max(worst, (a.values[s] - b.values[s]).norm());
    return worst;
}

inline double max_form_gap(const bonnetforge::Form1& a, const bonnetforge::Form1& b) {
    double worst = 0.0;
    for (std::size_t s = 0; s < a.au.size(); ++s) {
        worst = std::max(worst, (a.au[s] - b.au[s]).norm());
        worst = std::max(worst, (a.av[s] - b.av[s]).norm());
    }
    return worst;
}

/// Scratch directory under the system temp root, wiped on construction and
/// removed on destruction.
class ScratchDir {
  public:
    explicit ScratchDir(const std::string& name)
        : path_(std::filesystem::temp_directory_path() / ("bonnetforge_" + name)) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline bonnetforge::Json load_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    return bonnetforge::Json::parse(in);
}

}  // namespace testutil
