#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "bonnetforge/errors.hpp"
#include "bonnetforge/generators.hpp"
#include "bonnetforge/surface.hpp"

namespace bonnetforge {

namespace detail {

/// Shortest exact decimal form of a double; stable across runs.
inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // fixed '\n' line endings
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

}  // namespace detail

/// Wavefront OBJ: one "v x y z" line per sample in grid order, then the
/// cells as consistently diagonalized triangle pairs with 1-based indices.
inline void write_obj(const std::filesystem::path& path, const QuatField& f) {
    std::ofstream out = detail::open_out(path);
    const Grid& g = f.grid;
    for (const auto& q : f.values)
        out << "v " << detail::fmt(q.x) << ' ' << detail::fmt(q.y) << ' '
            << detail::fmt(q.z) << '\n';
    auto id = [&g](int i, int j) { return g.index(i, j) + 1; };
    for (int i = 0; i + 1 < g.nu; ++i)
        for (int j = 0; j + 1 < g.nv; ++j) {
            out << "f " << id(i, j) << ' ' << id(i + 1, j) << ' ' << id(i + 1, j + 1) << '\n';
            out << "f " << id(i, j) << ' ' << id(i + 1, j + 1) << ' ' << id(i, j + 1) << '\n';
        }
    if (!out) throw IoError("write failed: " + path.string());
}

/// Positions as CSV rows "u,v,x,y,z" in grid order.
inline void write_points_csv(const std::filesystem::path& path, const QuatField& f) {
    std::ofstream out = detail::open_out(path);
    out << "u,v,x,y,z\n";
    const Grid& g = f.grid;
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const Quat& q = f.at(i, j);
            out << detail::fmt(g.u(i)) << ',' << detail::fmt(g.v(j)) << ','
                << detail::fmt(q.x) << ',' << detail::fmt(q.y) << ',' << detail::fmt(q.z)
                << '\n';
        }
    if (!out) throw IoError("write failed: " + path.string());
}

/// Pointwise geometric data of a jet: position, normal, conformal factor,
/// mean curvature.
inline void write_geometry_csv(const std::filesystem::path& path, const SurfaceJet& jet) {
    std::ofstream out = detail::open_out(path);
    out << "u,v,x,y,z,nx,ny,nz,conf_factor,H\n";
    const Grid& g = jet.f.grid;
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const Quat& q = jet.f.at(i, j);
            const Quat& n = jet.normal.at(i, j);
            out << detail::fmt(g.u(i)) << ',' << detail::fmt(g.v(j)) << ','
                << detail::fmt(q.x) << ',' << detail::fmt(q.y) << ',' << detail::fmt(q.z)
                << ',' << detail::fmt(n.x) << ',' << detail::fmt(n.y) << ','
                << detail::fmt(n.z) << ',' << detail::fmt(jet.conf_factor.at(i, j)) << ','
                << detail::fmt(jet.mean_curvature.at(i, j)) << '\n';
        }
    if (!out) throw IoError("write failed: " + path.string());
}

/// Profile curve samples from a CSV file with header "t,r,h". Content errors
/// are configuration errors; an unreadable file is an I/O error.
inline std::vector<ProfileSample> read_profile_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty profile file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,r,h")
        throw ConfigError("profile header must be \"t,r,h\": " + path.string());
    std::vector<ProfileSample> samples;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        ProfileSample s{};
        char c1 = 0, c2 = 0;
        if (!(row >> s.t >> c1 >> s.r >> c2 >> s.h) || c1 != ',' || c2 != ',')
            throw ConfigError("malformed profile row \"" + line + "\" in " + path.string());
        std::string rest;
        if (row >> rest)
            throw ConfigError("trailing data in profile row \"" + line + "\"");
        samples.push_back(s);
    }
    return samples;
}

}  // namespace bonnetforge
