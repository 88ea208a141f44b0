#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bonnetforge/errors.hpp"
#include "bonnetforge/generators.hpp"
#include "bonnetforge/report.hpp"

namespace bonnetforge {

enum class Stage { generate, dual, bonnet, roundtrip, verify };

inline const char* to_string(Stage s) {
    switch (s) {
        case Stage::generate: return "generate";
        case Stage::dual: return "dual";
        case Stage::bonnet: return "bonnet";
        case Stage::roundtrip: return "roundtrip";
        case Stage::verify: return "verify";
    }
    return "?";
}

inline Stage stage_from_string(const std::string& s) {
    for (Stage st : {Stage::generate, Stage::dual, Stage::bonnet, Stage::roundtrip,
                     Stage::verify})
        if (s == to_string(st)) return st;
    throw ConfigError("unknown stage \"" + s + "\"");
}

struct SeedSpec {
    std::string name;  // cylinder | catenoid | sphere | revolution
    double radius = 1.0;
    double shear = 0.0;
    std::string profile_path;                   // revolution only
    std::vector<ProfileSample> profile_inline;  // revolution only
};

struct GridSpec {
    int nu = 0, nv = 0;
    double u0 = 0.0, u1 = 0.0, v0 = 0.0, v1 = 0.0;

    Grid make() const {
        try {
            return Grid::from_range(nu, nv, u0, u1, v0, v1);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("grid: ") + e.what());
        }
    }
};

struct Params {
    double epsilon = 0.5;
    ImQuat a{0.0, 0.0, 0.0};
    int base_i = 0, base_j = 0;
    std::string r = "auto";  // auto | 1 | i | j | k
    bool allow_degenerate = false;
};

/// Gate bounds; every member can be overridden from the config file.
/// Discretization-coupled gates scale with the grid via grid_bound.
struct Tolerances {
    double metric_gap = 1e-12;
    double H_gap = 1e-12;
    double conformality = 1e-8;
    double anticonf = 1e-8;
    double imaginary = 1e-12;
    double reconstruction = 1e-12;
    double coincidence = 1e-10;
    double grid_scale = 50.0;
    double congruence_min = 1e-7;
    double recovery_gate = 1e-6;
    double order_min = 1.9;
    double order_floor = 1e-12;

    double grid_bound(const Grid& g) const { return grid_scale * (g.hu * g.hu + g.hv * g.hv); }
};

struct OutputSpec {
    std::string dir = "out";
    bool emit_obj = true;
    bool emit_csv = true;
    std::string run_id;  // defaults to "<stage>_<seed name>"
};

namespace detail {

inline void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) known = true;
        if (!known) throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
}

inline double num(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + " is missing \"" + key + "\"");
    if (!j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
    return j.at(key).get<double>();
}

inline int integer(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + " is missing \"" + key + "\"");
    if (!j.at(key).is_number_integer())
        throw ConfigError(where + "." + key + " must be an integer");
    return j.at(key).get<int>();
}

}  // namespace detail

struct RunConfig {
    SeedSpec seed;
    GridSpec grid;
    std::optional<Stage> stage;
    Params params;
    Tolerances tol;
    OutputSpec output;
    std::filesystem::path config_dir;  // resolves relative profile paths

    static RunConfig from_json(const Json& j);
    static RunConfig from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config: " + path.string());
        Json j;
        try {
            j = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config is not valid JSON: " + std::string(e.what()));
        }
        RunConfig cfg = from_json(j);
        cfg.config_dir = path.parent_path();
        return cfg;
    }

    /// Fully materialized configuration (defaults included) for the report.
    Json echo() const {
        Json seed_j{{"name", seed.name}};
        if (seed.name == "cylinder") {
            seed_j["radius"] = seed.radius;
            seed_j["shear"] = seed.shear;
        }
        if (seed.name == "revolution") {
            if (!seed.profile_path.empty()) seed_j["profile"] = seed.profile_path;
            else {
                Json rows = Json::array();
                for (const auto& s : seed.profile_inline)
                    rows.push_back(Json::array({s.t, s.r, s.h}));
                seed_j["profile_inline"] = rows;
            }
        }
        Json j;
        j["seed"] = seed_j;
        j["grid"] = Json{{"nu", grid.nu}, {"nv", grid.nv}, {"u0", grid.u0},
                         {"u1", grid.u1}, {"v0", grid.v0}, {"v1", grid.v1}};
        if (stage) j["stage"] = to_string(*stage);
        j["parameters"] = Json{{"epsilon", params.epsilon},
                               {"a", Json::array({params.a.x, params.a.y, params.a.z})},
                               {"base", Json::array({params.base_i, params.base_j})},
                               {"r", params.r},
                               {"allow_degenerate", params.allow_degenerate}};
        j["tolerances"] = Json{{"metric_gap", tol.metric_gap},
                               {"H_gap", tol.H_gap},
                               {"conformality", tol.conformality},
                               {"anticonf", tol.anticonf},
                               {"imaginary", tol.imaginary},
                               {"reconstruction", tol.reconstruction},
                               {"coincidence", tol.coincidence},
                               {"grid_scale", tol.grid_scale},
                               {"congruence_min", tol.congruence_min},
                               {"recovery_gate", tol.recovery_gate},
                               {"order_min", tol.order_min},
                               {"order_floor", tol.order_floor}};
        j["output"] = Json{{"dir", output.dir},
                           {"emit_obj", output.emit_obj},
                           {"emit_csv", output.emit_csv},
                           {"run_id", output.run_id}};
        return j;
    }
};

inline RunConfig RunConfig::from_json(const Json& j) {
    detail::check_keys(j, {"seed", "grid", "stage", "parameters", "tolerances", "output"},
                       "config");
    RunConfig cfg;

    if (!j.contains("seed")) throw ConfigError("config is missing \"seed\"");
    const Json& js = j.at("seed");
    if (!js.contains("name") || !js.at("name").is_string())
        throw ConfigError("seed.name must be a string");
    cfg.seed.name = js.at("name").get<std::string>();
    if (cfg.seed.name == "cylinder") {
        detail::check_keys(js, {"name", "radius", "shear"}, "seed");
        if (js.contains("radius")) cfg.seed.radius = detail::num(js, "radius", "seed");
        if (js.contains("shear")) cfg.seed.shear = detail::num(js, "shear", "seed");
        if (cfg.seed.radius <= 0.0) throw ConfigError("seed.radius must be positive");
    } else if (cfg.seed.name == "catenoid" || cfg.seed.name == "sphere") {
        detail::check_keys(js, {"name"}, "seed");
    } else if (cfg.seed.name == "revolution") {
        detail::check_keys(js, {"name", "profile", "profile_inline"}, "seed");
        const bool has_path = js.contains("profile");
        const bool has_inline = js.contains("profile_inline");
        if (has_path == has_inline)
            throw ConfigError("revolution seed needs exactly one of profile, profile_inline");
        if (has_path) {
            if (!js.at("profile").is_string())
                throw ConfigError("seed.profile must be a file path string");
            cfg.seed.profile_path = js.at("profile").get<std::string>();
        } else {
            if (!js.at("profile_inline").is_array())
                throw ConfigError("seed.profile_inline must be an array of [t, r, h] rows");
            for (const auto& row : js.at("profile_inline")) {
                if (!row.is_array() || row.size() != 3 || !row[0].is_number() ||
                    !row[1].is_number() || !row[2].is_number())
                    throw ConfigError("seed.profile_inline rows must be [t, r, h] numbers");
                cfg.seed.profile_inline.push_back(
                    {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
            }
        }
    } else {
        throw ConfigError("unknown seed name \"" + cfg.seed.name + "\"");
    }

    if (!j.contains("grid")) throw ConfigError("config is missing \"grid\"");
    const Json& jg = j.at("grid");
    detail::check_keys(jg, {"nu", "nv", "u0", "u1", "v0", "v1"}, "grid");
    cfg.grid.nu = detail::integer(jg, "nu", "grid");
    cfg.grid.nv = detail::integer(jg, "nv", "grid");
    cfg.grid.u0 = detail::num(jg, "u0", "grid");
    cfg.grid.u1 = detail::num(jg, "u1", "grid");
    cfg.grid.v0 = detail::num(jg, "v0", "grid");
    cfg.grid.v1 = detail::num(jg, "v1", "grid");
    cfg.grid.make();  // validate early

    if (j.contains("stage")) {
        if (!j.at("stage").is_string()) throw ConfigError("stage must be a string");
        cfg.stage = stage_from_string(j.at("stage").get<std::string>());
    }

    if (j.contains("parameters")) {
        const Json& jp = j.at("parameters");
        detail::check_keys(jp, {"epsilon", "a", "base", "r", "allow_degenerate"},
                           "parameters");
        if (jp.contains("epsilon")) cfg.params.epsilon = detail::num(jp, "epsilon", "parameters");
        if (jp.contains("a")) {
            const Json& ja = jp.at("a");
            if (!ja.is_array() || ja.size() != 3 || !ja[0].is_number() ||
                !ja[1].is_number() || !ja[2].is_number())
                throw ConfigError("parameters.a must be [x, y, z]");
            cfg.params.a = {ja[0].get<double>(), ja[1].get<double>(), ja[2].get<double>()};
        }
        if (jp.contains("base")) {
            const Json& jb = jp.at("base");
            if (!jb.is_array() || jb.size() != 2 || !jb[0].is_number_integer() ||
                !jb[1].is_number_integer())
                throw ConfigError("parameters.base must be [i, j]");
            cfg.params.base_i = jb[0].get<int>();
            cfg.params.base_j = jb[1].get<int>();
        }
        if (jp.contains("r")) {
            if (!jp.at("r").is_string()) throw ConfigError("parameters.r must be a string");
            cfg.params.r = jp.at("r").get<std::string>();
            if (cfg.params.r != "auto" && cfg.params.r != "1" && cfg.params.r != "i" &&
                cfg.params.r != "j" && cfg.params.r != "k")
                throw ConfigError("parameters.r must be one of auto, 1, i, j, k");
        }
        if (jp.contains("allow_degenerate")) {
            if (!jp.at("allow_degenerate").is_boolean())
                throw ConfigError("parameters.allow_degenerate must be a boolean");
            cfg.params.allow_degenerate = jp.at("allow_degenerate").get<bool>();
        }
    }
    if (cfg.params.base_i < 0 || cfg.params.base_i >= cfg.grid.nu || cfg.params.base_j < 0 ||
        cfg.params.base_j >= cfg.grid.nv)
        throw ConfigError("parameters.base is outside the grid");

    if (j.contains("tolerances")) {
        const Json& jt = j.at("tolerances");
        detail::check_keys(jt,
                           {"metric_gap", "H_gap", "conformality", "anticonf", "imaginary",
                            "reconstruction", "coincidence", "grid_scale", "congruence_min",
                            "recovery_gate", "order_min", "order_floor"},
                           "tolerances");
        auto maybe = [&jt](const char* key, double& slot) {
            if (jt.contains(key)) slot = detail::num(jt, key, "tolerances");
        };
        maybe("metric_gap", cfg.tol.metric_gap);
        maybe("H_gap", cfg.tol.H_gap);
        maybe("conformality", cfg.tol.conformality);
        maybe("anticonf", cfg.tol.anticonf);
        maybe("imaginary", cfg.tol.imaginary);
        maybe("reconstruction", cfg.tol.reconstruction);
        maybe("coincidence", cfg.tol.coincidence);
        maybe("grid_scale", cfg.tol.grid_scale);
        maybe("congruence_min", cfg.tol.congruence_min);
        maybe("recovery_gate", cfg.tol.recovery_gate);
        maybe("order_min", cfg.tol.order_min);
        maybe("order_floor", cfg.tol.order_floor);
    }

    if (j.contains("output")) {
        const Json& jo = j.at("output");
        detail::check_keys(jo, {"dir", "emit_obj", "emit_csv", "run_id"}, "output");
        if (jo.contains("dir")) {
            if (!jo.at("dir").is_string()) throw ConfigError("output.dir must be a string");
            cfg.output.dir = jo.at("dir").get<std::string>();
        }
        if (jo.contains("emit_obj")) {
            if (!jo.at("emit_obj").is_boolean())
                throw ConfigError("output.emit_obj must be a boolean");
            cfg.output.emit_obj = jo.at("emit_obj").get<bool>();
        }
        if (jo.contains("emit_csv")) {
            if (!jo.at("emit_csv").is_boolean())
                throw ConfigError("output.emit_csv must be a boolean");
            cfg.output.emit_csv = jo.at("emit_csv").get<bool>();
        }
        if (jo.contains("run_id")) {
            if (!jo.at("run_id").is_string())
                throw ConfigError("output.run_id must be a string");
            cfg.output.run_id = jo.at("run_id").get<std::string>();
        }
    }
    return cfg;
}

}  // namespace bonnetforge
