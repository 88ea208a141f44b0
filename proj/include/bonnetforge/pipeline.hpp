#pragma once

#include <cmath>
#include <filesystem>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "bonnetforge/bonnet.hpp"
#include "bonnetforge/config.hpp"
#include "bonnetforge/mesh_io.hpp"
#include "bonnetforge/report.hpp"

namespace bonnetforge {

inline SurfaceJet make_seed_jet(const RunConfig& cfg, const Grid& g) {
    try {
        if (cfg.seed.name == "cylinder")
            return gen_cylinder(g, cfg.seed.radius, cfg.seed.shear);
        if (cfg.seed.name == "catenoid") return gen_catenoid(g);
        if (cfg.seed.name == "sphere") return gen_sphere_stereo(g);
        std::vector<ProfileSample> samples = cfg.seed.profile_inline;
        if (!cfg.seed.profile_path.empty()) {
            std::filesystem::path p = cfg.seed.profile_path;
            if (p.is_relative()) p = cfg.config_dir / p;
            samples = read_profile_csv(p);
        }
        return gen_revolution(g, ProfileCurve(samples));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("seed \"" + cfg.seed.name + "\": " + e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError("seed \"" + cfg.seed.name + "\": " + e.what());
    }
}

inline Quat r_from_selector(const std::string& sel, const QuatField& lam) {
    if (sel == "1") return Quat(1, 0, 0, 0);
    if (sel == "i") return Quat::i();
    if (sel == "j") return Quat::j();
    if (sel == "k") return Quat::k();
    return choose_r(lam);
}

struct StageOutcome {
    int exit_code = 0;
    Json payload;
    std::vector<std::string> files;
};

namespace detail {

inline double field_scale(const QuatField& f) {
    double s = 0.0;
    for (const auto& q : f.values) s = std::max(s, q.norm());
    return s + 1.0;
}

inline double max_gap(const QuatField& a, const QuatField& b) {
    double m = 0.0;
    for (std::size_t s = 0; s < a.values.size(); ++s)
        m = std::max(m, (a.values[s] - b.values[s]).norm());
    return m;
}

/// Least-squares slope of log(err) against log(h).
inline double fit_order(const std::vector<double>& hs, const std::vector<double>& errs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t l = 0; l < hs.size(); ++l) {
        if (errs[l] <= 0.0) continue;
        const double x = std::log(hs[l]), y = std::log(errs[l]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline Json quat_json(const Quat& q) { return Json::array({q.w, q.x, q.y, q.z}); }

/// Congruence noise floor: distance of a cloud from a rigidly moved copy of
/// itself, which an ideal alignment would reduce to zero.
inline double congruence_noise_floor(const QuatField& f) {
    const Quat q = normalized(Quat(0.9, 0.1, -0.2, 0.15));
    const ImQuat t{0.3, -0.7, 0.2};
    QuatField moved(f.grid);
    for (std::size_t s = 0; s < f.values.size(); ++s)
        moved.values[s] = Quat(sandwich(q, f.values[s].imag()) + t);
    return congruence_distance(f, moved);
}

struct SeedArtifacts {
    SurfaceJet jet;
    IsothermicSeed seed;
    bool seed_ok = false;
};

inline Json jet_residuals(const SurfaceJet& jet) {
    return Json{{"conformality", conformality_residual(jet)},
                {"laplace", laplace_residual(jet)},
                {"codazzi", codazzi_residual(jet)},
                {"h_component_gap", jet.h_component_gap},
                {"analytic_df", jet.analytic_df}};
}

inline Json seed_residuals(const IsothermicSeed& seed) {
    return Json{{"dtau", seed.dtau_residual},
                {"anticonf", seed.anticonf_residual},
                {"wedge", seed.wedge_residual},
                {"dual_path", seed.path_residual}};
}

inline Json bundle_residuals(const BonnetBundle& b) {
    const VerificationReport& r = b.report;
    return Json{{"metric_gap", r.metric_gap},
                {"H_gap", r.H_gap},
                {"dirac_plus", r.dirac_plus},
                {"dirac_minus", r.dirac_minus},
                {"path_plus", r.path_plus},
                {"path_minus", r.path_minus},
                {"congruence_variation", r.congruence_variation}};
}

}  // namespace detail

/// One refinement level of the quantities whose convergence order is gated
/// or reported by cmd_verify.
struct LevelData {
    Grid grid{3, 3, 0, 0, 1, 1};
    double dtau = 0.0;
    double dirac_plus = 0.0;
    double dirac_minus = 0.0;
    double laplace = 0.0;
    double codazzi = 0.0;
};

inline LevelData collect_level(const RunConfig& cfg, const Grid& g) {
    LevelData out;
    out.grid = g;
    SurfaceJet jet = make_seed_jet(cfg, g);
    out.laplace = laplace_residual(jet);
    out.codazzi = codazzi_residual(jet);
    IsothermicSeed seed = build_seed(jet, {cfg.params.base_i, cfg.params.base_j});
    out.dtau = seed.dtau_residual;
    BonnetBundle b = construct_pair(seed, cfg.params.epsilon, cfg.params.a,
                                    cfg.params.allow_degenerate);
    out.dirac_plus = b.report.dirac_plus;
    out.dirac_minus = b.report.dirac_minus;
    return out;
}

inline StageOutcome run_stage(Stage stage, const RunConfig& cfg, int levels = 1) {
    const Grid grid = cfg.grid.make();
    const GridIndex base{cfg.params.base_i, cfg.params.base_j};
    const double gbound = cfg.tol.grid_bound(grid);
    const bool degenerate = cfg.params.epsilon == 0.0;
    if (degenerate && !cfg.params.allow_degenerate &&
        (stage == Stage::bonnet || stage == Stage::roundtrip || stage == Stage::verify))
        throw ConfigError(
            "epsilon = 0 degenerates the pair; set parameters.allow_degenerate to build it");
    if (degenerate && stage == Stage::roundtrip)
        throw ConfigError("roundtrip requires epsilon != 0");

    const std::filesystem::path outdir = cfg.output.dir;
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory: " + outdir.string());

    ReportBuilder rb(to_string(stage), cfg.echo());
    rb.set("run_id", cfg.output.run_id.empty()
                         ? std::string(to_string(stage)) + "_" + cfg.seed.name
                         : cfg.output.run_id);
    rb.set("grid", grid_json(grid));
    StageOutcome outcome;

    auto emit_obj = [&](const char* name, const QuatField& f) {
        if (!cfg.output.emit_obj) return;
        write_obj(outdir / name, f);
        outcome.files.push_back(name);
    };
    auto emit_csv = [&](const char* name, const SurfaceJet& jet) {
        if (!cfg.output.emit_csv) return;
        write_geometry_csv(outdir / name, jet);
        outcome.files.push_back(name);
    };

    SurfaceJet jet = make_seed_jet(cfg, grid);
    rb.add_block("surface", "build_jet", detail::jet_residuals(jet));
    const bool jet_ok = rb.add_gate("conformality", "surface", "conformality_residual",
                                    conformality_residual(jet), cfg.tol.conformality);
    if (stage == Stage::verify) {
        rb.add_gate("laplace", "surface", "laplace_residual", laplace_residual(jet), gbound);
        rb.add_gate("codazzi", "surface", "codazzi_residual", codazzi_residual(jet), gbound);
    }
    if (stage != Stage::verify) {
        emit_obj("f.obj", jet.f);
        emit_csv("geometry.csv", jet);
    }

    Json skipped = Json::array();
    bool seed_ok = false;
    IsothermicSeed seed;
    if (stage != Stage::generate) {
        if (!jet_ok) {
            skipped.push_back("isothermic seed (conformality gate failed)");
        } else {
            seed = build_seed(jet, base);
            rb.add_block("isothermic", "build_seed", detail::seed_residuals(seed));
            seed_ok = rb.add_gate("anticonf", "isothermic", "build_seed",
                                  seed.anticonf_residual, cfg.tol.anticonf);
            seed_ok &= rb.add_gate("dtau", "isothermic", "build_seed", seed.dtau_residual,
                                   gbound);
            seed_ok &= rb.add_gate("tau_wedge", "isothermic", "build_seed",
                                   seed.wedge_residual, gbound);
            rb.add_gate("dual_path", "isothermic", "dual_surface",
                        seed.path_residual / detail::field_scale(seed.dual), gbound);
            if (stage != Stage::verify) emit_obj("f_star.obj", seed.dual);
        }
    }

    bool bundle_ok = false;
    BonnetBundle bundle;
    if (stage == Stage::bonnet || stage == Stage::roundtrip || stage == Stage::verify) {
        if (!seed_ok) {
            skipped.push_back("bonnet construction (seed gates failed)");
        } else {
            try {
                bundle = construct_pair(seed, cfg.params.epsilon, cfg.params.a,
                                        cfg.params.allow_degenerate);
                bundle_ok = true;
            } catch (const std::invalid_argument& e) {
                rb.add_failed_gate("seed_residual_gate", "bonnet", "construct_pair", e.what());
            }
        }
        if (bundle_ok) {
            rb.add_block("bonnet", "construct_pair", detail::bundle_residuals(bundle));
            rb.add_gate("metric_gap", "bonnet", "construct_pair", bundle.report.metric_gap,
                        cfg.tol.metric_gap);
            rb.add_gate("H_gap", "bonnet", "construct_pair", bundle.report.H_gap,
                        cfg.tol.H_gap);
            rb.add_gate("dirac_plus", "spin", "hdf_criterion", bundle.report.dirac_plus,
                        gbound);
            rb.add_gate("dirac_minus", "spin", "hdf_criterion", bundle.report.dirac_minus,
                        gbound);
            rb.add_gate("path_plus", "grid", "integrate",
                        bundle.report.path_plus / detail::field_scale(bundle.f_plus.f),
                        gbound);
            rb.add_gate("path_minus", "grid", "integrate",
                        bundle.report.path_minus / detail::field_scale(bundle.f_minus.f),
                        gbound);
            if (degenerate) {
                rb.add_gate("degenerate_coincidence", "bonnet", "construct_pair",
                            detail::max_gap(bundle.f_plus.f, bundle.f_minus.f),
                            cfg.tol.coincidence);
            } else {
                rb.add_gate("non_congruence", "bonnet", "construct_pair",
                            bundle.report.congruence_variation, cfg.tol.congruence_min,
                            "gt");
                const double floor = detail::congruence_noise_floor(bundle.f_plus.f);
                const double dist = congruence_distance(bundle.f_plus.f, bundle.f_minus.f);
                rb.add_block("align", "congruence_distance",
                             Json{{"partner_distance", dist}, {"noise_floor", floor}});
                rb.add_gate("partner_separation", "align", "congruence_distance", dist,
                            1e3 * floor, "gt");
            }
            if (stage != Stage::verify) {
                emit_obj("f_plus.obj", bundle.f_plus.f);
                emit_obj("f_minus.obj", bundle.f_minus.f);
            }
        }
    }

    if (stage == Stage::roundtrip || (stage == Stage::verify && !degenerate)) {
        if (!bundle_ok) {
            skipped.push_back("roundtrip (bonnet construction failed)");
        } else {
            bool lam_ok = false;
            QuatField lam;
            try {
                lam = recover_lambda(bundle.f_minus, bundle.f_plus, base,
                                     cfg.tol.recovery_gate);
                lam_ok = true;
            } catch (const std::invalid_argument& e) {
                rb.add_failed_gate("recovery_gate", "bonnet", "recover_lambda", e.what());
            }
            if (lam_ok) {
                // The frame rotation determines lambda up to one global sign;
                // calibrate at the base against the factors this run built so
                // the dual comparison lands on the seed's own branch.
                const Quat truth_base = normalized(
                    inverse(bundle.lambda_minus.at(base.i, base.j)) *
                    bundle.lambda_plus.at(base.i, base.j));
                if (dot(lam.at(base.i, base.j), truth_base) < 0.0)
                    for (auto& q : lam.values) q = q * -1.0;
                double lambda_error = 0.0;
                for (std::size_t s = 0; s < lam.values.size(); ++s) {
                    const Quat truth = normalized(inverse(bundle.lambda_minus.values[s]) *
                                                  bundle.lambda_plus.values[s]);
                    lambda_error = std::max(lambda_error, (lam.values[s] - truth).norm());
                }
                rb.add_block("bonnet", "recover_lambda",
                             Json{{"lambda_error", lambda_error}});
                rb.add_gate("lambda_recovery", "bonnet", "recover_lambda", lambda_error,
                            gbound);
                try {
                    const Quat r = r_from_selector(cfg.params.r, lam);
                    RecoveredIsothermic rec = recover_isothermic(bundle.f_minus, lam, r, base);
                    const double inv_scale = 1.0 / (2.0 * cfg.params.epsilon);
                    const Quat offset =
                        rec.f_star.at(base.i, base.j) -
                        (seed.dual.at(base.i, base.j) + Quat(cfg.params.a)) * inv_scale;
                    double scale_err = 0.0;
                    for (std::size_t s = 0; s < rec.f_star.values.size(); ++s) {
                        const Quat want =
                            (seed.dual.values[s] + Quat(cfg.params.a)) * inv_scale + offset;
                        scale_err = std::max(scale_err, (rec.f_star.values[s] - want).norm());
                    }
                    rb.add_block("bonnet", "recover_isothermic",
                                 Json{{"r", detail::quat_json(rec.r)},
                                      {"imaginary_defect", rec.imaginary_defect},
                                      {"closedness", rec.closedness_residual},
                                      {"wedge", rec.wedge_residual},
                                      {"path", rec.path_residual},
                                      {"reconstruction_gap", rec.reconstruction_gap},
                                      {"dual_scale_error", scale_err}});
                    rb.add_gate("dual_imaginary", "bonnet", "recover_isothermic",
                                rec.imaginary_defect, cfg.tol.imaginary);
                    rb.add_gate("reconstruction", "bonnet", "recover_isothermic",
                                rec.reconstruction_gap, cfg.tol.reconstruction);
                    rb.add_gate("recovered_closedness", "bonnet", "recover_isothermic",
                                rec.closedness_residual, gbound);
                    rb.add_gate("dual_scale", "bonnet", "recover_isothermic", scale_err,
                                gbound);
                    if (stage == Stage::roundtrip) {
                        emit_obj("f_recovered.obj", rec.f);
                        emit_obj("f_star_recovered.obj", rec.f_star);
                    }
                } catch (const std::domain_error& e) {
                    rb.add_failed_gate("dual_recovery", "bonnet", "recover_isothermic",
                                       e.what());
                }
            }
        }
    } else if (stage == Stage::verify && degenerate) {
        skipped.push_back("roundtrip (epsilon = 0)");
    }

    if (stage == Stage::verify && levels >= 2) {
        std::vector<LevelData> data;
        Grid g = grid;
        for (int l = 0; l < levels; ++l) {
            data.push_back(collect_level(cfg, g));
            g = g.refined();
        }
        auto column = [&data](double LevelData::* member) {
            std::vector<double> out;
            for (const auto& d : data) out.push_back(d.*member);
            return out;
        };
        std::vector<double> hs;
        for (const auto& d : data)
            hs.push_back(std::sqrt(d.grid.hu * d.grid.hu + d.grid.hv * d.grid.hv));
        const struct {
            const char* name;
            const char* module;
            const char* op;
            double LevelData::* member;
            bool gated;
        } rows[] = {
            {"dtau", "isothermic", "build_seed", &LevelData::dtau, true},
            {"dirac_plus", "spin", "hdf_criterion", &LevelData::dirac_plus, true},
            {"dirac_minus", "spin", "hdf_criterion", &LevelData::dirac_minus, true},
            {"laplace", "surface", "laplace_residual", &LevelData::laplace, false},
            {"codazzi", "surface", "codazzi_residual", &LevelData::codazzi, false},
        };
        Json table = Json::array();
        for (const auto& row : rows) {
            const std::vector<double> errs = column(row.member);
            const double order = detail::fit_order(hs, errs);
            Json entry{{"quantity", row.name}, {"module", row.module}, {"op", row.op}};
            Json points = Json::array();
            for (std::size_t l = 0; l < errs.size(); ++l)
                points.push_back(Json{{"nu", data[l].grid.nu},
                                      {"nv", data[l].grid.nv},
                                      {"h", hs[l]},
                                      {"value", errs[l]}});
            entry["levels"] = points;
            entry["order"] = order;
            double top = 0.0;
            for (double e : errs) top = std::max(top, e);
            const bool saturated = top < cfg.tol.order_floor;
            entry["saturated"] = saturated;
            table.push_back(entry);
            if (row.gated && !saturated)
                rb.add_gate(std::string(row.name) + "_order", row.module, row.op, order,
                            cfg.tol.order_min, "ge");
        }
        rb.set("convergence", table);
    }

    if (!skipped.empty()) rb.set("skipped", skipped);
    Json files = Json::array();
    for (const auto& f : outcome.files) files.push_back(f);
    rb.set("outputs", files);
    rb.write(outdir / "report.json");
    outcome.files.push_back("report.json");
    outcome.exit_code = rb.all_pass() ? 0 : 1;
    outcome.payload = rb.payload();
    return outcome;
}

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Bonnet pairs from isothermic surfaces on discretized domains"};
    app.require_subcommand(1);

    struct Flags {
        std::string config;
        std::string out;
        int levels = 1;
        double epsilon = 0.0;
        bool epsilon_set = false;
        std::string a;
    } flags;

    auto add_common = [&flags](CLI::App* cmd, bool with_params, bool with_levels) {
        cmd->add_option("--config", flags.config, "run configuration JSON")->required();
        cmd->add_option("--out", flags.out, "output directory override");
        if (with_params) {
            cmd->add_option("--epsilon", flags.epsilon, "epsilon override")
                ->each([&flags](const std::string&) { flags.epsilon_set = true; });
            cmd->add_option("--a", flags.a, "a override as x,y,z");
        }
        if (with_levels)
            cmd->add_option("--levels", flags.levels, "refinement levels")
                ->check(CLI::Range(1, 8));
    };
    add_common(app.add_subcommand("generate", "sample a seed surface"), false, false);
    add_common(app.add_subcommand("dual", "build the dual isothermic surface"), false, false);
    add_common(app.add_subcommand("bonnet", "construct and verify a Bonnet pair"), true,
               false);
    add_common(app.add_subcommand("roundtrip", "construct, invert, and compare"), true,
               false);
    add_common(app.add_subcommand("verify", "run every gate, optionally refining"), true,
               true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = RunConfig::from_file(flags.config);
        const std::string sub = app.get_subcommands().front()->get_name();
        const Stage stage = stage_from_string(sub);
        if (cfg.stage && *cfg.stage != stage)
            throw ConfigError(std::string("config pins stage \"") + to_string(*cfg.stage) +
                              "\" but the command is \"" + sub + "\"");
        if (!flags.out.empty()) cfg.output.dir = flags.out;
        if (flags.epsilon_set) cfg.params.epsilon = flags.epsilon;
        if (!flags.a.empty()) {
            ImQuat a{};
            char c1 = 0, c2 = 0;
            std::istringstream in(flags.a);
            if (!(in >> a.x >> c1 >> a.y >> c2 >> a.z) || c1 != ',' || c2 != ',' ||
                (in >> c1))
                throw ConfigError("--a expects x,y,z");
            cfg.params.a = a;
        }
        StageOutcome outcome = run_stage(stage, cfg, flags.levels);
        const std::filesystem::path report = std::filesystem::path(cfg.output.dir) / "report.json";
        if (outcome.exit_code == 0) {
            std::cout << "all gates passed; report at " << report.string() << '\n';
        } else {
            std::cout << "gate failures:\n";
            for (const auto& gate : outcome.payload.at("gates"))
                if (!gate.at("pass").get<bool>())
                    std::cout << "  " << gate.at("name").get<std::string>() << '\n';
            std::cout << "report at " << report.string() << '\n';
        }
        return outcome.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace bonnetforge
