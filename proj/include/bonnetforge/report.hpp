#pragma once

#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "bonnetforge/errors.hpp"
#include "bonnetforge/grid.hpp"

namespace bonnetforge {

using Json = nlohmann::ordered_json;

inline Json grid_json(const Grid& g) {
    return Json{{"nu", g.nu},         {"nv", g.nv}, {"u0", g.u0}, {"v0", g.v0},
                {"u1", g.u_max()},    {"v1", g.v_max()},
                {"hu", g.hu},         {"hv", g.hv}};
}

/// Accumulates the machine-comparable payload of one pipeline run. The
/// written file wraps the payload next to a generation timestamp; only the
/// payload is covered by the byte-identical determinism contract.
class ReportBuilder {
public:
    ReportBuilder(std::string stage, Json config_echo) {
        payload_["schema"] = "bonnetforge-report-v1";
        payload_["stage"] = std::move(stage);
        payload_["config"] = std::move(config_echo);
        payload_["blocks"] = Json::array();
        payload_["gates"] = Json::array();
    }

    /// Residual block tagged with the module and operation that defines it.
    void add_block(const std::string& module, const std::string& op, Json residuals) {
        payload_["blocks"].push_back(
            Json{{"module", module}, {"op", op}, {"residuals", std::move(residuals)}});
    }

    /// cmp is "le" (value must not exceed bound), "ge", or "gt".
    bool add_gate(const std::string& name, const std::string& module, const std::string& op,
                  double value, double bound, const std::string& cmp = "le") {
        bool pass = false;
        if (cmp == "le") pass = value <= bound;
        else if (cmp == "ge") pass = value >= bound;
        else if (cmp == "gt") pass = value > bound;
        else throw std::logic_error("unknown gate comparison: " + cmp);
        payload_["gates"].push_back(Json{{"name", name},
                                         {"module", module},
                                         {"op", op},
                                         {"value", value},
                                         {"bound", bound},
                                         {"cmp", cmp},
                                         {"pass", pass}});
        all_pass_ = all_pass_ && pass;
        return pass;
    }

    /// Gate that failed before its value could be computed.
    void add_failed_gate(const std::string& name, const std::string& module,
                         const std::string& op, const std::string& reason) {
        payload_["gates"].push_back(Json{{"name", name},
                                         {"module", module},
                                         {"op", op},
                                         {"error", reason},
                                         {"pass", false}});
        all_pass_ = false;
    }

    void set(const std::string& key, Json value) { payload_[key] = std::move(value); }

    bool all_pass() const { return all_pass_; }
    const Json& payload() const { return payload_; }

    std::string comparable_dump() const { return payload_.dump(2); }

    void write(const std::filesystem::path& path) const {
        Json doc;
        doc["payload"] = payload_;
        doc["generated_at"] = utc_now();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + path.string());
        out << doc.dump(2) << '\n';
        if (!out) throw IoError("write failed: " + path.string());
    }

private:
    static std::string utc_now() {
        std::time_t t = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    Json payload_;
    bool all_pass_ = true;
};

}  // namespace bonnetforge
