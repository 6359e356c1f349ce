#include "searchcap/presets.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace searchcap {

namespace {

constexpr double kMs = 1e-3;

ScenarioConfig make_table4() {
    ScenarioConfig cfg;
    cfg.cluster = {8, 1.25e6};
    // Validation cluster measurements; broker demand is the 8-server one.
    cfg.params["reference"] = {0.52 * kMs, 9.20 * kMs, 10.04 * kMs,
                               28.08 * kMs, 0.17};
    return cfg;
}

ParamTable table5_params() {
    ParamTable t;
    t["reference"] = {3.45 * kMs, 28.23 * kMs, 35.31 * kMs, 66.03 * kMs, 0.02};
    t["2x"] = {3.45 * kMs, 33.38 * kMs, 33.77 * kMs, 35.89 * kMs, 0.09};
    t["3x"] = {3.45 * kMs, 34.57 * kMs, 32.66 * kMs, 30.48 * kMs, 0.15};
    t["4x"] = {3.45 * kMs, 34.68 * kMs, 32.04 * kMs, 26.14 * kMs, 0.18};
    return t;
}

ScenarioConfig make_table5(const std::string& profile) {
    ScenarioConfig cfg;
    cfg.cluster = {100, 10e6};
    cfg.params[profile] = table5_params().at(profile);
    return cfg;
}

// Full upgrade study: all four memory profiles, the 300 ms objective at
// 200 queries/second overall, and the measured result-cache figures
// (50% hit rate, 0.069 ms to serve a cached answer).
ScenarioConfig make_case_study() {
    ScenarioConfig cfg;
    cfg.cluster = {100, 10e6};
    cfg.params = table5_params();
    cfg.slo = SloSpec{0.300, 200};
    cfg.cache = CacheParams{0.5, 0.069 * kMs};
    return cfg;
}

}  // namespace

ScenarioConfig preset(const std::string& name) {
    if (name == "table4") return make_table4();
    if (name == "table5-reference") return make_table5("reference");
    if (name == "table5-4xmem") return make_table5("4x");
    if (name == "paper-case-study") return make_case_study();

    std::ostringstream msg;
    msg << "unknown preset '" << name << "', have:";
    for (const auto& n : preset_names()) msg << " " << n;
    throw ConfigError(msg.str());
}

std::vector<std::string> preset_names() {
    return {"table4", "table5-reference", "table5-4xmem", "paper-case-study"};
}

namespace {

using nlohmann::json;

double require_number(const json& obj, const char* key, const char* where) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        std::ostringstream msg;
        msg << "config: " << where << " needs numeric '" << key << "'";
        throw ConfigError(msg.str());
    }
    return obj[key].get<double>();
}

ServiceParams parse_params(const json& obj, const std::string& profile) {
    const std::string where = "params." + profile;
    ServiceParams p;
    p.s_broker = require_number(obj, "s_broker_ms", where.c_str()) * kMs;
    p.s_hit = require_number(obj, "s_hit_ms", where.c_str()) * kMs;
    p.s_miss = require_number(obj, "s_miss_ms", where.c_str()) * kMs;
    p.s_disk = require_number(obj, "s_disk_ms", where.c_str()) * kMs;
    p.hit = require_number(obj, "hit", where.c_str());
    p.validate();
    return p;
}

}  // namespace

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());

    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }

    ScenarioConfig cfg;
    if (!doc.contains("cluster") || !doc["cluster"].is_object())
        throw ConfigError("config: missing 'cluster' object");
    cfg.cluster.p = static_cast<int>(require_number(doc["cluster"], "p", "cluster"));
    if (doc["cluster"].contains("b"))
        cfg.cluster.b = require_number(doc["cluster"], "b", "cluster");
    cfg.cluster.validate();

    if (!doc.contains("params") || !doc["params"].is_object() ||
        doc["params"].empty())
        throw ConfigError("config: 'params' must map profiles to demand sets");
    for (const auto& [profile, obj] : doc["params"].items())
        cfg.params[profile] = parse_params(obj, profile);

    if (doc.contains("scaling")) {
        const auto& s = doc["scaling"];
        ScalingSpec spec;
        spec.memory_profile = s.value("profile", std::string("reference"));
        if (s.contains("cpu_speedup"))
            spec.cpu_speedup = require_number(s, "cpu_speedup", "scaling");
        if (s.contains("disk_speedup"))
            spec.disk_speedup = require_number(s, "disk_speedup", "scaling");
        spec.broker_cpu_fixed = s.value("broker_cpu_fixed", false);
        spec.validate();
        if (!cfg.params.count(spec.memory_profile))
            throw ConfigError("config: scaling names unknown profile '" +
                              spec.memory_profile + "'");
        cfg.scaling = spec;
    }

    if (doc.contains("slo")) {
        SloSpec slo;
        slo.max_mean_response = require_number(doc["slo"], "max_ms", "slo") * kMs;
        slo.total_rate = require_number(doc["slo"], "total_rate", "slo");
        slo.validate();
        cfg.slo = slo;
    }

    if (doc.contains("cache")) {
        CacheParams cache;
        cache.hit_result = require_number(doc["cache"], "hit_result", "cache");
        cache.s_cached = require_number(doc["cache"], "s_ms", "cache") * kMs;
        cache.validate();
        cfg.cache = cache;
    }

    return cfg;
}

std::vector<std::pair<double, double>> validation_broker_points() {
    return {{2, 0.33 * kMs}, {4, 0.39 * kMs}, {8, 0.52 * kMs}};
}

ServiceParams effective_params(const ScenarioConfig& config) {
    if (config.scaling) return apply_scaling(config.params, *config.scaling);
    if (config.params.size() == 1) return config.params.begin()->second;
    throw ConfigError(
        "config: several memory profiles but no scaling spec; add one or pick "
        "a profile");
}

}  // namespace searchcap
