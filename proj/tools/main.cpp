// Command-line front end for the capacity-planning toolkit.
//
// Subcommands: analyze (bounds at one operating point), scenario (load
// sweeps and the bundled upgrade study), size (max rate under an
// objective, replica counts), simulate (fork-join simulator runs),
// characterize (query-log statistics and distribution fits).
//
// Every run writes a manifest.json next to its outputs; --replay on a
// manifest reruns that invocation and reproduces the outputs exactly.
//
// Exit codes: 0 success, 1 bad configuration or input, 2 the requested
// operating point is saturated, 3 the objective is infeasible.

#include <array>
#include <atomic>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "searchcap/model.hpp"
#include "searchcap/presets.hpp"
#include "searchcap/scenario.hpp"
#include "searchcap/sim.hpp"
#include "searchcap/statfit.hpp"
#include "searchcap/workload.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace searchcap;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string iso_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path out_dir(const json& args) {
    std::string dir = args.value("out", std::string());
    if (dir.empty()) {
        if (const char* env = std::getenv("SEARCHCAP_OUT")) dir = env;
    }
    if (dir.empty()) dir = ".";
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

void write_manifest(const fs::path& dir, const std::string& subcommand,
                    const json& args, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    json manifest;
    manifest["tool"] = "searchcap";
    manifest["version"] = kVersion;
    manifest["subcommand"] = subcommand;
    manifest["started_at"] = iso_now();
    manifest["args"] = args;
    manifest["inputs"] = inputs;
    manifest["outputs"] = outputs;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Shared parameter resolution

ScenarioConfig resolve_config(const json& args) {
    const std::string preset_name = args.value("preset", std::string());
    const std::string config_path = args.value("config", std::string());
    if (!preset_name.empty() && !config_path.empty())
        throw ConfigError("give either --preset or --config, not both");
    if (preset_name.empty() && config_path.empty())
        throw ConfigError("need --preset or --config");

    ScenarioConfig cfg = preset_name.empty() ? load_scenario_config(config_path)
                                             : preset(preset_name);
    if (args.value("p", 0) > 0) cfg.cluster.p = args["p"].get<int>();
    return cfg;
}

ServiceParams resolve_params(const ScenarioConfig& cfg, const json& args) {
    ScalingSpec spec = cfg.scaling.value_or(ScalingSpec{});
    if (!cfg.scaling && cfg.params.size() == 1)
        spec.memory_profile = cfg.params.begin()->first;

    if (const auto profile = args.value("profile", std::string());
        !profile.empty())
        spec.memory_profile = profile;
    if (args.value("cpu_speedup", 0.0) > 0)
        spec.cpu_speedup = args["cpu_speedup"].get<double>();
    if (args.value("disk_speedup", 0.0) > 0)
        spec.disk_speedup = args["disk_speedup"].get<double>();
    if (args.value("broker_cpu_fixed", false)) spec.broker_cpu_fixed = true;

    return apply_scaling(cfg.params, spec);
}

std::optional<CacheParams> resolve_cache(const ScenarioConfig& cfg,
                                         const json& args) {
    if (args.value("no_cache", false)) return std::nullopt;
    std::optional<CacheParams> cache = cfg.cache;
    if (args.value("cache_hit", -1.0) >= 0) {
        if (!cache) cache.emplace();
        cache->hit_result = args["cache_hit"].get<double>();
    }
    if (args.value("cache_s_ms", -1.0) >= 0) {
        if (!cache) cache.emplace();
        cache->s_cached = args["cache_s_ms"].get<double>() * 1e-3;
    }
    if (cache) cache->validate();
    return cache;
}

std::optional<SloSpec> resolve_slo(const ScenarioConfig& cfg, const json& args) {
    std::optional<SloSpec> slo = cfg.slo;
    if (args.value("slo_ms", 0.0) > 0) {
        if (!slo) slo.emplace();
        slo->max_mean_response = args["slo_ms"].get<double>() * 1e-3;
    }
    if (args.value("total_rate", 0.0) > 0) {
        if (!slo) slo.emplace();
        slo->total_rate = args["total_rate"].get<double>();
    }
    return slo;
}

// ---------------------------------------------------------------------------
// analyze

int cmd_analyze(const json& args) {
    const ScenarioConfig cfg = resolve_config(args);
    const ServiceParams params = resolve_params(cfg, args);
    const std::optional<CacheParams> cache = resolve_cache(cfg, args);
    const Workload load{args.at("lambda").get<double>()};

    const ModelReport rep = response_bounds(cfg.cluster, params, load);
    std::optional<double> cached;
    if (cache)
        cached = response_with_result_cache(cfg.cluster, params, load, *cache);

    std::ostringstream csv;
    csv << "p,lambda,s_server_s,u_server,r_server_s,r_broker_s,h_p,r_lower_s,"
           "r_upper_s";
    if (cached) csv << ",r_upper_cached_s";
    csv << '\n'
        << cfg.cluster.p << ',' << fmt(load.lambda, 9) << ','
        << fmt(rep.s_server, 9) << ',' << fmt(rep.u_server, 9) << ','
        << fmt(rep.r_server, 9) << ',' << fmt(rep.r_broker, 9) << ','
        << fmt(rep.h_p, 9) << ',' << fmt(rep.r_lower, 9) << ','
        << fmt(rep.r_upper, 9);
    if (cached) csv << ',' << fmt(*cached, 9);
    csv << '\n';

    if (args.value("format", std::string("table")) == "csv") {
        std::cout << csv.str();
    } else {
        std::cout << "p                " << cfg.cluster.p << '\n'
                  << "lambda_qps       " << fmt(load.lambda) << '\n'
                  << "s_server_ms      " << fmt(rep.s_server * 1e3) << '\n'
                  << "u_server         " << fmt(rep.u_server) << '\n'
                  << "r_server_ms      " << fmt(rep.r_server * 1e3) << '\n'
                  << "r_broker_ms      " << fmt(rep.r_broker * 1e3) << '\n'
                  << "h_p              " << fmt(rep.h_p) << '\n'
                  << "r_lower_ms       " << fmt(rep.r_lower * 1e3) << '\n'
                  << "r_upper_ms       " << fmt(rep.r_upper * 1e3) << '\n';
        if (cached)
            std::cout << "r_cached_ms      " << fmt(*cached * 1e3) << '\n';
    }

    const fs::path dir = out_dir(args);
    write_file(dir / "report.csv", csv.str());
    write_manifest(dir, "analyze", args, {}, {"report.csv"});
    return 0;
}

// ---------------------------------------------------------------------------
// scenario

struct StudyRow {
    std::string name;
    std::string profile;
    double cpu = 1, disk = 1;
    bool with_cache = false;
};

int cmd_scenario(const json& args) {
    const ScenarioConfig cfg = resolve_config(args);
    const fs::path dir = out_dir(args);

    if (args.value("sweep_max", 0.0) > 0) {
        const ServiceParams params = resolve_params(cfg, args);
        const SweepResult result =
            sweep(cfg.cluster, params, args.value("sweep_min", 0.0),
                  args["sweep_max"].get<double>(), args.value("sweep_step", 1.0));

        std::ostringstream csv;
        result.write_csv(csv);
        write_file(dir / "sweep.csv", csv.str());
        write_manifest(dir, "scenario", args, {}, {"sweep.csv"});

        if (args.value("format", std::string("table")) == "csv") {
            std::cout << csv.str();
        } else {
            std::printf("%10s %14s %14s %10s %s\n", "lambda", "r_lower_ms",
                        "r_upper_ms", "u_server", "saturated");
            for (const auto& pt : result.points) {
                if (pt.saturated)
                    std::printf("%10s %14s %14s %10s 1\n",
                                fmt(pt.lambda).c_str(), "-", "-",
                                fmt(pt.u_server).c_str());
                else
                    std::printf("%10s %14s %14s %10s 0\n",
                                fmt(pt.lambda).c_str(),
                                fmt(pt.report.r_lower * 1e3).c_str(),
                                fmt(pt.report.r_upper * 1e3).c_str(),
                                fmt(pt.u_server).c_str());
            }
        }
        return 0;
    }

    // Upgrade study: the baseline and four hardware scenarios, plus a
    // result cache on top of the strongest one when the config carries
    // cache figures. Gains are measured at a common comparison rate.
    if (!cfg.params.count("reference"))
        throw ConfigError("scenario study needs a 'reference' profile");
    const std::string upgraded =
        cfg.params.count("4x") ? "4x" : cfg.params.rbegin()->first;
    const std::optional<CacheParams> cache = resolve_cache(cfg, args);
    const std::optional<SloSpec> slo = resolve_slo(cfg, args);
    const double gain_lambda = args.value("gain_lambda", 4.0);

    std::vector<StudyRow> rows = {
        {"baseline", "reference", 1, 1, false},
        {"mem+disk", upgraded, 1, 4, false},
        {"mem+cpu", upgraded, 4, 1, false},
        {"cpu+disk", "reference", 4, 4, false},
        {"mem+cpu+disk", upgraded, 4, 4, false},
    };
    if (cache) rows.push_back({"result-cache", upgraded, 4, 4, true});

    const ServiceParams base_params =
        apply_scaling(cfg.params, ScalingSpec{"reference", 1, 1, false});
    const ModelReport base_rep =
        response_bounds(cfg.cluster, base_params, Workload{gain_lambda});

    std::ostringstream csv;
    csv << "scenario,profile,cpu_speedup,disk_speedup,r_upper_ms,gain,"
           "max_rate_qps,replicas\n";
    std::printf("%-14s %-10s %4s %5s %13s %7s %9s %9s\n", "scenario", "profile",
                "cpu", "disk", "r_upper_ms", "gain", "max_qps", "replicas");

    for (const auto& row : rows) {
        const ServiceParams params = apply_scaling(
            cfg.params, ScalingSpec{row.profile, row.cpu, row.disk,
                                    args.value("broker_cpu_fixed", false)});
        const std::optional<CacheParams> row_cache =
            row.with_cache ? cache : std::nullopt;

        double upper = 0;
        if (row_cache)
            upper = response_with_result_cache(cfg.cluster, params,
                                               Workload{gain_lambda}, *row_cache);
        else
            upper = response_bounds(cfg.cluster, params, Workload{gain_lambda})
                        .r_upper;
        const double gain = base_rep.r_upper / upper;

        std::string max_rate = "-", replicas = "-";
        if (slo) {
            try {
                const int rate =
                    max_rate_under_slo(cfg.cluster, params, *slo, row_cache);
                max_rate = std::to_string(rate);
                replicas = std::to_string(
                    replicas_needed(slo->total_rate, static_cast<double>(rate)));
            } catch (const InfeasibleSloError&) {
                max_rate = "infeasible";
                replicas = "-";
            }
        }

        csv << row.name << ',' << row.profile << ',' << fmt(row.cpu) << ','
            << fmt(row.disk) << ',' << fmt(upper * 1e3, 9) << ','
            << fmt(gain, 9) << ',' << max_rate << ',' << replicas << '\n';
        std::printf("%-14s %-10s %4s %5s %13s %7s %9s %9s\n", row.name.c_str(),
                    row.profile.c_str(), fmt(row.cpu).c_str(),
                    fmt(row.disk).c_str(), fmt(upper * 1e3).c_str(),
                    fmt(gain, 4).c_str(), max_rate.c_str(), replicas.c_str());
    }

    // Broker demand grows with the fan-out; the line fitted to the
    // validation-cluster measurements is how the large-cluster broker
    // demand was projected in the first place.
    const BrokerFit bfit = broker_demand_fit(validation_broker_points());
    std::printf(
        "\nbroker demand fit: slope %s ms/server, intercept %s ms, r2 %s, "
        "projected at p=%d: %s ms\n",
        fmt(bfit.slope * 1e3).c_str(), fmt(bfit.intercept * 1e3).c_str(),
        fmt(bfit.r_squared).c_str(), cfg.cluster.p,
        fmt(bfit.at(cfg.cluster.p) * 1e3).c_str());

    write_file(dir / "case_study.csv", csv.str());
    write_manifest(dir, "scenario", args, {}, {"case_study.csv"});
    return 0;
}

// ---------------------------------------------------------------------------
// size

int cmd_size(const json& args) {
    const ScenarioConfig cfg = resolve_config(args);
    const ServiceParams params = resolve_params(cfg, args);
    const std::optional<CacheParams> cache = resolve_cache(cfg, args);
    const std::optional<SloSpec> slo = resolve_slo(cfg, args);
    if (!slo)
        throw ConfigError("size: need an objective (--slo-ms and --total-rate)");
    slo->validate();

    const int rate = max_rate_under_slo(cfg.cluster, params, *slo, cache);
    const int replicas =
        replicas_needed(slo->total_rate, static_cast<double>(rate));

    std::cout << "max_rate_qps     " << rate << '\n'
              << "replicas         " << replicas << '\n'
              << "slo_ms           " << fmt(slo->max_mean_response * 1e3) << '\n'
              << "total_rate_qps   " << fmt(slo->total_rate) << '\n'
              << "result_cache     " << (cache ? "yes" : "no") << '\n';

    std::ostringstream csv;
    csv << "max_rate_qps,replicas,slo_ms,total_rate_qps,result_cache\n"
        << rate << ',' << replicas << ',' << fmt(slo->max_mean_response * 1e3, 9)
        << ',' << fmt(slo->total_rate, 9) << ',' << (cache ? 1 : 0) << '\n';

    const fs::path dir = out_dir(args);
    write_file(dir / "sizing.csv", csv.str());
    write_manifest(dir, "size", args, {}, {"sizing.csv"});
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const json& args) {
    SimConfig base;
    base.p = args.value("p", 1);
    base.lambda = args.value("lambda", 0.0);
    base.s_broker_mean = args.value("s_broker_ms", 0.0) * 1e-3;
    base.mode = args.value("mode", std::string("independent")) == "identical"
                    ? CorrelationMode::Identical
                    : CorrelationMode::Independent;
    base.horizon = args.value("horizon", std::uint64_t{200000});
    base.warmup_fraction = args.value("warmup", 0.1);
    base.batches = args.value("batches", 20);
    base.seed = args.value("seed", std::uint64_t{1});

    bool two_class = false;
    if (!args.value("preset", std::string()).empty() ||
        !args.value("config", std::string()).empty()) {
        const ScenarioConfig cfg = resolve_config(args);
        const ServiceParams params = resolve_params(cfg, args);
        base.two_class = params;
        if (args.value("s_broker_ms", -1.0) < 0)
            base.s_broker_mean = params.s_broker;
        if (args.value("p", 0) <= 0) base.p = cfg.cluster.p;
        two_class = true;
    } else {
        base.s_server_mean = args.value("s_server_ms", 0.0) * 1e-3;
        if (base.s_server_mean <= 0)
            throw ConfigError("simulate: need --s-server-ms or --preset/--config");
    }

    std::optional<std::vector<double>> trace;
    std::string trace_path = args.value("trace", std::string());
    if (!trace_path.empty()) {
        std::ifstream in(trace_path);
        if (!in) throw ConfigError("cannot open trace " + trace_path);
        const QueryLog log = parse_log(in);
        trace.emplace();
        trace->reserve(log.records.size());
        for (const auto& rec : log.records)
            trace->push_back(
                static_cast<double>(rec.timestamp_ms - log.first_ms()) / 1e3);
    }

    const int reps = std::max(1, args.value("replications", 1));
    const int jobs =
        std::max(1, std::min(args.value("jobs", 1), reps));

    std::vector<SimResult> results(reps);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < reps; i = next.fetch_add(1)) {
            SimConfig cfg = base;
            cfg.seed = base.seed + static_cast<std::uint64_t>(i);
            if (trace)
                results[i] = run_trace(cfg, *trace);
            else if (two_class)
                results[i] = run_two_class(cfg);
            else
                results[i] = run(cfg);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(jobs);
        for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    const char* mode_name =
        base.mode == CorrelationMode::Identical ? "identical" : "independent";
    std::ostringstream csv;
    csv << "p,lambda,mode,seed,mean_s,ci_s,util,completed\n";
    for (int i = 0; i < reps; ++i) {
        const SimResult& r = results[i];
        csv << base.p << ',' << fmt(base.lambda, 9) << ',' << mode_name << ','
            << base.seed + static_cast<std::uint64_t>(i) << ','
            << fmt(r.mean_response, 9) << ',' << fmt(r.ci_halfwidth, 9) << ','
            << fmt(r.utilization, 9) << ',' << r.completed << '\n';
        if (r.saturated_warning)
            std::cerr << "warning: seed " << base.seed + i
                      << ": offered load saturates a station; horizon-bounded "
                         "run only\n";
    }
    std::cout << csv.str();

    const fs::path dir = out_dir(args);
    write_file(dir / "sim.csv", csv.str());
    write_manifest(dir, "simulate", args,
                   trace_path.empty() ? std::vector<std::string>{}
                                      : std::vector<std::string>{trace_path},
                   {"sim.csv"});
    return 0;
}

// ---------------------------------------------------------------------------
// characterize

std::int64_t parse_window(const std::string& window) {
    if (window == "1d") return 24 * 3600 * 1000LL;
    if (window == "1w") return 7 * 24 * 3600 * 1000LL;
    if (window == "4w") return 28 * 24 * 3600 * 1000LL;
    throw ConfigError("window must be one of 1d, 1w, 4w");
}

int cmd_characterize(const json& args) {
    const std::string log_path = args.at("log").get<std::string>();
    std::ifstream in(log_path);
    if (!in) throw ConfigError("cannot open log " + log_path);
    const QueryLog log = parse_log(in);

    const fs::path dir = out_dir(args);
    std::vector<std::string> outputs;
    std::ostringstream stats;

    stats << "records                " << log.records.size() << '\n'
          << "malformed_lines        " << log.malformed_lines << '\n'
          << "span_days              " << fmt(log.span_ms() / 86400.0e3) << '\n';

    // Volume over time, on the raw log.
    const std::int64_t bin_ms = args.value("bin_minutes", 60) * 60000LL;
    {
        const LoadSeries series = bin_load(log, bin_ms);
        std::ostringstream csv;
        series.write_csv(csv);
        write_file(dir / "load.csv", csv.str());
        outputs.push_back("load.csv");
    }

    // Query shape and popularity.
    const QueryLengthStats lengths = query_length_stats(log);
    stats << "mean_query_length      " << fmt(lengths.mean) << '\n'
          << "median_query_length    " << fmt(lengths.median) << '\n'
          << "frac_len_1             " << fmt(lengths.frac_one) << '\n'
          << "frac_len_2             " << fmt(lengths.frac_two) << '\n'
          << "frac_len_3plus         " << fmt(lengths.frac_three_plus) << '\n';

    const double top_fraction = args.value("top_fraction", 0.01);
    stats << "top_share              " << fmt(top_fraction) << " -> "
          << fmt(popularity_concentration(log, top_fraction)) << '\n';

    std::vector<std::string> keys;
    keys.reserve(log.records.size());
    for (const auto& rec : log.records) keys.push_back(normalized_query(rec));
    const std::vector<RankedItem> ranked = rank_frequencies(keys);
    stats << "unique_queries         " << ranked.size() << '\n';

    {
        std::ostringstream csv;
        csv << "rank,count\n";
        for (const auto& item : ranked)
            csv << item.rank << ',' << item.count << '\n';
        write_file(dir / "zipf.csv", csv.str());
        outputs.push_back("zipf.csv");
    }

    const ZipfFit zipf_full = fit_zipf(ranked);
    stats << "zipf_alpha             " << fmt(zipf_full.alpha) << " (r2 "
          << fmt(zipf_full.r_squared) << ", ranks " << zipf_full.min_rank << ".."
          << zipf_full.max_rank << ")\n";
    if (const auto max_rank = args.value("max_rank", std::uint64_t{0}); max_rank) {
        const ZipfFit zipf_cut = fit_zipf(ranked, 1, max_rank);
        stats << "zipf_alpha_cutoff      " << fmt(zipf_cut.alpha) << " (r2 "
              << fmt(zipf_cut.r_squared) << ", ranks " << zipf_cut.min_rank
              << ".." << zipf_cut.max_rank << ")\n";
    }

    // Fold the whole span onto one window to concentrate the load.
    FoldSpec spec;
    spec.window_ms = parse_window(args.value("window", std::string("1w")));
    const QueryLog folded = fold(log, spec);
    stats << "fold_window            " << args.value("window", std::string("1w"))
          << '\n'
          << "fold_boost             " << fmt(fold_boost_factor(log, spec))
          << '\n';

    {
        std::ostringstream tsv;
        write_tsv(folded, tsv);
        write_file(dir / "folded.tsv", tsv.str());
        outputs.push_back("folded.tsv");
    }

    if (spec.window_ms == 7 * 24 * 3600 * 1000LL) {
        // Per-day rates inside the folded week, Sunday first.
        static const char* kDays[] = {"sun", "mon", "tue", "wed",
                                      "thu", "fri", "sat"};
        const std::int64_t origin = fold_origin(log, spec);
        std::array<std::uint64_t, 7> day_counts{};
        for (const auto& rec : folded.records)
            ++day_counts[static_cast<std::size_t>(
                (rec.timestamp_ms - origin) / 86400000LL)];
        for (int d = 0; d < 7; ++d)
            stats << "folded_rate_" << kDays[d] << "_qps    "
                  << fmt(static_cast<double>(day_counts[d]) / 86400.0) << '\n';
    }

    const auto [hour_start, hour_end] = busiest_hour(folded);
    std::uint64_t hour_count = 0;
    for (const auto& rec : folded.records)
        if (rec.timestamp_ms >= hour_start && rec.timestamp_ms < hour_end)
            ++hour_count;
    stats << "busiest_hour_start_ms  " << hour_start << '\n'
          << "busiest_hour_count     " << hour_count << '\n'
          << "busiest_hour_rate_qps  "
          << fmt(static_cast<double>(hour_count) / 3600.0) << '\n';

    // Interarrival distribution inside the busiest folded hour. Folding
    // stacks records onto the same millisecond; the resulting zero gaps
    // carry no shape information, so the fits see only positive ones.
    const std::vector<double> gaps = interarrivals(folded, hour_start, hour_end);
    std::vector<double> positive_gaps;
    positive_gaps.reserve(gaps.size());
    for (double g : gaps)
        if (g > 0) positive_gaps.push_back(g);
    stats << "interarrival_gaps      " << gaps.size() << " ("
          << gaps.size() - positive_gaps.size() << " zero ties dropped)\n";
    const std::vector<FitResult> fits = select_model(positive_gaps);
    {
        std::ostringstream csv;
        write_fits_csv(csv, fits);
        write_file(dir / "interarrival_fits.csv", csv.str());
        outputs.push_back("interarrival_fits.csv");

        std::ostringstream overlay;
        write_cdf_overlay_csv(overlay, positive_gaps, fits);
        write_file(dir / "interarrival_cdf.csv", overlay.str());
        outputs.push_back("interarrival_cdf.csv");
    }
    for (const auto& fit : fits) {
        if (fit.failed) {
            stats << "interarrival_fit       " << family_name(fit.family)
                  << " failed (" << fit.failure << ")\n";
        } else {
            stats << "interarrival_fit       " << family_name(fit.family)
                  << " params " << fmt(fit.params[0]) << ' ' << fmt(fit.params[1])
                  << " ks " << fmt(fit.ks_stat) << " sse " << fmt(fit.sse)
                  << '\n';
        }
    }

    write_file(dir / "stats.txt", stats.str());
    outputs.push_back("stats.txt");
    std::cout << stats.str();

    write_manifest(dir, "characterize", args, {log_path}, outputs);
    return 0;
}

// ---------------------------------------------------------------------------

int dispatch(const std::string& subcommand, const json& args) {
    if (subcommand == "analyze") return cmd_analyze(args);
    if (subcommand == "scenario") return cmd_scenario(args);
    if (subcommand == "size") return cmd_size(args);
    if (subcommand == "simulate") return cmd_simulate(args);
    if (subcommand == "characterize") return cmd_characterize(args);
    throw ConfigError("unknown subcommand '" + subcommand + "'");
}

int replay(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("cannot open manifest " + manifest_path);
    json manifest;
    try {
        manifest = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
    if (!manifest.contains("subcommand") || !manifest.contains("args"))
        throw ConfigError("manifest: missing subcommand or args");
    return dispatch(manifest["subcommand"].get<std::string>(),
                    manifest["args"]);
}

void add_config_flags(CLI::App* cmd, json& args) {
    cmd->add_option_function<std::string>(
        "--preset", [&args](const std::string& v) { args["preset"] = v; },
        "Bundled parameter set: table4, table5-reference, table5-4xmem, "
        "paper-case-study");
    cmd->add_option_function<std::string>(
        "--config", [&args](const std::string& v) { args["config"] = v; },
        "Scenario config JSON file");
    cmd->add_option_function<int>(
        "--p", [&args](int v) { args["p"] = v; }, "Override server count");
    cmd->add_option_function<std::string>(
        "--profile", [&args](const std::string& v) { args["profile"] = v; },
        "Memory profile to use");
    cmd->add_option_function<double>(
        "--cpu-speedup", [&args](double v) { args["cpu_speedup"] = v; },
        "Divide CPU demands by this factor");
    cmd->add_option_function<double>(
        "--disk-speedup", [&args](double v) { args["disk_speedup"] = v; },
        "Divide the disk demand by this factor");
    cmd->add_flag_function(
        "--broker-cpu-fixed",
        [&args](std::int64_t) { args["broker_cpu_fixed"] = true; },
        "Keep the broker demand out of the CPU speedup");
}

void add_cache_flags(CLI::App* cmd, json& args) {
    cmd->add_option_function<double>(
        "--cache-hit", [&args](double v) { args["cache_hit"] = v; },
        "Result-cache hit probability");
    cmd->add_option_function<double>(
        "--cache-s-ms", [&args](double v) { args["cache_s_ms"] = v; },
        "Broker demand for a cached answer, ms");
    cmd->add_flag_function(
        "--no-cache", [&args](std::int64_t) { args["no_cache"] = true; },
        "Ignore any result-cache figures in the config");
}

void add_out_flag(CLI::App* cmd, json& args) {
    cmd->add_option_function<std::string>(
        "--out", [&args](const std::string& v) { args["out"] = v; },
        "Output directory (default $SEARCHCAP_OUT or .)");
    cmd->add_option_function<std::string>(
        "--format", [&args](const std::string& v) { args["format"] = v; },
        "Stdout format: table or csv");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacity planning for broadcast search clusters"};
    app.set_version_flag("--version", kVersion);

    std::string replay_path;
    app.add_option("--replay", replay_path,
                   "Re-run the invocation recorded in a manifest.json");

    std::string pending_sub;
    json a_analyze, a_scenario, a_size, a_simulate, a_characterize;

    CLI::App* analyze = app.add_subcommand("analyze", "Bounds at one rate");
    add_config_flags(analyze, a_analyze);
    add_cache_flags(analyze, a_analyze);
    add_out_flag(analyze, a_analyze);
    analyze
        ->add_option_function<double>(
            "--lambda", [&](double v) { a_analyze["lambda"] = v; },
            "Cluster arrival rate, queries/second")
        ->required();
    analyze->callback([&] { pending_sub = "analyze"; });

    CLI::App* scenario =
        app.add_subcommand("scenario", "Load sweep or upgrade study");
    add_config_flags(scenario, a_scenario);
    add_cache_flags(scenario, a_scenario);
    add_out_flag(scenario, a_scenario);
    scenario->add_option_function<double>(
        "--sweep-min", [&](double v) { a_scenario["sweep_min"] = v; },
        "Sweep start rate");
    scenario->add_option_function<double>(
        "--sweep-max", [&](double v) { a_scenario["sweep_max"] = v; },
        "Sweep end rate (exclusive); omit to run the upgrade study");
    scenario->add_option_function<double>(
        "--sweep-step", [&](double v) { a_scenario["sweep_step"] = v; },
        "Sweep step");
    scenario->add_option_function<double>(
        "--gain-lambda", [&](double v) { a_scenario["gain_lambda"] = v; },
        "Rate at which study gains are compared");
    scenario->add_option_function<double>(
        "--slo-ms", [&](double v) { a_scenario["slo_ms"] = v; },
        "Override objective, ms");
    scenario->add_option_function<double>(
        "--total-rate", [&](double v) { a_scenario["total_rate"] = v; },
        "Override total rate to absorb, queries/second");
    scenario->callback([&] { pending_sub = "scenario"; });

    CLI::App* size = app.add_subcommand("size", "Max rate and replica count");
    add_config_flags(size, a_size);
    add_cache_flags(size, a_size);
    add_out_flag(size, a_size);
    size->add_option_function<double>(
        "--slo-ms", [&](double v) { a_size["slo_ms"] = v; },
        "Mean response objective, ms");
    size->add_option_function<double>(
        "--total-rate", [&](double v) { a_size["total_rate"] = v; },
        "Total rate the service must absorb, queries/second");
    size->callback([&] { pending_sub = "size"; });

    CLI::App* simulate = app.add_subcommand("simulate", "Fork-join simulator");
    add_config_flags(simulate, a_simulate);
    add_out_flag(simulate, a_simulate);
    simulate->add_option_function<double>(
        "--lambda", [&](double v) { a_simulate["lambda"] = v; },
        "Arrival rate, queries/second");
    simulate->add_option_function<double>(
        "--s-server-ms", [&](double v) { a_simulate["s_server_ms"] = v; },
        "Single-class mean server demand, ms");
    simulate->add_option_function<double>(
        "--s-broker-ms", [&](double v) { a_simulate["s_broker_ms"] = v; },
        "Mean broker demand, ms");
    simulate->add_option_function<std::string>(
        "--mode", [&](const std::string& v) { a_simulate["mode"] = v; },
        "Sibling service draws: independent or identical");
    simulate->add_option_function<std::uint64_t>(
        "--horizon", [&](std::uint64_t v) { a_simulate["horizon"] = v; },
        "Completed queries to simulate");
    simulate->add_option_function<double>(
        "--warmup", [&](double v) { a_simulate["warmup"] = v; },
        "Fraction of completions discarded up front");
    simulate->add_option_function<int>(
        "--batches", [&](int v) { a_simulate["batches"] = v; },
        "Batch-means groups");
    simulate->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { a_simulate["seed"] = v; },
        "Base random seed");
    simulate->add_option_function<int>(
        "--replications", [&](int v) { a_simulate["replications"] = v; },
        "Independent runs with seeds seed, seed+1, ...");
    simulate->add_option_function<int>(
        "--jobs", [&](int v) { a_simulate["jobs"] = v; },
        "Worker threads for replications");
    simulate->add_option_function<std::string>(
        "--trace", [&](const std::string& v) { a_simulate["trace"] = v; },
        "Replay arrivals from this query log instead of Poisson");
    simulate->callback([&] { pending_sub = "simulate"; });

    CLI::App* characterize =
        app.add_subcommand("characterize", "Query-log statistics and fits");
    add_out_flag(characterize, a_characterize);
    characterize
        ->add_option_function<std::string>(
            "--log", [&](const std::string& v) { a_characterize["log"] = v; },
            "Query log, TSV: epoch-ms <tab> query text")
        ->required();
    characterize->add_option_function<std::string>(
        "--window", [&](const std::string& v) { a_characterize["window"] = v; },
        "Fold window: 1d, 1w, or 4w");
    characterize->add_option_function<double>(
        "--top-fraction",
        [&](double v) { a_characterize["top_fraction"] = v; },
        "Popularity share reported for this fraction of distinct queries");
    characterize->add_option_function<std::uint64_t>(
        "--max-rank", [&](std::uint64_t v) { a_characterize["max_rank"] = v; },
        "Also fit the popularity power law cut off at this rank");
    characterize->add_option_function<int>(
        "--bin-minutes", [&](int v) { a_characterize["bin_minutes"] = v; },
        "Load series bin width, minutes");
    characterize->callback([&] { pending_sub = "characterize"; });

    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (!replay_path.empty()) return replay(replay_path);
        if (pending_sub.empty()) {
            std::cout << app.help();
            return 1;
        }
        if (pending_sub == "analyze") return dispatch(pending_sub, a_analyze);
        if (pending_sub == "scenario") return dispatch(pending_sub, a_scenario);
        if (pending_sub == "size") return dispatch(pending_sub, a_size);
        if (pending_sub == "simulate") return dispatch(pending_sub, a_simulate);
        return dispatch(pending_sub, a_characterize);
    } catch (const SaturationError& e) {
        std::cerr << "saturated: " << e.what() << '\n';
        return 2;
    } catch (const InfeasibleSloError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
