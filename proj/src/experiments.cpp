#include "weylwalk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <thread>
#include <vector>

#include <json.hpp>

#include "weylwalk/asymptotics.hpp"
#include "weylwalk/chambers.hpp"
#include "weylwalk/distributions.hpp"
#include "weylwalk/htransform.hpp"
#include "weylwalk/io.hpp"
#include "weylwalk/lattice.hpp"
#include "weylwalk/rng.hpp"
#include "weylwalk/vtable.hpp"
#include "weylwalk/walk.hpp"

namespace weylwalk {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kSchema = "weylwalk/1";

json parse_config(const std::string& text) {
    if (text.empty()) return json::object();
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw UsageError("configuration is not valid JSON");
    if (!j.is_object()) throw UsageError("configuration must be a JSON object");
    return j;
}

Chamber chamber_from(const json& cfg) {
    std::string s = cfg.value("chamber", "C");
    Chamber z;
    try {
        z = parse_chamber(s);
    } catch (const std::exception&) {
        throw UsageError("unknown chamber \"" + s + "\" (expected C or D)");
    }
    if (z == Chamber::A) throw UsageError("chamber must be C or D for this command");
    return z;
}

long long int_field(const json& cfg, const char* name, long long dflt, long long lo,
                    long long hi) {
    if (!cfg.contains(name)) return dflt;
    const json& v = cfg.at(name);
    if (!v.is_number_integer())
        throw UsageError(std::string(name) + " must be an integer");
    long long x = v.get<long long>();
    if (x < lo || x > hi)
        throw UsageError(std::string(name) + " must be in [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
    return x;
}

std::uint64_t seed_from(const json& cfg) {
    if (!cfg.contains("seed")) return 0;
    const json& v = cfg.at("seed");
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0)
        return static_cast<std::uint64_t>(v.get<long long>());
    throw UsageError("seed must be a nonnegative integer");
}

int workers_from(const json& cfg) {
    return static_cast<int>(int_field(cfg, "workers", 1, 1, 256));
}

StepDistribution dist_from(const json& cfg, int k) {
    if (!cfg.contains("dist")) return StepDistribution::rademacher(k);
    const json& d = cfg.at("dist");
    if (!d.is_object()) throw UsageError("dist must be a JSON object");
    StepDistribution sd;
    try {
        sd = StepDistribution::from_json(d.dump());
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad step distribution: ") + e.what());
    }
    if (sd.k != k)
        throw UsageError("dist has k = " + std::to_string(sd.k) + " but the command uses k = " +
                         std::to_string(k));
    return sd;
}

std::vector<double> x_real_from(const json& cfg, int k) {
    if (!cfg.contains("x")) throw UsageError("x (start point) is required");
    const json& v = cfg.at("x");
    if (!v.is_array() || static_cast<int>(v.size()) != k)
        throw UsageError("x must be an array of " + std::to_string(k) + " numbers");
    std::vector<double> x;
    for (const json& e : v) {
        if (!e.is_number()) throw UsageError("x entries must be numbers");
        x.push_back(e.get<double>());
    }
    return x;
}

std::vector<long long> x_lattice_from(const json& cfg, int k) {
    auto xd = x_real_from(cfg, k);
    std::vector<long long> x;
    for (double v : xd) {
        long long i = static_cast<long long>(std::llround(v));
        if (static_cast<double>(i) != v)
            throw UsageError("x entries must be integers for lattice modes");
        x.push_back(i);
    }
    return x;
}

json point_json(std::span<const long long> x) {
    json a = json::array();
    for (long long v : x) a.push_back(v);
    return a;
}

std::string fnv_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

// ---------------------------------------------------------------- constants

json run_constants(const json& cfg) {
    Chamber z = chamber_from(cfg);
    long long k_lo = z == Chamber::D ? 2 : 1;
    long long k_min, k_max;
    if (cfg.contains("k")) {
        if (cfg.contains("k_min") || cfg.contains("k_max"))
            throw UsageError("give either k or k_min/k_max, not both");
        k_min = k_max = int_field(cfg, "k", 1, 1, 8);
    } else {
        k_min = int_field(cfg, "k_min", k_lo, 1, 8);
        k_max = int_field(cfg, "k_max", 3, 1, 8);
    }
    if (k_min > k_max) throw UsageError("k_min exceeds k_max");
    if (z == Chamber::D && k_min < 2) throw UsageError("chamber D requires k >= 2");

    fs::path dir = resolve_out_dir(cfg.value("out_dir", ""));
    JsonlWriter out(dir / "constants.jsonl");
    json rows = json::array();
    for (long long k = k_min; k <= k_max; ++k) {
        json row;
        row["schema"] = kSchema;
        row["chamber"] = chamber_name(z);
        row["k"] = k;
        row["alpha"] = alpha(z, static_cast<int>(k));
        row["kappa"] = kappa(z, static_cast<int>(k));
        row["K"] = K_constant(z, static_cast<int>(k));
        out.line(row.dump());
        rows.push_back(row);
    }
    json summary;
    summary["schema"] = kSchema;
    summary["command"] = "constants";
    summary["chamber"] = chamber_name(z);
    summary["rows"] = rows;
    summary["file"] = (dir / "constants.jsonl").string();
    return summary;
}

// -------------------------------------------------------------------- tails

struct McTailCurve {
    std::vector<long long> survivors;  // survivors[n] = #{tau > n}, n = 0..n_max
};

McTailCurve mc_tail_curve(const StepDistribution& d, Chamber z, std::span<const double> x,
                          long long n_max, long long samples, std::uint64_t seed, int workers) {
    StepSampler sampler(d);
    const int k = d.k;
    const long long chunk = 4096;
    const long long n_chunks = (samples + chunk - 1) / chunk;
    std::vector<std::vector<long long>> hist(workers);  // hist[w][t] = #{tau == t}, t <= n_max+1
    for (auto& h : hist) h.assign(static_cast<size_t>(n_max) + 2, 0);

    std::atomic<long long> next_chunk{0};
    auto body = [&](int w) {
        std::vector<double> pos(k), step(k);
        for (;;) {
            long long c = next_chunk.fetch_add(1);
            if (c >= n_chunks) break;
            long long lo = c * chunk, hi = std::min(samples, lo + chunk);
            for (long long i = lo; i < hi; ++i) {
                RandomStream stream(seed, static_cast<std::uint64_t>(i));
                std::copy(x.begin(), x.end(), pos.begin());
                long long t = n_max + 1;  // alive through the horizon
                for (long long m = 1; m <= n_max; ++m) {
                    sampler.sample(stream, step);
                    for (int j = 0; j < k; ++j) pos[j] += step[j];
                    if (!contains(z, pos)) {
                        t = m;
                        break;
                    }
                }
                hist[w][static_cast<size_t>(t)]++;
            }
        }
    };
    if (workers <= 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
        for (auto& th : pool) th.join();
    }
    // integer counts: any accumulation order gives the same totals
    std::vector<long long> total(static_cast<size_t>(n_max) + 2, 0);
    for (const auto& h : hist)
        for (size_t t = 0; t < h.size(); ++t) total[t] += h[t];
    McTailCurve out;
    out.survivors.assign(static_cast<size_t>(n_max) + 1, 0);
    long long alive = samples;
    out.survivors[0] = alive;
    for (long long n = 1; n <= n_max; ++n) {
        alive -= total[static_cast<size_t>(n)];
        out.survivors[static_cast<size_t>(n)] = alive;
    }
    return out;
}

// Exact DP advanced to n_max with periodic checkpointing; resumes from a
// compatible checkpoint file when one is present.
DenseDP advance_with_checkpoints(const LatticeWalkSpec& spec, Chamber z,
                                 std::span<const long long> x, long long n_max,
                                 long long checkpoint_every, const fs::path& ckpt,
                                 long long* resumed_at) {
    *resumed_at = 0;
    std::optional<DenseDP> dp;
    if (checkpoint_every > 0 && fs::exists(ckpt)) {
        try {
            DenseDP loaded = DenseDP::load_checkpoint(ckpt.string());
            if (loaded.capacity() == n_max && loaded.step_index() <= n_max) {
                *resumed_at = loaded.step_index();
                dp.emplace(std::move(loaded));
            }
        } catch (const std::exception&) {
            // unreadable checkpoint: fall through and rebuild from scratch
        }
        if (*resumed_at == 0) fs::remove(ckpt);
    }
    if (!dp) dp.emplace(spec, z, x, n_max);
    while (dp->step_index() < n_max) {
        long long left = n_max - dp->step_index();
        long long stride = checkpoint_every > 0 ? std::min(checkpoint_every, left) : left;
        dp->advance(stride);
        if (checkpoint_every > 0 && dp->step_index() < n_max)
            dp->save_checkpoint(ckpt.string());
    }
    if (checkpoint_every > 0) {
        std::error_code ec;
        fs::remove(ckpt, ec);
    }
    return std::move(*dp);
}

json fit_to_json(const TailFit& fit) {
    json j;
    j["slope"] = fit.slope;
    j["prefactor"] = fit.prefactor;
    j["r_squared"] = fit.r_squared;
    j["n_min"] = fit.n_min;
    j["n_max"] = fit.n_max;
    return j;
}

TailFitOptions fit_options_from(const json& cfg, bool even_only_default) {
    TailFitOptions opt;
    opt.even_only = even_only_default;
    if (!cfg.contains("fit")) return opt;
    const json& f = cfg.at("fit");
    if (!f.is_object()) throw UsageError("fit must be a JSON object");
    if (f.contains("n_min")) opt.n_min = int_field(f, "n_min", 0, 1, 1000000000);
    if (f.contains("n_max")) opt.n_max = int_field(f, "n_max", 0, 1, 1000000000);
    if (f.contains("even_only")) {
        if (!f.at("even_only").is_boolean()) throw UsageError("fit.even_only must be a boolean");
        opt.even_only = f.at("even_only").get<bool>();
    }
    return opt;
}

json run_tails(const json& cfg) {
    Chamber z = chamber_from(cfg);
    int k = static_cast<int>(int_field(cfg, "k", 2, 1, 16));
    if (z == Chamber::D && k < 2) throw UsageError("chamber D requires k >= 2");
    std::string mode = cfg.value("mode", "exact");
    if (mode != "exact" && mode != "mc")
        throw UsageError("mode must be \"exact\" or \"mc\"");
    long long n_max = int_field(cfg, "n_max", 2000, 10, 200000);
    StepDistribution dist = dist_from(cfg, k);
    fs::path dir = resolve_out_dir(cfg.value("out_dir", ""));
    std::uint64_t seed = seed_from(cfg);

    json summary;
    summary["schema"] = kSchema;
    summary["command"] = "tails";
    summary["mode"] = mode;
    summary["chamber"] = chamber_name(z);
    summary["k"] = k;
    summary["n_max"] = n_max;
    summary["alpha"] = alpha(z, k);
    summary["kappa"] = kappa(z, k);
    json warnings = json::array();

    std::vector<std::pair<long long, double>> pts;
    fs::path curve_path = dir / "tails_curve.csv";

    if (mode == "exact") {
        if (k > 2) throw UsageError("exact tails supports k <= 2; use mode \"mc\"");
        if (!dist.is_lattice())
            throw UsageError("exact tails needs an integer lattice step distribution");
        LatticeWalkSpec spec = LatticeWalkSpec::from_distribution(dist);
        auto x = x_lattice_from(cfg, k);
        if (!contains_lattice(z, x))
            throw UsageError("start point must lie inside the chamber");
        long long ck_every = int_field(cfg, "checkpoint_every", 500, 0, 1000000);
        std::string canon = std::string("tails|") + chamber_name(z) + "|" + std::to_string(k) +
                            "|" + point_json(x).dump() + "|" + std::to_string(n_max) + "|" +
                            dist.to_json();
        fs::path ckpt = dir / ("ckpt_tails_" + fnv_hex(canon) + ".bin");
        long long resumed_at = 0;
        DenseDP dp = advance_with_checkpoints(spec, z, x, n_max, ck_every, ckpt, &resumed_at);

        const std::string header[] = {"n", "P_survive", "E_h_restricted"};
        CsvWriter csv(curve_path, header);
        const auto& surv = dp.survival_series();
        const auto& resh = dp.restricted_h_series();
        for (long long n = 0; n <= n_max; ++n) {
            const std::string row[] = {std::to_string(n), format_double(surv[n]),
                                       format_double(resh[n])};
            csv.row(row);
            if (n >= 1 && surv[n] > 0.0) pts.push_back({n, surv[n]});
        }
        summary["x"] = point_json(x);
        summary["P_final"] = surv.back();
        summary["E_h_restricted_final"] = resh.back();
        summary["dropped_mass"] = dp.dropped_mass();
        json ckj;
        ckj["file"] = ckpt.string();
        ckj["every"] = ck_every;
        ckj["resumed_at"] = resumed_at;
        summary["checkpoint"] = ckj;
    } else {
        auto x = x_real_from(cfg, k);
        if (!contains(z, x)) throw UsageError("start point must lie inside the chamber");
        long long samples = int_field(cfg, "samples", 1000000, 1, 2000000000);
        int workers = workers_from(cfg);
        auto curve = mc_tail_curve(dist, z, x, n_max, samples, seed, workers);

        const std::string header[] = {"n", "P_survive", "survivors"};
        CsvWriter csv(curve_path, header);
        long long last_alive = 0;
        for (long long n = 0; n <= n_max; ++n) {
            long long s = curve.survivors[static_cast<size_t>(n)];
            if (s > 0) last_alive = n;
            const std::string row[] = {std::to_string(n),
                                       format_double(static_cast<double>(s) /
                                                     static_cast<double>(samples)),
                                       std::to_string(s)};
            csv.row(row);
        }
        if (last_alive < n_max)
            warnings.push_back("no survivors beyond n = " + std::to_string(last_alive) +
                               "; fit window truncated");
        for (long long n = 1; n <= last_alive; ++n) {
            long long s = curve.survivors[static_cast<size_t>(n)];
            if (s > 0)
                pts.push_back({n, static_cast<double>(s) / static_cast<double>(samples)});
        }
        json xs = json::array();
        for (double v : x) xs.push_back(v);
        summary["x"] = xs;
        summary["samples"] = samples;
        summary["seed"] = seed;
    }

    bool parity = dist.is_lattice() && dist.all_offsets_odd();
    TailFitOptions opt = fit_options_from(cfg, parity);
    try {
        summary["fit"] = fit_to_json(tail_fit(pts, opt));
    } catch (const std::invalid_argument& e) {
        warnings.push_back(std::string("tail fit skipped: ") + e.what());
    }
    summary["curve_file"] = curve_path.string();
    summary["warnings"] = warnings;
    return summary;
}

// ---------------------------------------------------------------- transform

json run_transform_build_v(const json& cfg, const fs::path& dir) {
    Chamber z = chamber_from(cfg);
    int k = static_cast<int>(int_field(cfg, "k", 2, 1, 2));
    StepDistribution dist = dist_from(cfg, k);
    if (!dist.is_lattice())
        throw UsageError("V tables need an integer lattice step distribution");
    LatticeWalkSpec spec = LatticeWalkSpec::from_distribution(dist);
    VTableOptions opt;
    opt.radius = int_field(cfg, "radius", opt.radius, 5, 4000);
    opt.horizon = int_field(cfg, "horizon", opt.horizon, 1, 10000000);
    VTable table = VTable::build(spec, z, opt);

    std::string name = cfg.value("file", "");
    if (name.empty())
        name = std::string("vtable_") + chamber_name(z) + std::to_string(k) + "_r" +
               std::to_string(opt.radius) + "_h" + std::to_string(opt.horizon) + ".csv";
    fs::path file = dir / name;
    table.save_csv(file.string());

    json probes = json::array();
    for (long long shift = 0; shift < 3; ++shift) {
        std::vector<long long> p;
        for (int i = 1; i <= k; ++i) p.push_back(i + shift);
        if (!contains_lattice(z, p)) continue;
        json pj;
        pj["x"] = point_json(p);
        pj["V"] = table.value(p);
        probes.push_back(pj);
    }
    json summary;
    summary["schema"] = kSchema;
    summary["command"] = "transform";
    summary["task"] = "build-v";
    summary["chamber"] = chamber_name(z);
    summary["k"] = k;
    summary["radius"] = opt.radius;
    summary["horizon"] = opt.horizon;
    summary["stored_count"] = table.stored_count();
    summary["file"] = file.string();
    summary["probes"] = probes;
    return summary;
}

json run_transform_tilde(const json& cfg, const fs::path& dir) {
    int k = static_cast<int>(int_field(cfg, "k", 2, 1, 16));
    StepDistribution dist = dist_from(cfg, k);
    long long horizon = int_field(cfg, "horizon", 2000, 1, 100000000);
    long long samples = int_field(cfg, "samples", 100000, 1, 2000000000);
    std::uint64_t seed = seed_from(cfg);
    int workers = workers_from(cfg);

    std::vector<std::vector<long long>> grid;
    if (cfg.contains("grid")) {
        const json& g = cfg.at("grid");
        if (!g.is_array() || g.empty()) throw UsageError("grid must be a nonempty array");
        for (const json& p : g) {
            if (!p.is_array() || static_cast<int>(p.size()) != k)
                throw UsageError("grid points must be arrays of " + std::to_string(k) +
                                 " integers");
            std::vector<long long> x;
            for (const json& e : p) {
                if (!e.is_number_integer()) throw UsageError("grid entries must be integers");
                x.push_back(e.get<long long>());
            }
            grid.push_back(std::move(x));
        }
    } else {
        for (long long i = 1; i <= 5; ++i) {
            std::vector<long long> x;
            for (int j = 0; j < k; ++j) x.push_back(i + j);
            grid.push_back(std::move(x));
        }
    }
    for (const auto& x : grid)
        if (!contains_lattice(Chamber::C, x))
            throw UsageError("grid point " + point_json(x).dump() +
                             " is not inside the chamber");

    fs::path file = dir / "transform_tilde.jsonl";
    JsonlWriter out(file);
    for (size_t i = 0; i < grid.size(); ++i) {
        // disjoint stream ranges per grid point
        auto est = tilde_V_C(dist, grid[i], horizon, samples, seed,
                             static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(samples),
                             workers);
        json rec;
        rec["schema"] = kSchema;
        rec["x"] = point_json(grid[i]);
        rec["estimate"] = est.value;
        rec["std_error"] = est.std_error;
        rec["horizon"] = est.truncation_horizon;
        rec["samples"] = est.n_samples;
        rec["seed"] = seed;
        rec["unfinished_fraction"] = est.unfinished_fraction;
        out.line(rec.dump());
    }
    json summary;
    summary["schema"] = kSchema;
    summary["command"] = "transform";
    summary["task"] = "tilde-c";
    summary["k"] = k;
    summary["horizon"] = horizon;
    summary["samples"] = samples;
    summary["seed"] = seed;
    summary["points"] = grid.size();
    summary["file"] = file.string();
    return summary;
}

json run_transform_sample(const json& cfg, const fs::path& dir) {
    Chamber z = chamber_from(cfg);
    int k = static_cast<int>(int_field(cfg, "k", 2, 1, 2));
    StepDistribution dist = dist_from(cfg, k);
    if (!dist.is_lattice())
        throw UsageError("conditioned-path sampling needs an integer lattice law");
    LatticeWalkSpec spec = LatticeWalkSpec::from_distribution(dist);
    auto x = x_lattice_from(cfg, k);
    if (!contains_lattice(z, x)) throw UsageError("start point must lie inside the chamber");
    long long n = int_field(cfg, "n", 100, 1, 100000);
    long long paths = int_field(cfg, "paths", 1, 1, 100000);
    std::uint64_t seed = seed_from(cfg);

    long long reach = 0;
    for (long long v : x) reach = std::max(reach, std::llabs(v));
    reach += spec.max_offset() * (n + 1);
    VTableOptions opt;
    opt.radius = int_field(cfg, "v_radius", std::max<long long>(reach + 1, 5), 5, 4000);
    opt.horizon = int_field(cfg, "v_horizon", 2000, 1, 10000000);
    auto table = std::make_shared<const VTable>(VTable::build(spec, z, opt));
    auto V = HFunction::from_table(table);

    fs::path file = dir / "transform_paths.jsonl";
    JsonlWriter out(file);
    RandomStream stream(seed, 0);
    double worst_residual = 0.0;
    bool all_inside = true;
    for (long long p = 0; p < paths; ++p) {
        auto cp = sample_conditioned_path(dist, z, V, x, n, stream);
        json positions = json::array();
        for (long long m = 0; m <= n; ++m) {
            auto pos = cp.path.position(m);
            std::vector<long long> pi;
            for (double c : pos) pi.push_back(static_cast<long long>(std::llround(c)));
            if (!contains_lattice(z, pi)) all_inside = false;
            positions.push_back(point_json(pi));
        }
        worst_residual = std::max(worst_residual, cp.max_abs_residual);
        json rec;
        rec["schema"] = kSchema;
        rec["path_index"] = p;
        rec["start"] = point_json(x);
        rec["n"] = n;
        rec["positions"] = positions;
        rec["max_abs_residual"] = cp.max_abs_residual;
        out.line(rec.dump());
    }
    json summary;
    summary["schema"] = kSchema;
    summary["command"] = "transform";
    summary["task"] = "sample";
    summary["chamber"] = chamber_name(z);
    summary["k"] = k;
    summary["x"] = point_json(x);
    summary["n"] = n;
    summary["paths"] = paths;
    summary["seed"] = seed;
    summary["v_radius"] = opt.radius;
    summary["v_horizon"] = opt.horizon;
    summary["all_in_chamber"] = all_inside;
    summary["max_abs_residual"] = worst_residual;
    summary["file"] = file.string();
    return summary;
}

json run_transform(const json& cfg) {
    fs::path dir = resolve_out_dir(cfg.value("out_dir", ""));
    std::string task = cfg.value("task", "");
    if (task == "build-v") return run_transform_build_v(cfg, dir);
    if (task == "tilde-c") return run_transform_tilde(cfg, dir);
    if (task == "sample") return run_transform_sample(cfg, dir);
    throw UsageError("task must be one of \"build-v\", \"tilde-c\", \"sample\"");
}

// -------------------------------------------------------------------- limit

// radial moments E[|y|^r] of y = S(n)/sqrt(n), matched against the limiting
// measure; orders 1 and 2
struct MomentSpec {
    std::string name;
    int order;
};

const std::vector<MomentSpec>& moment_specs() {
    static const std::vector<MomentSpec> specs = {{"E[|y|]", 1}, {"E[|y|^2]", 2}};
    return specs;
}

double radial_moment(std::span<const double> y, int order) {
    double s = 0.0;
    for (double v : y) s += v * v;
    double norm = std::sqrt(s);
    return order == 2 ? s : std::pow(norm, order);
}

json run_limit(const json& cfg) {
    Chamber z = chamber_from(cfg);
    int k = static_cast<int>(int_field(cfg, "k", 2, 1, 16));
    if (z == Chamber::D && k < 2) throw UsageError("chamber D requires k >= 2");
    long long n = int_field(cfg, "n", 2000, 10, 200000);  // < 10 is degenerate: refused
    std::string mode = cfg.value("mode", "exact");
    if (mode != "exact" && mode != "mc")
        throw UsageError("mode must be \"exact\" or \"mc\"");
    StepDistribution dist = dist_from(cfg, k);
    fs::path dir = resolve_out_dir(cfg.value("out_dir", ""));
    std::uint64_t seed = seed_from(cfg);
    const double sqn = std::sqrt(static_cast<double>(n));

    const auto& specs = moment_specs();
    json summary;
    summary["schema"] = kSchema;
    summary["command"] = "limit";
    summary["mode"] = mode;
    summary["chamber"] = chamber_name(z);
    summary["k"] = k;
    summary["n"] = n;
    json warnings = json::array();

    struct Row {
        std::string name;
        double walk = 0.0, walk_err = 0.0, mu = 0.0, mu_err = 0.0;
    };
    std::vector<Row> rows;
    {
        std::vector<int> orders;
        for (const auto& ms : specs) orders.push_back(ms.order);
        auto ests = mu_moments(z, k, orders);
        for (size_t i = 0; i < specs.size(); ++i)
            rows.push_back({specs[i].name, 0.0, 0.0, ests[i].value, ests[i].error});
    }

    if (mode == "exact") {
        if (k > 2) throw UsageError("exact limit supports k <= 2; use mode \"mc\"");
        if (!dist.is_lattice())
            throw UsageError("exact limit needs an integer lattice step distribution");
        LatticeWalkSpec spec = LatticeWalkSpec::from_distribution(dist);
        auto x = x_lattice_from(cfg, k);
        if (!contains_lattice(z, x))
            throw UsageError("start point must lie inside the chamber");
        long long ck_every = int_field(cfg, "checkpoint_every", 500, 0, 1000000);
        std::string canon = std::string("limit|") + chamber_name(z) + "|" + std::to_string(k) +
                            "|" + point_json(x).dump() + "|" + std::to_string(n) + "|" +
                            dist.to_json();
        fs::path ckpt = dir / ("ckpt_limit_" + fnv_hex(canon) + ".bin");
        long long resumed_at = 0;
        DenseDP dp = advance_with_checkpoints(spec, z, x, n, ck_every, ckpt, &resumed_at);
        double surv = dp.survival();
        if (!(surv > 0.0))
            throw std::domain_error("zero survival mass at n = " + std::to_string(n));
        for (size_t i = 0; i < specs.size(); ++i) {
            double num = dp.restricted_expectation([&](std::span<const long long> pt) {
                std::vector<double> y(pt.size());
                for (size_t j = 0; j < y.size(); ++j)
                    y[j] = static_cast<double>(pt[j]) / sqn;
                return radial_moment(y, specs[i].order);
            });
            rows[i].walk = num / surv;
            rows[i].walk_err = 0.0;  // exact DP values; no sampling error
        }
        summary["x"] = point_json(x);
        summary["P_survive"] = surv;
        json ckj;
        ckj["file"] = ckpt.string();
        ckj["every"] = ck_every;
        ckj["resumed_at"] = resumed_at;
        summary["checkpoint"] = ckj;
    } else {
        auto x = x_real_from(cfg, k);
        if (!contains(z, x)) throw UsageError("start point must lie inside the chamber");
        long long samples = int_field(cfg, "samples", 100000, 1, 2000000000);
        int workers = workers_from(cfg);
        StepSampler sampler(dist);
        const long long chunk = 4096;
        const long long n_chunks = (samples + chunk - 1) / chunk;
        const size_t nm = specs.size();
        // per-chunk partial sums, combined in chunk order for determinism
        std::vector<long long> chunk_survivors(n_chunks, 0);
        std::vector<std::vector<double>> chunk_sum(n_chunks), chunk_sum2(n_chunks);
        std::atomic<long long> next_chunk{0};
        auto body = [&]() {
            std::vector<double> pos(k), step(k), y(k);
            for (;;) {
                long long c = next_chunk.fetch_add(1);
                if (c >= n_chunks) break;
                chunk_sum[c].assign(nm, 0.0);
                chunk_sum2[c].assign(nm, 0.0);
                long long lo = c * chunk, hi = std::min(samples, lo + chunk);
                for (long long i = lo; i < hi; ++i) {
                    RandomStream stream(seed, static_cast<std::uint64_t>(i));
                    std::copy(x.begin(), x.end(), pos.begin());
                    bool alive = true;
                    for (long long m = 1; m <= n && alive; ++m) {
                        sampler.sample(stream, step);
                        for (int j = 0; j < k; ++j) pos[j] += step[j];
                        alive = contains(z, pos);
                    }
                    if (!alive) continue;
                    chunk_survivors[c]++;
                    for (int j = 0; j < k; ++j) y[j] = pos[j] / sqn;
                    for (size_t q = 0; q < nm; ++q) {
                        double v = radial_moment(y, specs[q].order);
                        chunk_sum[c][q] += v;
                        chunk_sum2[c][q] += v * v;
                    }
                }
            }
        };
        if (workers <= 1) {
            body();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(body);
            for (auto& th : pool) th.join();
        }
        long long survivors = 0;
        std::vector<double> sum(nm, 0.0), sum2(nm, 0.0);
        for (long long c = 0; c < n_chunks; ++c) {
            survivors += chunk_survivors[c];
            for (size_t q = 0; q < nm; ++q) {
                sum[q] += chunk_sum[c][q];
                sum2[q] += chunk_sum2[c][q];
            }
        }
        if (survivors == 0)
            throw std::domain_error("no surviving paths at n = " + std::to_string(n) +
                                    "; increase samples or use exact mode");
        if (survivors < 30)
            warnings.push_back("only " + std::to_string(survivors) +
                               " surviving paths; moment errors are unreliable");
        for (size_t q = 0; q < nm; ++q) {
            double mean = sum[q] / static_cast<double>(survivors);
            double var = sum2[q] / static_cast<double>(survivors) - mean * mean;
            if (survivors > 1)
                var *= static_cast<double>(survivors) / static_cast<double>(survivors - 1);
            rows[q].walk = mean;
            rows[q].walk_err = std::sqrt(std::max(var, 0.0) / static_cast<double>(survivors));
        }
        json xs = json::array();
        for (double v : x) xs.push_back(v);
        summary["x"] = xs;
        summary["samples"] = samples;
        summary["seed"] = seed;
        summary["survivors"] = survivors;
    }

    fs::path file = dir / "limit_moments.csv";
    const std::string header[] = {"moment", "walk_value", "walk_std_error", "mu_value",
                                  "mu_error"};
    CsvWriter csv(file, header);
    json jrows = json::array();
    for (const auto& r : rows) {
        const std::string row[] = {r.name, format_double(r.walk), format_double(r.walk_err),
                                   format_double(r.mu), format_double(r.mu_err)};
        csv.row(row);
        json jr;
        jr["moment"] = r.name;
        jr["walk_value"] = r.walk;
        jr["walk_std_error"] = r.walk_err;
        jr["mu_value"] = r.mu;
        jr["mu_error"] = r.mu_err;
        jrows.push_back(jr);
    }
    summary["rows"] = jrows;
    summary["file"] = file.string();
    summary["warnings"] = warnings;
    return summary;
}

}  // namespace

std::string run_command(const std::string& command, const std::string& config_json) {
    json cfg = parse_config(config_json);
    json summary;
    if (command == "constants") summary = run_constants(cfg);
    else if (command == "tails") summary = run_tails(cfg);
    else if (command == "transform") summary = run_transform(cfg);
    else if (command == "limit") summary = run_limit(cfg);
    else
        throw UsageError("unknown command \"" + command +
                         "\" (expected constants, tails, transform, or limit)");
    return summary.dump(2);
}

}  // namespace weylwalk
