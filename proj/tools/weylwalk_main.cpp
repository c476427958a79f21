// Command-line driver for the weylwalk shared library. Flags are collected
// into a JSON configuration (optionally seeded from --config FILE; explicit
// flags win) and dispatched through the C API.
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "weylwalk.h"

namespace {

using nlohmann::json;

// numbers that are exactly integral are emitted as JSON integers
json number_token(double v) {
    long long i = static_cast<long long>(v);
    if (static_cast<double>(i) == v) return json(i);
    return json(v);
}

json parse_point(const std::string& text) {
    json arr = json::array();
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            arr.push_back(number_token(std::stod(tok)));
        } catch (const std::exception&) {
            throw CLI::ValidationError("points must be comma-separated numbers, got \"" + text +
                                       "\"");
        }
    }
    if (arr.empty()) throw CLI::ValidationError("empty point \"" + text + "\"");
    return arr;
}

json parse_grid(const std::string& text) {
    json grid = json::array();
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ';'))
        if (!tok.empty()) grid.push_back(parse_point(tok));
    if (grid.empty()) throw CLI::ValidationError("empty grid \"" + text + "\"");
    return grid;
}

json parse_dist(const std::string& text) {
    std::string body = text;
    size_t first = body.find_first_not_of(" \t");
    if (first == std::string::npos || body[first] != '{') {
        std::ifstream in(text);
        if (!in) throw CLI::ValidationError("cannot read distribution file " + text);
        std::stringstream buf;
        buf << in.rdbuf();
        body = buf.str();
    }
    json d = json::parse(body, nullptr, false);
    if (d.is_discarded() || !d.is_object())
        throw CLI::ValidationError("distribution must be a JSON object");
    return d;
}

// "2" or "1..3"
void parse_k_range(const std::string& text, json& cfg) {
    auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            cfg["k"] = std::stoll(text);
        } else {
            cfg["k_min"] = std::stoll(text.substr(0, dots));
            cfg["k_max"] = std::stoll(text.substr(dots + 2));
        }
    } catch (const std::exception&) {
        throw CLI::ValidationError("--k expects an integer or a range like 1..3, got \"" + text +
                                   "\"");
    }
}

struct CommonFlags {
    std::optional<std::string> config_file;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_file, "JSON config file; flags override its fields");
        cmd->add_option("--out-dir", out_dir,
                        "output directory (default: $WEYLWALK_OUT_DIR or .)");
        cmd->add_option("--seed", seed, "master RNG seed (default 0)");
        cmd->add_option("--workers", workers, "worker threads (results do not depend on this)");
    }

    json base_config() const {
        json cfg = json::object();
        if (config_file) {
            std::ifstream in(*config_file);
            if (!in) throw CLI::ValidationError("cannot read config file " + *config_file);
            std::stringstream buf;
            buf << in.rdbuf();
            json j = json::parse(buf.str(), nullptr, false);
            if (j.is_discarded() || !j.is_object())
                throw CLI::ValidationError("config file must hold a JSON object");
            cfg = j;
        }
        if (out_dir) cfg["out_dir"] = *out_dir;
        if (seed) cfg["seed"] = *seed;
        if (workers) cfg["workers"] = *workers;
        return cfg;
    }
};

int dispatch(const std::string& command, const json& cfg) {
    char* summary = nullptr;
    ww_status st = ww_run_command(command.c_str(), cfg.dump().c_str(), &summary);
    if (st != WW_OK) {
        std::fprintf(stderr, "error: %s\n", ww_last_error());
        return static_cast<int>(st);
    }
    std::printf("%s\n", summary);
    ww_string_free(summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weylwalk: random walks conditioned to stay in Weyl chambers"};
    app.set_version_flag("--version", ww_version());
    app.require_subcommand(1);

    // ------------------------------------------------------------ constants
    auto* c_cmd = app.add_subcommand("constants",
                                     "tail constants {k, alpha, kappa, K} as JSON rows");
    CommonFlags c_common;
    std::optional<std::string> c_chamber, c_krange;
    c_cmd->add_option("--chamber", c_chamber, "chamber, C or D (default C)");
    c_cmd->add_option("--k", c_krange, "k or range, e.g. 2 or 1..3");
    c_common.attach(c_cmd);

    // ---------------------------------------------------------------- tails
    auto* t_cmd = app.add_subcommand(
        "tails", "survival curve P(tau > n) with a log-log tail fit;\n"
                 "writes tails_curve.csv (exact: n,P_survive,E_h_restricted; "
                 "mc: n,P_survive,survivors)");
    CommonFlags t_common;
    std::optional<std::string> t_chamber, t_mode, t_x, t_dist;
    std::optional<long long> t_k, t_nmax, t_samples, t_fitmin, t_fitmax, t_ckevery;
    std::optional<bool> t_even;
    t_cmd->add_option("--chamber", t_chamber, "chamber, C or D (default C)");
    t_cmd->add_option("--k", t_k, "dimension (default 2)");
    t_cmd->add_option("--x", t_x, "start point, e.g. 1,2")->required(false);
    t_cmd->add_option("--mode", t_mode, "exact (lattice DP) or mc (default exact)");
    t_cmd->add_option("--n-max", t_nmax, "largest n (default 2000)");
    t_cmd->add_option("--samples", t_samples, "MC trajectories (default 1000000)");
    t_cmd->add_option("--dist", t_dist, "step law as inline JSON or a file path");
    t_cmd->add_option("--fit-min", t_fitmin, "fit window lower n");
    t_cmd->add_option("--fit-max", t_fitmax, "fit window upper n");
    t_cmd->add_flag("--even-only,!--odd-too", t_even,
                    "fit even n only (default: on for odd-offset lattice walks)");
    t_cmd->add_option("--checkpoint-every", t_ckevery,
                      "DP checkpoint period in layers, 0 disables (default 500)");
    t_common.attach(t_cmd);

    // ------------------------------------------------------------ transform
    auto* x_cmd = app.add_subcommand(
        "transform", "V tables, conditioned path sampling, and the product-form\n"
                     "alternate transform grid");
    CommonFlags x_common;
    bool x_buildv = false, x_tilde = false, x_sample = false;
    std::optional<std::string> x_task, x_chamber, x_x, x_grid, x_dist, x_file;
    std::optional<long long> x_k, x_radius, x_horizon, x_samples, x_n, x_paths, x_vradius,
        x_vhorizon;
    x_cmd->add_flag("--build-v", x_buildv, "build and save a V table (task build-v)");
    x_cmd->add_flag("--tilde-c", x_tilde, "alternate-transform grid (task tilde-c)");
    x_cmd->add_flag("--sample", x_sample, "sample conditioned paths (task sample)");
    x_cmd->add_option("--task", x_task, "build-v | tilde-c | sample");
    x_cmd->add_option("--chamber", x_chamber, "chamber, C or D (default C)");
    x_cmd->add_option("--k", x_k, "dimension (default 2)");
    x_cmd->add_option("--x", x_x, "start point for sampling, e.g. 1,2");
    x_cmd->add_option("--grid", x_grid, "tilde-c grid, e.g. 1,2;2,3;3,5");
    x_cmd->add_option("--radius", x_radius, "V-table window radius (default 200)");
    x_cmd->add_option("--horizon", x_horizon, "V-table DP depth / MC horizon");
    x_cmd->add_option("--samples", x_samples, "MC samples per grid point (default 100000)");
    x_cmd->add_option("--n", x_n, "conditioned path length (default 100)");
    x_cmd->add_option("--paths", x_paths, "number of conditioned paths (default 1)");
    x_cmd->add_option("--v-radius", x_vradius, "table radius for path sampling");
    x_cmd->add_option("--v-horizon", x_vhorizon, "table depth for path sampling");
    x_cmd->add_option("--file", x_file, "output file name override (build-v)");
    x_cmd->add_option("--dist", x_dist, "step law as inline JSON or a file path");
    x_common.attach(x_cmd);

    // ------------------------------------------------------------------ limit
    auto* l_cmd = app.add_subcommand(
        "limit", "conditioned moments of S(n)/sqrt(n) against the limiting measure;\n"
                 "writes limit_moments.csv (moment,walk_value,walk_std_error,mu_value,mu_error)");
    CommonFlags l_common;
    std::optional<std::string> l_chamber, l_mode, l_x, l_dist;
    std::optional<long long> l_k, l_n, l_samples, l_ckevery;
    l_cmd->add_option("--chamber", l_chamber, "chamber, C or D (default C)");
    l_cmd->add_option("--k", l_k, "dimension (default 2)");
    l_cmd->add_option("--x", l_x, "start point, e.g. 1,2");
    l_cmd->add_option("--n", l_n, "time index (default 2000; refuses n < 10)");
    l_cmd->add_option("--mode", l_mode, "exact (lattice DP, k <= 2) or mc");
    l_cmd->add_option("--samples", l_samples, "MC trajectories (default 100000)");
    l_cmd->add_option("--dist", l_dist, "step law as inline JSON or a file path");
    l_cmd->add_option("--checkpoint-every", l_ckevery,
                      "DP checkpoint period in layers, 0 disables (default 500)");
    l_common.attach(l_cmd);

    try {
        app.parse(argc, argv);

        if (c_cmd->parsed()) {
            json cfg = c_common.base_config();
            if (c_chamber) cfg["chamber"] = *c_chamber;
            if (c_krange) parse_k_range(*c_krange, cfg);
            return dispatch("constants", cfg);
        }
        if (t_cmd->parsed()) {
            json cfg = t_common.base_config();
            if (t_chamber) cfg["chamber"] = *t_chamber;
            if (t_k) cfg["k"] = *t_k;
            if (t_x) cfg["x"] = parse_point(*t_x);
            if (t_mode) cfg["mode"] = *t_mode;
            if (t_nmax) cfg["n_max"] = *t_nmax;
            if (t_samples) cfg["samples"] = *t_samples;
            if (t_dist) cfg["dist"] = parse_dist(*t_dist);
            if (t_ckevery) cfg["checkpoint_every"] = *t_ckevery;
            if (t_fitmin) cfg["fit"]["n_min"] = *t_fitmin;
            if (t_fitmax) cfg["fit"]["n_max"] = *t_fitmax;
            if (t_even) cfg["fit"]["even_only"] = *t_even;
            return dispatch("tails", cfg);
        }
        if (x_cmd->parsed()) {
            json cfg = x_common.base_config();
            int picked = (x_buildv ? 1 : 0) + (x_tilde ? 1 : 0) + (x_sample ? 1 : 0) +
                         (x_task ? 1 : 0);
            if (picked > 1)
                throw CLI::ValidationError("give exactly one of --build-v/--tilde-c/--sample");
            if (x_buildv) cfg["task"] = "build-v";
            if (x_tilde) cfg["task"] = "tilde-c";
            if (x_sample) cfg["task"] = "sample";
            if (x_task) cfg["task"] = *x_task;
            if (x_chamber) cfg["chamber"] = *x_chamber;
            if (x_k) cfg["k"] = *x_k;
            if (x_x) cfg["x"] = parse_point(*x_x);
            if (x_grid) cfg["grid"] = parse_grid(*x_grid);
            if (x_radius) cfg["radius"] = *x_radius;
            if (x_horizon) cfg["horizon"] = *x_horizon;
            if (x_samples) cfg["samples"] = *x_samples;
            if (x_n) cfg["n"] = *x_n;
            if (x_paths) cfg["paths"] = *x_paths;
            if (x_vradius) cfg["v_radius"] = *x_vradius;
            if (x_vhorizon) cfg["v_horizon"] = *x_vhorizon;
            if (x_file) cfg["file"] = *x_file;
            if (x_dist) cfg["dist"] = parse_dist(*x_dist);
            return dispatch("transform", cfg);
        }
        if (l_cmd->parsed()) {
            json cfg = l_common.base_config();
            if (l_chamber) cfg["chamber"] = *l_chamber;
            if (l_k) cfg["k"] = *l_k;
            if (l_x) cfg["x"] = parse_point(*l_x);
            if (l_n) cfg["n"] = *l_n;
            if (l_mode) cfg["mode"] = *l_mode;
            if (l_samples) cfg["samples"] = *l_samples;
            if (l_dist) cfg["dist"] = parse_dist(*l_dist);
            if (l_ckevery) cfg["checkpoint_every"] = *l_ckevery;
            return dispatch("limit", cfg);
        }
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems exit 2; --help/--version exit 0
    }
    return 0;
}
