#include "weylwalk.h"

#include <cstring>
#include <exception>
#include <span>
#include <string>

#include "weylwalk/asymptotics.hpp"
#include "weylwalk/chambers.hpp"
#include "weylwalk/distributions.hpp"
#include "weylwalk/experiments.hpp"
#include "weylwalk/lattice.hpp"
#include "weylwalk/vtable.hpp"

namespace {

thread_local std::string g_last_error;

ww_status fail(ww_status code, const char* what) {
    g_last_error = what ? what : "unknown error";
    return code;
}

// Maps the library's exception taxonomy onto status codes: precondition and
// configuration problems are usage errors; domain errors are violated
// numerical contracts; anything else is reported as a contract violation too.
template <typename F>
ww_status guarded(F&& f) {
    try {
        f();
        return WW_OK;
    } catch (const weylwalk::UsageError& e) {
        return fail(WW_ERR_USAGE, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(WW_ERR_USAGE, e.what());
    } catch (const std::domain_error& e) {
        return fail(WW_ERR_CONTRACT, e.what());
    } catch (const std::exception& e) {
        return fail(WW_ERR_CONTRACT, e.what());
    }
}

weylwalk::Chamber parse_chamber_arg(const char* chamber) {
    if (!chamber) throw std::invalid_argument("chamber is null");
    return weylwalk::parse_chamber(chamber);
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct ww_vtable {
    weylwalk::VTable table;
};

extern "C" {

const char* ww_version(void) { return "1.0.0"; }

const char* ww_last_error(void) { return g_last_error.c_str(); }

ww_status ww_h(const char* chamber, int k, const double* x, double* out) {
    return guarded([&] {
        if (!x || !out) throw std::invalid_argument("x and out must not be null");
        if (k < 1) throw std::invalid_argument("k must be >= 1");
        weylwalk::Chamber z = parse_chamber_arg(chamber);
        *out = weylwalk::h(z, std::span<const double>(x, static_cast<size_t>(k)));
    });
}

ww_status ww_alpha(const char* chamber, int k, double* out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("out must not be null");
        *out = weylwalk::alpha(parse_chamber_arg(chamber), k);
    });
}

ww_status ww_kappa(const char* chamber, int k, double* out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("out must not be null");
        *out = weylwalk::kappa(parse_chamber_arg(chamber), k);
    });
}

ww_status ww_k_constant(const char* chamber, int k, double* out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("out must not be null");
        *out = weylwalk::K_constant(parse_chamber_arg(chamber), k);
    });
}

ww_status ww_bm_tail(const char* chamber, int k, const double* y, double t, double* out) {
    return guarded([&] {
        if (!y || !out) throw std::invalid_argument("y and out must not be null");
        if (k < 1) throw std::invalid_argument("k must be >= 1");
        weylwalk::Chamber z = parse_chamber_arg(chamber);
        *out = weylwalk::bm_tail(z, std::span<const double>(y, static_cast<size_t>(k)), t);
    });
}

ww_status ww_vtable_build(const char* dist_json, const char* chamber, long long radius,
                          long long horizon, ww_vtable** out) {
    return guarded([&] {
        if (!dist_json || !out) throw std::invalid_argument("dist_json and out must not be null");
        auto d = weylwalk::StepDistribution::from_json(dist_json);
        auto spec = weylwalk::LatticeWalkSpec::from_distribution(d);
        weylwalk::VTableOptions opt;
        opt.radius = radius;
        opt.horizon = horizon;
        auto table = weylwalk::VTable::build(spec, parse_chamber_arg(chamber), opt);
        *out = new ww_vtable{std::move(table)};
    });
}

ww_status ww_vtable_load_csv(const char* path, ww_vtable** out) {
    return guarded([&] {
        if (!path || !out) throw std::invalid_argument("path and out must not be null");
        *out = new ww_vtable{weylwalk::VTable::load_csv(path)};
    });
}

ww_status ww_vtable_save_csv(const ww_vtable* table, const char* path) {
    return guarded([&] {
        if (!table || !path) throw std::invalid_argument("table and path must not be null");
        table->table.save_csv(path);
    });
}

ww_status ww_vtable_value(const ww_vtable* table, const long long* x, int k, double* out) {
    return guarded([&] {
        if (!table || !x || !out)
            throw std::invalid_argument("table, x and out must not be null");
        if (k < 1) throw std::invalid_argument("k must be >= 1");
        *out = table->table.value(std::span<const long long>(x, static_cast<size_t>(k)));
    });
}

void ww_vtable_free(ww_vtable* table) { delete table; }

ww_status ww_run_command(const char* command, const char* config_json, char** summary_json) {
    return guarded([&] {
        if (!command) throw std::invalid_argument("command is null");
        if (!summary_json) throw std::invalid_argument("summary_json is null");
        std::string summary =
            weylwalk::run_command(command, config_json ? config_json : "");
        *summary_json = dup_string(summary);
    });
}

void ww_string_free(char* s) { delete[] s; }

}  // extern "C"
