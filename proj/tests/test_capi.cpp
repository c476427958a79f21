#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "weylwalk.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kRademacher1 = "{\"kind\":\"discrete-atoms\",\"k\":1,\"atoms\":[[1,1,1,2],[-1,1,1,2]]}";

std::string fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / "weylwalk_capi_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

}  // namespace

TEST_CASE("version and error strings are always available") {
    REQUIRE(ww_version() != nullptr);
    CHECK(std::strcmp(ww_version(), "1.0.0") == 0);
    REQUIRE(ww_last_error() != nullptr);
}

TEST_CASE("ww_h evaluates every chamber polynomial") {
    double out = 0.0;
    const double x12[] = {1.0, 2.0};
    REQUIRE(ww_h("C", 2, x12, &out) == WW_OK);
    CHECK(out == 6.0);  // (x2^2 - x1^2) * x1 * x2
    REQUIRE(ww_h("D", 2, x12, &out) == WW_OK);
    CHECK(out == 3.0);  // x2^2 - x1^2
    const double x13[] = {1.0, 3.0};
    REQUIRE(ww_h("A", 2, x13, &out) == WW_OK);
    CHECK(out == 2.0);  // x2 - x1
    const double x5[] = {5.0};
    REQUIRE(ww_h("C", 1, x5, &out) == WW_OK);
    CHECK(out == 5.0);

    CHECK(ww_h("Q", 2, x12, &out) == WW_ERR_USAGE);
    CHECK(ww_last_error()[0] != '\0');
    CHECK(ww_h("D", 1, x5, &out) == WW_ERR_USAGE);
    CHECK(ww_h(nullptr, 2, x12, &out) == WW_ERR_USAGE);
    CHECK(ww_h("C", 2, nullptr, &out) == WW_ERR_USAGE);
    CHECK(ww_h("C", 2, x12, nullptr) == WW_ERR_USAGE);
}

TEST_CASE("tail constants match their closed forms") {
    double a = 0.0, kap = 0.0, K = 0.0;
    REQUIRE(ww_alpha("C", 2, &a) == WW_OK);
    CHECK(a == 4.0);
    REQUIRE(ww_alpha("D", 2, &a) == WW_OK);
    CHECK(a == 2.0);
    REQUIRE(ww_alpha("D", 3, &a) == WW_OK);
    CHECK(a == 6.0);

    REQUIRE(ww_kappa("C", 1, &kap) == WW_OK);
    CHECK(kap == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
    REQUIRE(ww_kappa("C", 2, &kap) == WW_OK);
    CHECK(kap == doctest::Approx(1.0 / (3.0 * M_PI)).epsilon(1e-12));
    REQUIRE(ww_kappa("D", 2, &kap) == WW_OK);
    CHECK(kap == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-12));

    REQUIRE(ww_k_constant("C", 1, &K) == WW_OK);
    REQUIRE(ww_kappa("C", 1, &kap) == WW_OK);
    CHECK(K == doctest::Approx(kap).epsilon(1e-3));
    CHECK(K > 0.0);

    CHECK(ww_alpha("A", 2, &a) == WW_ERR_USAGE);
    CHECK(ww_alpha("D", 1, &a) == WW_ERR_USAGE);
    CHECK(ww_kappa("C", 0, &kap) == WW_ERR_USAGE);
    CHECK(ww_alpha("C", 2, nullptr) == WW_ERR_USAGE);
}

TEST_CASE("ww_bm_tail applies the power law in t") {
    double out1 = 0.0, out4 = 0.0;
    const double y1[] = {1.0};
    REQUIRE(ww_bm_tail("C", 1, y1, 1.0, &out1) == WW_OK);
    CHECK(out1 == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
    REQUIRE(ww_bm_tail("C", 1, y1, 4.0, &out4) == WW_OK);
    CHECK(out4 == doctest::Approx(out1 / 2.0).epsilon(1e-12));  // t^{-1/2}

    const double y12[] = {1.0, 2.0};
    double d = 0.0;
    REQUIRE(ww_bm_tail("D", 2, y12, 1.0, &d) == WW_OK);
    CHECK(d == doctest::Approx(3.0 / (4.0 * M_PI)).epsilon(1e-12));

    CHECK(ww_bm_tail("C", 1, y1, 0.0, &out1) == WW_ERR_USAGE);
    CHECK(ww_bm_tail("C", 1, nullptr, 1.0, &out1) == WW_ERR_USAGE);
}

TEST_CASE("vtable lifecycle: build, evaluate, save, load, free") {
    std::string dir = fresh_dir("vtable");
    ww_vtable* table = nullptr;
    REQUIRE(ww_vtable_build(kRademacher1, "C", 10, 400, &table) == WW_OK);
    REQUIRE(table != nullptr);

    double out = 0.0;
    for (long long z = 1; z <= 10; ++z) {
        REQUIRE(ww_vtable_value(table, &z, 1, &out) == WW_OK);
        CHECK(out == static_cast<double>(z));  // one component: V is the identity
    }

    long long zero = 0;
    CHECK(ww_vtable_value(table, &zero, 1, &out) == WW_ERR_CONTRACT);  // outside the chamber
    long long pair[] = {1, 2};
    CHECK(ww_vtable_value(table, pair, 2, &out) == WW_ERR_USAGE);  // dimension mismatch

    std::string csv = dir + "/table.csv";
    REQUIRE(ww_vtable_save_csv(table, csv.c_str()) == WW_OK);
    ww_vtable* loaded = nullptr;
    REQUIRE(ww_vtable_load_csv(csv.c_str(), &loaded) == WW_OK);
    long long seven = 7;
    double v1 = 0.0, v2 = 0.0;
    REQUIRE(ww_vtable_value(table, &seven, 1, &v1) == WW_OK);
    REQUIRE(ww_vtable_value(loaded, &seven, 1, &v2) == WW_OK);
    CHECK(v1 == v2);
    ww_vtable_free(loaded);
    ww_vtable_free(table);
    ww_vtable_free(nullptr);  // must be a no-op

    ww_vtable* bad = nullptr;
    CHECK(ww_vtable_build("not json", "C", 10, 400, &bad) == WW_ERR_USAGE);
    CHECK(bad == nullptr);
    CHECK(ww_vtable_build(kRademacher1, "A", 10, 400, &bad) == WW_ERR_USAGE);
    CHECK(ww_vtable_build(kRademacher1, "C", 10, 400, nullptr) == WW_ERR_USAGE);
    CHECK(ww_vtable_load_csv((dir + "/missing.csv").c_str(), &bad) != WW_OK);
}

TEST_CASE("ww_run_command round-trips a JSON summary") {
    std::string dir = fresh_dir("run");
    json cfg = {{"chamber", "C"}, {"k", 1}, {"out_dir", dir}};
    std::string cfg_text = cfg.dump();
    char* summary = nullptr;
    REQUIRE(ww_run_command("constants", cfg_text.c_str(), &summary) == WW_OK);
    REQUIRE(summary != nullptr);
    json s = json::parse(summary);
    ww_string_free(summary);
    CHECK(s.at("schema") == "weylwalk/1");
    CHECK(s.at("rows")[0].at("kappa").get<double>() ==
          doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
    CHECK(fs::exists(s.at("file").get<std::string>()));
}

TEST_CASE("ww_run_command separates usage from contract failures") {
    std::string dir = fresh_dir("run_err");
    char* summary = nullptr;

    CHECK(ww_run_command("frobnicate", "{}", &summary) == WW_ERR_USAGE);
    CHECK(std::strlen(ww_last_error()) > 0);
    CHECK(ww_run_command("tails", "not json", &summary) == WW_ERR_USAGE);
    CHECK(ww_run_command(nullptr, "{}", &summary) == WW_ERR_USAGE);
    CHECK(ww_run_command("constants", "{}", nullptr) == WW_ERR_USAGE);

    // a run that finds no surviving paths violates the numerical contract
    json cfg = {{"chamber", "C"}, {"k", 2},       {"x", {1, 2}}, {"mode", "mc"},
                {"n", 2000},      {"samples", 5}, {"out_dir", dir}};
    std::string cfg_text = cfg.dump();
    CHECK(ww_run_command("limit", cfg_text.c_str(), &summary) == WW_ERR_CONTRACT);
    CHECK(std::string(ww_last_error()).find("no surviving paths") != std::string::npos);

    ww_string_free(nullptr);  // must be a no-op
}
