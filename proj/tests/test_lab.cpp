#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "wavelab/lab.hpp"

using namespace wavelab;
using lab::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json small_flux_config(const std::string& out) {
    return {
        {"experiment", "flux-check"},
        {"params", {{"d", 3}, {"p", 3.0}, {"a", -0.2}}},
        {"grid", {{"r_max", 20.0}, {"n", 512}}},
        {"t_final", 8.0},
        {"eta", {1.0}},
        {"window", {4.0, 8.0}},
        {"out_dir", out},
    };
}

} // namespace

TEST_CASE("config validation rejects unknown keys with a path") {
    json cfg = small_flux_config("/tmp/wavelab_test_cfg");
    cfg["typo_key"] = 1;
    try {
        lab::parse_config(cfg);
        CHECK(false);
    } catch (const ConfigInvalid& e) {
        CHECK(e.path == "/typo_key");
    }
    json cfg2 = small_flux_config("/tmp/wavelab_test_cfg");
    cfg2["params"]["extra"] = 2.0;
    CHECK_THROWS_AS(lab::parse_config(cfg2), ConfigInvalid);
    json cfg3 = small_flux_config("/tmp/wavelab_test_cfg");
    cfg3["experiment"] = "no-such-thing";
    CHECK_THROWS_AS(lab::parse_config(cfg3), ExperimentUnknown);
}

TEST_CASE("config round-trips through serialization bit-identically") {
    const json cfg = small_flux_config("/tmp/wavelab_rt");
    const std::string once = lab::parse_config(cfg).dump();
    const std::string twice = lab::parse_config(json::parse(once)).dump();
    CHECK(once == twice);
    CHECK(lab::fnv1a64_hex(once) == lab::fnv1a64_hex(twice));
}

TEST_CASE("grid invariant is enforced") {
    json cfg = small_flux_config("/tmp/wavelab_bad");
    cfg["t_final"] = 40.0;  // support 8 + 40 > r_max = 20
    CHECK_THROWS_AS(lab::run(cfg), ConfigInvalid);
}

TEST_CASE("identical configs produce byte-identical outputs") {
    const fs::path a = "/tmp/wavelab_det_a", b = "/tmp/wavelab_det_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const json cfg = small_flux_config("");
    const auto ma = lab::run(cfg, a);
    const auto mb = lab::run(cfg, b);
    REQUIRE(ma.files.size() == mb.files.size());
    for (size_t k = 0; k < ma.files.size(); ++k) {
        CHECK(ma.files[k].path == mb.files[k].path);
        CHECK(ma.files[k].fnv1a64 == mb.files[k].fnv1a64);
        CHECK(slurp(a / ma.files[k].path) == slurp(b / mb.files[k].path));
    }
    CHECK(ma.config_hash == mb.config_hash);
}

TEST_CASE("reports embed the config hash and derived constants") {
    const fs::path out = "/tmp/wavelab_rep";
    fs::remove_all(out);
    const auto man = lab::run(small_flux_config(""), out);
    const json rep = json::parse(slurp(out / "report.json"));
    CHECK(rep.at("config_hash") == man.config_hash);
    CHECK(rep.contains("derived_constants"));
    CHECK(rep.at("derived_constants").at("beta") == doctest::Approx(0.25));
    CHECK(rep.contains("checks"));
    const json manifest = json::parse(slurp(out / "manifest.json"));
    CHECK(manifest.at("config_hash") == man.config_hash);
    CHECK(manifest.at("files").size() == man.files.size());
}

TEST_CASE("params experiment reports verdicts both ways") {
    const fs::path out = "/tmp/wavelab_params";
    fs::remove_all(out);
    json cfg = {{"experiment", "params"},
                {"params", {{"d", 3}, {"p", 3.0}, {"a", -0.2}}},
                {"strichartz", {{8.0, 8.0, 1.0}, {"inf", 6.0, 1.0}}},
                {"out_dir", ""}};
    auto man = lab::run(cfg, out);
    CHECK(man.pass);
    json rep = json::parse(slurp(out / "report.json"));
    CHECK(rep.at("valid") == true);
    CHECK(rep.at("strichartz")[0].at("admissible") == true);
    CHECK(rep.at("strichartz")[1].at("admissible") == true);
    CHECK(rep.at("strichartz")[1].at("q") == "inf");

    json bad = cfg;
    bad["params"]["a"] = -0.26;
    bad.erase("strichartz");
    man = lab::run(bad, out);
    CHECK(!man.pass);
    rep = json::parse(slurp(out / "report.json"));
    CHECK(rep.at("valid") == false);
    CHECK(rep.at("violated_bound") == doctest::Approx(-0.25));
}

TEST_CASE("snapshot CSV carries the documented metadata header") {
    const fs::path out = "/tmp/wavelab_sim";
    fs::remove_all(out);
    json cfg = {{"experiment", "simulate"},
                {"params", {{"d", 3}, {"p", 3.0}, {"a", -0.2}}},
                {"grid", {{"r_max", 16.0}, {"n", 256}}},
                {"t_final", 2.0},
                {"record_interval", 1.0},
                {"out_dir", ""}};
    lab::run(cfg, out);
    const std::string snap = slurp(out / "series/snapshot_0000.csv");
    CHECK(snap.find("# wavelab snapshot") == 0);
    CHECK(snap.find("# d=3 p=3 a=-0.2") != std::string::npos);
    CHECK(snap.find("t=0 dr=0.0625 n=256") != std::string::npos);
    CHECK(snap.find("r,u,u_t") != std::string::npos);
    // shortest round-trip formatting: the first data row starts with 0,
    CHECK(snap.find("\n0,") != std::string::npos);
}

TEST_CASE("converge fits the oracle error order of the free run") {
    const fs::path out = "/tmp/wavelab_conv";
    fs::remove_all(out);
    json base = {{"experiment", "simulate"},
                 {"params", {{"d", 3}, {"p", 3.0}, {"a", 0.0}}},
                 {"grid", {{"r_max", 14.0}, {"n", 256}}},
                 {"t_final", 4.0},
                 {"potential_on", false},
                 {"nonlinearity_on", false},
                 {"out_dir", ""}};
    json cfg = {{"experiment", "converge"}, {"levels", 3}, {"base", base}, {"out_dir", ""}};
    lab::run(cfg, out);
    const json rep = json::parse(slurp(out / "report.json"));
    const double order = rep.at("orders").at("oracle_sup_error").at("order").get<double>();
    CHECK(order > 1.7);
    CHECK(order < 2.3);
}

TEST_CASE("format_double emits shortest round-trip decimals") {
    CHECK(lab::format_double(0.1) == "0.1");
    CHECK(lab::format_double(1.0 / 3.0) == "0.3333333333333333");
    CHECK(lab::format_double(-0.2) == "-0.2");
    CHECK(lab::format_double(0.0) == "0");
    const double v = 0.1234567890123456789;
    CHECK(std::stod(lab::format_double(v)) == v);
}
