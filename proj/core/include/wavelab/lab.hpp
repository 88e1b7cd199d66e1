#ifndef WAVELAB_LAB_HPP
#define WAVELAB_LAB_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavelab/scattering.hpp"

namespace wavelab::lab {

using json = nlohmann::json;

inline constexpr const char* tool_version = "0.1.0";

struct EmittedFile {
    std::string path;       // relative to the output directory
    std::uint64_t bytes = 0;
    std::string fnv1a64;    // hex checksum of the contents
};

struct RunManifest {
    std::string config_hash;
    std::string version;
    double wall_seconds = 0;
    std::vector<EmittedFile> files;
    bool pass = true;       // all in-report assertions held
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

// Parse + validate an experiment config. Unknown keys and ill-typed values
// throw ConfigInvalid with the JSON path of the offending entry.
json parse_config(const json& raw);
json load_config_file(const std::filesystem::path& file);

// Execute the named experiment, writing report.json, series/*.csv and
// manifest.json under out_dir (config's out_dir unless overridden).
RunManifest run(const json& config, const std::filesystem::path& out_dir_override = {});

// Grid-refinement sweep of a base experiment; fits the convergence order of
// every scalar the experiment reports under "residuals".
RunManifest converge(const json& config, const std::filesystem::path& out_dir_override = {});

// Worker-pool width for sweeps: WAVELAB_THREADS, else hardware concurrency.
unsigned pool_width();

std::vector<std::string> experiment_names();

} // namespace wavelab::lab

#endif
