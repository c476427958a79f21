#pragma once

#include <stdexcept>
#include <string>

namespace weylwalk {

// A malformed or out-of-contract experiment configuration.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Runs one experiment command ("constants", "tails", "transform", "limit")
// with a JSON configuration. Data files are written under the resolved
// output directory (config "out_dir", else $WEYLWALK_OUT_DIR, else the
// current directory); the returned string is a JSON summary.
//
// Outputs are deterministic functions of (command, config): reruns and
// different worker counts produce byte-identical files.
std::string run_command(const std::string& command, const std::string& config_json);

}  // namespace weylwalk
