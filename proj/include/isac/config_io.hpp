// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file config_io.hpp
 * @brief INI-style configuration parsing for the simulator front end.
 *
 * Sections [scenario], [estimator], [qos], and [harness] map onto the harness
 * configuration; every key is checked against the known set and mistakes are
 * reported with the line number and offending token. Values not present keep
 * their defaults.
 */

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "isac/harness.hpp"

namespace isac {

/// Raised for malformed configuration text; the message names the problem
/// and its line.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses configuration text; unknown sections or keys are errors.
HarnessConfig parse_config_text(const std::string& text);

/// Reads and parses a configuration file.
/// @throws ConfigError for unreadable files or malformed content.
HarnessConfig load_config(const std::filesystem::path& path);

}  // namespace isac
