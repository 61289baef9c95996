// Copyright 2026 The tcpalign Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TCPALIGN_CLI_HPP_
#define TCPALIGN_CLI_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "tcpalign/config.hpp"
#include "tcpalign/harness.hpp"

namespace tcpalign::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Everything a subcommand needs after the config file and flags are merged.
struct CliConfig {
  std::string subcommand;
  std::optional<std::filesystem::path> config_path;
  harness::HarnessConfig harness;
  /// Calibration jitter injected by `preprocess`; off unless requested.
  double preprocess_pixel_jitter = 0.0;
  double preprocess_proprio_noise = 0.0;
  int workers = 0;
  std::optional<std::filesystem::path> out;
};

/// Applies a config document {"alignment", "augment", "harness",
/// "preprocess", "workers", "out"} on top of `cfg`. Unknown keys throw
/// kParseError.
void merge_config(const Json& doc, CliConfig& cfg);

/// Effective config for preprocess reports.
Json preprocess_config_json(const CliConfig& cfg);

/// Entry point. Results go to `out`, progress and diagnostics to `err`.
/// Returns kExitOk, kExitFailure (validation or runtime failure) or
/// kExitUsage.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tcpalign::cli

#endif  // TCPALIGN_CLI_HPP_
