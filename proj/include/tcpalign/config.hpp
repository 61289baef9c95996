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

#ifndef TCPALIGN_CONFIG_HPP_
#define TCPALIGN_CONFIG_HPP_

#include <filesystem>

#include "json.hpp"

#include "tcpalign/align.hpp"

namespace tcpalign {

using Json = nlohmann::ordered_json;

// Config documents look like
//   {"alignment": {...}, "augment": {...}, "harness": {...}}
// Missing keys keep their defaults; unknown keys are rejected.

Json to_json(const AlignmentConfig& cfg);
Json to_json(const AugmentConfig& cfg);
/// Overwrites the fields present in `j`. Throws kParseError on unknown keys
/// or wrong types.
void merge_json(const Json& j, AlignmentConfig& cfg);
void merge_json(const Json& j, AugmentConfig& cfg);

Json read_json_file(const std::filesystem::path& path);
/// Pretty-printed, trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace tcpalign

#endif  // TCPALIGN_CONFIG_HPP_
