// Copyright 2026 The dslrec Authors.
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

// Plain-text `key=value` settings.

#ifndef DSLREC_CONFIG_H_
#define DSLREC_CONFIG_H_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dslrec/objective.h"

namespace dslrec {

using KeyValue = std::pair<std::string, std::string>;

// Blank lines and '#' comments are skipped; whitespace around keys and values
// is trimmed.
std::vector<KeyValue> ParseKeyValues(const std::string& text);
std::vector<KeyValue> ReadKeyValueFile(const std::filesystem::path& path);

// Returns false when `key` is not a training setting.
bool ApplyTrainSetting(TrainConfig& config, const std::string& key,
                       const std::string& value);

// Every training setting, one `key=value` per line, in a fixed order.
std::string FormatTrainConfig(const TrainConfig& config);

// "a,b,c" -> parsed list.
std::vector<double> ParseDoubleList(const std::string& text);
std::vector<int> ParseIntList(const std::string& text);

// Shortest text that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace dslrec

#endif  // DSLREC_CONFIG_H_
