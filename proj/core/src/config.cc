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

#include "dslrec/config.h"

#include <fstream>
#include <sstream>

namespace dslrec {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

template <typename T, typename Parse>
T ParseOrThrow(const std::string& key, const std::string& value, Parse parse) {
  try {
    std::size_t used = 0;
    T result = parse(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return result;
  } catch (const std::exception&) {
    throw Error("bad value '" + value + "' for " + key);
  }
}

int ToInt(const std::string& key, const std::string& value) {
  return ParseOrThrow<int>(key, value, [](const std::string& s, std::size_t* n) {
    return std::stoi(s, n);
  });
}

double ToDouble(const std::string& key, const std::string& value) {
  return ParseOrThrow<double>(key, value, [](const std::string& s, std::size_t* n) {
    return std::stod(s, n);
  });
}

std::uint64_t ToUint64(const std::string& key, const std::string& value) {
  return ParseOrThrow<std::uint64_t>(
      key, value, [](const std::string& s, std::size_t* n) { return std::stoull(s, n); });
}

std::vector<std::string> SplitCommas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    part = Trim(part);
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

}  // namespace

std::vector<KeyValue> ParseKeyValues(const std::string& text) {
  std::vector<KeyValue> pairs;
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(line_no) + " lacks '='");
    }
    pairs.emplace_back(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  return pairs;
}

std::vector<KeyValue> ReadKeyValueFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseKeyValues(buffer.str());
}

bool ApplyTrainSetting(TrainConfig& c, const std::string& key,
                       const std::string& value) {
  if (key == "dim") {
    c.dim = ToInt(key, value);
  } else if (key == "layers") {
    c.layers = ToInt(key, value);
  } else if (key == "lr") {
    c.lr = ToDouble(key, value);
  } else if (key == "lr_decay") {
    c.lr_decay = ToDouble(key, value);
  } else if (key == "batch_size") {
    c.batch_size = ToInt(key, value);
  } else if (key == "lambda1") {
    c.lambda_social = ToDouble(key, value);
  } else if (key == "lambda2") {
    c.lambda_ssl = ToDouble(key, value);
  } else if (key == "lambda3") {
    c.lambda_reg = ToDouble(key, value);
  } else if (key == "epochs") {
    c.epochs = ToInt(key, value);
  } else if (key == "patience") {
    c.patience = ToInt(key, value);
  } else if (key == "agg") {
    c.aggregation = ParseAggregation(value);
  } else if (key == "variant") {
    c.variant = ParseVariant(value);
  } else if (key == "tau") {
    c.infonce_temperature = ToDouble(key, value);
  } else if (key == "leaky_slope") {
    c.leaky_slope = ToDouble(key, value);
  } else if (key == "seed") {
    c.seed = ToUint64(key, value);
  } else {
    return false;
  }
  return true;
}

std::string FormatDouble(double value) {
  for (int precision = 6; precision <= 17; ++precision) {
    std::ostringstream out;
    out.precision(precision);
    out << value;
    if (std::stod(out.str()) == value) return out.str();
  }
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

std::string FormatTrainConfig(const TrainConfig& c) {
  std::ostringstream out;
  out << "dim=" << c.dim << '\n'
      << "layers=" << c.layers << '\n'
      << "lr=" << FormatDouble(c.lr) << '\n'
      << "lr_decay=" << FormatDouble(c.lr_decay) << '\n'
      << "batch_size=" << c.batch_size << '\n'
      << "lambda1=" << FormatDouble(c.lambda_social) << '\n'
      << "lambda2=" << FormatDouble(c.lambda_ssl) << '\n'
      << "lambda3=" << FormatDouble(c.lambda_reg) << '\n'
      << "epochs=" << c.epochs << '\n'
      << "patience=" << c.patience << '\n'
      << "agg=" << AggregationName(c.aggregation) << '\n'
      << "variant=" << VariantName(c.variant) << '\n'
      << "tau=" << FormatDouble(c.infonce_temperature) << '\n'
      << "leaky_slope=" << FormatDouble(c.leaky_slope) << '\n'
      << "seed=" << c.seed << '\n';
  return out.str();
}

std::vector<double> ParseDoubleList(const std::string& text) {
  std::vector<double> values;
  for (const auto& part : SplitCommas(text)) values.push_back(ToDouble("list", part));
  return values;
}

std::vector<int> ParseIntList(const std::string& text) {
  std::vector<int> values;
  for (const auto& part : SplitCommas(text)) values.push_back(ToInt("list", part));
  return values;
}

}  // namespace dslrec
