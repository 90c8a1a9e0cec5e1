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

// Dataset ingestion: raw edge files, dense ID remapping, leave-one-out
// splits, fake-edge injection and degree strata.

#ifndef DSLREC_DATA_H_
#define DSLREC_DATA_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dslrec {

struct LoadStats {
  std::size_t lines_read = 0;
  std::size_t comment_lines = 0;
  std::size_t malformed_lines = 0;
  std::size_t duplicates = 0;
  std::size_t self_loops = 0;
};

// User-item records keyed by external ids, deduplicated, in file order.
struct InteractionTable {
  std::vector<std::pair<std::string, std::string>> edges;
  LoadStats stats;
};

// User-user ties. Every accepted tie is stored in both directions, so
// edges.size() == 2 * num_ties().
struct SocialTable {
  std::vector<std::pair<std::string, std::string>> edges;
  LoadStats stats;

  std::size_t num_ties() const { return edges.size() / 2; }
};

// Lines hold at least two tokens separated by whitespace and/or commas.
// Extra columns (rating, timestamp) are parsed past and ignored. Lines
// starting with '#' are comments.
InteractionTable ParseInteractions(std::istream& in);
SocialTable ParseSocial(std::istream& in);
InteractionTable LoadInteractions(const std::filesystem::path& path);
SocialTable LoadSocial(const std::filesystem::path& path);

struct Interaction {
  int user = 0;
  int item = 0;
  auto operator<=>(const Interaction&) const = default;
};

struct SocialEdge {
  int from = 0;
  int to = 0;
  auto operator<=>(const SocialEdge&) const = default;
};

struct Dataset {
  int num_users = 0;
  int num_items = 0;

  // Dense index -> external id.
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::unordered_map<std::string, int> user_index;
  std::unordered_map<std::string, int> item_index;

  // Sorted by (user, item).
  std::vector<Interaction> train;
  // At most one held-out record per user, sorted by user.
  std::vector<Interaction> val;
  std::vector<Interaction> test;
  // Both directions of every tie, sorted.
  std::vector<SocialEdge> social;
  // Train interactions per user.
  std::vector<int> degree;

  std::uint64_t split_seed = 0;
  double noise_ratio = 0.0;
  std::uint64_t noise_seed = 0;
  std::size_t noise_edges = 0;

  std::size_t num_interactions() const {
    return train.size() + val.size() + test.size();
  }
  std::size_t num_ties() const { return social.size() / 2; }
  double Density() const;
};

// Leave-one-out split. Users with >= 3 interactions give one random record to
// test and one to validation; users with exactly 2 give one to test; users
// with a single record keep it in train. Users seen only in the social table
// become interaction-isolated users.
Dataset BuildDataset(const InteractionTable& interactions,
                     const SocialTable& social, std::uint64_t split_seed);

// Adds floor(ratio * |train|) uniformly sampled user-item pairs that appear in
// none of train/val/test.
Dataset InjectNoise(const Dataset& dataset, double ratio, std::uint64_t seed);

// Half-open degree interval [lo, hi); hi == nullopt means unbounded.
struct DegreeInterval {
  int lo = 0;
  std::optional<int> hi;

  bool Contains(int degree) const {
    return degree >= lo && (!hi.has_value() || degree < *hi);
  }
  std::string Label() const;
};

struct DegreeStrata {
  std::vector<DegreeInterval> intervals;
  // User index -> position in `intervals`.
  std::vector<int> assignment;
};

// [0,5), [5,10), [10,15), [15,inf)
std::vector<DegreeInterval> DefaultDegreeIntervals();

// Parses "0,5,10,15": consecutive cut points starting at 0, last one open.
std::vector<DegreeInterval> ParseDegreeCuts(const std::string& text);

DegreeStrata StratifyByDegree(const Dataset& dataset,
                              const std::vector<DegreeInterval>& intervals);

// Directory layout: meta, train.txt, val.txt, test.txt, social.txt (dense
// indices), user_ids.txt and item_ids.txt (index -> external id).
void SaveDataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset LoadDataset(const std::filesystem::path& dir);

// Loads a serialized dataset when `dir/meta` exists, otherwise builds one from
// raw `interactions.txt` + `social.txt` found in `dir`.
Dataset OpenDatasetDir(const std::filesystem::path& dir,
                       std::uint64_t split_seed);

}  // namespace dslrec

#endif  // DSLREC_DATA_H_
