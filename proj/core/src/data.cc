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

#include "dslrec/data.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include "dslrec/common.h"

namespace dslrec {
namespace {

std::vector<std::string> Tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : line) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// Calls on_pair(first, second) for every well-formed line.
template <typename Fn>
LoadStats ForEachPair(std::istream& in, Fn on_pair) {
  LoadStats stats;
  std::string line;
  while (std::getline(in, line)) {
    ++stats.lines_read;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      ++stats.comment_lines;
      continue;
    }
    auto tokens = Tokenize(line);
    if (tokens.size() < 2) {
      ++stats.malformed_lines;
      continue;
    }
    on_pair(std::move(tokens[0]), std::move(tokens[1]), stats);
  }
  return stats;
}

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return in;
}

std::uint64_t PairKey(int user, int item, int num_items) {
  return static_cast<std::uint64_t>(user) * static_cast<std::uint64_t>(num_items) +
         static_cast<std::uint64_t>(item);
}

void RecomputeDegree(Dataset* ds) {
  ds->degree.assign(ds->num_users, 0);
  for (const auto& e : ds->train) ++ds->degree[e.user];
}

void WriteInteractions(const std::filesystem::path& path,
                       const std::vector<Interaction>& edges) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& e : edges) out << e.user << ' ' << e.item << '\n';
}

std::vector<std::pair<int, int>> ReadIndexPairs(
    const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  std::vector<std::pair<int, int>> pairs;
  int a = 0;
  int b = 0;
  while (in >> a >> b) pairs.emplace_back(a, b);
  if (!in.eof()) throw Error("malformed index file " + path.string());
  return pairs;
}

std::vector<std::string> ReadLines(const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

InteractionTable ParseInteractions(std::istream& in) {
  InteractionTable table;
  std::unordered_set<std::string> seen;
  table.stats = ForEachPair(
      in, [&](std::string user, std::string item, LoadStats& stats) {
        if (!seen.insert(user + '\t' + item).second) {
          ++stats.duplicates;
          return;
        }
        table.edges.emplace_back(std::move(user), std::move(item));
      });
  return table;
}

SocialTable ParseSocial(std::istream& in) {
  SocialTable table;
  std::unordered_set<std::string> seen;
  table.stats =
      ForEachPair(in, [&](std::string a, std::string b, LoadStats& stats) {
        if (a == b) {
          ++stats.self_loops;
          return;
        }
        const std::string key = a < b ? a + '\t' + b : b + '\t' + a;
        if (!seen.insert(key).second) {
          ++stats.duplicates;
          return;
        }
        table.edges.emplace_back(a, b);
        table.edges.emplace_back(std::move(b), std::move(a));
      });
  return table;
}

InteractionTable LoadInteractions(const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  return ParseInteractions(in);
}

SocialTable LoadSocial(const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  return ParseSocial(in);
}

double Dataset::Density() const {
  if (num_users == 0 || num_items == 0) return 0.0;
  return static_cast<double>(num_interactions()) /
         (static_cast<double>(num_users) * static_cast<double>(num_items));
}

Dataset BuildDataset(const InteractionTable& interactions,
                     const SocialTable& social, std::uint64_t split_seed) {
  if (interactions.edges.empty()) {
    throw Error("interaction table is empty");
  }
  Dataset ds;
  ds.split_seed = split_seed;
  auto intern = [](const std::string& id, std::vector<std::string>& ids,
                   std::unordered_map<std::string, int>& index) {
    auto [it, inserted] = index.emplace(id, static_cast<int>(ids.size()));
    if (inserted) ids.push_back(id);
    return it->second;
  };

  std::vector<std::vector<int>> items_of;
  for (const auto& [user, item] : interactions.edges) {
    const int u = intern(user, ds.user_ids, ds.user_index);
    const int v = intern(item, ds.item_ids, ds.item_index);
    if (static_cast<std::size_t>(u) >= items_of.size()) items_of.resize(u + 1);
    items_of[u].push_back(v);
  }
  for (const auto& [a, b] : social.edges) {
    intern(a, ds.user_ids, ds.user_index);
    intern(b, ds.user_ids, ds.user_index);
  }
  ds.num_users = static_cast<int>(ds.user_ids.size());
  ds.num_items = static_cast<int>(ds.item_ids.size());
  items_of.resize(ds.num_users);

  std::mt19937_64 rng(split_seed);
  auto take_random = [&rng](std::vector<int>& items) {
    std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
    const std::size_t k = pick(rng);
    const int item = items[k];
    items.erase(items.begin() + static_cast<std::ptrdiff_t>(k));
    return item;
  };
  for (int u = 0; u < ds.num_users; ++u) {
    auto& items = items_of[u];
    if (items.size() >= 3) {
      ds.test.push_back({u, take_random(items)});
      ds.val.push_back({u, take_random(items)});
    } else if (items.size() == 2) {
      ds.test.push_back({u, take_random(items)});
    }
    for (int v : items) ds.train.push_back({u, v});
  }
  std::sort(ds.train.begin(), ds.train.end());

  ds.social.reserve(social.edges.size());
  for (const auto& [a, b] : social.edges) {
    ds.social.push_back({ds.user_index.at(a), ds.user_index.at(b)});
  }
  std::sort(ds.social.begin(), ds.social.end());
  RecomputeDegree(&ds);
  return ds;
}

Dataset InjectNoise(const Dataset& dataset, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw Error("noise ratio must lie in [0, 1]");
  }
  Dataset noisy = dataset;
  noisy.noise_ratio = ratio;
  noisy.noise_seed = seed;
  // The epsilon keeps products like 0.3 * 1000 from rounding down.
  const auto count = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(dataset.train.size()) + 1e-9));
  noisy.noise_edges = count;
  if (count == 0) return noisy;

  const int num_items = dataset.num_items;
  std::unordered_set<std::uint64_t> taken;
  taken.reserve(dataset.num_interactions() + count);
  for (const auto* split : {&dataset.train, &dataset.val, &dataset.test}) {
    for (const auto& e : *split) taken.insert(PairKey(e.user, e.item, num_items));
  }
  const std::uint64_t cells = static_cast<std::uint64_t>(dataset.num_users) *
                              static_cast<std::uint64_t>(num_items);
  const std::uint64_t free_cells = cells - taken.size();
  if (count > free_cells) {
    throw Error("not enough unobserved user-item pairs for noise injection");
  }

  std::mt19937_64 rng(seed);
  std::vector<Interaction> added;
  added.reserve(count);
  if (count * 2 <= free_cells) {
    std::uniform_int_distribution<std::uint64_t> cell(0, cells - 1);
    while (added.size() < count) {
      const std::uint64_t key = cell(rng);
      if (!taken.insert(key).second) continue;
      added.push_back({static_cast<int>(key / num_items),
                       static_cast<int>(key % num_items)});
    }
  } else {
    // Dense regime: enumerate the complement and draw without replacement.
    std::vector<std::uint64_t> complement;
    complement.reserve(free_cells);
    for (std::uint64_t key = 0; key < cells; ++key) {
      if (!taken.count(key)) complement.push_back(key);
    }
    for (std::size_t k = 0; k < count; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, complement.size() - 1);
      std::swap(complement[k], complement[pick(rng)]);
      const std::uint64_t key = complement[k];
      added.push_back({static_cast<int>(key / num_items),
                       static_cast<int>(key % num_items)});
    }
  }
  noisy.train.insert(noisy.train.end(), added.begin(), added.end());
  std::sort(noisy.train.begin(), noisy.train.end());
  RecomputeDegree(&noisy);
  return noisy;
}

std::string DegreeInterval::Label() const {
  std::ostringstream out;
  out << '[' << lo << ',';
  if (hi.has_value()) {
    out << *hi;
  } else {
    out << "inf";
  }
  out << ')';
  return out.str();
}

std::vector<DegreeInterval> DefaultDegreeIntervals() {
  return {{0, 5}, {5, 10}, {10, 15}, {15, std::nullopt}};
}

std::vector<DegreeInterval> ParseDegreeCuts(const std::string& text) {
  std::vector<int> cuts;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    cuts.push_back(std::stoi(token));
  }
  if (cuts.empty()) throw Error("empty degree cut list");
  std::vector<DegreeInterval> intervals;
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    DegreeInterval interval{cuts[k], std::nullopt};
    if (k + 1 < cuts.size()) interval.hi = cuts[k + 1];
    intervals.push_back(interval);
  }
  return intervals;
}

DegreeStrata StratifyByDegree(const Dataset& dataset,
                              const std::vector<DegreeInterval>& intervals) {
  if (intervals.empty()) throw Error("no degree intervals given");
  if (intervals.front().lo != 0) {
    throw Error("degree intervals must start at 0");
  }
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    const auto& cur = intervals[k];
    const bool last = k + 1 == intervals.size();
    if (last != !cur.hi.has_value()) {
      throw Error("only the last degree interval may be unbounded");
    }
    if (last) break;
    if (*cur.hi <= cur.lo) throw Error("empty degree interval " + cur.Label());
    if (intervals[k + 1].lo != *cur.hi) {
      throw Error("degree intervals overlap or leave a gap at " + cur.Label());
    }
  }
  DegreeStrata strata;
  strata.intervals = intervals;
  strata.assignment.resize(dataset.num_users);
  for (int u = 0; u < dataset.num_users; ++u) {
    const int degree = dataset.degree[u];
    const auto it =
        std::find_if(intervals.begin(), intervals.end(),
                     [degree](const DegreeInterval& i) { return i.Contains(degree); });
    strata.assignment[u] = static_cast<int>(it - intervals.begin());
  }
  return strata;
}

void SaveDataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream meta(dir / "meta");
    if (!meta) throw Error("cannot write " + (dir / "meta").string());
    meta << std::setprecision(17);
    meta << "num_users=" << ds.num_users << '\n'
         << "num_items=" << ds.num_items << '\n'
         << "num_train=" << ds.train.size() << '\n'
         << "num_val=" << ds.val.size() << '\n'
         << "num_test=" << ds.test.size() << '\n'
         << "num_ties=" << ds.num_ties() << '\n'
         << "density=" << ds.Density() << '\n'
         << "split_seed=" << ds.split_seed << '\n'
         << "noise_ratio=" << ds.noise_ratio << '\n'
         << "noise_seed=" << ds.noise_seed << '\n'
         << "noise_edges=" << ds.noise_edges << '\n';
  }
  WriteInteractions(dir / "train.txt", ds.train);
  WriteInteractions(dir / "val.txt", ds.val);
  WriteInteractions(dir / "test.txt", ds.test);
  {
    std::ofstream out(dir / "social.txt");
    for (const auto& e : ds.social) out << e.from << ' ' << e.to << '\n';
  }
  for (const auto& [name, ids] :
       {std::pair{"user_ids.txt", &ds.user_ids},
        std::pair{"item_ids.txt", &ds.item_ids}}) {
    std::ofstream out(dir / name);
    for (const auto& id : *ids) out << id << '\n';
  }
}

Dataset LoadDataset(const std::filesystem::path& dir) {
  std::map<std::string, std::string> meta;
  for (const auto& line : ReadLines(dir / "meta")) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto field = [&meta](const std::string& key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) throw Error("dataset meta lacks " + key);
    return it->second;
  };
  Dataset ds;
  ds.num_users = std::stoi(field("num_users"));
  ds.num_items = std::stoi(field("num_items"));
  ds.split_seed = std::stoull(field("split_seed"));
  ds.noise_ratio = std::stod(field("noise_ratio"));
  ds.noise_seed = std::stoull(field("noise_seed"));
  ds.noise_edges = std::stoull(field("noise_edges"));

  auto read_split = [&](const char* name) {
    std::vector<Interaction> edges;
    for (auto [u, v] : ReadIndexPairs(dir / name)) {
      if (u < 0 || u >= ds.num_users || v < 0 || v >= ds.num_items) {
        throw Error(std::string("index out of range in ") + name);
      }
      edges.push_back({u, v});
    }
    return edges;
  };
  ds.train = read_split("train.txt");
  ds.val = read_split("val.txt");
  ds.test = read_split("test.txt");
  for (auto [a, b] : ReadIndexPairs(dir / "social.txt")) {
    if (a < 0 || a >= ds.num_users || b < 0 || b >= ds.num_users) {
      throw Error("index out of range in social.txt");
    }
    ds.social.push_back({a, b});
  }
  ds.user_ids = ReadLines(dir / "user_ids.txt");
  ds.item_ids = ReadLines(dir / "item_ids.txt");
  if (ds.user_ids.size() != static_cast<std::size_t>(ds.num_users) ||
      ds.item_ids.size() != static_cast<std::size_t>(ds.num_items)) {
    throw Error("id map sizes disagree with meta in " + dir.string());
  }
  for (int u = 0; u < ds.num_users; ++u) ds.user_index[ds.user_ids[u]] = u;
  for (int v = 0; v < ds.num_items; ++v) ds.item_index[ds.item_ids[v]] = v;
  RecomputeDegree(&ds);
  return ds;
}

Dataset OpenDatasetDir(const std::filesystem::path& dir,
                       std::uint64_t split_seed) {
  if (std::filesystem::exists(dir / "meta")) return LoadDataset(dir);
  auto first_existing =
      [&dir](std::initializer_list<const char*> names) -> std::filesystem::path {
    for (const char* name : names) {
      if (std::filesystem::exists(dir / name)) return dir / name;
    }
    return {};
  };
  const auto inter_path = first_existing({"interactions.txt", "ratings.txt"});
  if (inter_path.empty()) {
    throw Error("no meta, interactions.txt or ratings.txt in " + dir.string());
  }
  const auto social_path = first_existing({"social.txt", "trust.txt"});
  SocialTable social;
  if (!social_path.empty()) social = LoadSocial(social_path);
  return BuildDataset(LoadInteractions(inter_path), social, split_seed);
}

}  // namespace dslrec
