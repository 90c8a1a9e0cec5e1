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

#include "dslrec/synthetic.h"

#include <cmath>
#include <random>
#include <set>
#include <string>

#include "dslrec/common.h"

namespace dslrec {

PlantedClusterData GeneratePlantedClusters(const PlantedClusterOptions& o) {
  if (o.num_clusters < 2 || o.num_users < 2 * o.num_clusters ||
      o.num_items < o.num_clusters) {
    throw Error("planted clusters need at least two clusters, two users each");
  }
  if (o.min_interactions < 1 || o.max_interactions < o.min_interactions ||
      o.max_interactions > o.num_items / o.num_clusters) {
    throw Error("interaction count range does not fit the cluster size");
  }
  if (o.cross_tie_fraction < 0.0 || o.cross_tie_fraction > 1.0) {
    throw Error("cross-tie fraction must lie in [0, 1]");
  }
  std::mt19937_64 rng(o.seed);
  PlantedClusterData data;
  data.user_cluster.resize(o.num_users);
  data.item_cluster.resize(o.num_items);
  std::vector<std::vector<int>> users_in(o.num_clusters), items_in(o.num_clusters);
  for (int u = 0; u < o.num_users; ++u) {
    data.user_cluster[u] = u % o.num_clusters;
    users_in[u % o.num_clusters].push_back(u);
  }
  for (int i = 0; i < o.num_items; ++i) {
    data.item_cluster[i] = i % o.num_clusters;
    items_in[i % o.num_clusters].push_back(i);
  }

  std::vector<std::discrete_distribution<std::size_t>> popularity;
  for (const auto& items : items_in) {
    std::vector<double> weights(items.size());
    for (std::size_t r = 0; r < items.size(); ++r) {
      weights[r] = std::pow(static_cast<double>(r + 1), -o.popularity_skew);
    }
    popularity.emplace_back(weights.begin(), weights.end());
  }

  std::uniform_int_distribution<int> count_dist(o.min_interactions, o.max_interactions);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int u = 0; u < o.num_users; ++u) {
    const int home = data.user_cluster[u];
    const int count = count_dist(rng);
    std::set<int> chosen;
    while (static_cast<int>(chosen.size()) < count) {
      int cluster = home;
      if (unit(rng) < o.off_cluster_rate) {
        std::uniform_int_distribution<int> other(0, o.num_clusters - 2);
        cluster = other(rng);
        if (cluster >= home) ++cluster;
      }
      chosen.insert(items_in[cluster][popularity[cluster](rng)]);
    }
    for (int item : chosen) {
      data.interactions.edges.emplace_back("u" + std::to_string(u),
                                           "i" + std::to_string(item));
    }
  }

  const auto target_cross =
      static_cast<std::size_t>(std::llround(o.num_ties * o.cross_tie_fraction));
  std::set<std::pair<int, int>> ties;
  std::uniform_int_distribution<int> any_user(0, o.num_users - 1);
  std::size_t attempts = 0;
  const std::size_t max_attempts = 1000 * static_cast<std::size_t>(o.num_ties) + 1000;
  while (static_cast<int>(ties.size()) < o.num_ties) {
    if (++attempts > max_attempts) throw Error("cannot place the requested ties");
    const bool cross = ties.size() < target_cross;
    const int a = any_user(rng);
    int b = 0;
    if (cross) {
      std::uniform_int_distribution<int> other(0, o.num_clusters - 2);
      int cluster = other(rng);
      if (cluster >= data.user_cluster[a]) ++cluster;
      const auto& pool = users_in[cluster];
      b = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    } else {
      const auto& pool = users_in[data.user_cluster[a]];
      b = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      if (b == a) continue;
    }
    ties.insert({std::min(a, b), std::max(a, b)});
  }
  for (const auto& [a, b] : ties) {
    if (data.user_cluster[a] != data.user_cluster[b]) ++data.cross_ties;
    const std::string ua = "u" + std::to_string(a);
    const std::string ub = "u" + std::to_string(b);
    data.social.edges.emplace_back(ua, ub);
    data.social.edges.emplace_back(ub, ua);
  }
  return data;
}

std::vector<int> UserClustersByIndex(const PlantedClusterData& data,
                                     const Dataset& dataset) {
  std::vector<int> clusters(dataset.num_users, -1);
  for (int u = 0; u < dataset.num_users; ++u) {
    const std::string& id = dataset.user_ids[u];
    if (id.size() < 2 || id[0] != 'u') throw Error("not a planted-cluster user id: " + id);
    clusters[u] = data.user_cluster.at(std::stoul(id.substr(1)));
  }
  return clusters;
}

}  // namespace dslrec
