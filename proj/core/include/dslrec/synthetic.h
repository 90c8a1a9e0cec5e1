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

// Planted-cluster generator: users and items belong to taste clusters, users
// interact mostly inside their own cluster, and a chosen fraction of social
// ties connects users from different clusters.

#ifndef DSLREC_SYNTHETIC_H_
#define DSLREC_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "dslrec/data.h"

namespace dslrec {

struct PlantedClusterOptions {
  int num_users = 200;
  int num_items = 200;
  int num_clusters = 2;
  int min_interactions = 6;
  int max_interactions = 12;
  // Probability that a single interaction lands outside the user's cluster.
  double off_cluster_rate = 0.0;
  // Zipf exponent over items inside a cluster; 0 is uniform.
  double popularity_skew = 0.0;
  int num_ties = 400;
  double cross_tie_fraction = 0.5;
  std::uint64_t seed = 1;
};

struct PlantedClusterData {
  // External ids are "u<k>" and "i<k>".
  InteractionTable interactions;
  SocialTable social;
  std::vector<int> user_cluster;  // by generator index k
  std::vector<int> item_cluster;
  std::size_t cross_ties = 0;
};

PlantedClusterData GeneratePlantedClusters(const PlantedClusterOptions& options);

// Cluster of every dataset user index, looked up through external ids.
std::vector<int> UserClustersByIndex(const PlantedClusterData& data,
                                     const Dataset& dataset);

}  // namespace dslrec

#endif  // DSLREC_SYNTHETIC_H_
