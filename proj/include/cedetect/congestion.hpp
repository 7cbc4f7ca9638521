// Copyright 2026 The cedetect Authors.
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

#ifndef CEDETECT_CONGESTION_HPP_
#define CEDETECT_CONGESTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cedetect/error.hpp"
#include "cedetect/game.hpp"

namespace cedetect {

// Directed link with BPR latency parameters.
struct Link {
  std::size_t from = 0;
  std::size_t to = 0;
  double capacity = 1.0;
  double free_flow_time = 1.0;
};

struct Commodity {
  std::size_t origin = 0;
  std::size_t destination = 0;
  double demand = 1.0;
};

struct CongestionSpec {
  std::size_t nodes = 0;
  std::vector<Link> links;
  std::vector<Commodity> players;
  std::size_t paths_per_player = 1;
  double utility_scale = 1.0;
  // Utility is scale * (offset - travel time). When unset the offset is the
  // largest travel time over all (player, profile) pairs, which makes the
  // worst outcome exactly zero.
  std::optional<double> offset;
};

struct CongestionGame {
  StrategicGame game;
  // paths[i][a] lists the link indices of player i's action a.
  std::vector<std::vector<std::vector<std::size_t>>> paths;
  double offset = 0.0;
};

// Bureau of Public Roads link performance function.
inline double bpr_travel_time(const Link& link, double load) {
  const double ratio = load / link.capacity;
  return link.free_flow_time * (1.0 + 0.15 * ratio * ratio * ratio * ratio);
}

namespace detail {

inline void enumerate_simple_paths(const std::vector<Link>& links,
                                   const std::vector<std::vector<std::size_t>>& out_links,
                                   std::size_t node, std::size_t target,
                                   std::vector<bool>& visited,
                                   std::vector<std::size_t>& current,
                                   std::vector<std::vector<std::size_t>>& found) {
  constexpr std::size_t kPathCap = 1'000'000;
  if (node == target) {
    found.push_back(current);
    if (found.size() > kPathCap) {
      throw InvalidArgument("network has too many simple paths to enumerate");
    }
    return;
  }
  visited[node] = true;
  for (std::size_t e : out_links[node]) {
    const std::size_t next = links[e].to;
    if (visited[next]) continue;
    current.push_back(e);
    enumerate_simple_paths(links, out_links, next, target, visited, current,
                           found);
    current.pop_back();
  }
  visited[node] = false;
}

}  // namespace detail

// The k simple paths from origin to destination with the smallest free-flow
// time. Ties are broken by the lexicographic order of link indices.
inline std::vector<std::vector<std::size_t>> k_shortest_paths(
    std::size_t nodes, const std::vector<Link>& links, std::size_t origin,
    std::size_t destination, std::size_t k) {
  if (origin >= nodes || destination >= nodes) {
    throw InvalidArgument("origin or destination outside the network");
  }
  if (origin == destination) {
    throw InvalidArgument("origin and destination coincide");
  }
  std::vector<std::vector<std::size_t>> out_links(nodes);
  for (std::size_t e = 0; e < links.size(); ++e) {
    if (links[e].from >= nodes || links[e].to >= nodes) {
      throw InvalidArgument("link " + std::to_string(e) + " references a missing node");
    }
    out_links[links[e].from].push_back(e);
  }
  std::vector<std::vector<std::size_t>> paths;
  std::vector<bool> visited(nodes, false);
  std::vector<std::size_t> current;
  detail::enumerate_simple_paths(links, out_links, origin, destination, visited,
                                 current, paths);
  if (paths.empty()) {
    throw InvalidArgument("node " + std::to_string(destination) +
                          " is unreachable from node " + std::to_string(origin));
  }
  if (paths.size() < k) {
    throw InvalidArgument("only " + std::to_string(paths.size()) +
                          " simple paths available, " + std::to_string(k) +
                          " requested");
  }
  auto cost = [&](const std::vector<std::size_t>& path) {
    double total = 0.0;
    for (std::size_t e : path) total += links[e].free_flow_time;
    return total;
  };
  std::stable_sort(paths.begin(), paths.end(),
                   [&](const auto& a, const auto& b) {
                     const double ca = cost(a), cb = cost(b);
                     if (ca != cb) return ca < cb;
                     return a < b;
                   });
  paths.resize(k);
  return paths;
}

// Routing game on a small network. Each player's actions are its k shortest
// free-flow paths; the cost of a profile for player i is demand_i times the
// sum of BPR link times on its path under the joint link loads.
inline CongestionGame build_congestion_game(const CongestionSpec& spec) {
  if (spec.nodes == 0 || spec.players.empty()) {
    throw InvalidArgument("congestion game needs nodes and players");
  }
  if (spec.paths_per_player == 0) {
    throw InvalidArgument("paths_per_player must be positive");
  }
  if (!(spec.utility_scale > 0.0)) {
    throw InvalidArgument("utility_scale must be positive");
  }
  for (const Link& link : spec.links) {
    if (!(link.capacity > 0.0) || !(link.free_flow_time > 0.0)) {
      throw InvalidArgument("link capacity and free-flow time must be positive");
    }
  }
  for (const Commodity& c : spec.players) {
    if (!(c.demand > 0.0)) throw InvalidArgument("demand must be positive");
  }

  const std::size_t n = spec.players.size();
  std::vector<std::vector<std::vector<std::size_t>>> paths(n);
  for (std::size_t i = 0; i < n; ++i) {
    paths[i] = k_shortest_paths(spec.nodes, spec.links, spec.players[i].origin,
                                spec.players[i].destination,
                                spec.paths_per_player);
  }

  std::vector<std::size_t> counts(n, spec.paths_per_player);
  std::size_t profiles = 1;
  for (std::size_t c : counts) profiles *= c;

  std::vector<std::vector<double>> times(n, std::vector<double>(profiles));
  std::vector<std::size_t> actions(n, 0);
  std::vector<double> load(spec.links.size());
  double worst = 0.0;
  for (std::size_t a = 0; a < profiles; ++a) {
    std::size_t rest = a;
    for (std::size_t i = n; i-- > 0;) {
      actions[i] = rest % counts[i];
      rest /= counts[i];
    }
    std::fill(load.begin(), load.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t e : paths[i][actions[i]]) load[e] += spec.players[i].demand;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double t = 0.0;
      for (std::size_t e : paths[i][actions[i]]) {
        t += bpr_travel_time(spec.links[e], load[e]);
      }
      times[i][a] = spec.players[i].demand * t;
      worst = std::max(worst, times[i][a]);
    }
  }

  const double offset = spec.offset.value_or(worst);
  if (offset < worst) {
    throw InvalidArgument("offset below the largest travel time gives negative utilities");
  }
  std::vector<std::vector<double>> utilities(n, std::vector<double>(profiles));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < profiles; ++a) {
      utilities[i][a] = spec.utility_scale * (offset - times[i][a]);
    }
  }
  return CongestionGame{StrategicGame(std::move(counts), std::move(utilities)),
                        std::move(paths), offset};
}

}  // namespace cedetect

#endif  // CEDETECT_CONGESTION_HPP_
