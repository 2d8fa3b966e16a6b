#pragma once

#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "top/domain.hpp"

namespace testutil {

inline std::string fixture(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

inline top::GridMap make_grid(int w, int h, const std::string& rows) {
  std::ostringstream ss;
  ss << "type octile\nheight " << h << "\nwidth " << w << "\nmap\n" << rows;
  return top::parse_map(ss.str());
}

// 1 x n open corridor.
inline top::Domain corridor(int n, std::vector<top::NodeId> transit, int r) {
  return top::Domain::from_grid(make_grid(n, 1, std::string(n, '.') + "\n"), std::move(transit),
                                r, "corridor");
}

inline top::GridMap random_grid(std::mt19937_64& rng, int w, int h, double obstacle_frac) {
  std::string rows;
  std::uniform_real_distribution<double> u(0, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) rows += u(rng) < obstacle_frac ? '@' : '.';
    rows += '\n';
  }
  return make_grid(w, h, rows);
}

struct TestInstance {
  top::Domain domain;
  top::NodeId s, g;
};

// Random s, g and transit candidates, all mutually reachable. nullopt when
// the sampled map cannot host the request.
inline std::optional<TestInstance> sample_instance(std::mt19937_64& rng, const top::GridMap& map,
                                                   int n_transit, int r) {
  top::Domain probe = top::Domain::from_grid(map, {}, 0, "probe");
  int n = probe.node_count();
  if (n < n_transit + 2) return std::nullopt;
  for (int attempt = 0; attempt < 50; ++attempt) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    top::NodeId s = pick(rng), g = pick(rng);
    if (s == g || probe.dist(s, g) == top::kInfCost) continue;
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<top::NodeId> transit;
    for (int v : order) {
      if (v == s || v == g) continue;
      if (probe.dist(s, v) == top::kInfCost || probe.dist(v, g) == top::kInfCost) continue;
      transit.push_back(v);
      if ((int)transit.size() == n_transit) break;
    }
    if ((int)transit.size() < n_transit) continue;
    std::sort(transit.begin(), transit.end());
    return TestInstance{top::Domain::from_grid(map, transit, r, "random"), s, g};
  }
  return std::nullopt;
}

}  // namespace testutil
