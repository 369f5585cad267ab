#pragma once

// Shared generators for the test suites. Everything here is deliberately
// simple and independent of the library's search machinery.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fh/family.hpp"
#include "fh/space.hpp"
#include "fh/tree.hpp"

namespace testutil {

inline fh::SpaceModel sierpinski() {
  return fh::SpaceModel::poset({"bot", "top"}, {{0, 1}});
}

inline fh::SpaceModel random_poset(std::mt19937_64& rng, int n) {
  std::vector<std::pair<int, int>> pairs;
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) pairs.emplace_back(i, j);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  return fh::SpaceModel::poset(names, pairs);
}

namespace detail {

inline void fill_layer(std::mt19937_64& rng, fh::TFamily& f, const fh::IterTree& layer,
                       const fh::FamilyPath& prefix, std::uint64_t window, int level) {
  auto nodes = fh::detail::layer_nodes(layer);
  const auto opens = fh::enumerate_opens(*f.space);
  std::uniform_int_distribution<std::size_t> pick_open(0, opens.size() - 1);
  std::uniform_int_distribution<std::uint64_t> pick_bits(0, f.space->all_points());
  for (const auto& [addr, label] : nodes) {
    fh::FamilyPath p = prefix;
    p.push_back(addr);
    std::uint64_t bits;
    if (addr.empty()) {
      bits = window;
    } else {
      fh::NodeAddr parent_addr(addr.begin(), addr.end() - 1);
      fh::FamilyPath pp = prefix;
      pp.push_back(parent_addr);
      std::uint64_t parent = f.sets.at(pp).bits;
      bits = (level == 0 && f.space->is_poset() ? opens[pick_open(rng)]
                                                : pick_bits(rng)) &
             parent;
    }
    f.sets[p] = fh::make_set(*f.space, bits);
  }
  for (const auto& [addr, label] : nodes) {
    if (fh::detail::collapses_to_base(*label)) continue;
    fh::FamilyPath p = prefix;
    p.push_back(addr);
    fill_layer(rng, f, *label, p, fh::tilde(f, p).bits, level + 1);
  }
}

}  // namespace detail

/// A random monotone family with the given shape: layer-0 sets are random
/// opens nested along the tree; deeper layers draw arbitrary subsets of
/// their component window.
inline fh::TFamily random_family(std::mt19937_64& rng, const fh::SpaceModel& space,
                                 const fh::IterTree& shape) {
  fh::TFamily f;
  f.shape = shape;
  f.space = &space;
  detail::fill_layer(rng, f, shape, {}, space.all_points(), 0);
  return f;
}

}  // namespace testutil
