#pragma once

// Exhaustive rooted-isomorphism search: every bijection that fixes the root and maps each
// dimension class onto itself is generated and filtered by the induced order. Bijections that
// move the root or change dimensions fail the filter anyway, so skipping them loses nothing.

#include <cenn/complex.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace oracle {

inline std::vector<cenn::PatchMap> all_rooted_isomorphisms(const cenn::RootedPatch& p1, const cenn::RootedPatch& p2) {
  std::vector<cenn::PatchMap> out;
  const auto n = p1.size();
  if (p2.size() != n || p1.dim(p1.root_position) != p2.dim(p2.root_position)) return out;

  // Dimension classes without the roots: sources from p1, candidate images from p2.
  std::map<std::size_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> classes;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != p1.root_position) classes[p1.dim(i)].first.push_back(i);
    if (i != p2.root_position) classes[p2.dim(i)].second.push_back(i);
  }
  for (const auto& [d, c] : classes)
    if (c.first.size() != c.second.size()) return out;

  std::vector<std::vector<std::size_t>*> images;
  std::vector<const std::vector<std::size_t>*> sources;
  for (auto& [d, c] : classes) {
    std::ranges::sort(c.second);
    sources.push_back(&c.first);
    images.push_back(&c.second);
  }

  cenn::PatchMap phi(n);
  phi[p1.root_position] = p2.root_position;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == images.size()) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (p1.leq(i, j) != p2.leq(phi[i], phi[j])) return;
      out.push_back(phi);
      return;
    }
    auto& img = *images[k];
    std::ranges::sort(img);
    do {
      for (std::size_t t = 0; t < img.size(); ++t) phi[(*sources[k])[t]] = img[t];
      rec(k + 1);
    } while (std::ranges::next_permutation(img).found);
  };
  rec(0);
  std::ranges::sort(out);
  return out;
}

}  // namespace oracle
