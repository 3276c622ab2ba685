#pragma once

// Shared fixtures and small generators for the test suites.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "relaxmitl/energy.hpp"
#include "relaxmitl/mitl.hpp"
#include "relaxmitl/planner.hpp"
#include "relaxmitl/product.hpp"
#include "relaxmitl/relaxed_tba.hpp"
#include "relaxmitl/wts.hpp"

namespace testing_support {

using namespace relaxmitl;

inline constexpr const char* kRunningExample = "hard: G !obs ; soft: G !g & F[0,10) p";
inline constexpr const char* kCaseStudy =
    "hard: G !obstacle ; soft: G !grass & G F[0,10) cherry & G (cherry -> F[0,20) pear)";

inline const std::vector<std::string>& running_alphabet() {
  static const std::vector<std::string> a{"obs", "g", "p"};
  return a;
}

inline tba::RelaxedTba build(const std::string& text, const std::vector<std::string>& alphabet,
                             bool prune = true) {
  tba::BuildOptions opts;
  opts.prune = prune;
  return tba::build_relaxed_tba(mitl::parse(text, alphabet), opts);
}

inline tba::RelaxedTba running_example(bool prune = true) {
  return build(kRunningExample, running_alphabet(), prune);
}

inline wts::AtomSet bit(const std::vector<std::string>& alphabet, const std::string& name) {
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (alphabet[i] == name) return wts::AtomSet{1} << i;
  return 0;
}

/// Grid whose cells are given as rows of characters, top row first.
/// '.' free, 'o' obstacle, 'g' grass, 'p' pear, 'c' cherry.
struct Layout {
  int width = 0;
  int height = 0;
  std::vector<wts::AtomSet> labels;
};

inline Layout layout(const std::vector<std::string>& rows, const std::vector<std::string>& alphabet) {
  Layout l;
  l.height = static_cast<int>(rows.size());
  l.width = static_cast<int>(rows.front().size());
  l.labels.assign(static_cast<std::size_t>(l.width * l.height), 0);
  for (int r = 0; r < l.height; ++r) {
    const int y = l.height - 1 - r;
    for (int x = 0; x < l.width; ++x) {
      wts::AtomSet& cell = l.labels[static_cast<std::size_t>(y * l.width + x)];
      switch (rows[r][x]) {
        case 'o': cell |= bit(alphabet, "obs") | bit(alphabet, "obstacle"); break;
        case 'g': cell |= bit(alphabet, "g") | bit(alphabet, "grass"); break;
        case 'p': cell |= bit(alphabet, "p") | bit(alphabet, "pear"); break;
        case 'c': cell |= bit(alphabet, "cherry"); break;
        default: break;
      }
    }
  }
  return l;
}

inline product::Rpa make_rpa(const tba::RelaxedTba& t, int w, int h, std::vector<wts::AtomSet> labels,
                             wts::Cell start = {0, 0}) {
  return product::Rpa(wts::Wts::from_grid(w, h, t.alphabet, std::move(labels), start), t);
}

/// Random labels over {g, p} on a w x h grid (running-example alphabet); the
/// start cell stays unlabeled. Obstacles are added with probability `p_obs`.
inline std::vector<wts::AtomSet> random_labels(std::mt19937_64& rng, int w, int h, double p_obs,
                                               wts::Cell start = {0, 0}) {
  std::bernoulli_distribution grass(0.2), pear(0.15), obstacle(p_obs);
  std::vector<wts::AtomSet> out(static_cast<std::size_t>(w * h), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (x == start.x && y == start.y) continue;
      wts::AtomSet& l = out[static_cast<std::size_t>(y * w + x)];
      if (obstacle(rng)) {
        l = 1;  // obs
        continue;
      }
      if (grass(rng)) l |= 2;
      if (pear(rng)) l |= 4;
    }
  return out;
}

}  // namespace testing_support
