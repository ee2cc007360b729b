#pragma once

// Reference implementations used as oracles by the tests. They share no
// code paths with the library beyond word parsing and torus normal forms.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qcw/amalgam.hpp"
#include "qcw/torus.hpp"
#include "qcw/words.hpp"

namespace qcw::test {

// Deletes adjacent inverse pairs by repeated scanning until none remain.
inline std::vector<Letter> naive_free_reduce(std::vector<Letter> w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] == -w[i + 1]) {
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(i),
                w.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        changed = true;
        break;
      }
    }
  }
  return w;
}

inline std::vector<Letter> random_raw(std::mt19937_64& rng, std::vector<Letter> const& letters,
                                      std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
  std::vector<Letter> w(len(rng));
  for (auto& l : w) {
    l = letters[pick(rng)];
  }
  return w;
}

inline std::vector<Letter> invert_raw(std::vector<Letter> const& w) {
  std::vector<Letter> out(w.rbegin(), w.rend());
  for (auto& l : out) {
    l = -l;
  }
  return out;
}

inline std::vector<Letter> concat(std::vector<Letter> a, std::vector<Letter> const& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// m with u = x^m for free-mode words, by comparing against every power of
// matching length.
inline std::optional<std::int64_t> naive_power_of(Word const& u, Word const& x) {
  for (std::int64_t m = -static_cast<std::int64_t>(u.size());
       m <= static_cast<std::int64_t>(u.size()); ++m) {
    if (word_pow(x, m) == u) {
      return m;
    }
  }
  return std::nullopt;
}

// Identity test in M by pinching, free mode: cut the word into maximal
// single-factor runs, collect each run in its torus, and repeatedly delete
// trivial runs and move runs lying in C to the other side (x^m <-> x1^m),
// merging neighbours. A reduced alternating product with no run in C is
// never trivial.
inline bool pinch_is_identity(Amalgam const& m, std::vector<Letter> const& raw) {
  auto const& g = m.factor();
  struct Run {
    Side side;
    std::vector<Letter> letters;  // factor letters
  };
  std::vector<Run> runs;
  for (Letter l : raw) {
    Side s = m.side_of(l);
    if (runs.empty() || runs.back().side != s) {
      runs.push_back({s, {}});
    }
    runs.back().letters.push_back(m.to_factor(l));
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      auto e = g.normalize(runs[i].letters);
      std::optional<std::int64_t> c;
      if (e.k == 0) {
        c = e.u.empty() ? std::optional<std::int64_t>(0) : naive_power_of(e.u, m.x(runs[i].side));
      }
      if (!c) {
        continue;
      }
      if (*c != 0 && runs.size() == 1) {
        return false;
      }
      if (*c == 0) {
        runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        Side other_side = other(runs[i].side);
        Word xo = word_pow(m.x(other_side), *c);
        runs[i] = {other_side, std::vector<Letter>(xo.begin(), xo.end())};
      }
      // merge equal neighbours
      std::vector<Run> merged;
      for (auto& r : runs) {
        if (!merged.empty() && merged.back().side == r.side) {
          merged.back().letters.insert(merged.back().letters.end(), r.letters.begin(),
                                       r.letters.end());
        } else {
          merged.push_back(std::move(r));
        }
      }
      runs = std::move(merged);
      changed = true;
      break;
    }
  }
  return runs.empty();
}

inline bool pinch_equal(Amalgam const& m, std::vector<Letter> const& a,
                        std::vector<Letter> const& b) {
  return pinch_is_identity(m, concat(a, invert_raw(b)));
}

}  // namespace qcw::test
