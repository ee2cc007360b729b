#pragma once

// The fiber group F of a mapping torus: either a free group on the
// alphabet, or a surface group given by a C'(1/6) presentation.

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "words.hpp"

namespace qcw {

enum class Mode { free, surface };

inline std::string to_string(Mode m) { return m == Mode::free ? "free" : "surface"; }

namespace detail {

// Shortlex-least geodesics of a one-relator-style surface group, enumerated
// breadth first and memoized. Elements are bucketed by their image in the
// abelianization; equality inside a bucket is decided by Dehn reduction.
class GeodesicTable {
 public:
  GeodesicTable(DehnReducer const& dehn, std::size_t cap) : dehn_(dehn), cap_(cap) {
    layers_.push_back({Word{}});
    buckets_[abelian_key(Word{})].push_back(Word{});
  }

  std::size_t cap() const noexcept { return cap_; }

  // Shortlex-least geodesic equal to w, provided its length is <= cap.
  Word canonical(Word const& w) {
    std::lock_guard lock(mutex_);
    Word d = dehn_.reduce(w);
    auto key = abelian_key(d);
    std::size_t bound = std::min(d.size(), cap_);
    for (std::size_t r = 0; r <= bound; ++r) {
      extend_to(r);
      auto it = buckets_.find(key);
      if (it == buckets_.end()) {
        continue;
      }
      for (auto const& cand : it->second) {
        if (cand.size() == r && dehn_.is_identity(word_mul(d, word_inv(cand)))) {
          return cand;
        }
      }
    }
    throw CapExceededError("surface geodesic search exceeded cap " + std::to_string(cap_), cap_,
                           d.size());
  }

 private:
  std::vector<std::int64_t> abelian_key(Word const& w) const {
    std::vector<std::int64_t> v(dehn_.presentation().alphabet().size(), 0);
    for (Letter l : w) {
      v[generator_of(l)] += is_inverse(l) ? -1 : 1;
    }
    return v;
  }

  void extend_to(std::size_t radius) {
    auto letters = dehn_.presentation().alphabet().letters();
    while (layers_.size() <= radius) {
      std::vector<Word> next;
      for (auto const& w : layers_.back()) {
        for (Letter l : letters) {
          if (!w.empty() && w.back() == inverse_letter(l)) {
            continue;
          }
          Word cand = w;
          cand.push_back(l);
          auto& bucket = buckets_[abelian_key(cand)];
          bool known = false;
          for (auto const& e : bucket) {
            if (dehn_.is_identity(word_mul(cand, word_inv(e)))) {
              known = true;
              break;
            }
          }
          if (!known) {
            bucket.push_back(cand);
            next.push_back(std::move(cand));
          }
        }
      }
      layers_.push_back(std::move(next));
    }
  }

  DehnReducer const& dehn_;
  std::size_t cap_;
  std::vector<std::vector<Word>> layers_;
  std::map<std::vector<std::int64_t>, std::vector<Word>> buckets_;
  std::mutex mutex_;
};

}  // namespace detail

class BaseGroup {
 public:
  static BaseGroup free(Alphabet alphabet) {
    BaseGroup g;
    g.alphabet_ = std::move(alphabet);
    return g;
  }

  // geodesic_cap bounds the length of canonical (shortlex geodesic) words.
  static BaseGroup surface(Presentation p, std::size_t geodesic_cap) {
    BaseGroup g;
    g.mode_ = Mode::surface;
    g.alphabet_ = p.alphabet();
    g.surface_ = std::make_shared<Surface>(std::move(p), geodesic_cap);
    return g;
  }

  Mode mode() const noexcept { return mode_; }
  Alphabet const& alphabet() const noexcept { return alphabet_; }
  Presentation const* presentation() const noexcept {
    return surface_ ? &surface_->dehn.presentation() : nullptr;
  }
  std::size_t geodesic_cap() const noexcept { return surface_ ? surface_->table.cap() : 0; }

  // Free reduction, followed by Dehn reduction in surface mode. Not canonical
  // in surface mode.
  Word reduce(Word const& w) const { return surface_ ? surface_->dehn.reduce(w) : w; }
  Word reduce(std::span<Letter const> raw) const { return reduce(free_reduce(alphabet_, raw)); }

  Word multiply(Word const& u, Word const& v) const { return reduce(word_mul(u, v)); }

  bool is_identity(Word const& w) const {
    return surface_ ? surface_->dehn.is_identity(w) : w.empty();
  }

  bool equal(Word const& u, Word const& v) const {
    if (u == v) {
      return true;
    }
    return surface_ ? is_identity(word_mul(u, word_inv(v))) : false;
  }

  // Unique representative: the reduced word in free mode, the shortlex-least
  // geodesic in surface mode (CapExceededError past the geodesic cap).
  Word canonical(Word const& w) const { return surface_ ? surface_->table.canonical(w) : w; }

  std::size_t length(Word const& w) const { return canonical(w).size(); }

 private:
  struct Surface {
    Surface(Presentation p, std::size_t cap) : dehn(std::move(p)), table(dehn, cap) {}
    DehnReducer dehn;
    detail::GeodesicTable table;
  };

  BaseGroup() = default;

  Mode mode_ = Mode::free;
  Alphabet alphabet_;
  std::shared_ptr<Surface> surface_;
};

}  // namespace qcw
