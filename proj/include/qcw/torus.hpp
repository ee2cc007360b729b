#pragma once

// Mapping tori G = < F, t | t f t^-1 = phi(f) > and their normal forms u t^k.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "base_group.hpp"
#include "error.hpp"
#include "words.hpp"

namespace qcw {

enum class Direction { forward, backward };

// An automorphism of the fiber group, given by the images of the generators
// under phi (forward) and phi^-1 (backward).
class Automorphism {
 public:
  Automorphism() = default;
  Automorphism(std::vector<Word> forward, std::vector<Word> backward)
      : forward_(std::move(forward)), backward_(std::move(backward)) {
    if (forward_.size() != backward_.size()) {
      throw DegenerateInputError("forward and backward tables have different sizes");
    }
  }

  // Tables given as text, one entry per generator in alphabet order.
  static Automorphism parse(Alphabet const& alphabet, std::vector<std::string> const& forward,
                            std::vector<std::string> const& backward) {
    if (forward.size() != alphabet.size() || backward.size() != alphabet.size()) {
      throw DegenerateInputError("automorphism tables must cover every generator");
    }
    std::vector<Word> f;
    std::vector<Word> b;
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
      f.push_back(parse_word(alphabet, forward[i]));
      b.push_back(parse_word(alphabet, backward[i]));
    }
    return {std::move(f), std::move(b)};
  }

  static Automorphism identity(std::size_t rank) {
    std::vector<Word> t;
    for (std::size_t g = 0; g < rank; ++g) {
      t.push_back(Word::reduce({make_letter(g)}));
    }
    return {t, t};
  }

  std::size_t rank() const noexcept { return forward_.size(); }
  std::vector<Word> const& table(Direction d) const noexcept {
    return d == Direction::forward ? forward_ : backward_;
  }

  friend bool operator==(Automorphism const&, Automorphism const&) = default;

 private:
  std::vector<Word> forward_;
  std::vector<Word> backward_;
};

// Substitutes generator images into w (images of inverse letters are the
// inverted images) and freely reduces. Exposed for use with raw tables.
inline Word substitute(std::vector<Word> const& images, Word const& w) {
  Word out;
  for (Letter l : w) {
    std::size_t g = generator_of(l);
    if (g >= images.size()) {
      throw AlphabetError("letter outside automorphism domain");
    }
    if (is_inverse(l)) {
      auto const& img = images[g];
      for (std::size_t i = img.size(); i > 0; --i) {
        out.push_back(inverse_letter(img[i - 1]));
      }
    } else {
      out.append(images[g]);
    }
  }
  return out;
}

// Element u t^k of a mapping torus.
struct TorusElement {
  Word u;
  std::int64_t k = 0;

  bool is_identity_word() const noexcept { return u.empty() && k == 0; }
  friend bool operator==(TorusElement const&, TorusElement const&) = default;
};

struct GrowthProfile {
  std::vector<std::size_t> lengths;
  std::optional<double> estimated_rate;
};

class TorusGroup {
 public:
  TorusGroup(BaseGroup base, Automorphism phi, std::string t_name = "t")
      : base_(std::move(base)),
        phi_(std::move(phi)),
        t_name_(std::move(t_name)),
        memo_(std::make_shared<PowerMemo>()) {
    if (phi_.rank() != base_.alphabet().size()) {
      throw DegenerateInputError("automorphism rank " + std::to_string(phi_.rank()) +
                                 " does not match base rank " +
                                 std::to_string(base_.alphabet().size()));
    }
    auto names = base_.alphabet().names();
    names.push_back(t_name_);
    alphabet_ = Alphabet(names);
  }

  BaseGroup const& base() const noexcept { return base_; }
  Automorphism const& automorphism() const noexcept { return phi_; }
  // Base generators followed by t.
  Alphabet const& alphabet() const noexcept { return alphabet_; }
  std::size_t t_generator() const noexcept { return base_.alphabet().size(); }
  Letter t_letter(bool inverse = false) const { return make_letter(t_generator(), inverse); }

  // Checks that the tables define mutually inverse endomorphisms and, in
  // surface mode, that relators map to the identity. Throws HypothesisError.
  void validate() const {
    std::size_t rank = phi_.rank();
    for (std::size_t g = 0; g < rank; ++g) {
      Word gen = Word::reduce({make_letter(g)});
      auto const& name = base_.alphabet().name(g);
      if (!base_.equal(apply(apply(gen, Direction::forward), Direction::backward), gen)) {
        throw HypothesisError("invalid-automorphism", "backward(forward(" + name + ")) != " + name);
      }
      if (!base_.equal(apply(apply(gen, Direction::backward), Direction::forward), gen)) {
        throw HypothesisError("invalid-automorphism", "forward(backward(" + name + ")) != " + name);
      }
    }
    if (auto const* p = base_.presentation()) {
      for (auto const& r : p->relators()) {
        for (auto d : {Direction::forward, Direction::backward}) {
          if (!base_.is_identity(apply(r, d))) {
            throw HypothesisError(
                "invalid-automorphism",
                "image of relator " + p->alphabet().format(r.letters()) + " is not trivial");
          }
        }
      }
    }
  }

  Word apply(Word const& w, Direction d) const {
    return base_.reduce(substitute(phi_.table(d), w));
  }

  // phi^n(w); negative n applies phi^-1.
  Word power_apply(std::int64_t n, Word const& w) const {
    if (n == 0) {
      return w;
    }
    return base_.reduce(substitute(power_images(n), w));
  }

  // Generator images under phi^n, memoized per exponent.
  std::vector<Word> const& power_images(std::int64_t n) const {
    std::lock_guard lock(memo_->mutex);
    auto& m = memo_->images;
    if (auto it = m.find(n); it != m.end()) {
      return it->second;
    }
    if (m.empty()) {
      m.emplace(0, Automorphism::identity(phi_.rank()).table(Direction::forward));
    }
    auto step = n > 0 ? 1 : -1;
    auto const& one = phi_.table(n > 0 ? Direction::forward : Direction::backward);
    std::int64_t have = 0;
    for (std::int64_t e = step; e != n + step; e += step) {
      if (m.contains(e)) {
        have = e;
      }
    }
    for (std::int64_t e = have + step; e != n + step; e += step) {
      auto const& prev = m.at(e - step);
      std::vector<Word> next;
      next.reserve(one.size());
      // phi^e(g) = phi^(e-1)(phi(g))
      for (auto const& img : one) {
        next.push_back(base_.reduce(substitute(prev, img)));
      }
      m.emplace(e, std::move(next));
    }
    return m.at(n);
  }

  // Collects a raw word over base letters and t into normal form u t^k.
  TorusElement normalize(std::span<Letter const> raw) const {
    Word u;
    std::int64_t k = 0;
    for (Letter l : raw) {
      if (!alphabet_.contains(l)) {
        throw AlphabetError("letter outside torus alphabet");
      }
      if (generator_of(l) == t_generator()) {
        k += is_inverse(l) ? -1 : 1;
        continue;
      }
      if (k == 0) {
        u.push_back(l);
        continue;
      }
      auto const& img = power_images(k)[generator_of(l)];
      if (is_inverse(l)) {
        for (std::size_t i = img.size(); i > 0; --i) {
          u.push_back(inverse_letter(img[i - 1]));
        }
      } else {
        u.append(img);
      }
    }
    return {base_.reduce(u), k};
  }

  TorusElement parse(std::string_view text) const {
    auto raw = alphabet_.parse(text);
    return normalize(raw);
  }

  TorusElement from_base(Word u) const { return {base_.reduce(u), 0}; }

  TorusElement multiply(TorusElement const& g, TorusElement const& h) const {
    return {base_.reduce(word_mul(g.u, power_apply(g.k, h.u))), g.k + h.k};
  }

  TorusElement inverse(TorusElement const& g) const {
    return {power_apply(-g.k, word_inv(g.u)), -g.k};
  }

  bool is_identity(TorusElement const& g) const { return g.k == 0 && base_.is_identity(g.u); }

  bool equal(TorusElement const& g, TorusElement const& h) const {
    return g.k == h.k && base_.equal(g.u, h.u);
  }

  // Canonical spelling: canonical base word followed by t^k.
  std::vector<Letter> spell(TorusElement const& g) const {
    Word c = base_.canonical(g.u);
    std::vector<Letter> out(c.begin(), c.end());
    Letter t = t_letter(g.k < 0);
    for (std::int64_t i = 0; i < (g.k < 0 ? -g.k : g.k); ++i) {
      out.push_back(t);
    }
    return out;
  }

  // Length of the canonical spelling, an upper bound for the word length in G.
  std::size_t spelled_length(TorusElement const& g) const {
    return base_.length(g.u) + static_cast<std::size_t>(g.k < 0 ? -g.k : g.k);
  }

  std::string format(TorusElement const& g) const { return alphabet_.format(spell(g)); }

 private:
  struct PowerMemo {
    std::mutex mutex;
    std::map<std::int64_t, std::vector<Word>> images;
  };

  BaseGroup base_;
  Automorphism phi_;
  std::string t_name_;
  Alphabet alphabet_;
  std::shared_ptr<PowerMemo> memo_;
};

inline bool base_membership(TorusElement const& g) { return g.k == 0; }

// |phi^n(w)| for n = 0..n_max, with lengths taken after reduction.
inline GrowthProfile growth_profile(TorusGroup const& group, Word const& w, std::size_t n_max) {
  if (w.empty()) {
    throw DegenerateInputError("growth_profile needs a nonempty word");
  }
  GrowthProfile p;
  Word cur = group.base().reduce(w);
  p.lengths.push_back(cur.size());
  for (std::size_t n = 1; n <= n_max; ++n) {
    cur = group.apply(cur, Direction::forward);
    p.lengths.push_back(cur.size());
  }
  if (n_max > 0) {
    p.estimated_rate =
        static_cast<double>(p.lengths[n_max]) / static_cast<double>(p.lengths[n_max - 1]);
  }
  return p;
}

////////////////////////////////////////////////////////////////////////
// Presets
////////////////////////////////////////////////////////////////////////

// F(a, b, c) with the positive automorphism a -> b, b -> c, c -> ab.
inline TorusGroup default_free_torus() {
  Alphabet f({"a", "b", "c"});
  auto phi = Automorphism::parse(f, {"b", "c", "ab"}, {"cA", "a", "b"});
  return {BaseGroup::free(f), phi};
}

// Genus 2 surface group with the composite of the twists a -> ab,
// b -> bA on each handle.
inline TorusGroup default_surface_torus(std::size_t geodesic_cap) {
  auto p = surface_presentation(2);
  Alphabet const& f = p.alphabet();
  auto phi = Automorphism::parse(f, {"abA", "bA", "cdC", "dC"}, {"aB", "baB", "cD", "dcD"});
  return {BaseGroup::surface(p, geodesic_cap), phi};
}

}  // namespace qcw
