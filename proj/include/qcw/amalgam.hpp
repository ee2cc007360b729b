#pragma once

// The cyclic amalgam M = G *_C G1 of a mapping torus G with a copy G1 of
// itself, C = <x> = <x1>. Elements are kept as alternating syllable
// sequences whose non-final syllables are the shortest representatives of
// their cosets gC, so that the spelled-out word is canonical.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "torus.hpp"
#include "words.hpp"

namespace qcw {

enum class Side { left, right };

constexpr Side other(Side s) { return s == Side::left ? Side::right : Side::left; }

// Edge words: x in the base of G and x1 in the base of G1 (written over the
// shared base alphabet), identified with each other.
struct EdgeSpec {
  Word x_left;
  Word x_right;
  friend bool operator==(EdgeSpec const&, EdgeSpec const&) = default;
};

struct Syllable {
  Side side;
  TorusElement value;
  friend bool operator==(Syllable const&, Syllable const&) = default;
};

struct AmalgamNF {
  std::vector<Syllable> syllables;
  friend bool operator==(AmalgamNF const&, AmalgamNF const&) = default;
};

// g = x^m * remainder (coset_shortest) or g = remainder * x^m
// (coset_shortest_right); remainder has minimal spelled length in its coset.
struct CosetDecomposition {
  std::int64_t m = 0;
  TorusElement remainder;
};

struct SyllableLength {
  std::size_t count = 0;
  bool in_c = false;
};

// Reasons an edge word cannot generate the amalgamated subgroup.
inline std::optional<std::string> edge_word_problem(Word const& x) {
  if (x.empty()) {
    return "edge-empty";
  }
  if (!is_cyclically_reduced(x)) {
    return "edge-not-cyclically-reduced";
  }
  if (primitive_root(x).exponent > 1) {
    return "x-proper-power";
  }
  return std::nullopt;
}

struct AmalgamOptions {
  // Bound on |m| for coset searches and edge membership in surface mode.
  std::size_t coset_window = 16;
};

class Amalgam {
 public:
  Amalgam(TorusGroup factor, EdgeSpec edge, AmalgamOptions options = {})
      : factor_(std::move(factor)), edge_(std::move(edge)), options_(options) {
    for (Word const* x : {&edge_.x_left, &edge_.x_right}) {
      if (x->empty()) {
        throw DegenerateInputError("edge word must be nonempty");
      }
      if (!is_cyclically_reduced(*x)) {
        throw DegenerateInputError("edge word must be cyclically reduced");
      }
      for (Letter l : *x) {
        if (!factor_.base().alphabet().contains(l)) {
          throw AlphabetError("edge word must lie in the base group");
        }
      }
    }
    auto names = factor_.alphabet().names();
    auto right = names;
    for (auto& n : right) {
      n += "1";
    }
    names.insert(names.end(), right.begin(), right.end());
    alphabet_ = Alphabet(names);
  }

  TorusGroup const& factor() const noexcept { return factor_; }
  EdgeSpec const& edge() const noexcept { return edge_; }
  AmalgamOptions const& options() const noexcept { return options_; }
  // Left generators (base, t) followed by right generators suffixed `1`.
  Alphabet const& alphabet() const noexcept { return alphabet_; }
  Word const& x(Side s) const noexcept { return s == Side::left ? edge_.x_left : edge_.x_right; }

  Side side_of(Letter l) const {
    if (!alphabet_.contains(l)) {
      throw AlphabetError("letter outside amalgam alphabet");
    }
    return generator_of(l) < factor_size() ? Side::left : Side::right;
  }

  // Letter of the factor alphabet corresponding to a letter of M.
  Letter to_factor(Letter l) const {
    std::size_t g = generator_of(l);
    if (g >= factor_size()) {
      g -= factor_size();
    }
    return make_letter(g, is_inverse(l));
  }
  Letter to_amalgam(Side s, Letter l) const {
    std::size_t g = generator_of(l) + (s == Side::left ? 0 : factor_size());
    return make_letter(g, is_inverse(l));
  }

  TorusElement edge_power(Side s, std::int64_t m) const {
    return {factor_.base().reduce(word_pow(x(s), m)), 0};
  }

  // m with g = x^m, if g lies in C.
  std::optional<std::int64_t> edge_membership(Side s, TorusElement const& g) const {
    if (g.k != 0) {
      return std::nullopt;
    }
    Word const& xs = x(s);
    if (factor_.base().mode() == Mode::free) {
      if (g.u.size() % xs.size() != 0) {
        return std::nullopt;
      }
      auto m = static_cast<std::int64_t>(g.u.size() / xs.size());
      if (m == 0) {
        return 0;
      }
      if (word_pow(xs, m) == g.u) {
        return m;
      }
      if (word_pow(xs, -m) == g.u) {
        return -m;
      }
      return std::nullopt;
    }
    auto w = static_cast<std::int64_t>(options_.coset_window);
    for (std::int64_t m = 0; m <= w; ++m) {
      for (std::int64_t sm : {m, -m}) {
        if (factor_.base().equal(g.u, word_pow(xs, sm))) {
          return sm;
        }
        if (m == 0) {
          break;
        }
      }
    }
    return std::nullopt;
  }

  // Shortest element of the coset C g, written g = x^m * remainder.
  CosetDecomposition coset_shortest(Side s, TorusElement const& g) const {
    // x^-m u = (u^-1 x^m)^-1; grow u^-1 x^m by right multiplication.
    Word const& xs = x(s);
    Word u_inv = word_inv(g.u);
    auto candidate = [&](Word const& acc) { return word_inv(acc); };
    return search(g, u_inv, xs, candidate);
  }

  // Shortest element of the coset g C, written g = remainder * x^m.
  CosetDecomposition coset_shortest_right(Side s, TorusElement const& g) const {
    // (u, k) x^m = (u phi^k(x)^m, k)
    Word z = factor_.power_apply(g.k, x(s));
    auto candidate = [](Word const& acc) { return acc; };
    auto dec = search(g, g.u, z, candidate);
    dec.m = -dec.m;
    return dec;
  }

  ////////////////////////////////////////////////////////////////////////
  // Normal forms
  ////////////////////////////////////////////////////////////////////////

  // Multiplies z on the right by an element g of the factor on side s,
  // restoring the normal form.
  void push(AmalgamNF& z, Side s, TorusElement const& g) const {
    if (factor_.is_identity(g)) {
      return;
    }
    auto& syl = z.syllables;
    if (syl.empty()) {
      syl.push_back({s, g});
      canonicalize_single(z);
      return;
    }
    if (syl.back().side == s) {
      TorusElement prod = factor_.multiply(syl.back().value, g);
      syl.pop_back();
      if (factor_.is_identity(prod)) {
        if (syl.size() == 1) {
          canonicalize_single(z);
        }
        return;
      }
      if (syl.empty()) {
        syl.push_back({s, std::move(prod)});
        canonicalize_single(z);
        return;
      }
      if (auto m = edge_membership(s, prod)) {
        push(z, other(s), edge_power(other(s), *m));
        return;
      }
      syl.push_back({s, std::move(prod)});
      return;
    }
    Side prev = syl.back().side;
    if (syl.size() == 1) {
      if (auto m = edge_membership(prev, syl.back().value)) {
        syl.clear();
        push(z, s, factor_.multiply(edge_power(s, *m), g));
        return;
      }
    }
    if (auto m = edge_membership(s, g)) {
      push(z, prev, edge_power(prev, *m));
      return;
    }
    auto dec = coset_shortest_right(prev, syl.back().value);
    syl.back().value = std::move(dec.remainder);
    syl.push_back({s, factor_.multiply(edge_power(s, dec.m), g)});
  }

  void push_letter(AmalgamNF& z, Letter l) const {
    Side s = side_of(l);
    push(z, s, letter_element(to_factor(l)));
  }

  // Splits into maximal single-factor runs, collects each run in its mapping
  // torus and multiplies the runs together.
  AmalgamNF normalize(std::span<Letter const> raw) const {
    AmalgamNF z;
    std::size_t i = 0;
    while (i < raw.size()) {
      Side s = side_of(raw[i]);
      std::vector<Letter> run;
      while (i < raw.size() && side_of(raw[i]) == s) {
        run.push_back(to_factor(raw[i]));
        ++i;
      }
      push(z, s, factor_.normalize(run));
    }
    return z;
  }

  AmalgamNF parse(std::string_view text) const {
    auto raw = alphabet_.parse(text);
    return normalize(raw);
  }

  AmalgamNF multiply(AmalgamNF const& a, AmalgamNF const& b) const {
    AmalgamNF z = a;
    for (auto const& s : b.syllables) {
      push(z, s.side, s.value);
    }
    return z;
  }

  AmalgamNF multiply_letter(AmalgamNF const& a, Letter l) const {
    AmalgamNF z = a;
    push_letter(z, l);
    return z;
  }

  AmalgamNF inverse(AmalgamNF const& a) const {
    AmalgamNF z;
    for (auto it = a.syllables.rbegin(); it != a.syllables.rend(); ++it) {
      push(z, it->side, factor_.inverse(it->value));
    }
    return z;
  }

  AmalgamNF from_factor(Side s, TorusElement const& g) const {
    AmalgamNF z;
    push(z, s, g);
    return z;
  }

  // Rewrites an alternating decomposition e_1 ... e_j: w_1 is the shortest
  // element of e_1 C with e_1 = w_1 c^n_1, then c^n_1 e_2 = w_2 c^n_2 and so
  // on; the last word is the canonical spelling of c^n_(j-1) e_j. Elements
  // of C are spelled x^m in the left factor.
  std::vector<Letter> bgss_rewrite(AmalgamNF const& z) const {
    std::vector<Letter> out;
    auto const& syl = z.syllables;
    if (syl.empty()) {
      return out;
    }
    if (syl.size() == 1) {
      if (auto m = edge_membership(syl[0].side, syl[0].value)) {
        append_spelled(out, Side::left, edge_power(Side::left, *m));
        return out;
      }
    }
    std::int64_t carry = 0;
    for (std::size_t i = 0; i < syl.size(); ++i) {
      Side s = syl[i].side;
      TorusElement e = factor_.multiply(edge_power(s, carry), syl[i].value);
      if (i + 1 < syl.size()) {
        auto dec = coset_shortest_right(s, e);
        append_spelled(out, s, dec.remainder);
        carry = dec.m;
      } else {
        append_spelled(out, s, e);
      }
    }
    return out;
  }

  // Concatenated canonical spellings of the stored syllables. Agrees with
  // bgss_rewrite on normal forms produced by this class.
  std::vector<Letter> spell(AmalgamNF const& z) const {
    std::vector<Letter> out;
    for (auto const& s : z.syllables) {
      append_spelled(out, s.side, s.value);
    }
    return out;
  }

  std::string format(AmalgamNF const& z) const { return alphabet_.format(spell(z)); }

  bool equal(AmalgamNF const& a, AmalgamNF const& b) const {
    return bgss_rewrite(a) == bgss_rewrite(b);
  }

  bool is_identity(AmalgamNF const& z) const { return z.syllables.empty(); }

  // Membership in H = <F, F1>: every syllable has zero t-exponent.
  bool in_h(AmalgamNF const& z) const {
    for (auto const& s : z.syllables) {
      if (s.value.k != 0) {
        return false;
      }
    }
    return true;
  }

  bool in_c(AmalgamNF const& z) const {
    if (z.syllables.empty()) {
      return true;
    }
    return z.syllables.size() == 1 &&
           edge_membership(z.syllables[0].side, z.syllables[0].value).has_value();
  }

  SyllableLength syllable_length(AmalgamNF const& z) const {
    if (in_c(z)) {
      return {0, true};
    }
    return {z.syllables.size(), false};
  }

 private:
  std::size_t factor_size() const noexcept { return factor_.alphabet().size(); }

  TorusElement letter_element(Letter factor_letter) const {
    if (generator_of(factor_letter) == factor_.t_generator()) {
      return {Word{}, is_inverse(factor_letter) ? -1 : 1};
    }
    return factor_.from_base(Word::reduce({factor_letter}));
  }

  void canonicalize_single(AmalgamNF& z) const {
    auto& s = z.syllables.front();
    if (auto m = edge_membership(s.side, s.value)) {
      s = {Side::left, edge_power(Side::left, *m)};
    }
  }

  void append_spelled(std::vector<Letter>& out, Side s, TorusElement const& g) const {
    for (Letter l : factor_.spell(g)) {
      out.push_back(to_amalgam(s, l));
    }
  }

  // Minimizes the length of candidate(acc_m) over |m| <= window where
  // acc_m = start * step^m. Ties are broken shortlex, then by smaller |m|,
  // then positive m. Returns the winning m with the remainder.
  template <typename Candidate>
  CosetDecomposition search(TorusElement const& g, Word const& start, Word const& step,
                            Candidate candidate) const {
    auto const& base = factor_.base();
    bool free_mode = base.mode() == Mode::free;
    auto window = static_cast<std::int64_t>(free_mode ? 2 * g.u.size() + 1 : options_.coset_window);
    std::optional<Word> best;
    std::int64_t best_m = 0;
    auto consider = [&](std::int64_t m, Word const& acc) {
      Word c;
      if (free_mode) {
        c = candidate(acc);
      } else {
        try {
          c = base.canonical(candidate(acc));
        } catch (CapExceededError const&) {
          // geodesic length > cap, so never better than a resolved candidate
          return;
        }
      }
      if (!best || shortlex_less(c, *best)) {
        best = std::move(c);
        best_m = m;
      }
    };
    Word pos = start;
    Word neg = start;
    Word step_inv = word_inv(step);
    consider(0, start);
    for (std::int64_t m = 1; m <= window; ++m) {
      pos.append(step);
      neg.append(step_inv);
      consider(m, pos);
      consider(-m, neg);
    }
    if (!best) {
      throw CapExceededError("coset search: every candidate exceeded the cap", base.geodesic_cap(),
                             base.geodesic_cap());
    }
    return {best_m, TorusElement{*best, g.k}};
  }

  TorusGroup factor_;
  EdgeSpec edge_;
  AmalgamOptions options_;
  Alphabet alphabet_;
};

// Default M: default_free_torus() on both sides, x = x1 = a.
inline Amalgam default_amalgam() {
  auto g = default_free_torus();
  Word a = parse_word(g.base().alphabet(), "a");
  return Amalgam(g, EdgeSpec{a, a});
}

}  // namespace qcw
