#pragma once

// Adapters exposing each group to the metric machinery: an element type,
// right multiplication by a generator letter, and a canonical string key
// (two elements share a key iff they are equal).

#include <concepts>
#include <cstddef>
#include <string>
#include <vector>

#include "amalgam.hpp"
#include "base_group.hpp"
#include "torus.hpp"
#include "words.hpp"

namespace qcw {

template <typename C>
concept GroupContext = requires(C const& c, typename C::Element const& e, Letter l) {
  { c.identity() } -> std::same_as<typename C::Element>;
  { c.multiply_letter(e, l) } -> std::same_as<typename C::Element>;
  { c.multiply(e, e) } -> std::same_as<typename C::Element>;
  { c.inverse(e) } -> std::same_as<typename C::Element>;
  { c.from_word(std::span<Letter const>{}) } -> std::same_as<typename C::Element>;
  { c.key(e) } -> std::same_as<std::string>;
  { c.letters() } -> std::same_as<std::vector<Letter> const&>;
};

// One byte per letter, ordered like letter_rank, so that equal-length keys
// compare shortlex.
inline std::string encode_key(std::span<Letter const> letters) {
  std::string s(letters.size(), '\0');
  for (std::size_t i = 0; i < letters.size(); ++i) {
    s[i] = static_cast<char>(letter_rank(letters[i]) + 1);
  }
  return s;
}

inline std::vector<Letter> decode_key(std::string const& key) {
  std::vector<Letter> out;
  out.reserve(key.size());
  for (char c : key) {
    auto r = static_cast<std::size_t>(static_cast<unsigned char>(c)) - 1;
    out.push_back(make_letter(r / 2, r % 2 == 1));
  }
  return out;
}

// Free group on an alphabet (also the rank-1 infinite cyclic group).
class FreeGroupContext {
 public:
  using Element = Word;

  explicit FreeGroupContext(Alphabet alphabet)
      : alphabet_(std::move(alphabet)), letters_(alphabet_.letters()) {}
  static FreeGroupContext of_rank(std::size_t rank) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < rank; ++i) {
      names.emplace_back(1, static_cast<char>('a' + i));
    }
    return FreeGroupContext(Alphabet(names));
  }

  Alphabet const& alphabet() const noexcept { return alphabet_; }
  Element identity() const { return {}; }
  Element multiply_letter(Element const& e, Letter l) const {
    Element out = e;
    out.push_back(l);
    return out;
  }
  Element multiply(Element const& a, Element const& b) const { return word_mul(a, b); }
  Element inverse(Element const& e) const { return word_inv(e); }
  Element from_word(std::span<Letter const> raw) const { return free_reduce(alphabet_, raw); }
  std::string key(Element const& e) const { return encode_key(e.letters()); }
  std::vector<Letter> const& letters() const noexcept { return letters_; }
  std::string format(Element const& e) const { return alphabet_.format(e.letters()); }

 private:
  Alphabet alphabet_;
  std::vector<Letter> letters_;
};

// The fiber group F in either mode; keys are canonical words.
class BaseGroupContext {
 public:
  using Element = Word;

  explicit BaseGroupContext(BaseGroup base)
      : base_(std::move(base)), letters_(base_.alphabet().letters()) {}

  BaseGroup const& group() const noexcept { return base_; }
  Element identity() const { return {}; }
  Element multiply_letter(Element const& e, Letter l) const {
    Element out = e;
    out.push_back(l);
    return base_.reduce(out);
  }
  Element multiply(Element const& a, Element const& b) const { return base_.multiply(a, b); }
  Element inverse(Element const& e) const { return word_inv(e); }
  Element from_word(std::span<Letter const> raw) const { return base_.reduce(raw); }
  std::string key(Element const& e) const { return encode_key(base_.canonical(e).letters()); }
  std::vector<Letter> const& letters() const noexcept { return letters_; }
  std::string format(Element const& e) const {
    return base_.alphabet().format(base_.canonical(e).letters());
  }

 private:
  BaseGroup base_;
  std::vector<Letter> letters_;
};

// Mapping torus G with generators the base letters and t.
class TorusContext {
 public:
  using Element = TorusElement;

  explicit TorusContext(TorusGroup group)
      : group_(std::move(group)), letters_(group_.alphabet().letters()) {}

  TorusGroup const& group() const noexcept { return group_; }
  Element identity() const { return {}; }
  Element multiply_letter(Element const& e, Letter l) const {
    if (generator_of(l) == group_.t_generator()) {
      return {e.u, e.k + (is_inverse(l) ? -1 : 1)};
    }
    Word img = group_.power_apply(e.k, Word::reduce({l}));
    return {group_.base().reduce(word_mul(e.u, img)), e.k};
  }
  Element multiply(Element const& a, Element const& b) const { return group_.multiply(a, b); }
  Element inverse(Element const& e) const { return group_.inverse(e); }
  Element from_word(std::span<Letter const> raw) const { return group_.normalize(raw); }
  std::string key(Element const& e) const { return encode_key(group_.spell(e)); }
  std::vector<Letter> const& letters() const noexcept { return letters_; }
  std::string format(Element const& e) const { return group_.format(e); }

 private:
  TorusGroup group_;
  std::vector<Letter> letters_;
};

// The amalgam M; keys are the canonical rewritten words.
class AmalgamContext {
 public:
  using Element = AmalgamNF;

  explicit AmalgamContext(Amalgam m) : m_(std::move(m)), letters_(m_.alphabet().letters()) {}

  Amalgam const& group() const noexcept { return m_; }
  Element identity() const { return {}; }
  Element multiply_letter(Element const& e, Letter l) const { return m_.multiply_letter(e, l); }
  Element multiply(Element const& a, Element const& b) const { return m_.multiply(a, b); }
  Element inverse(Element const& e) const { return m_.inverse(e); }
  Element from_word(std::span<Letter const> raw) const { return m_.normalize(raw); }
  std::string key(Element const& e) const { return encode_key(m_.spell(e)); }
  std::vector<Letter> const& letters() const noexcept { return letters_; }
  std::string format(Element const& e) const { return m_.format(e); }

 private:
  Amalgam m_;
  std::vector<Letter> letters_;
};

static_assert(GroupContext<FreeGroupContext>);
static_assert(GroupContext<BaseGroupContext>);
static_assert(GroupContext<TorusContext>);
static_assert(GroupContext<AmalgamContext>);

}  // namespace qcw
