#pragma once

// Free words over a finite alphabet, finitely presented groups given by
// cyclically reduced relators, the small cancellation piece computation and
// Dehn's algorithm.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "rational.hpp"

namespace qcw {

// A letter is a signed generator code: +(g + 1) for generator g and
// -(g + 1) for its inverse.
using Letter = std::int32_t;

constexpr Letter make_letter(std::size_t generator, bool inverse = false) {
  auto code = static_cast<Letter>(generator + 1);
  return inverse ? -code : code;
}
constexpr std::size_t generator_of(Letter l) {
  return static_cast<std::size_t>(l < 0 ? -l : l) - 1;
}
constexpr bool is_inverse(Letter l) { return l < 0; }
constexpr Letter inverse_letter(Letter l) { return -l; }

// Position of a letter in the shortlex order: generators in declaration
// order, each immediately followed by its inverse.
constexpr std::size_t letter_rank(Letter l) {
  return 2 * generator_of(l) + (is_inverse(l) ? 1 : 0);
}

////////////////////////////////////////////////////////////////////////
// Alphabet
////////////////////////////////////////////////////////////////////////

// Generator names are a lowercase letter optionally followed by digits
// ("a", "t", "a1", "t1"); the inverse of a generator is spelled with the
// leading letter in uppercase ("A", "T1").
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!valid_name(names_[i])) {
        throw AlphabetError("invalid generator name \"" + names_[i] + "\"");
      }
      if (!index_.emplace(names_[i], i).second) {
        throw AlphabetError("duplicate generator name \"" + names_[i] + "\"");
      }
    }
  }

  static bool valid_name(std::string_view name) {
    if (name.empty() || !std::islower(static_cast<unsigned char>(name[0]))) {
      return false;
    }
    return std::all_of(name.begin() + 1, name.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
  }

  std::size_t size() const noexcept { return names_.size(); }
  std::vector<std::string> const& names() const noexcept { return names_; }
  std::string const& name(std::size_t generator) const { return names_.at(generator); }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  bool contains(Letter l) const noexcept { return l != 0 && generator_of(l) < names_.size(); }

  // All 2n letters in shortlex order.
  std::vector<Letter> letters() const {
    std::vector<Letter> out;
    out.reserve(2 * names_.size());
    for (std::size_t g = 0; g < names_.size(); ++g) {
      out.push_back(make_letter(g));
      out.push_back(make_letter(g, true));
    }
    return out;
  }

  std::string letter_name(Letter l) const {
    if (!contains(l)) {
      throw AlphabetError("letter code " + std::to_string(l) + " outside alphabet of size " +
                          std::to_string(size()));
    }
    std::string s = names_[generator_of(l)];
    if (is_inverse(l)) {
      s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    }
    return s;
  }

  // Tokenizes "a b A B", "abAB" or "a1 B1 t" into letters.
  std::vector<Letter> parse(std::string_view text) const {
    std::vector<Letter> out;
    std::size_t i = 0;
    while (i < text.size()) {
      unsigned char c = static_cast<unsigned char>(text[i]);
      if (std::isspace(c)) {
        ++i;
        continue;
      }
      if (!std::isalpha(c)) {
        throw AlphabetError("unexpected character '" + std::string(1, text[i]) + "' in word \"" +
                            std::string(text) + "\"");
      }
      std::size_t j = i + 1;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
        ++j;
      }
      std::string token(text.substr(i, j - i));
      bool inv = std::isupper(c) != 0;
      token[0] = static_cast<char>(std::tolower(c));
      auto g = find(token);
      if (!g) {
        throw AlphabetError("unknown generator \"" + std::string(text.substr(i, j - i)) + "\"");
      }
      out.push_back(make_letter(*g, inv));
      i = j;
    }
    return out;
  }

  std::string format(std::span<Letter const> letters, std::string_view separator = " ") const {
    std::string out;
    for (std::size_t i = 0; i < letters.size(); ++i) {
      if (i > 0) {
        out += separator;
      }
      out += letter_name(letters[i]);
    }
    return out;
  }

  friend bool operator==(Alphabet const& a, Alphabet const& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

////////////////////////////////////////////////////////////////////////
// Word
////////////////////////////////////////////////////////////////////////

// A freely reduced word. The empty word is the identity.
class Word {
 public:
  Word() = default;

  // Free reduction of an arbitrary letter sequence (stack scan).
  static Word reduce(std::span<Letter const> raw) {
    Word w;
    w.letters_.reserve(raw.size());
    for (Letter l : raw) {
      w.push_back(l);
    }
    return w;
  }
  static Word reduce(std::initializer_list<Letter> raw) {
    return reduce(std::span<Letter const>(raw.begin(), raw.size()));
  }

  std::span<Letter const> letters() const noexcept { return letters_; }
  std::vector<Letter> const& vec() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }
  auto begin() const noexcept { return letters_.begin(); }
  auto end() const noexcept { return letters_.end(); }

  // Right multiplication by a letter, cancelling if possible.
  void push_back(Letter l) {
    if (!letters_.empty() && letters_.back() == inverse_letter(l)) {
      letters_.pop_back();
    } else {
      letters_.push_back(l);
    }
  }

  void append(Word const& other) {
    for (Letter l : other.letters_) {
      push_back(l);
    }
  }

  friend bool operator==(Word const&, Word const&) = default;

 private:
  std::vector<Letter> letters_;
};

struct WordHash {
  std::size_t operator()(Word const& w) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (Letter l : w) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(l));
      h *= 1099511628211ULL;
    }
    return h;
  }
};

// Total order: shorter words first, equal lengths compared letter by letter
// using letter_rank.
inline bool shortlex_less(std::span<Letter const> u, std::span<Letter const> v) {
  if (u.size() != v.size()) {
    return u.size() < v.size();
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] != v[i]) {
      return letter_rank(u[i]) < letter_rank(v[i]);
    }
  }
  return false;
}
inline bool shortlex_less(Word const& u, Word const& v) {
  return shortlex_less(u.letters(), v.letters());
}

// Free reduction with alphabet validation.
inline Word free_reduce(Alphabet const& alphabet, std::span<Letter const> raw) {
  for (Letter l : raw) {
    if (!alphabet.contains(l)) {
      throw AlphabetError("letter code " + std::to_string(l) + " not in alphabet");
    }
  }
  return Word::reduce(raw);
}

inline Word word_mul(Word const& u, Word const& v) {
  Word w = u;
  w.append(v);
  return w;
}

inline Word word_inv(Word const& u) {
  std::vector<Letter> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[u.size() - 1 - i] = inverse_letter(u[i]);
  }
  return Word::reduce(out);
}

inline Word word_pow(Word const& u, std::int64_t n) {
  Word base = n < 0 ? word_inv(u) : u;
  Word out;
  for (std::int64_t i = 0; i < (n < 0 ? -n : n); ++i) {
    out.append(base);
  }
  return out;
}

inline Word parse_word(Alphabet const& alphabet, std::string_view text) {
  auto raw = alphabet.parse(text);
  return Word::reduce(raw);
}

inline bool is_cyclically_reduced(Word const& w) {
  return w.size() < 2 || w.front() != inverse_letter(w.back());
}

// Strips matching first/last letters. Returns the cyclically reduced core
// together with the conjugator p such that w = p * core * p^-1.
inline std::pair<Word, Word> cyclic_reduce_with_conjugator(Word const& w) {
  std::size_t lo = 0;
  std::size_t hi = w.size();
  while (hi - lo >= 2 && w[lo] == inverse_letter(w[hi - 1])) {
    ++lo;
    --hi;
  }
  std::vector<Letter> core(w.begin() + lo, w.begin() + hi);
  std::vector<Letter> conj(w.begin(), w.begin() + lo);
  return {Word::reduce(core), Word::reduce(conj)};
}

inline Word cyclic_reduce(Word const& w) { return cyclic_reduce_with_conjugator(w).first; }

inline std::vector<Letter> rotate_left(std::span<Letter const> w, std::size_t k) {
  std::vector<Letter> out(w.begin(), w.end());
  if (!out.empty()) {
    std::rotate(out.begin(), out.begin() + (k % out.size()), out.end());
  }
  return out;
}

// True when the cyclic words of u and v coincide (u is a rotation of v).
inline bool cyclically_equal(std::span<Letter const> u, std::span<Letter const> v) {
  if (u.size() != v.size()) {
    return false;
  }
  if (u.empty()) {
    return true;
  }
  for (std::size_t k = 0; k < u.size(); ++k) {
    bool same = true;
    for (std::size_t i = 0; i < u.size() && same; ++i) {
      same = u[(i + k) % u.size()] == v[i];
    }
    if (same) {
      return true;
    }
  }
  return false;
}

struct PrimitiveRoot {
  Word root;
  std::size_t exponent;
};

// Least-period root of the cyclic reduction of w.
inline PrimitiveRoot primitive_root(Word const& w) {
  if (w.empty()) {
    throw DegenerateInputError("primitive_root: empty word has no root");
  }
  Word core = cyclic_reduce(w);
  std::size_t n = core.size();
  for (std::size_t period = 1; period <= n; ++period) {
    if (n % period != 0) {
      continue;
    }
    bool periodic = true;
    for (std::size_t i = period; i < n && periodic; ++i) {
      periodic = core[i] == core[i - period];
    }
    if (periodic) {
      std::vector<Letter> r(core.begin(), core.begin() + period);
      return {Word::reduce(r), n / period};
    }
  }
  return {core, 1};  // unreachable: period n always works
}

////////////////////////////////////////////////////////////////////////
// Presentation
////////////////////////////////////////////////////////////////////////

class Presentation {
 public:
  Presentation() = default;
  Presentation(Alphabet alphabet, std::vector<Word> relators)
      : alphabet_(std::move(alphabet)), relators_(std::move(relators)) {
    for (auto const& r : relators_) {
      if (r.empty()) {
        throw DegenerateInputError("relators must be nonempty");
      }
      if (!is_cyclically_reduced(r)) {
        throw DegenerateInputError("relator " + alphabet_.format(r.letters()) +
                                   " is not cyclically reduced");
      }
      for (Letter l : r) {
        if (!alphabet_.contains(l)) {
          throw AlphabetError("relator letter outside alphabet");
        }
      }
    }
  }

  Alphabet const& alphabet() const noexcept { return alphabet_; }
  std::vector<Word> const& relators() const noexcept { return relators_; }

  friend bool operator==(Presentation const& a, Presentation const& b) {
    return a.alphabet_ == b.alphabet_ && a.relators_ == b.relators_;
  }

 private:
  Alphabet alphabet_;
  std::vector<Word> relators_;
};

// Text form:
//   gens: a b c d
//   rel: a b A B c d C D
// with one `rel:` line per relator. Blank lines are ignored.
inline Presentation parse_presentation(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<Alphabet> alphabet;
  std::vector<std::string> rel_lines;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ConfigError(lineno, "expected `gens:` or `rel:`");
    }
    std::string key = line.substr(first, colon - first);
    std::string rest = line.substr(colon + 1);
    if (key == "gens") {
      if (alphabet) {
        throw ConfigError(lineno, "duplicate gens line");
      }
      std::istringstream toks(rest);
      std::vector<std::string> names;
      for (std::string tok; toks >> tok;) {
        names.push_back(tok);
      }
      alphabet.emplace(std::move(names));
    } else if (key == "rel") {
      if (!alphabet) {
        throw ConfigError(lineno, "rel before gens");
      }
      rel_lines.push_back(rest);
    } else {
      throw ConfigError(lineno, "unknown key `" + key + "`");
    }
  }
  if (!alphabet) {
    throw ConfigError(0, "presentation has no gens line");
  }
  std::vector<Word> relators;
  for (auto const& r : rel_lines) {
    auto raw = alphabet->parse(r);
    Word w = Word::reduce(raw);
    if (w.size() != raw.size()) {
      throw DegenerateInputError("relator \"" + r + "\" is not freely reduced");
    }
    relators.push_back(std::move(w));
  }
  return Presentation(std::move(*alphabet), std::move(relators));
}

inline std::string format_presentation(Presentation const& p) {
  std::string out = "gens:";
  for (auto const& n : p.alphabet().names()) {
    out += " " + n;
  }
  out += "\n";
  for (auto const& r : p.relators()) {
    out += "rel: " + p.alphabet().format(r.letters()) + "\n";
  }
  return out;
}

////////////////////////////////////////////////////////////////////////
// Small cancellation
////////////////////////////////////////////////////////////////////////

struct PieceReport {
  std::size_t max_piece_length = 0;
  std::size_t min_relator_length = 0;
  Rational metric_ratio{0};
  Rational threshold{1, 6};
  bool satisfies = true;
  bool vacuous = false;
};

// Every cyclic rotation of every relator and of its inverse, without
// duplicates, in a deterministic order.
inline std::vector<std::vector<Letter>> symmetrized_relators(Presentation const& p) {
  std::vector<std::vector<Letter>> out;
  std::set<std::vector<Letter>> seen;
  for (auto const& r : p.relators()) {
    for (Word const& base : {r, word_inv(r)}) {
      for (std::size_t k = 0; k < base.size(); ++k) {
        auto rot = rotate_left(base.letters(), k);
        if (seen.insert(rot).second) {
          out.push_back(std::move(rot));
        }
      }
    }
  }
  return out;
}

// A piece is a common prefix of two distinct elements of the symmetrized
// relator set.
inline PieceReport check_small_cancellation(Presentation const& p, Rational threshold) {
  PieceReport report;
  report.threshold = threshold;
  if (p.relators().empty()) {
    report.vacuous = true;
    report.satisfies = true;
    return report;
  }
  auto sym = symmetrized_relators(p);
  std::size_t min_len = sym.front().size();
  for (auto const& r : sym) {
    min_len = std::min(min_len, r.size());
  }
  std::size_t max_piece = 0;
  for (std::size_t i = 0; i < sym.size(); ++i) {
    for (std::size_t j = i + 1; j < sym.size(); ++j) {
      auto const& u = sym[i];
      auto const& v = sym[j];
      std::size_t k = 0;
      while (k < u.size() && k < v.size() && u[k] == v[k]) {
        ++k;
      }
      max_piece = std::max(max_piece, k);
    }
  }
  report.max_piece_length = max_piece;
  report.min_relator_length = min_len;
  report.metric_ratio =
      Rational(static_cast<std::int64_t>(max_piece), static_cast<std::int64_t>(min_len));
  report.satisfies = report.metric_ratio < threshold;
  return report;
}

////////////////////////////////////////////////////////////////////////
// Dehn's algorithm
////////////////////////////////////////////////////////////////////////

// Word problem solver for C'(1/6) presentations. Scans left to right and
// replaces the leftmost, then longest, subword that is more than half of a
// symmetrized relator by the inverse of the complementary part.
class DehnReducer {
 public:
  explicit DehnReducer(Presentation p) : presentation_(std::move(p)) {
    auto report = check_small_cancellation(presentation_, Rational(1, 6));
    if (!report.satisfies) {
      throw UnsupportedPresentationError("Dehn reduction needs C'(1/6); max piece ratio is " +
                                         report.metric_ratio.to_string());
    }
    symmetrized_ = symmetrized_relators(presentation_);
    for (auto const& r : symmetrized_) {
      max_len_ = std::max(max_len_, r.size());
    }
  }

  Presentation const& presentation() const noexcept { return presentation_; }

  Word reduce(Word const& input) const {
    std::vector<Letter> w(input.begin(), input.end());
    std::size_t start = 0;
    while (true) {
      auto m = find_match(w, start);
      if (!m) {
        break;
      }
      auto const& rel = symmetrized_[m->relator];
      // rel = s * rest with s = w[pos, pos + len); s equals rest^-1.
      std::vector<Letter> replacement;
      for (std::size_t i = rel.size(); i > m->length; --i) {
        replacement.push_back(inverse_letter(rel[i - 1]));
      }
      std::size_t touched = splice(w, m->position, m->length, replacement);
      start = touched > max_len_ ? touched - max_len_ : 0;
    }
    return Word::reduce(w);
  }

  bool is_identity(Word const& w) const { return reduce(w).empty(); }

 private:
  struct Match {
    std::size_t position;
    std::size_t length;
    std::size_t relator;
  };

  std::optional<Match> find_match(std::vector<Letter> const& w, std::size_t start) const {
    for (std::size_t pos = start; pos < w.size(); ++pos) {
      std::optional<Match> best;
      for (std::size_t r = 0; r < symmetrized_.size(); ++r) {
        auto const& rel = symmetrized_[r];
        std::size_t k = 0;
        while (k < rel.size() && pos + k < w.size() && rel[k] == w[pos + k]) {
          ++k;
        }
        if (2 * k > rel.size() && (!best || k > best->length)) {
          best = Match{pos, k, r};
        }
      }
      if (best) {
        return best;
      }
    }
    return std::nullopt;
  }

  // Replaces w[pos, pos + len) by `mid` and freely reduces at both seams.
  // Returns the smallest index whose letter may have changed.
  static std::size_t splice(std::vector<Letter>& w, std::size_t pos, std::size_t len,
                            std::vector<Letter> const& mid) {
    std::vector<Letter> right(mid);
    std::size_t s = pos + len;
    // mid ++ suffix
    std::vector<Letter> suffix(w.begin() + static_cast<std::ptrdiff_t>(s), w.end());
    std::size_t si = 0;
    while (!right.empty() && si < suffix.size() && right.back() == inverse_letter(suffix[si])) {
      right.pop_back();
      ++si;
    }
    right.insert(right.end(), suffix.begin() + static_cast<std::ptrdiff_t>(si), suffix.end());
    // prefix ++ (mid ++ suffix)
    w.resize(pos);
    std::size_t ri = 0;
    while (!w.empty() && ri < right.size() && w.back() == inverse_letter(right[ri])) {
      w.pop_back();
      ++ri;
    }
    std::size_t touched = w.size();
    w.insert(w.end(), right.begin() + static_cast<std::ptrdiff_t>(ri), right.end());
    return touched;
  }

  Presentation presentation_;
  std::vector<std::vector<Letter>> symmetrized_;
  std::size_t max_len_ = 0;
};

inline Word dehn_reduce(Word const& w, Presentation const& p) { return DehnReducer(p).reduce(w); }

// Genus-g orientable surface group on generators a b c d ... with the
// single relator [a,b][c,d]...
inline Presentation surface_presentation(std::size_t genus) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < 2 * genus; ++i) {
    names.emplace_back(1, static_cast<char>('a' + i));
  }
  Alphabet alphabet(names);
  std::vector<Letter> rel;
  for (std::size_t i = 0; i < genus; ++i) {
    Letter x = make_letter(2 * i);
    Letter y = make_letter(2 * i + 1);
    rel.insert(rel.end(), {x, y, inverse_letter(x), inverse_letter(y)});
  }
  return Presentation(alphabet, {Word::reduce(rel)});
}

}  // namespace qcw
