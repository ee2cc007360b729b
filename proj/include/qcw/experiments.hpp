#pragma once

// Quantitative checks run on a configured amalgam: coset decompositions of
// powers of y, growth of q y^n, Gromov products against H, and cosets of
// H meet gHg^-1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "amalgam.hpp"
#include "contexts.hpp"
#include "error.hpp"
#include "metric.hpp"
#include "rational.hpp"
#include "torus.hpp"
#include "words.hpp"

namespace qcw {

////////////////////////////////////////////////////////////////////////
// Hypotheses on y
////////////////////////////////////////////////////////////////////////

struct YCheck {
  bool ok = true;
  std::string reason;  // empty when ok
  bool partial = false;
};

struct YCheckOptions {
  // Bounds on k and m in y^k ~ x^m.
  std::int64_t power_window = 8;
  // Bound on |j| for the twisted images phi^j(y). 0 compares cyclic words
  // in F only; larger values test conjugacy in the mapping torus.
  std::int64_t twist_window = 0;
};

// y must be cyclically reduced (so |y^n| = |n||y|) and no power y^k may be
// conjugate to a power x^m within the windows. In surface mode the
// words are Dehn reduced first and the result is marked partial.
inline YCheck validate_y(TorusGroup const& g, Word const& x, Word const& y,
                         YCheckOptions const& opt = {}) {
  YCheck out;
  out.partial = g.base().mode() == Mode::surface;
  Word yr = g.base().reduce(y);
  if (yr.empty()) {
    return {false, "y-trivial", out.partial};
  }
  if (!is_cyclically_reduced(yr)) {
    return {false, "periodic-geodesic", out.partial};
  }
  Word xc = cyclic_reduce(g.base().reduce(x));
  if (xc.empty()) {
    return out;
  }
  for (std::int64_t j = -opt.twist_window; j <= opt.twist_window; ++j) {
    Word c = cyclic_reduce(g.power_apply(j, yr));
    for (std::int64_t k = 1; k <= opt.power_window; ++k) {
      std::size_t len = static_cast<std::size_t>(k) * c.size();
      if (len % xc.size() != 0) {
        continue;
      }
      auto m = static_cast<std::int64_t>(len / xc.size());
      if (m > opt.power_window) {
        continue;
      }
      Word yk = cyclic_reduce(word_pow(c, k));
      if (cyclically_equal(yk, word_pow(xc, m)) || cyclically_equal(yk, word_pow(xc, -m))) {
        return {false, "power-conjugate", out.partial};
      }
    }
  }
  return out;
}

// Throws HypothesisError unless x generates a maximal cyclic subgroup and y
// passes validate_y.
inline void require_xy(TorusGroup const& g, Word const& x, Word const& y,
                       YCheckOptions const& opt = {}) {
  if (auto why = edge_word_problem(x)) {
    throw HypothesisError(*why, "x = " + g.base().alphabet().format(x.letters()));
  }
  auto c = validate_y(g, x, y, opt);
  if (!c.ok) {
    throw HypothesisError(c.reason, "y = " + g.base().alphabet().format(y.letters()));
  }
}

////////////////////////////////////////////////////////////////////////
// Coset decompositions of y^n
////////////////////////////////////////////////////////////////////////

struct Claim1Row {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::size_t c_length = 0;  // spelled length of x^m
  std::size_t u_length = 0;  // spelled length of the coset-shortest part
};

struct Claim1Result {
  std::vector<Claim1Row> rows;
  std::size_t k_hat = 0;
};

// y^n = x^m u with u shortest in C y^n, for n in [n_min, n_max].
inline Claim1Result exp_claim1(Amalgam const& m, Word const& y, std::int64_t n_min,
                               std::int64_t n_max) {
  auto const& g = m.factor();
  require_xy(g, m.x(Side::left), y);
  Claim1Result out;
  for (std::int64_t n = n_min; n <= n_max; ++n) {
    auto dec = m.coset_shortest(Side::left, g.from_base(word_pow(y, n)));
    Claim1Row row;
    row.n = n;
    row.m = dec.m;
    row.c_length = g.spelled_length(m.edge_power(Side::left, dec.m));
    row.u_length = g.spelled_length(dec.remainder);
    out.k_hat = std::max(out.k_hat, row.c_length);
    out.rows.push_back(row);
  }
  return out;
}

////////////////////////////////////////////////////////////////////////
// Growth of q y^n
////////////////////////////////////////////////////////////////////////

struct Claim2Row {
  std::string q;
  std::int64_t n = 0;
  std::size_t proxy_len = 0;  // length of the rewritten normal form
  std::optional<std::size_t> exact_len;
  bool capped = false;
};

struct Claim2Fit {
  std::string q;
  Rational slope;  // least squares slope of proxy_len against n
  // Least D on a 1/1000 grid with exact_len >= n/D - D on every exact row;
  // nullopt when no row with n >= 1 is exact.
  std::optional<Rational> d_hat;
};

struct Claim2Result {
  std::vector<Claim2Row> rows;
  std::vector<Claim2Fit> fits;
  std::optional<Rational> d_hat;  // max over q
};

// q must lie in C or end with a syllable of G1 outside C.
inline void require_q_ending(Amalgam const& m, AmalgamNF const& q, std::string const& label) {
  if (m.in_c(q)) {
    return;
  }
  if (q.syllables.back().side != Side::right) {
    throw HypothesisError("q-ending", "q = " + label + " neither lies in C nor ends in G1 - C");
  }
}

namespace detail {

inline Rational least_squares_slope(std::vector<std::int64_t> const& xs,
                                    std::vector<std::int64_t> const& ys) {
  auto n = static_cast<std::int64_t>(xs.size());
  std::int64_t sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  std::int64_t den = n * sxx - sx * sx;
  if (den == 0) {
    throw DegenerateInputError("slope needs at least two distinct n");
  }
  return Rational(n * sxy - sx * sy, den);
}

// n - D^2 <= e D for every (n, e), i.e. e >= n/D - D.
inline bool d_fits(Rational const& d,
                   std::vector<std::pair<std::int64_t, std::int64_t>> const& pts) {
  for (auto [n, e] : pts) {
    if (Rational(n) - d * d > Rational(e) * d) {
      return false;
    }
  }
  return true;
}

inline std::optional<Rational> fit_d(
    std::vector<std::pair<std::int64_t, std::int64_t>> const& pts) {
  if (pts.empty()) {
    return std::nullopt;
  }
  double best = 0;
  for (auto [n, e] : pts) {
    double ed = static_cast<double>(e);
    best = std::max(best, (-ed + std::sqrt(ed * ed + 4.0 * static_cast<double>(n))) / 2);
  }
  auto steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(best * 1000)));
  while (!d_fits(Rational(steps, 1000), pts)) {
    ++steps;
  }
  while (steps > 1 && d_fits(Rational(steps - 1, 1000), pts)) {
    --steps;
  }
  return Rational(steps, 1000);
}

}  // namespace detail

// For each q (words over the alphabet of M; "" is the identity) and
// 0 <= n <= n_max: the rewritten length of q y^n, and for n <= exact_n_max
// its word length in M from the oracle.
inline Claim2Result exp_claim2(Amalgam const& m, DistanceOracle<AmalgamContext> const* oracle,
                               std::vector<std::string> const& q_list, Word const& y,
                               std::int64_t n_max, std::int64_t exact_n_max) {
  auto const& g = m.factor();
  require_xy(g, m.x(Side::left), y);
  if (n_max < 1) {
    throw DegenerateInputError("claim2 needs n_max >= 1");
  }
  Claim2Result out;
  std::vector<std::pair<std::int64_t, std::int64_t>> all_pts;
  for (auto const& text : q_list) {
    std::string label = text.empty() ? "1" : text;
    auto q = m.parse(text);
    require_q_ending(m, q, label);
    std::vector<std::int64_t> ns, lens;
    std::vector<std::pair<std::int64_t, std::int64_t>> pts;
    for (std::int64_t n = 0; n <= n_max; ++n) {
      auto e = m.multiply(q, m.from_factor(Side::left, g.from_base(word_pow(y, n))));
      Claim2Row row;
      row.q = label;
      row.n = n;
      row.proxy_len = m.bgss_rewrite(e).size();
      if (oracle != nullptr && n <= exact_n_max) {
        auto r = oracle->length(e);
        row.exact_len = r.exact;
        row.capped = r.capped();
        if (r.exact && n >= 1) {
          pts.emplace_back(n, static_cast<std::int64_t>(*r.exact));
        }
      }
      ns.push_back(n);
      lens.push_back(static_cast<std::int64_t>(row.proxy_len));
      out.rows.push_back(row);
    }
    out.fits.push_back({label, detail::least_squares_slope(ns, lens), detail::fit_d(pts)});
    all_pts.insert(all_pts.end(), pts.begin(), pts.end());
  }
  out.d_hat = detail::fit_d(all_pts);
  return out;
}

////////////////////////////////////////////////////////////////////////
// Gromov products against H
////////////////////////////////////////////////////////////////////////

struct EscapeRow {
  std::int64_t n = 0;
  // Max of (h, z y^n)_1 over H-ball members whose distances resolved.
  std::optional<Rational> max_product;
  std::string witness;
  bool capped = false;  // some product in this row was unresolved
};

struct EscapeTable {
  std::vector<EscapeRow> rows;
  std::size_t h_ball_size = 0;
};

// H-ball members: ball members of the given radius lying in H, in ball order.
inline std::vector<Ball<AmalgamContext>::Node> h_ball(AmalgamContext const& ctx,
                                                      std::size_t radius) {
  BallOptions opt;
  opt.record_dag = false;
  auto b = ball(ctx, radius, opt);
  std::vector<Ball<AmalgamContext>::Node> out;
  for (auto const& node : b.nodes()) {
    if (ctx.group().in_h(node.element)) {
      out.push_back(node);
    }
  }
  return out;
}

// z is a word over the alphabet of M ("" is the identity).
inline EscapeTable exp_gromov_escape(DistanceOracle<AmalgamContext> const& oracle,
                                     std::string const& z, Word const& y, std::size_t h_radius,
                                     std::int64_t n_max, unsigned threads = 1) {
  auto const& ctx = oracle.context();
  auto const& m = ctx.group();
  auto members = h_ball(ctx, h_radius);
  EscapeTable out;
  out.h_ball_size = members.size();
  auto zz = m.parse(z);
  threads = std::max(1u, threads);

  for (std::int64_t n = 0; n <= n_max; ++n) {
    auto target = m.multiply(zz, m.from_factor(Side::left, m.factor().from_base(word_pow(y, n))));
    EscapeRow row;
    row.n = n;
    auto lt = oracle.length(target);
    if (lt.capped()) {
      row.capped = true;
      out.rows.push_back(row);
      continue;
    }
    auto target_len = static_cast<std::int64_t>(*lt.exact);

    // Products per member; nullopt when unresolved.
    std::vector<std::optional<Rational>> products(members.size());
    auto work = [&](std::size_t begin, std::size_t step) {
      for (std::size_t i = begin; i < members.size(); i += step) {
        auto d = oracle.distance(members[i].element, target);
        if (d.exact) {
          products[i] = Rational(static_cast<std::int64_t>(members[i].distance) + target_len -
                                     static_cast<std::int64_t>(*d.exact),
                                 2);
        }
      }
    };
    if (threads == 1) {
      work(0, 1);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back(work, t, threads);
      }
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (!products[i]) {
        row.capped = true;
        continue;
      }
      if (!row.max_product || *products[i] > *row.max_product) {
        row.max_product = products[i];
        row.witness = ctx.format(members[i].element);
      }
    }
    out.rows.push_back(row);
  }
  return out;
}

////////////////////////////////////////////////////////////////////////
// Cosets of H meet gHg^-1
////////////////////////////////////////////////////////////////////////

// Canonical key of the right coset H w. With w = y_1 ... y_j written so
// that y_1 is exact and each later y_i is a fixed representative of C y_i
// (the inverted normal form of w^-1), leading syllables of zero t-exponent
// lie in H and are dropped; the first remaining syllable (u, k) contributes
// only its side and k, since H w = H t^k y_2 ... and t^k x^m = phi^k(x^m) t^k.
// The empty key is H itself.
inline std::string h_right_coset_key(Amalgam const& m, AmalgamNF const& w) {
  auto inv = m.inverse(w);
  auto const& s = inv.syllables;
  std::size_t i = s.size();
  while (i > 0 && s[i - 1].value.k == 0) {
    --i;
  }
  if (i == 0) {
    return {};
  }
  auto const& g = m.factor();
  std::string key = s[i - 1].side == Side::left ? "L" : "R";
  key += std::to_string(-s[i - 1].value.k);
  for (std::size_t r = i - 1; r > 0; --r) {
    auto const& syl = s[r - 1];
    key += syl.side == Side::left ? "|L" : "|R";
    key += encode_key(g.spell(g.inverse(syl.value)));
  }
  return key;
}

// h1 and h2 (members of H) lie in the same coset (H meet gHg^-1) h.
inline bool vn_same_coset(Amalgam const& m, AmalgamNF const& g, AmalgamNF const& h1,
                          AmalgamNF const& h2) {
  auto p = m.multiply(h1, m.inverse(h2));
  return m.in_h(p) && m.in_h(m.multiply(m.multiply(m.inverse(g), p), g));
}

struct VnRow {
  std::size_t radius = 0;
  std::size_t coset_count = 0;
};

// Number of cosets of H meet gHg^-1 met by H-ball members of each radius.
// Members h1, h2 share a coset iff H g^-1 h1 = H g^-1 h2, which is decided
// through h_right_coset_key.
inline std::vector<VnRow> exp_vn_index(AmalgamContext const& ctx, std::string const& g_text,
                                       std::vector<std::size_t> const& radii) {
  auto const& m = ctx.group();
  auto g_inv = m.inverse(m.parse(g_text));
  std::size_t r_max = radii.empty() ? 0 : *std::max_element(radii.begin(), radii.end());
  auto members = h_ball(ctx, r_max);
  std::vector<std::size_t> counts(r_max + 1, 0);
  std::unordered_set<std::string> keys;
  std::size_t cur = 0;
  for (auto const& node : members) {
    while (cur < node.distance) {
      counts[cur++] = keys.size();
    }
    keys.insert(h_right_coset_key(m, m.multiply(g_inv, node.element)));
  }
  while (cur <= r_max) {
    counts[cur++] = keys.size();
  }
  std::vector<VnRow> out;
  for (auto r : radii) {
    out.push_back({r, counts[r]});
  }
  return out;
}

}  // namespace qcw
