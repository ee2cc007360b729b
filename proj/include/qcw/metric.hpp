#pragma once

// Word-metric machinery over any GroupContext: Cayley balls with their
// geodesic DAG, a capped bidirectional distance oracle, Gromov products,
// four-point hyperbolicity estimates, quasiconvexity and distortion profiles.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "contexts.hpp"
#include "error.hpp"
#include "rational.hpp"
#include "torus.hpp"

namespace qcw {

// Either an exact distance or the statement that it exceeds 2 * cap.
struct DistanceResult {
  std::optional<std::size_t> exact;
  std::size_t cap = 0;

  bool capped() const noexcept { return !exact.has_value(); }
  friend bool operator==(DistanceResult const&, DistanceResult const&) = default;
};

struct BallOptions {
  std::size_t max_members = 4'000'000;
  bool record_dag = true;
  // When false, member elements are released once expanded; only keys and
  // distances remain.
  bool keep_elements = true;
};

template <GroupContext Ctx>
class Ball {
 public:
  using Element = typename Ctx::Element;

  struct Node {
    std::string key;
    Element element;
    std::uint32_t distance;
    std::vector<std::uint32_t> preds;  // neighbours one step closer to 1
  };

  std::size_t radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::vector<Node> const& nodes() const noexcept { return nodes_; }
  Node const& node(std::size_t i) const { return nodes_[i]; }

  // Number of members at distance <= r.
  std::size_t size_within(std::size_t r) const {
    return r < layer_end_.size() ? layer_end_[r] : nodes_.size();
  }

  std::optional<std::uint32_t> find(std::string const& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) {
      return std::nullopt;
    }
    return it->second;
  }
  std::optional<std::size_t> distance_of(std::string const& key) const {
    auto i = find(key);
    if (!i) {
      return std::nullopt;
    }
    return nodes_[*i].distance;
  }

 private:
  template <GroupContext C>
  friend struct BallBuilder;

  std::size_t radius_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::size_t> layer_end_;  // layer_end_[r] = members within r
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Breadth-first closure from the identity. Members are visited in shortlex
// order of their canonical keys' discovery; all geodesic predecessors are
// recorded when options.record_dag is set.
template <GroupContext Ctx>
struct BallBuilder {
  using Element = typename Ctx::Element;

  static Ball<Ctx> build(Ctx const& ctx, std::size_t radius, BallOptions options) {
    Ball<Ctx> b;
    auto id = ctx.identity();
    auto id_key = ctx.key(id);
    b.index_.emplace(id_key, 0);
    b.nodes_.push_back({id_key, id, 0, {}});
    b.layer_end_.push_back(1);
    std::size_t layer_begin = 0;
    for (std::size_t r = 1; r <= radius; ++r) {
      std::size_t layer_stop = b.nodes_.size();
      for (std::size_t i = layer_begin; i < layer_stop; ++i) {
        for (Letter l : ctx.letters()) {
          auto next = ctx.multiply_letter(b.nodes_[i].element, l);
          auto k = ctx.key(next);
          auto [it, inserted] =
              b.index_.emplace(std::move(k), static_cast<std::uint32_t>(b.nodes_.size()));
          if (inserted) {
            if (b.nodes_.size() >= options.max_members) {
              b.index_.erase(it);
              throw PartialBallError("ball budget of " + std::to_string(options.max_members) +
                                         " members exhausted at radius " + std::to_string(r),
                                     r - 1);
            }
            typename Ball<Ctx>::Node n{
                it->first, std::move(next), static_cast<std::uint32_t>(r), {}};
            if (options.record_dag) {
              n.preds.push_back(static_cast<std::uint32_t>(i));
            }
            b.nodes_.push_back(std::move(n));
          } else if (options.record_dag) {
            auto& n = b.nodes_[it->second];
            if (n.distance == r &&
                (n.preds.empty() || n.preds.back() != static_cast<std::uint32_t>(i))) {
              n.preds.push_back(static_cast<std::uint32_t>(i));
            }
          }
        }
      }
      if (!options.keep_elements) {
        for (std::size_t i = layer_begin; i < layer_stop; ++i) {
          b.nodes_[i].element = Element{};
        }
      }
      layer_begin = layer_stop;
      b.layer_end_.push_back(b.nodes_.size());
      b.radius_ = r;
    }
    if (!options.keep_elements) {
      for (std::size_t i = layer_begin; i < b.nodes_.size(); ++i) {
        b.nodes_[i].element = Element{};
      }
    }
    return b;
  }
};

template <GroupContext Ctx>
Ball<Ctx> ball(Ctx const& ctx, std::size_t radius, BallOptions options = {}) {
  return BallBuilder<Ctx>::build(ctx, radius, options);
}

// Bidirectional search for word lengths and distances. The forward half is
// a ball of radius cap around the identity, built once and shared by all
// queries (distances are left-invariant); the backward half is a breadth
// first search from the query element. Results are exact up to 2 * cap.
template <GroupContext Ctx>
class DistanceOracle {
 public:
  using Element = typename Ctx::Element;

  DistanceOracle(Ctx const& ctx, std::size_t cap, BallOptions options = {}) : ctx_(ctx), cap_(cap) {
    options.record_dag = false;
    options.keep_elements = false;
    forward_ = ball(ctx_, cap_, options);
  }

  std::size_t cap() const noexcept { return cap_; }
  Ctx const& context() const noexcept { return ctx_; }
  Ball<Ctx> const& forward_ball() const noexcept { return forward_; }

  // Word length of g.
  DistanceResult length(Element const& g) const {
    auto k = ctx_.key(g);
    if (auto d = forward_.distance_of(k)) {
      return {*d, cap_};
    }
    std::unordered_set<std::string> seen{k};
    std::vector<Element> frontier{g};
    for (std::size_t depth = 1; depth <= cap_; ++depth) {
      std::vector<Element> next;
      std::optional<std::size_t> best;
      for (auto const& e : frontier) {
        for (Letter l : ctx_.letters()) {
          auto n = ctx_.multiply_letter(e, l);
          auto nk = ctx_.key(n);
          if (!seen.insert(nk).second) {
            continue;
          }
          if (auto fd = forward_.distance_of(nk)) {
            std::size_t cand = depth + *fd;
            if (!best || cand < *best) {
              best = cand;
            }
          }
          next.push_back(std::move(n));
        }
      }
      if (best) {
        return {*best, cap_};
      }
      frontier = std::move(next);
    }
    return {std::nullopt, cap_};
  }

  DistanceResult distance(Element const& g, Element const& h) const {
    return length(ctx_.multiply(ctx_.inverse(g), h));
  }

 private:
  Ctx const& ctx_;
  std::size_t cap_;
  Ball<Ctx> forward_;
};

// (g, h)_1 = (|g| + |h| - d(g, h)) / 2, or nullopt when a distance is capped.
template <GroupContext Ctx>
std::optional<Rational> gromov_product(DistanceOracle<Ctx> const& oracle,
                                       typename Ctx::Element const& g,
                                       typename Ctx::Element const& h) {
  auto lg = oracle.length(g);
  auto lh = oracle.length(h);
  auto d = oracle.distance(g, h);
  if (lg.capped() || lh.capped() || d.capped()) {
    return std::nullopt;
  }
  auto sum = static_cast<std::int64_t>(*lg.exact + *lh.exact) - static_cast<std::int64_t>(*d.exact);
  return Rational(sum, 2);
}

////////////////////////////////////////////////////////////////////////
// Four-point condition
////////////////////////////////////////////////////////////////////////

struct DeltaEstimate {
  Rational delta{0};
  std::size_t radius = 0;
  bool exhaustive = true;
  std::size_t quadruples = 0;
};

// Least delta such that (x,y)_w >= min((x,z)_w, (z,y)_w) - delta for the
// examined quadruples of ball members. sample_count == 0 means exhaustive.
template <GroupContext Ctx>
DeltaEstimate estimate_delta(Ctx const& ctx, std::size_t radius, std::size_t sample_count,
                             std::uint64_t seed, BallOptions options = {}) {
  options.record_dag = false;
  DistanceOracle<Ctx> oracle(ctx, radius, options);
  std::vector<typename Ctx::Element> members;
  for (auto const& node : oracle.forward_ball().nodes()) {
    auto letters = decode_key(node.key);
    members.push_back(ctx.from_word(letters));
  }
  std::size_t n = members.size();
  DeltaEstimate est;
  est.radius = radius;
  est.exhaustive = sample_count == 0;

  auto resolve = [&](std::size_t i, std::size_t j) -> std::int64_t {
    auto d = oracle.distance(members[i], members[j]);
    if (d.capped()) {
      throw CapExceededError("distance inside a ball exceeded 2 * radius", radius, radius);
    }
    return static_cast<std::int64_t>(*d.exact);
  };
  // Doubled Gromov products keep everything integral; worst = 2 * delta.
  std::int64_t worst = 0;
  auto examine = [&](auto const& dist, std::size_t x, std::size_t y, std::size_t z, std::size_t w) {
    auto xy = dist(w, x) + dist(w, y) - dist(x, y);
    auto xz = dist(w, x) + dist(w, z) - dist(x, z);
    auto zy = dist(w, z) + dist(w, y) - dist(z, y);
    worst = std::max(worst, std::min(xz, zy) - xy);
  };
  if (est.exhaustive) {
    std::vector<std::int32_t> table(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        auto v = static_cast<std::int32_t>(resolve(i, j));
        table[i * n + j] = v;
        table[j * n + i] = v;
      }
    }
    auto dist = [&](std::size_t i, std::size_t j) -> std::int64_t { return table[i * n + j]; };
    for (std::size_t w = 0; w < n; ++w) {
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          for (std::size_t z = 0; z < n; ++z) {
            examine(dist, x, y, z, w);
          }
        }
      }
    }
    est.quadruples = n * n * n * n;
  } else {
    std::unordered_map<std::uint64_t, std::int64_t> cache;
    auto dist = [&](std::size_t i, std::size_t j) -> std::int64_t {
      if (i == j) {
        return 0;
      }
      if (i > j) {
        std::swap(i, j);
      }
      auto key = static_cast<std::uint64_t>(i) * n + j;
      if (auto it = cache.find(key); it != cache.end()) {
        return it->second;
      }
      auto v = resolve(i, j);
      cache.emplace(key, v);
      return v;
    };
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < sample_count; ++s) {
      auto x = pick(rng);
      auto y = pick(rng);
      auto z = pick(rng);
      auto w = pick(rng);
      examine(dist, x, y, z, w);
    }
    est.quadruples = sample_count;
  }
  est.delta = Rational(worst, 2);
  return est;
}

////////////////////////////////////////////////////////////////////////
// Quasiconvexity
////////////////////////////////////////////////////////////////////////

// epsilon[r] = max distance, measured inside the ball, from a vertex of a
// geodesic 1 -> h to the nearest subgroup member, over subgroup members h
// with |h| <= r. Pairs h1, h2 reduce to this case by left translation.
template <GroupContext Ctx>
std::vector<std::size_t> quasiconvexity_profile(
    Ctx const& ctx, std::function<bool(typename Ctx::Element const&)> in_subgroup,
    std::size_t radius, BallOptions options = {}) {
  options.record_dag = true;
  auto b = ball(ctx, radius, options);
  std::size_t n = b.size();
  constexpr auto inf = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> to_h(n, inf);
  std::vector<bool> member(n, false);
  std::vector<std::uint32_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_subgroup(b.node(i).element)) {
      member[i] = true;
      to_h[i] = 0;
      queue.push_back(static_cast<std::uint32_t>(i));
    }
  }
  // multi-source BFS over the ball's Cayley graph
  for (std::size_t head = 0; head < queue.size(); ++head) {
    auto v = queue[head];
    for (Letter l : ctx.letters()) {
      auto nb = b.find(ctx.key(ctx.multiply_letter(b.node(v).element, l)));
      if (nb && to_h[*nb] == inf) {
        to_h[*nb] = to_h[v] + 1;
        queue.push_back(*nb);
      }
    }
  }
  // worst[v] = max of to_h over every vertex on some geodesic 1 -> v
  std::vector<std::uint32_t> worst(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    worst[i] = to_h[i];
    for (auto p : b.node(i).preds) {
      worst[i] = std::max(worst[i], worst[p]);
    }
  }
  std::vector<std::size_t> eps(radius + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (member[i]) {
      auto r = b.node(i).distance;
      eps[r] = std::max<std::size_t>(eps[r], worst[i]);
    }
  }
  for (std::size_t r = 1; r <= radius; ++r) {
    eps[r] = std::max(eps[r], eps[r - 1]);
  }
  return eps;
}

////////////////////////////////////////////////////////////////////////
// Distortion
////////////////////////////////////////////////////////////////////////

struct DistortionRow {
  std::int64_t n = 0;
  std::size_t ambient_upper = 0;
  std::optional<std::size_t> subgroup_exact;  // nullopt when capped
  std::optional<Rational> ratio;
};

// Witness family t^n x t^-n = phi^n(x): ambient length at most 2n + |x|,
// fiber length |phi^n(x)| (canonical length; capped in surface mode).
inline std::vector<DistortionRow> distortion_profile(TorusGroup const& g, Word const& x,
                                                     std::size_t n_max) {
  std::vector<DistortionRow> rows;
  Word cur = g.base().reduce(x);
  std::size_t x_len = g.base().length(cur);
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n > 0) {
      cur = g.apply(cur, Direction::forward);
    }
    DistortionRow row;
    row.n = static_cast<std::int64_t>(n);
    row.ambient_upper = 2 * n + x_len;
    try {
      row.subgroup_exact = g.base().length(cur);
      row.ratio = Rational(static_cast<std::int64_t>(*row.subgroup_exact),
                           static_cast<std::int64_t>(row.ambient_upper));
    } catch (CapExceededError const&) {
      row.subgroup_exact.reset();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qcw
