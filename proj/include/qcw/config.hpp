#pragma once

// Run configuration: a YAML document with a fixed set of keys. Every key
// is optional; omitted keys take the defaults below, and print_config
// writes all of them back out.

#include <yaml-cpp/yaml.h>

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "amalgam.hpp"
#include "base_group.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "torus.hpp"
#include "words.hpp"

namespace qcw {

inline std::vector<std::string> const& known_experiments() {
  static std::vector<std::string> const names = {"distortion", "claim1", "claim2",        "escape",
                                                 "vn",         "delta",  "quasiconvexity"};
  return names;
}

struct Caps {
  std::size_t distance = 6;  // per side of the bidirectional search
  std::size_t coset_window = 16;
  std::size_t geodesic = 12;  // surface canonical words
  std::size_t ball_members = 4'000'000;
  std::size_t y_power_window = 8;
  std::size_t y_twist_window = 0;
  friend bool operator==(Caps const&, Caps const&) = default;
};

struct DistortionParams {
  std::size_t n_max = 30;
  friend bool operator==(DistortionParams const&, DistortionParams const&) = default;
};

struct Claim1Params {
  std::int64_t n_min = -20;
  std::int64_t n_max = 20;
  friend bool operator==(Claim1Params const&, Claim1Params const&) = default;
};

struct Claim2Params {
  std::vector<std::string> q = {"", "t1"};
  std::int64_t n_max = 8;
  std::int64_t exact_n_max = 3;
  friend bool operator==(Claim2Params const&, Claim2Params const&) = default;
};

struct EscapeParams {
  std::string z = "t1";
  std::size_t h_radius = 3;
  std::int64_t n_max = 3;
  friend bool operator==(EscapeParams const&, EscapeParams const&) = default;
};

struct VnParams {
  std::vector<std::string> g = {"", "a", "a a a", "t"};
  std::vector<std::size_t> radii = {1, 2, 3, 4, 5};
  friend bool operator==(VnParams const&, VnParams const&) = default;
};

// group: free (free group on the base generators), base, torus or amalgam.
struct DeltaParams {
  std::string group = "free";
  std::size_t radius = 3;
  std::size_t samples = 0;  // 0 = exhaustive
  friend bool operator==(DeltaParams const&, DeltaParams const&) = default;
};

// group: torus (F in G) or amalgam (H in M).
struct QuasiconvexityParams {
  std::string group = "torus";
  std::size_t radius = 5;
  friend bool operator==(QuasiconvexityParams const&, QuasiconvexityParams const&) = default;
};

// Line numbers of parsed keys, used for diagnostics after parsing. Ignored
// by comparisons.
struct SourceLines {
  std::map<std::string, std::size_t> lines;
  std::size_t of(std::string const& key) const {
    auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  }
  friend bool operator==(SourceLines const&, SourceLines const&) { return true; }
};

struct RunConfig {
  Mode mode = Mode::free;
  std::vector<std::string> gens;
  std::vector<std::string> relators;
  std::vector<std::string> aut_forward;  // per generator, in gens order
  std::vector<std::string> aut_backward;
  std::string x = "a";
  std::string x1 = "a";
  std::string y = "ab";
  std::uint64_t seed = 1;
  Caps caps;
  std::vector<std::string> experiments;
  DistortionParams distortion;
  Claim1Params claim1;
  Claim2Params claim2;
  EscapeParams escape;
  VnParams vn;
  DeltaParams delta;
  QuasiconvexityParams quasiconvexity;
  std::string output_dir = "out";
  SourceLines source;

  friend bool operator==(RunConfig const&, RunConfig const&) = default;
};

// The groups a configuration describes.
struct Workspace {
  TorusGroup torus;
  Amalgam amalgam;
  Word y;
};

namespace detail {

struct Preset {
  std::vector<std::string> gens;
  std::vector<std::string> relators;
  std::vector<std::string> forward;
  std::vector<std::string> backward;
};

inline Preset preset(Mode m) {
  if (m == Mode::free) {
    return {{"a", "b", "c"}, {}, {"b", "c", "ab"}, {"cA", "a", "b"}};
  }
  return {{"a", "b", "c", "d"},
          {"a b A B c d C D"},
          {"abA", "bA", "cdC", "dC"},
          {"aB", "baB", "cD", "dcD"}};
}

inline std::size_t line_of(YAML::Node const& n) {
  auto m = n.Mark();
  return m.is_null() ? 0 : static_cast<std::size_t>(m.line) + 1;
}

class Reader {
 public:
  explicit Reader(SourceLines& lines) : lines_(lines) {}

  template <typename T>
  T scalar(YAML::Node const& n, std::string const& key) {
    note(n, key);
    if (!n.IsScalar()) {
      throw ConfigError(line_of(n), key + " must be a scalar");
    }
    try {
      return n.as<T>();
    } catch (YAML::Exception const&) {
      throw ConfigError(line_of(n), key + " has an invalid value \"" + n.Scalar() + "\"");
    }
  }

  std::size_t positive(YAML::Node const& n, std::string const& key) {
    auto v = scalar<std::int64_t>(n, key);
    if (v <= 0) {
      throw ConfigError(line_of(n), key + " must be positive");
    }
    return static_cast<std::size_t>(v);
  }

  std::size_t non_negative(YAML::Node const& n, std::string const& key) {
    auto v = scalar<std::int64_t>(n, key);
    if (v < 0) {
      throw ConfigError(line_of(n), key + " must not be negative");
    }
    return static_cast<std::size_t>(v);
  }

  template <typename T>
  std::vector<T> list(YAML::Node const& n, std::string const& key) {
    note(n, key);
    if (!n.IsSequence()) {
      throw ConfigError(line_of(n), key + " must be a list");
    }
    std::vector<T> out;
    for (auto const& item : n) {
      out.push_back(scalar<T>(item, key));
    }
    note(n, key);
    return out;
  }

  // Calls f(key, value) for each entry of a mapping, rejecting keys
  // outside `allowed` (empty means any key).
  template <typename F>
  void map(YAML::Node const& n, std::string const& prefix, std::set<std::string> const& allowed,
           F&& f) {
    if (!n.IsMap()) {
      throw ConfigError(line_of(n), (prefix.empty() ? "document" : prefix) + " must be a mapping");
    }
    for (auto const& kv : n) {
      auto k = kv.first.as<std::string>();
      auto full = prefix.empty() ? k : prefix + "." + k;
      if (!allowed.empty() && !allowed.contains(k)) {
        throw ConfigError(line_of(kv.first), "unknown key " + full);
      }
      if (!seen_.insert(full).second) {
        throw ConfigError(line_of(kv.first), "duplicate key " + full);
      }
      note(kv.first, full);
      f(full, k, kv.second);
    }
  }

 private:
  void note(YAML::Node const& n, std::string const& key) {
    if (auto l = line_of(n); l != 0 && !lines_.lines.contains(key)) {
      lines_.lines[key] = l;
    }
  }

  SourceLines& lines_;
  std::set<std::string> seen_;
};

inline Word parse_word_at(Alphabet const& a, std::string const& text, std::size_t line,
                          std::string const& key) {
  try {
    return parse_word(a, text);
  } catch (AlphabetError const& e) {
    throw ConfigError(line, key + ": " + e.what());
  }
}

}  // namespace detail

// Parses and validates a configuration. Generators referenced anywhere
// must exist, the automorphism tables must be complete, and x, x1 must be
// nonempty, cyclically reduced and not proper powers.
inline RunConfig parse_config(std::string const& text) {
  RunConfig c;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (YAML::ParserException const& e) {
    throw ConfigError(static_cast<std::size_t>(e.mark.line) + 1, e.msg);
  }
  detail::Reader rd(c.source);
  std::map<std::string, std::string> fwd;
  std::map<std::string, std::string> bwd;
  bool have_gens = false;
  bool have_rels = false;

  if (root.IsNull()) {
    root = YAML::Node(YAML::NodeType::Map);
  }
  rd.map(root, "",
         {"mode", "seed", "base", "presentation", "aut", "edge", "y", "caps", "experiments",
          "distortion", "claim1", "claim2", "escape", "vn", "delta", "quasiconvexity", "output"},
         [&](std::string const& key, std::string const& k, YAML::Node const& v) {
           if (k == "mode") {
             auto s = rd.scalar<std::string>(v, key);
             if (s == "free") {
               c.mode = Mode::free;
             } else if (s == "surface") {
               c.mode = Mode::surface;
             } else {
               throw ConfigError(detail::line_of(v), "mode must be free or surface");
             }
           } else if (k == "seed") {
             c.seed = rd.scalar<std::uint64_t>(v, key);
           } else if (k == "base") {
             rd.map(v, key, {"gens"}, [&](auto const& kk, auto const&, auto const& vv) {
               c.gens = rd.list<std::string>(vv, kk);
               have_gens = true;
             });
           } else if (k == "presentation") {
             rd.map(v, key, {"relators"}, [&](auto const& kk, auto const&, auto const& vv) {
               c.relators = rd.list<std::string>(vv, kk);
               have_rels = true;
             });
           } else if (k == "aut") {
             rd.map(v, key, {"forward", "backward"},
                    [&](auto const& kk, auto const& dir, auto const& vv) {
                      auto& table = dir == "forward" ? fwd : bwd;
                      rd.map(vv, kk, {}, [&](auto const& gk, auto const& g, auto const& img) {
                        table[g] = rd.scalar<std::string>(img, gk);
                      });
                    });
           } else if (k == "edge") {
             rd.map(v, key, {"x", "x1"}, [&](auto const& kk, auto const& e, auto const& vv) {
               (e == "x" ? c.x : c.x1) = rd.scalar<std::string>(vv, kk);
             });
           } else if (k == "y") {
             c.y = rd.scalar<std::string>(v, key);
           } else if (k == "caps") {
             rd.map(v, key,
                    {"distance", "coset_window", "geodesic", "ball_members", "y_power_window",
                     "y_twist_window"},
                    [&](auto const& kk, auto const& cap, auto const& vv) {
                      if (cap == "y_twist_window") {
                        c.caps.y_twist_window = rd.non_negative(vv, kk);
                        return;
                      }
                      std::size_t n = rd.positive(vv, kk);
                      if (cap == "distance") c.caps.distance = n;
                      if (cap == "coset_window") c.caps.coset_window = n;
                      if (cap == "geodesic") c.caps.geodesic = n;
                      if (cap == "ball_members") c.caps.ball_members = n;
                      if (cap == "y_power_window") c.caps.y_power_window = n;
                    });
           } else if (k == "experiments") {
             c.experiments = rd.list<std::string>(v, key);
             std::set<std::string> dup;
             for (auto const& e : c.experiments) {
               if (std::find(known_experiments().begin(), known_experiments().end(), e) ==
                   known_experiments().end()) {
                 throw ConfigError(detail::line_of(v), "unknown experiment " + e);
               }
               if (!dup.insert(e).second) {
                 throw ConfigError(detail::line_of(v), "experiment " + e + " listed twice");
               }
             }
           } else if (k == "distortion") {
             rd.map(v, key, {"n_max"}, [&](auto const& kk, auto const&, auto const& vv) {
               c.distortion.n_max = rd.non_negative(vv, kk);
             });
           } else if (k == "claim1") {
             rd.map(v, key, {"n_min", "n_max"}, [&](auto const& kk, auto const& p, auto const& vv) {
               (p == "n_min" ? c.claim1.n_min : c.claim1.n_max) = rd.scalar<std::int64_t>(vv, kk);
             });
           } else if (k == "claim2") {
             rd.map(v, key, {"q", "n_max", "exact_n_max"},
                    [&](auto const& kk, auto const& p, auto const& vv) {
                      if (p == "q") {
                        c.claim2.q = rd.list<std::string>(vv, kk);
                      } else if (p == "n_max") {
                        c.claim2.n_max = static_cast<std::int64_t>(rd.positive(vv, kk));
                      } else {
                        c.claim2.exact_n_max = rd.scalar<std::int64_t>(vv, kk);
                      }
                    });
           } else if (k == "escape") {
             rd.map(v, key, {"z", "h_radius", "n_max"},
                    [&](auto const& kk, auto const& p, auto const& vv) {
                      if (p == "z") {
                        c.escape.z = rd.scalar<std::string>(vv, kk);
                      } else if (p == "h_radius") {
                        c.escape.h_radius = rd.non_negative(vv, kk);
                      } else {
                        c.escape.n_max = static_cast<std::int64_t>(rd.non_negative(vv, kk));
                      }
                    });
           } else if (k == "vn") {
             rd.map(v, key, {"g", "radii"}, [&](auto const& kk, auto const& p, auto const& vv) {
               if (p == "g") {
                 c.vn.g = rd.list<std::string>(vv, kk);
               } else {
                 c.vn.radii = rd.list<std::size_t>(vv, kk);
               }
             });
           } else if (k == "delta") {
             rd.map(v, key, {"group", "radius", "samples"},
                    [&](auto const& kk, auto const& p, auto const& vv) {
                      if (p == "group") {
                        c.delta.group = rd.scalar<std::string>(vv, kk);
                        if (c.delta.group != "free" && c.delta.group != "base" &&
                            c.delta.group != "torus" && c.delta.group != "amalgam") {
                          throw ConfigError(detail::line_of(vv),
                                            kk + " must be free, base, torus or amalgam");
                        }
                      } else if (p == "radius") {
                        c.delta.radius = rd.non_negative(vv, kk);
                      } else {
                        c.delta.samples = rd.non_negative(vv, kk);
                      }
                    });
           } else if (k == "quasiconvexity") {
             rd.map(
                 v, key, {"group", "radius"}, [&](auto const& kk, auto const& p, auto const& vv) {
                   if (p == "group") {
                     c.quasiconvexity.group = rd.scalar<std::string>(vv, kk);
                     if (c.quasiconvexity.group != "torus" && c.quasiconvexity.group != "amalgam") {
                       throw ConfigError(detail::line_of(vv), kk + " must be torus or amalgam");
                     }
                   } else {
                     c.quasiconvexity.radius = rd.non_negative(vv, kk);
                   }
                 });
           } else if (k == "output") {
             rd.map(v, key, {"dir"}, [&](auto const& kk, auto const&, auto const& vv) {
               c.output_dir = rd.scalar<std::string>(vv, kk);
             });
           }
         });

  // Generators, relators and automorphism tables.
  auto pre = detail::preset(c.mode);
  if (!have_gens) {
    c.gens = pre.gens;
    if (fwd.empty() && bwd.empty()) {
      for (std::size_t i = 0; i < pre.gens.size(); ++i) {
        fwd[pre.gens[i]] = pre.forward[i];
        bwd[pre.gens[i]] = pre.backward[i];
      }
    }
    if (!have_rels) {
      c.relators = pre.relators;
    }
  }
  if (c.mode == Mode::free && !c.relators.empty()) {
    throw ConfigError(c.source.of("presentation.relators"),
                      "relators are only allowed in surface mode");
  }
  if (c.mode == Mode::surface && c.relators.empty()) {
    throw ConfigError(c.source.of("presentation.relators"),
                      "surface mode needs presentation.relators");
  }
  Alphabet alphabet;
  try {
    alphabet = Alphabet(c.gens);
  } catch (AlphabetError const& e) {
    throw ConfigError(c.source.of("base.gens"), e.what());
  }
  if (alphabet.find("t")) {
    throw ConfigError(c.source.of("base.gens"), "generator name t is reserved");
  }
  for (auto const& [dir, table] : {std::pair{"forward", &fwd}, std::pair{"backward", &bwd}}) {
    std::string prefix = std::string("aut.") + dir;
    if (table->empty()) {
      throw ConfigError(c.source.of("aut"), "missing " + std::string(dir) + " automorphism table");
    }
    for (auto const& [g, img] : *table) {
      if (!alphabet.find(g)) {
        throw ConfigError(c.source.of(prefix + "." + g),
                          prefix + "." + g + ": no generator named " + g);
      }
    }
    auto& out = std::string(dir) == "forward" ? c.aut_forward : c.aut_backward;
    out.clear();
    for (auto const& g : c.gens) {
      auto it = table->find(g);
      if (it == table->end()) {
        throw ConfigError(c.source.of(prefix), "missing " + prefix + "." + g);
      }
      detail::parse_word_at(alphabet, it->second, c.source.of(prefix + "." + g), prefix + "." + g);
      out.push_back(it->second);
    }
  }
  for (std::size_t i = 0; i < c.relators.size(); ++i) {
    detail::parse_word_at(alphabet, c.relators[i], c.source.of("presentation.relators"),
                          "presentation.relators");
  }
  for (auto const& [key, text] : {std::pair{"edge.x", &c.x}, std::pair{"edge.x1", &c.x1}}) {
    auto w = detail::parse_word_at(alphabet, *text, c.source.of(key), key);
    if (auto why = edge_word_problem(w)) {
      throw ConfigError(c.source.of(key), std::string(key) + " rejected: " + *why, *why);
    }
  }
  detail::parse_word_at(alphabet, c.y, c.source.of("y"), "y");
  if (c.claim1.n_min > c.claim1.n_max) {
    throw ConfigError(c.source.of("claim1.n_min"), "claim1.n_min exceeds claim1.n_max");
  }
  return c;
}

// Constructs the groups. Errors from construction (for instance a
// presentation that is not C'(1/6)) become ConfigErrors.
inline Workspace build_workspace(RunConfig const& c) {
  try {
    Alphabet alphabet(c.gens);
    BaseGroup base = BaseGroup::free(alphabet);
    if (c.mode == Mode::surface) {
      std::vector<Word> rels;
      for (auto const& r : c.relators) {
        rels.push_back(parse_word(alphabet, r));
      }
      base = BaseGroup::surface(Presentation(alphabet, rels), c.caps.geodesic);
    }
    auto phi = Automorphism::parse(alphabet, c.aut_forward, c.aut_backward);
    TorusGroup torus(base, phi);
    EdgeSpec edge{parse_word(alphabet, c.x), parse_word(alphabet, c.x1)};
    AmalgamOptions opt;
    opt.coset_window = c.caps.coset_window;
    return {torus, Amalgam(torus, edge, opt), parse_word(alphabet, c.y)};
  } catch (ConfigError const&) {
    throw;
  } catch (Error const& e) {
    throw ConfigError(0, e.what());
  }
}

// Hypothesis checks: phi is an automorphism (relators preserved in surface
// mode) and y satisfies validate_y against x. Throws ConfigError carrying
// the reason code.
inline void check_hypotheses(RunConfig const& c, Workspace const& w) {
  try {
    w.torus.validate();
  } catch (HypothesisError const& e) {
    throw ConfigError(c.source.of("aut"), e.what(), e.reason());
  }
  YCheckOptions opt;
  opt.power_window = static_cast<std::int64_t>(c.caps.y_power_window);
  opt.twist_window = static_cast<std::int64_t>(c.caps.y_twist_window);
  auto r = validate_y(w.torus, w.amalgam.x(Side::left), w.y, opt);
  if (!r.ok) {
    throw ConfigError(c.source.of("y"), "y rejected: " + r.reason, r.reason);
  }
}

// Writes every key, defaults included; parse_config(print_config(c)) == c.
inline std::string print_config(RunConfig const& c) {
  YAML::Emitter out;
  auto word = [&](std::string const& s) { out << YAML::DoubleQuoted << s; };
  auto words = [&](std::vector<std::string> const& v) {
    out << YAML::Flow << YAML::BeginSeq;
    for (auto const& s : v) {
      word(s);
    }
    out << YAML::EndSeq;
  };
  out << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << to_string(c.mode);
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "base" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "gens" << YAML::Value;
  words(c.gens);
  out << YAML::EndMap;
  if (!c.relators.empty()) {
    out << YAML::Key << "presentation" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "relators" << YAML::Value;
    words(c.relators);
    out << YAML::EndMap;
  }
  out << YAML::Key << "aut" << YAML::Value << YAML::BeginMap;
  for (auto const& [dir, table] :
       {std::pair{"forward", &c.aut_forward}, std::pair{"backward", &c.aut_backward}}) {
    out << YAML::Key << dir << YAML::Value << YAML::BeginMap;
    for (std::size_t i = 0; i < c.gens.size(); ++i) {
      out << YAML::Key << c.gens[i] << YAML::Value;
      word((*table)[i]);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  out << YAML::Key << "edge" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "x" << YAML::Value;
  word(c.x);
  out << YAML::Key << "x1" << YAML::Value;
  word(c.x1);
  out << YAML::EndMap;
  out << YAML::Key << "y" << YAML::Value;
  word(c.y);
  out << YAML::Key << "caps" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "distance" << YAML::Value << c.caps.distance;
  out << YAML::Key << "coset_window" << YAML::Value << c.caps.coset_window;
  out << YAML::Key << "geodesic" << YAML::Value << c.caps.geodesic;
  out << YAML::Key << "ball_members" << YAML::Value << c.caps.ball_members;
  out << YAML::Key << "y_power_window" << YAML::Value << c.caps.y_power_window;
  out << YAML::Key << "y_twist_window" << YAML::Value << c.caps.y_twist_window;
  out << YAML::EndMap;
  out << YAML::Key << "experiments" << YAML::Value << YAML::Flow << c.experiments;
  out << YAML::Key << "distortion" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_max" << YAML::Value << c.distortion.n_max;
  out << YAML::EndMap;
  out << YAML::Key << "claim1" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_min" << YAML::Value << c.claim1.n_min;
  out << YAML::Key << "n_max" << YAML::Value << c.claim1.n_max;
  out << YAML::EndMap;
  out << YAML::Key << "claim2" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "q" << YAML::Value;
  words(c.claim2.q);
  out << YAML::Key << "n_max" << YAML::Value << c.claim2.n_max;
  out << YAML::Key << "exact_n_max" << YAML::Value << c.claim2.exact_n_max;
  out << YAML::EndMap;
  out << YAML::Key << "escape" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "z" << YAML::Value;
  word(c.escape.z);
  out << YAML::Key << "h_radius" << YAML::Value << c.escape.h_radius;
  out << YAML::Key << "n_max" << YAML::Value << c.escape.n_max;
  out << YAML::EndMap;
  out << YAML::Key << "vn" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "g" << YAML::Value;
  words(c.vn.g);
  out << YAML::Key << "radii" << YAML::Value << YAML::Flow << c.vn.radii;
  out << YAML::EndMap;
  out << YAML::Key << "delta" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "group" << YAML::Value << c.delta.group;
  out << YAML::Key << "radius" << YAML::Value << c.delta.radius;
  out << YAML::Key << "samples" << YAML::Value << c.delta.samples;
  out << YAML::EndMap;
  out << YAML::Key << "quasiconvexity" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "group" << YAML::Value << c.quasiconvexity.group;
  out << YAML::Key << "radius" << YAML::Value << c.quasiconvexity.radius;
  out << YAML::EndMap;
  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value;
  word(c.output_dir);
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace qcw
