#pragma once

// Runs the experiments of a configuration and writes their tables.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "contexts.hpp"
#include "experiments.hpp"
#include "metric.hpp"

namespace qcw {

enum class OutputFormat { csv, json, both };

struct RunOptions {
  std::optional<std::string> out_dir;  // overrides output.dir
  bool fail_fast = false;
  unsigned threads = 1;
  OutputFormat format = OutputFormat::both;
};

struct ExperimentStatus {
  std::string name;
  bool ok = false;
  std::string reason;  // hypothesis code or error class, when !ok
  std::string error;
  std::vector<std::string> files;
  double seconds = 0;
};

struct ConstantsReport {
  std::optional<std::size_t> k_hat;
  std::optional<Rational> d_hat;
  std::optional<Rational> delta_hat;
  std::size_t delta_radius = 0;
  bool delta_exhaustive = true;
  std::vector<std::size_t> epsilon_profile;
  std::vector<DistortionRow> distortion_table;
};

struct RunReport {
  std::vector<ExperimentStatus> experiments;
  ConstantsReport constants;
  std::string output_dir;
  double seconds = 0;

  bool ok() const {
    for (auto const& e : experiments) {
      if (!e.ok) {
        return false;
      }
    }
    return true;
  }
};

// CSV cell for an exact rational: the integer, or six decimals.
inline std::string decimal(Rational const& r) {
  if (r.den() == 1) {
    return std::to_string(r.num());
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", r.to_double());
  return buf;
}

// Word label used in tables; the identity is written 1.
inline std::string word_label(std::string const& w) { return w.empty() ? "1" : w; }

namespace detail {

// Holds the tables of one experiment until it is written.
struct Table {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string csv_cell(std::string const& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

inline void write_csv(std::filesystem::path const& path, Table const& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot write " + path.string());
  }
  auto line = [&](std::vector<std::string> const& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      f << (i ? "," : "") << csv_cell(cells[i]);
    }
    f << "\n";
  };
  line(t.header);
  for (auto const& r : t.rows) {
    line(r);
  }
  if (!f) {
    throw Error("cannot write " + path.string());
  }
}

inline nlohmann::json table_json(Table const& t) {
  auto rows = nlohmann::json::array();
  for (auto const& r : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      obj[t.header[i]] = r[i];
    }
    rows.push_back(obj);
  }
  return rows;
}

template <typename T>
std::string opt_cell(std::optional<T> const& v) {
  return v ? std::to_string(*v) : std::string();
}

class Runner {
 public:
  Runner(RunConfig const& config, Workspace const& ws, RunOptions const& opt)
      : config_(config), ws_(ws), opt_(opt), ctx_(ws.amalgam) {}

  BallOptions ball_options() const {
    BallOptions b;
    b.max_members = config_.caps.ball_members;
    return b;
  }

  DistanceOracle<AmalgamContext> const& oracle() {
    if (!oracle_) {
      oracle_ = std::make_unique<DistanceOracle<AmalgamContext>>(ctx_, config_.caps.distance,
                                                                 ball_options());
    }
    return *oracle_;
  }

  Table run(std::string const& name, ConstantsReport& constants) {
    if (name == "distortion") return distortion(constants);
    if (name == "claim1") return claim1(constants);
    if (name == "claim2") return claim2(constants);
    if (name == "escape") return escape();
    if (name == "vn") return vn();
    if (name == "delta") return delta(constants);
    return quasiconvexity(constants);
  }

 private:
  Table distortion(ConstantsReport& constants) {
    auto rows = distortion_profile(ws_.torus, ws_.amalgam.x(Side::left), config_.distortion.n_max);
    constants.distortion_table = rows;
    Table t{"distortion.csv", {"n", "ambient_upper", "subgroup_exact", "ratio"}, {}};
    for (auto const& r : rows) {
      t.rows.push_back({std::to_string(r.n), std::to_string(r.ambient_upper),
                        opt_cell(r.subgroup_exact), r.ratio ? decimal(*r.ratio) : std::string()});
    }
    return t;
  }

  Table claim1(ConstantsReport& constants) {
    auto res = exp_claim1(ws_.amalgam, ws_.y, config_.claim1.n_min, config_.claim1.n_max);
    constants.k_hat = res.k_hat;
    Table t{"claim1.csv", {"n", "m", "c_length", "u_length"}, {}};
    for (auto const& r : res.rows) {
      t.rows.push_back({std::to_string(r.n), std::to_string(r.m), std::to_string(r.c_length),
                        std::to_string(r.u_length)});
    }
    return t;
  }

  Table claim2(ConstantsReport& constants) {
    bool exact = config_.claim2.exact_n_max >= 0;
    auto res = exp_claim2(ws_.amalgam, exact ? &oracle() : nullptr, config_.claim2.q, ws_.y,
                          config_.claim2.n_max, config_.claim2.exact_n_max);
    constants.d_hat = res.d_hat;
    Table t{"claim2.csv", {"q", "n", "proxy_len", "exact_len_or_blank", "capped_flag"}, {}};
    for (auto const& r : res.rows) {
      t.rows.push_back({r.q, std::to_string(r.n), std::to_string(r.proxy_len),
                        opt_cell(r.exact_len), r.capped ? "1" : "0"});
    }
    return t;
  }

  Table escape() {
    auto res = exp_gromov_escape(oracle(), config_.escape.z, ws_.y, config_.escape.h_radius,
                                 config_.escape.n_max, opt_.threads);
    Table t{"escape.csv", {"n", "max_product", "witness", "capped_flag"}, {}};
    for (auto const& r : res.rows) {
      t.rows.push_back({std::to_string(r.n),
                        r.max_product ? r.max_product->to_string() : std::string(), r.witness,
                        r.capped ? "1" : "0"});
    }
    return t;
  }

  Table vn() {
    Table t{"vn.csv", {"g", "radius", "coset_count"}, {}};
    for (auto const& g : config_.vn.g) {
      for (auto const& r : exp_vn_index(ctx_, g, config_.vn.radii)) {
        t.rows.push_back({word_label(g), std::to_string(r.radius), std::to_string(r.coset_count)});
      }
    }
    return t;
  }

  template <typename Ctx>
  void delta_rows(Ctx const& ctx, Table& t, ConstantsReport& constants) {
    auto const& p = config_.delta;
    for (std::size_t r = 1; r <= p.radius; ++r) {
      auto est = estimate_delta(ctx, r, p.samples, config_.seed, ball_options());
      t.rows.push_back(
          {std::to_string(r), est.delta.to_string(), est.exhaustive ? "exhaustive" : "sampled"});
      constants.delta_hat = est.delta;
      constants.delta_radius = r;
      constants.delta_exhaustive = est.exhaustive;
    }
  }

  Table delta(ConstantsReport& constants) {
    Table t{"delta.csv", {"radius", "delta_hat", "mode"}, {}};
    auto const& g = config_.delta.group;
    if (g == "free") {
      delta_rows(FreeGroupContext(ws_.torus.base().alphabet()), t, constants);
    } else if (g == "base") {
      delta_rows(BaseGroupContext(ws_.torus.base()), t, constants);
    } else if (g == "torus") {
      delta_rows(TorusContext(ws_.torus), t, constants);
    } else {
      delta_rows(ctx_, t, constants);
    }
    return t;
  }

  Table quasiconvexity(ConstantsReport& constants) {
    std::vector<std::size_t> eps;
    auto r = config_.quasiconvexity.radius;
    if (config_.quasiconvexity.group == "torus") {
      eps = quasiconvexity_profile(
          TorusContext(ws_.torus), [](TorusElement const& e) { return base_membership(e); }, r,
          ball_options());
    } else {
      auto const& m = ws_.amalgam;
      eps = quasiconvexity_profile(
          ctx_, [&m](AmalgamNF const& e) { return m.in_h(e); }, r, ball_options());
    }
    constants.epsilon_profile = eps;
    Table t{"quasiconvexity.csv", {"radius", "epsilon_hat"}, {}};
    for (std::size_t i = 0; i < eps.size(); ++i) {
      t.rows.push_back({std::to_string(i), std::to_string(eps[i])});
    }
    return t;
  }

  RunConfig const& config_;
  Workspace const& ws_;
  RunOptions const& opt_;
  AmalgamContext ctx_;
  std::unique_ptr<DistanceOracle<AmalgamContext>> oracle_;
};

inline std::string error_reason(std::exception const& e) {
  if (auto const* h = dynamic_cast<HypothesisError const*>(&e)) return h->reason();
  if (dynamic_cast<CapExceededError const*>(&e)) return "cap-exceeded";
  if (dynamic_cast<PartialBallError const*>(&e)) return "partial-ball";
  if (dynamic_cast<AlphabetError const*>(&e)) return "alphabet";
  if (dynamic_cast<UnsupportedPresentationError const*>(&e)) return "unsupported-presentation";
  if (dynamic_cast<DegenerateInputError const*>(&e)) return "degenerate-input";
  return "error";
}

inline nlohmann::json rational_json(std::optional<Rational> const& r) {
  return r ? nlohmann::json(r->to_string()) : nlohmann::json(nullptr);
}

}  // namespace detail

// The summary document: config echo, seed, caps, statuses, constants and,
// when `tables` is set, every table. Wall times are left out so that equal
// configurations give identical files.
inline nlohmann::json summary_json(RunConfig const& config, RunReport const& report,
                                   std::vector<detail::Table> const* tables) {
  using nlohmann::json;
  json j;
  j["config"] = print_config(config);
  j["seed"] = config.seed;
  j["mode"] = to_string(config.mode);
  j["caps"] = {{"distance", config.caps.distance},
               {"coset_window", config.caps.coset_window},
               {"geodesic", config.caps.geodesic},
               {"ball_members", config.caps.ball_members},
               {"y_power_window", config.caps.y_power_window},
               {"y_twist_window", config.caps.y_twist_window}};
  auto statuses = json::array();
  for (auto const& e : report.experiments) {
    // file names only, so that the document does not depend on the directory
    auto names = json::array();
    for (auto const& f : e.files) {
      names.push_back(std::filesystem::path(f).filename().string());
    }
    json s = {{"name", e.name}, {"ok", e.ok}, {"files", names}};
    if (!e.ok) {
      s["reason"] = e.reason;
      s["error"] = e.error;
    }
    statuses.push_back(s);
  }
  j["experiments"] = statuses;
  auto const& c = report.constants;
  json constants;
  constants["K_hat"] = c.k_hat ? json(*c.k_hat) : json(nullptr);
  constants["D_hat"] = detail::rational_json(c.d_hat);
  constants["delta_hat"] = detail::rational_json(c.delta_hat);
  constants["delta_radius"] = c.delta_radius;
  constants["delta_mode"] = c.delta_exhaustive ? "exhaustive" : "sampled";
  constants["epsilon_profile"] = c.epsilon_profile;
  auto dist = json::array();
  for (auto const& r : c.distortion_table) {
    dist.push_back(
        {{"n", r.n},
         {"ambient_upper", r.ambient_upper},
         {"subgroup_exact", r.subgroup_exact ? json(*r.subgroup_exact) : json(nullptr)}});
  }
  constants["distortion_table"] = dist;
  j["constants"] = constants;
  if (tables != nullptr) {
    json t = json::object();
    for (auto const& tab : *tables) {
      t[tab.file] = detail::table_json(tab);
    }
    j["tables"] = t;
  }
  return j;
}

// Runs the configured experiments in order. Experiment failures are
// recorded and the run continues unless fail_fast is set.
inline RunReport run(RunConfig const& config, RunOptions const& opt = {}) {
  auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.output_dir = opt.out_dir.value_or(config.output_dir);
  std::filesystem::path dir(report.output_dir);
  std::filesystem::create_directories(dir);

  auto ws = build_workspace(config);
  detail::Runner runner(config, ws, opt);
  std::vector<detail::Table> tables;
  bool csv = opt.format != OutputFormat::json;
  bool json = opt.format != OutputFormat::csv;

  for (auto const& name : config.experiments) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentStatus st;
    st.name = name;
    try {
      auto table = runner.run(name, report.constants);
      if (csv) {
        detail::write_csv(dir / table.file, table);
        st.files.push_back((dir / table.file).string());
      }
      tables.push_back(std::move(table));
      st.ok = true;
    } catch (std::exception const& e) {
      st.reason = detail::error_reason(e);
      st.error = e.what();
    }
    st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.experiments.push_back(st);
    if (!st.ok && opt.fail_fast) {
      break;
    }
  }
  if (json) {
    auto path = dir / "summary.json";
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      throw Error("cannot write " + path.string());
    }
    f << summary_json(config, report, &tables).dump(2) << "\n";
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// A readable account of the constructed groups and presets.
inline std::string describe(RunConfig const& config) {
  auto ws = build_workspace(config);
  auto const& base = ws.torus.base();
  std::ostringstream out;
  out << "mode: " << to_string(config.mode) << "\n";
  out << "F generators: " << base.alphabet().format([&] {
    std::vector<Letter> v;
    for (std::size_t g = 0; g < base.alphabet().size(); ++g) {
      v.push_back(make_letter(g));
    }
    return v;
  }()) << "\n";
  if (auto const* p = base.presentation()) {
    out << "relators:";
    for (auto const& r : p->relators()) {
      out << " " << base.alphabet().format(r.letters(), "");
    }
    auto sc = check_small_cancellation(*p, Rational(1, 6));
    out << "\nmax piece / min relator: " << sc.metric_ratio.to_string() << " (C'(1/6) "
        << (sc.satisfies ? "holds" : "fails") << ")\n";
    out << "geodesic cap: " << base.geodesic_cap() << "\n";
  }
  auto const& phi = ws.torus.automorphism();
  for (auto d : {Direction::forward, Direction::backward}) {
    out << (d == Direction::forward ? "phi:   " : "phi^-1:");
    for (std::size_t g = 0; g < phi.rank(); ++g) {
      out << " " << base.alphabet().name(g) << " -> "
          << base.alphabet().format(phi.table(d)[g].letters(), "") << ";";
    }
    out << "\n";
  }
  out << "G generators: " << ws.torus.alphabet().names().size() << " (" << base.alphabet().size()
      << " base + t)\n";
  auto const& m = ws.amalgam;
  out << "M generators:";
  for (auto const& n : m.alphabet().names()) {
    out << " " << n;
  }
  out << "\n";
  out << "C = <x> = <x1>, x = " << base.alphabet().format(m.x(Side::left).letters(), "")
      << ", x1 = " << base.alphabet().format(m.x(Side::right).letters(), "") << "\n";
  out << "y = " << base.alphabet().format(ws.y.letters(), "") << "\n";
  out << "coset window: " << m.options().coset_window << "\n";
  return out.str();
}

}  // namespace qcw
