#include "toruslab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "toruslab/coupling.hpp"
#include "toruslab/entropy.hpp"
#include "toruslab/exact.hpp"
#include "toruslab/grid.hpp"
#include "toruslab/lehmer.hpp"
#include "toruslab/parallel.hpp"
#include "toruslab/rng.hpp"
#include "toruslab/shuffle.hpp"

namespace toruslab {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(long long v) { return std::to_string(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

json config_json(const ExperimentConfig& c) {
  json j;
  j["n"] = c.n;
  j["l"] = c.l;
  j["steps"] = c.steps;
  j["T"] = c.T;
  j["T_prime"] = c.T_prime;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["c"] = c.c;
  j["K"] = c.K;
  j["C"] = c.C;
  return j;
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

std::string to_csv(const Table& t) {
  std::string s;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    s += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return s;
}

std::string to_json_rows(const Table& t) {
  json arr = json::array();
  for (const auto& r : t.rows) {
    json o;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      // numbers stay numbers where they parse cleanly
      const std::string& cell = r[i];
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (!cell.empty() && end && *end == '\0') {
        if (cell.find_first_of(".eEn") == std::string::npos) {
          o[t.header[i]] = std::strtoll(cell.c_str(), nullptr, 10);
        } else {
          o[t.header[i]] = v;
        }
      } else {
        o[t.header[i]] = cell;
      }
    }
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw UsageError("bad integer list: " + s);
    } catch (const std::logic_error&) {
      throw UsageError("bad integer list: " + s);
    }
  }
  return out;
}

std::array<int, 3> parse_triple(const std::string& s) {
  const auto v = parse_int_list(s);
  if (v.size() != 3) throw UsageError("expected three comma-separated integers: " + s);
  return {v[0], v[1], v[2]};
}

// Everything a subcommand produces.
struct Outcome {
  Table table;
  json summary;
  bool assertion_ok = true;
  std::string message;
};

struct Context {
  ExperimentConfig cfg;
  unsigned threads = 1;
  std::uint64_t batch = 1000;
  json params;
};

Table batch_table(const std::vector<BatchRow>& rows) {
  Table t{{"batch", "first_trial", "trials", "successes"}, {}};
  for (const auto& r : rows) t.rows.push_back({num(r.batch), num(r.first_trial), num(r.trials), num(r.successes)});
  return t;
}

json interval_json(const Interval& ci) { return json::array({ci.lo, ci.hi}); }

json estimate_json(const EstimateReport& r) {
  json j;
  j["estimate"] = r.estimate;
  j["se"] = r.se;
  j["ci95"] = interval_json(r.ci);
  j["ci_method"] = "wilson";
  j["successes"] = r.successes;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

// ---- subcommands ----

Outcome cmd_simulate(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const int n = cfg.n;
  const long long steps = cfg.steps;
  struct Row {
    int sign = 1;
    int fixed = 0;
    Coord tile0{};
  };
  const auto rows = map_trials<Row>(cfg.trials, ctx.threads, [&](std::uint64_t trial) {
    ShuffleStream stream(cfg.seed, trial);
    const GridPerm p = run_chain(GridPerm(n), steps, stream);
    Row r;
    r.sign = sign(p);
    for (int q = 0; q < p.size(); ++q) r.fixed += p.tile_at(q) == q;
    r.tile0 = p.coord_of_tile(0);
    return r;
  });
  Outcome o;
  o.table.header = {"trial", "steps", "sign", "fixed_tiles", "tile0_x", "tile0_y"};
  long long odd = 0;
  double fixed_sum = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    o.table.rows.push_back({num(static_cast<std::uint64_t>(i)), num(steps), num(r.sign), num(r.fixed),
                            num(r.tile0.x), num(r.tile0.y)});
    odd += r.sign < 0;
    fixed_sum += r.fixed;
  }
  o.summary["odd_fraction"] = static_cast<double>(odd) / static_cast<double>(rows.size());
  o.summary["mean_fixed_tiles"] = fixed_sum / static_cast<double>(rows.size());
  if (n % 2 == 1 && odd > 0) {
    o.assertion_ok = false;
    o.message = "odd permutation reached for odd n";
  }
  o.message = o.message.empty() ? "simulated " + num(cfg.trials) + " trials of " + num(steps) + " steps" : o.message;
  return o;
}

Outcome cmd_exact(const Context& ctx) {
  const int n = ctx.cfg.n;
  if (n < 2 || n > 3) throw UsageError("exact needs --n 2 or --n 3");
  const auto cls = enumerate_reachable(n);
  long long t_max = ctx.params.value("t_max", 0LL);
  const long long t_star = exact_mixing_time(cls, 100000);
  if (t_max <= 0) t_max = std::max<long long>(t_star, 1) * 2;
  const auto tvs = exact_tv_curve(cls, t_max);
  const auto ents = exact_ent_curve(cls, t_max);
  Outcome o;
  o.table.header = {"t", "tv", "ent"};
  bool mono = true;
  for (std::size_t t = 0; t < tvs.size(); ++t) {
    o.table.rows.push_back({num(static_cast<std::uint64_t>(t)), num(tvs[t]), num(ents[t])});
    if (t > 0 && (tvs[t] > tvs[t - 1] + 1e-12 || ents[t] > ents[t - 1] + 1e-12)) mono = false;
  }
  o.summary["class_size"] = cls.size();
  o.summary["t_star"] = t_star;
  o.summary["monotone"] = mono;
  o.assertion_ok = mono && t_star >= 0;
  o.message = "n=" + num(n) + " class size " + num(static_cast<std::uint64_t>(cls.size())) + " mixing time " +
              num(t_star);
  return o;
}

Outcome cmd_equiv(const Context& ctx) {
  const int n = ctx.cfg.n;
  if (n < 2 || n > 3) throw UsageError("equiv-check needs --n 2 or --n 3");
  const auto fair = two_step_equivalence(n, 1, 2);
  const auto control = two_step_equivalence(n, 1, 3);
  Outcome o;
  o.table.header = {"n", "gamma_probability", "discrepancy"};
  o.table.rows.push_back({num(n), "1/2", fair.str()});
  o.table.rows.push_back({num(n), "1/3", control.str()});
  o.summary["discrepancy"] = fair.str();
  o.summary["negative_control"] = control.str();
  o.assertion_ok = fair == 0 && control > 0;
  o.message = "discrepancy " + fair.str() + " (control " + control.str() + ")";
  return o;
}

Outcome cmd_gamma(const Context& ctx) {
  const int n = ctx.cfg.n;
  if (n < 2) throw UsageError("gamma-check needs n >= 2");
  Outcome o;
  o.table.header = {"row", "col", "row_dir", "col_dir", "support_size", "middle_in_support", "l_shape", "order3"};
  long long ok = 0, total = 0;
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      for (int dr : {1, -1}) {
        for (int dc : {1, -1}) {
          const Move r = Move::rotate(Axis::Row, row, dr);
          const Move c = Move::rotate(Axis::Col, col, dc);
          const GridPerm g = commutator_gamma(r, c, n);
          const auto sup = support(g);
          const int middle = pos_index({col, row}, n);
          bool has_middle = false;
          int same_row = 0, same_col = 0;
          for (int p : sup) {
            has_middle = has_middle || p == middle;
            const Coord q = coord_of(p, n);
            if (p == middle) continue;
            same_row += q.y == row && std::abs(wrap(q.x - col + 1, n) - 1) <= 1;
            same_col += q.x == col && std::abs(wrap(q.y - row + 1, n) - 1) <= 1;
          }
          const bool l_shape = sup.size() == 3 && same_row == 1 && same_col == 1;
          const bool order3 = compose(compose(g, g), g).is_identity() && !g.is_identity();
          const bool good = sup.size() == 3 && has_middle && l_shape && order3;
          ok += good;
          ++total;
          o.table.rows.push_back({num(row), num(col), num(dr), num(dc), num(static_cast<std::uint64_t>(sup.size())),
                                  has_middle ? "1" : "0", l_shape ? "1" : "0", order3 ? "1" : "0"});
        }
      }
    }
  }
  o.summary["cases"] = total;
  o.summary["verified"] = ok;
  o.assertion_ok = ok == total;
  o.message = "verified " + num(ok) + " of " + num(total) + " commutator cases";
  return o;
}

Outcome cmd_match_stats(const Context& ctx) {
  const int x = ctx.params.value("x", 0);
  if (x < 1) throw UsageError("match-stats needs --x");
  std::vector<int> zs = ctx.params.contains("z") ? ctx.params["z"].get<std::vector<int>>() : std::vector<int>{};
  const auto tab = estimate_match_probs(ctx.cfg, x, zs, ctx.threads, ctx.batch);
  Outcome o;
  o.table = batch_table(tab.batches);
  json per_z = json::array();
  for (std::size_t i = 0; i < tab.z_labels.size(); ++i) {
    json e;
    e["z"] = tab.z_labels[i];
    e["count"] = tab.counts[i];
    e["probability"] = static_cast<double>(tab.counts[i]) / static_cast<double>(tab.trials);
    e["ci95"] = interval_json(tab.cis[i]);
    per_z.push_back(e);
  }
  o.summary["x"] = x;
  o.summary["T"] = tab.T;
  o.summary["t"] = tab.t;
  o.summary["trials"] = tab.trials;
  o.summary["matched"] = tab.matched;
  o.summary["matched_below"] = tab.matched_below;
  o.summary["per_z"] = per_z;
  o.summary["a_hat"] = tab.a_hat;
  o.summary["a_hat_lower"] = tab.a_hat_lower;
  o.summary["wall_seconds"] = tab.wall_seconds;
  std::uint64_t zsum = 0;
  for (auto cnt : tab.counts) zsum += cnt;
  o.assertion_ok = zsum <= tab.matched_below && tab.matched_below <= tab.matched;
  o.message = "A_hat(" + num(x) + ") = " + num(tab.a_hat) + " (lower " + num(tab.a_hat_lower) + ")";
  return o;
}

Outcome cmd_triple(const Context& ctx) {
  const auto tiles = ctx.params.contains("tiles") ? ctx.params["tiles"].get<std::array<int, 3>>() : std::array<int, 3>{1, 2, 3};
  const auto targets =
      ctx.params.contains("targets") ? ctx.params["targets"].get<std::array<int, 3>>() : std::array<int, 3>{2, 3, 4};
  const auto rep = estimate_triple_prob(ctx.cfg, tiles, targets, ctx.threads, ctx.batch);
  Outcome o;
  o.table = batch_table(rep.batches);
  o.summary = estimate_json(rep);
  const double l6 = std::pow(static_cast<double>(ctx.cfg.l), 6);
  o.summary["l6_scaled"] = rep.estimate * l6;
  o.summary["T_prime"] = ctx.cfg.T_prime;
  o.message = "triple probability " + num(rep.estimate) + " [" + num(rep.ci.lo) + ", " + num(rep.ci.hi) + "]";
  return o;
}

Outcome cmd_couple(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const int n = cfg.n;
  const int l = cfg.l;
  if (n < 4) throw UsageError("couple needs n >= 4");
  if (l < 2) throw UsageError("couple needs l >= 2");
  const long long t = 2LL * l * l * n;
  const auto focus = stage1_focus(n, l);
  const bool with_boxes = cfg.c * l >= 1.0;
  const auto boxes = with_boxes ? stage1_boxes(n, l, cfg.c) : std::array<Box, 3>{};
  const auto stats = map_trials<TrajectoryStats>(cfg.trials, ctx.threads, [&](std::uint64_t trial) {
    ShuffleStream stream(cfg.seed, trial);
    return run_coupled(n, t, focus, stream);
  });
  Outcome o;
  o.table.header = {"batch", "first_trial", "trials", "sum_a_k_scaled", "sum_wraps", "sum_m_increment",
                    "sum_v1_increment", "sum_z", "stage1_hits", "i_mismatches"};
  RunningStats a, w, m, v, z;
  std::uint64_t hits = 0, mismatches = 0;
  const std::uint64_t bs = std::max<std::uint64_t>(1, ctx.batch);
  for (std::uint64_t lo = 0; lo < stats.size(); lo += bs) {
    const std::uint64_t hi = std::min<std::uint64_t>(stats.size(), lo + bs);
    double sa = 0, sw = 0, sm = 0, sv = 0, sz = 0;
    std::uint64_t bh = 0, bm = 0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const auto& st = stats[i];
      const double ak = static_cast<double>(st.a_k) / (2.0 * n);
      a.add(ak);
      w.add(static_cast<double>(st.wrap_count));
      m.add(st.m_stopped - st.m_start);
      v.add(st.v1_stopped - st.v1_start);
      z.add(st.z_stopped);
      sa += ak;
      sw += static_cast<double>(st.wrap_count);
      sm += st.m_stopped - st.m_start;
      sv += st.v1_stopped - st.v1_start;
      sz += st.z_stopped;
      bool in = with_boxes;
      for (std::size_t f = 0; f < 3; ++f) in = in && boxes[f].contains(st.x_end[f]);
      bh += in;
      bm += !st.x_matches_y_for_i;
    }
    hits += bh;
    mismatches += bm;
    o.table.rows.push_back({num(lo / bs), num(lo), num(hi - lo), num(sa), num(sw), num(sm), num(sv), num(sz), num(bh),
                            num(bm)});
  }
  auto mean_json = [](const RunningStats& s) {
    json j;
    j["mean"] = s.mean();
    j["se"] = s.stderr_mean();
    return j;
  };
  o.summary["steps"] = t;
  o.summary["a_k_scaled"] = mean_json(a);
  o.summary["a_k_bound"] = 128.0 * l;
  o.summary["wrap_epochs"] = mean_json(w);
  o.summary["m_increment"] = mean_json(m);
  o.summary["v1_increment"] = mean_json(v);
  o.summary["z_supermartingale"] = mean_json(z);
  if (with_boxes) {
    o.summary["stage1_success"] = static_cast<double>(hits) / static_cast<double>(stats.size());
    o.summary["stage1_ci95"] = interval_json(wilson_interval(hits, stats.size()));
  } else {
    o.summary["stage1_success"] = nullptr;  // c * l < 1: no boxes
  }
  o.summary["i_mismatches"] = mismatches;
  o.summary["buffer_constant_ok"] = buffer_constant_ok(cfg.K);
  const bool a_ok = a.mean() + 3.0 * a.stderr_mean() <= 128.0 * l;
  const bool w_ok = w.mean() + 3.0 * w.stderr_mean() <= 32.0;
  const bool m_ok = std::abs(m.mean()) <= 3.0 * m.stderr_mean() + 1e-12;
  o.assertion_ok = a_ok && w_ok && m_ok && mismatches == 0;
  o.message = "E[A^k/2n] = " + num(a.mean()) + ", E[epochs] = " + num(w.mean()) + ", M drift " + num(m.mean());
  return o;
}

Outcome cmd_walk_dp(const Context& ctx) {
  const int K = ctx.cfg.K;
  const int r = ctx.params.value("r", ctx.cfg.l);
  const int N = ctx.params.value("N", r * r);
  const int x = ctx.params.value("x", 0);
  if (r < 1 || N < 0 || std::abs(x) > r) throw UsageError("walk-dp needs r >= 1, N >= 0, |x| <= r");
  const auto law = lazy_walk_barrier_dp(r, K, N, x);
  Outcome o;
  o.table.header = {"y", "probability"};
  double mass = 0.0;
  for (std::size_t i = 0; i < law.size(); ++i) {
    o.table.rows.push_back({num(static_cast<int>(i) - K * r), num(law[i])});
    mass += law[i];
  }
  const auto best = barrier_constant(K, 2, 8);
  o.summary["mass"] = mass;
  o.summary["barrier_constant"] = best.value;
  o.summary["barrier_argmin"] = {{"r", best.r}, {"x", best.x}, {"y", best.y}, {"N", best.N}};
  o.summary["buffer_constant_ok"] = buffer_constant_ok(K);
  o.assertion_ok = mass <= 1.0 + 1e-12 && best.value > 0.0;
  o.message = "barrier constant " + num(best.value);
  return o;
}

Outcome cmd_mix_scaling(const Context& ctx) {
  std::vector<int> ns = ctx.params.contains("ns") ? ctx.params["ns"].get<std::vector<int>>() : std::vector<int>{4, 8, 16, 32};
  const std::string stat = ctx.params.value("statistic", std::string("single-tile"));
  MixingStatistic s = MixingStatistic::SingleTile;
  if (stat == "full-deck") s = MixingStatistic::FullDeck;
  else if (stat != "single-tile") throw UsageError("--statistic must be single-tile or full-deck");
  const auto fit = fit_mixing_exponent(ns, s);
  Outcome o;
  o.table.header = {"n", "t_star"};
  for (std::size_t i = 0; i < fit.ns.size(); ++i) o.table.rows.push_back({num(fit.ns[i]), num(fit.values[i])});
  o.summary["slope"] = fit.fit.slope;
  o.summary["slope_se"] = fit.fit.slope_se;
  o.summary["intercept"] = fit.fit.intercept;
  o.message = "slope " + num(fit.fit.slope) + " +- " + num(fit.fit.slope_se);
  return o;
}

Outcome cmd_entropy(const Context& ctx) {
  const int m = ctx.params.value("m", 4);
  const std::string kind = ctx.params.value("law", std::string("random"));
  if (m < 1 || m > PermLaw::kMaxSize) throw UsageError("--m must be in 1..8");
  const auto count = factorial(m);
  std::vector<double> w(count, 0.0);
  if (kind == "uniform") {
    std::fill(w.begin(), w.end(), 1.0);
  } else if (kind == "even") {
    for (std::uint64_t r = 0; r < count; ++r) w[r] = perm_sign(lehmer_unrank(r, m)) > 0 ? 1.0 : 0.0;
  } else if (kind == "point") {
    w[0] = 1.0;
  } else if (kind == "random") {
    ShuffleStream stream(ctx.cfg.seed, 0);
    for (auto& v : w) v = -std::log(1.0 - stream.uniform());
  } else {
    throw UsageError("--law must be uniform, even, point or random");
  }
  const auto norm = Distribution::normalized(std::move(w));
  const PermLaw law(m, std::vector<double>(norm.weights().begin(), norm.weights().end()));
  const auto parts = entropy_decompose(law);
  Outcome o;
  o.table.header = {"part", "position", "value"};
  o.table.rows.push_back({"sign", "", num(parts.sign_term)});
  for (std::size_t i = 0; i < parts.tilde_e.size(); ++i) {
    o.table.rows.push_back({"position", num(static_cast<int>(i) + 3), num(parts.tilde_e[i])});
  }
  o.table.rows.push_back({"residual", "", num(parts.residual)});
  o.table.rows.push_back({"total", "", num(parts.total)});
  o.summary["sum_of_parts"] = parts.sum();
  o.summary["total"] = parts.total;
  o.summary["gap"] = std::abs(parts.sum() - parts.total);
  o.assertion_ok = std::abs(parts.sum() - parts.total) <= 1e-10;
  o.message = "ENT " + num(parts.total) + ", parts sum " + num(parts.sum());
  return o;
}

// ---- config ----

template <class T>
T json_as(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw UsageError("config key '" + key + "' must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return v.get<T>();
        if (v.get<long long>() < 0) throw UsageError("config key '" + key + "' must be nonnegative");
      }
      return v.get<T>();
    } else {
      if (!v.is_number()) throw UsageError("config key '" + key + "' must be a number");
      return v.get<T>();
    }
  } catch (const json::exception&) {
    throw UsageError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig cfg) {
  json doc;
  std::string trimmed = text;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  if (trimmed.empty()) return cfg;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config must be a flat JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "n") cfg.n = json_as<int>(v, k);
    else if (k == "l") cfg.l = json_as<int>(v, k);
    else if (k == "steps") cfg.steps = json_as<long long>(v, k);
    else if (k == "T") cfg.T = json_as<long long>(v, k);
    else if (k == "T_prime") cfg.T_prime = json_as<long long>(v, k);
    else if (k == "trials") cfg.trials = json_as<std::uint64_t>(v, k);
    else if (k == "seed") cfg.seed = json_as<std::uint64_t>(v, k);
    else if (k == "c") cfg.c = json_as<double>(v, k);
    else if (k == "K") cfg.K = json_as<int>(v, k);
    else if (k == "C") cfg.C = json_as<double>(v, k);
    else throw UsageError("unknown config key '" + k + "'");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), base);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Torus shuffle laboratory", "toruslab"};
  app.require_subcommand(1);
  app.fallthrough();

  ExperimentConfig flags;
  std::string config_path, out_dir = "toruslab-out", format = "csv";
  unsigned threads = 1;
  std::uint64_t batch = 1000;
  auto* o_n = app.add_option("--n", flags.n, "grid side");
  auto* o_l = app.add_option("--l", flags.l, "box side l");
  auto* o_steps = app.add_option("--steps", flags.steps, "chain steps t");
  auto* o_T = app.add_option("--T", flags.T, "window-start bound T");
  auto* o_Tp = app.add_option("--T-prime", flags.T_prime, "plain-chain steps T'");
  auto* o_trials = app.add_option("--trials", flags.trials, "number of trials");
  auto* o_seed = app.add_option("--seed", flags.seed, "master seed (fallback: TORUSLAB_SEED)");
  auto* o_c = app.add_option("--c", flags.c, "box constant c");
  auto* o_K = app.add_option("--K", flags.K, "buffer constant K");
  auto* o_C = app.add_option("--C", flags.C, "step constant C");
  app.add_option("--threads", threads, "worker threads (speed only)");
  app.add_option("--config", config_path, "flat JSON config file");
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--format", format, "results format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--batch", batch, "trials per CSV row")->check(CLI::PositiveNumber);

  struct Sub {
    const char* name;
    const char* help;
    Outcome (*run)(const Context&);
  };
  const std::vector<Sub> subs = {
      {"simulate", "run the lazy torus shuffle", cmd_simulate},
      {"exact", "exact law, tv and entropy curves for n <= 3", cmd_exact},
      {"equiv-check", "exact two-step / 3-Monte equivalence", cmd_equiv},
      {"gamma-check", "verify every commutator 3-cycle", cmd_gamma},
      {"match-stats", "matching probabilities P(M2 = z, M1 < x)", cmd_match_stats},
      {"triple-prob", "three-tile transition probability", cmd_triple},
      {"couple", "master-tile coupling diagnostics", cmd_couple},
      {"walk-dp", "lazy walk with absorbing barrier", cmd_walk_dp},
      {"mix-scaling", "log-log fit of exact mixing times", cmd_mix_scaling},
      {"entropy-decompose", "sign/tail entropy decomposition", cmd_entropy},
  };
  int x = 0, r = 1, N = 0, m = 4;
  long long t_max = 0;
  std::string z_list, tiles, targets, ns, law = "random", statistic = "single-tile";
  std::vector<CLI::App*> apps;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    apps.push_back(sub);
    const std::string name = s.name;
    if (name == "match-stats") {
      sub->add_option("--x", x, "label of the focus card")->required();
      sub->add_option("--z", z_list, "candidate labels, comma separated (default: all below x)");
    } else if (name == "triple-prob") {
      sub->add_option("--tiles", tiles, "labels i,j,k (default 1,2,3)");
      sub->add_option("--targets", targets, "labels i',j',k' (default 2,3,4)");
    } else if (name == "walk-dp") {
      sub->add_option("--r", r, "scale r (default l)");
      sub->add_option("--N", N, "steps (default r^2)");
      sub->add_option("--x", x, "start point");
    } else if (name == "exact") {
      sub->add_option("--t-max", t_max, "curve length (default twice the mixing time)");
    } else if (name == "mix-scaling") {
      sub->add_option("--ns", ns, "sizes, comma separated (default 4,8,16,32)");
      sub->add_option("--statistic", statistic, "single-tile or full-deck");
    } else if (name == "entropy-decompose") {
      sub->add_option("--m", m, "deck size (1..8)");
      sub->add_option("--law", law, "uniform, even, point or random");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  std::size_t which = 0;
  for (std::size_t i = 0; i < apps.size(); ++i) {
    if (apps[i]->parsed()) which = i;
  }
  const std::string sub_name = subs[which].name;

  Context ctx;
  try {
    ExperimentConfig cfg;
    if (const char* env = std::getenv("TORUSLAB_SEED")) {
      try {
        cfg.seed = std::stoull(env);
      } catch (const std::logic_error&) {
        throw UsageError("TORUSLAB_SEED is not an unsigned integer");
      }
    }
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    if (o_n->count()) cfg.n = flags.n;
    if (o_l->count()) cfg.l = flags.l;
    if (o_steps->count()) cfg.steps = flags.steps;
    if (o_T->count()) cfg.T = flags.T;
    if (o_Tp->count()) cfg.T_prime = flags.T_prime;
    if (o_trials->count()) cfg.trials = flags.trials;
    if (o_seed->count()) cfg.seed = flags.seed;
    if (o_c->count()) cfg.c = flags.c;
    if (o_K->count()) cfg.K = flags.K;
    if (o_C->count()) cfg.C = flags.C;
    if (cfg.steps < 0 || cfg.T < 0 || cfg.T_prime < 0) throw UsageError("step counts must be nonnegative");
    if (cfg.n < 2) throw UsageError("--n must be at least 2");
    if (cfg.l < 1 || cfg.l > cfg.n) throw UsageError("--l must be in 1..n");
    try {
      ctx.cfg = cfg.resolved();
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
    ctx.threads = resolve_threads(threads);
    ctx.batch = batch;
    json params = json::object();
    if (sub_name == "match-stats") {
      params["x"] = x;
      if (!z_list.empty()) params["z"] = parse_int_list(z_list);
    } else if (sub_name == "triple-prob") {
      if (!tiles.empty()) params["tiles"] = parse_triple(tiles);
      if (!targets.empty()) params["targets"] = parse_triple(targets);
    } else if (sub_name == "walk-dp") {
      params["r"] = apps[which]->get_option("--r")->count() ? r : ctx.cfg.l;
      params["N"] = apps[which]->get_option("--N")->count() ? N : params["r"].get<int>() * params["r"].get<int>();
      params["x"] = x;
    } else if (sub_name == "exact") {
      params["t_max"] = t_max;
    } else if (sub_name == "mix-scaling") {
      if (!ns.empty()) params["ns"] = parse_int_list(ns);
      params["statistic"] = statistic;
    } else if (sub_name == "entropy-decompose") {
      params["m"] = m;
      params["law"] = law;
    }
    ctx.params = params;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const fs::path dir(out_dir);
  const std::string results_name = format == "json" ? "results.json" : "results.csv";
  try {
    fs::create_directories(dir);
    json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["tool"] = "toruslab";
    manifest["tool_version"] = kToolVersion;
    manifest["subcommand"] = sub_name;
    manifest["config"] = config_json(ctx.cfg);
    manifest["params"] = ctx.params;
    manifest["threads"] = ctx.threads;
    manifest["batch"] = ctx.batch;
    manifest["format"] = format;
    manifest["outputs"] = {{"results", (dir / results_name).string()},
                           {"summary", (dir / "summary.json").string()},
                           {"manifest", (dir / "manifest.json").string()}};
    manifest["timestamp"] = timestamp_utc();
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  Outcome res;
  try {
    res = subs[which].run(ctx);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["subcommand"] = sub_name;
  summary["assertion_ok"] = res.assertion_ok;
  summary["result"] = res.summary;
  write_text(dir / results_name, format == "json" ? to_json_rows(res.table) : to_csv(res.table));
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  out << sub_name << ": " << res.message << "\n";
  if (!res.assertion_ok) {
    err << "assertion failed\n";
    return kExitAssertion;
  }
  return kExitOk;
}

}  // namespace toruslab
