// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "gctl/fuzzy_inference.hpp"
#include "gctl/g_controller.hpp"
#include "gctl/metrics.hpp"
#include "gctl/plants.hpp"
#include "gctl/scenario.hpp"
#include "gctl/smc_adaptation.hpp"
#include "gctl/structure_evolution.hpp"
#include "gctl/trace_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace gctl;

namespace {

using Clock = std::chrono::steady_clock;

const fs::path kScenarios = fs::path(GCTL_SOURCE_DIR) / "scenarios";

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

Mat random_spd(std::mt19937_64& rng, int k) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = n(rng);
  return a * a.transpose() + 0.5 * Mat::Identity(k, k);
}

Vec uniform_vec(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Vec::NullaryExpr(n, [&] { return u(rng); });
}

std::vector<fs::path> configs_in(const std::string& sub) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kScenarios / sub))
    if (e.path().extension() == ".ini") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

bool is_structural(const TraceRow& r) {
  return r.event.find("grow") != std::string::npos || r.event.find("prune") != std::string::npos;
}

std::string csv_text(const ScenarioResult& r) {
  std::ostringstream os;
  write_csv(os, r.rows);
  return os.str();
}

// Every committed scenario, run once up front (in parallel).
struct Runs {
  std::map<std::string, ScenarioResult> by_name;
  std::map<std::string, std::string> dir_of;

  const ScenarioResult& at(const std::string& name) const {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw std::runtime_error("missing scenario " + name);
    return it->second;
  }
  std::vector<const ScenarioResult*> in(std::initializer_list<const char*> dirs) const {
    std::vector<const ScenarioResult*> out;
    for (const auto& [name, res] : by_name)
      for (const char* d : dirs)
        if (dir_of.at(name) == d) out.push_back(&res);
    return out;
  }
};

Runs run_all() {
  Runs runs;
  std::vector<std::pair<std::string, std::future<ScenarioResult>>> jobs;
  for (const char* dir : {"lti2", "hexa", "bifw", "pid"})
    for (const auto& p : configs_in(dir)) {
      runs.dir_of[p.stem().string()] = dir;
      jobs.emplace_back(p.stem().string(), std::async(std::launch::async, [p] {
                          return run_scenario(load_scenario(p.string()));
                        }));
    }
  for (auto& [name, fut] : jobs) runs.by_name.emplace(name, fut.get());
  return runs;
}

// ---------------------------------------------------------------------------

Outcome inference_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> pick_j(1, 5), pick_k(1, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int j = pick_j(rng), k = pick_k(rng);
    RuleBase rb(static_cast<std::size_t>(k), std::vector<InputRange>(static_cast<std::size_t>(k)));
    for (int i = 0; i < j; ++i) {
      FuzzyRule r;
      r.center = uniform_vec(rng, k, -1.0, 1.0);
      r.inv_dispersion = random_spd(rng, k);
      r.support = 1;
      r.consequent = uniform_vec(rng, k + 1, -5.0, 5.0);
      rb.add(r);
    }
    const Vec z = uniform_vec(rng, k, -1.0, 1.0);

    double num = 0.0, den = 0.0;
    for (const auto& r : rb.rules()) {
      double q = 0.0;
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          q += (z(a) - r.center(a)) * r.inv_dispersion(a, b) * (z(b) - r.center(b));
      const double w = std::exp(-q);
      double eta = r.consequent(0);
      for (int m = 0; m < k; ++m) eta += r.consequent(m + 1) * z(m);
      num += w * eta;
      den += w;
    }
    worst = std::max(worst, std::abs(infer(rb, z).output - num / den));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 1.0,
          "max |diff| " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome rank_one_update() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> support(1, 100);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 3;
    FuzzyRule r;
    r.center = uniform_vec(rng, k, -1.0, 1.0);
    r.inv_dispersion = random_spd(rng, k);
    r.support = support(rng);
    r.consequent = Vec::Zero(k + 1);
    const Vec z = uniform_vec(rng, k, -1.0, 1.0);

    // Direct covariance update, then explicit inversion.
    const double alpha = 1.0 / (static_cast<double>(r.support) + 1.0);
    const Vec c_new = r.center + alpha * (z - r.center);
    const Vec d = z - c_new;
    const Mat cov = (1.0 - alpha) * r.inv_dispersion.inverse() +
                    alpha * (1.0 - alpha) * d * d.transpose();
    const Mat oracle = cov.inverse();

    absorb_sample(r, z);
    worst = std::max(worst, (r.inv_dispersion - oracle).norm() / oracle.norm());
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 1.0, "max rel err " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome winner_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> pick_j(1, 6), pick_k(1, 3);
  std::uniform_int_distribution<std::size_t> support(1, 30);
  int mismatches = 0, ties = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int j = pick_j(rng), k = pick_k(rng);
    RuleBase rb(static_cast<std::size_t>(k), std::vector<InputRange>(static_cast<std::size_t>(k)));
    for (int i = 0; i < j; ++i) {
      FuzzyRule r;
      r.center = uniform_vec(rng, k, -1.0, 1.0);
      r.inv_dispersion = random_spd(rng, k);
      r.support = support(rng);
      r.consequent = Vec::Zero(k + 1);
      rb.add(r);
    }
    const Vec z = uniform_vec(rng, k, -1.0, 1.0);

    auto brute = [&](const RuleBase& base) {
      double total = 0.0;
      for (const auto& r : base.rules()) total += static_cast<double>(r.support);
      std::size_t best = 0;
      double best_p = -1.0;
      for (std::size_t i = 0; i < base.size(); ++i) {
        const auto& r = base.rule(i);
        const Vec d = z - r.center;
        const double vol = r.inv_dispersion.inverse().determinant();
        const double p = std::exp(-d.dot(r.inv_dispersion * d)) /
                         std::sqrt(2.0 * std::numbers::pi * vol) *
                         static_cast<double>(r.support) / total;
        if (p > best_p) {
          best_p = p;
          best = i;
        }
      }
      return best;
    };

    // Every fourth case: append a copy of the best rule, so the original must win the tie.
    if (trial % 4 == 0) {
      const std::size_t best = brute(rb);
      rb.add(FuzzyRule(rb.rule(best)));
      ++ties;
    }
    if (select_winner(rb, z).index != brute(rb)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 1.0, std::to_string(mismatches) + " mismatches in 1000 (" +
                                             std::to_string(ties) + " ties), " + fmt(secs) + " s"};
}

Outcome case_partition() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0), logv(-8.0, 2.0);
  std::uniform_real_distribution<double> rho_b(1e-4, 0.1);
  int bad = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double r_win = trial % 10 == 0 ? 0.95 : unit(rng);
    const double v_win = std::pow(10.0, logv(rng));
    const double ra = trial % 10 == 0 ? 0.95 : std::clamp(unit(rng), 1e-6, 1.0 - 1e-6);
    const double total = v_win * (1.0 + std::pow(10.0, logv(rng) + 2.0));
    const double v_max = rho_b(rng) * total;
    const bool in_i = r_win >= ra && v_win <= v_max;
    const bool in_ii = r_win < ra && v_win > v_max;
    const bool in_iii = r_win >= ra && v_win > v_max;
    const bool in_iv = r_win < ra && v_win <= v_max;
    const int hits = in_i + in_ii + in_iii + in_iv;
    const VigilanceCase got = classify_case(r_win, v_win, ra, v_max);
    const VigilanceCase want = in_i ? VigilanceCase::I
                               : in_ii ? VigilanceCase::II
                               : in_iii ? VigilanceCase::III
                                        : VigilanceCase::IV;
    if (hits != 1 || got != want) ++bad;
  }
  return {bad == 0, std::to_string(bad) + " of 10000 cases outside the partition"};
}

Outcome lyapunov_monotone(const Runs& runs) {
  std::size_t scenarios = 0, violations = 0, failed = 0;
  std::string where;
  for (const auto* res : runs.in({"lti2", "hexa"})) {
    ++scenarios;
    if (!res->ok()) {
      ++failed;
      where = res->name + ": " + *res->failure;
      continue;
    }
    for (std::size_t i = 1; i < res->rows.size(); ++i) {
      const auto& r = res->rows[i];
      const double bound = -1.5 * *r.s_h * *r.s_h;
      const bool rose = *r.v_hat > *res->rows[i - 1].v_hat && !is_structural(r);
      if (rose || !(bound <= 0.0)) {
        ++violations;
        where = res->name + " t=" + fmt(r.t);
      }
    }
  }
  std::string detail = std::to_string(scenarios) + " scenarios, " + std::to_string(violations) +
                       " V-hat increases, " + std::to_string(failed) + " diverged";
  if (!where.empty()) detail += " (" + where + ")";
  return {scenarios > 0 && violations == 0 && failed == 0, detail};
}

Outcome gain_contraction(const Runs& runs) {
  std::size_t scenarios = 0, checked = 0, violations = 0, not_spd = 0, resets = 0;
  std::string where;
  for (const auto* res : runs.in({"lti2", "hexa"})) {
    ++scenarios;
    if (!res->ok()) {
      ++not_spd;
      where = res->name + " diverged";
      continue;
    }
    resets += res->gain_resets;
    for (std::size_t i = 0; i < res->rows.size(); ++i) {
      const auto& r = res->rows[i];
      if (std::isnan(*r.log_det_g)) {
        ++not_spd;
        where = res->name + " t=" + fmt(r.t) + " not SPD";
      }
      if (i == 0 || is_structural(r) || !(*r.gain_psi_norm > 1e-12)) continue;
      ++checked;
      if (!(*r.log_det_g < *res->rows[i - 1].log_det_g)) {
        ++violations;
        where = res->name + " t=" + fmt(r.t);
      }
    }
  }
  std::string detail = std::to_string(scenarios) + " runs, " + std::to_string(checked) +
                       " steps checked, " + std::to_string(violations) + " non-decreasing, " +
                       std::to_string(not_spd) + " non-SPD, " + std::to_string(resets) +
                       " resets";
  if (!where.empty()) detail += " (" + where + ")";
  return {scenarios > 0 && violations == 0 && not_spd == 0 && resets == 0, detail};
}

Outcome lti_tracking() {
  struct Case {
    const char* file;
    std::function<std::pair<bool, std::string>(const ScenarioResult&)> check;
  };
  const std::vector<Case> cases{
      {"lti2_sine_a1_f1.ini",
       [](const ScenarioResult& r) {
         return std::pair{r.summary.rmse <= 0.10, "sine rmse " + fmt(r.summary.rmse)};
       }},
      {"lti2_step_0_10.ini",
       [](const ScenarioResult& r) {
         const auto& s = r.summary.settling_time_s;
         return std::pair{s.has_value() && *s <= 5.0 && r.summary.step_time_s == 20.0,
                          "step settles " + (s ? fmt(*s) + " s" : std::string("never")) +
                              " after t=" + fmt(r.summary.step_time_s.value_or(-1))};
       }},
      {"lti2_square_a4_f01.ini", [](const ScenarioResult& r) {
         return std::pair{r.summary.rmse <= 1.0, "square rmse " + fmt(r.summary.rmse)};
       }}};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto cfg = load_scenario((kScenarios / "lti2" / c.file).string());
    const auto t0 = Clock::now();
    const auto res = run_scenario(cfg);
    const double secs = seconds_since(t0);
    const auto [ok, what] = c.check(res);
    pass = pass && ok && res.ok() && secs < 5.0 && cfg.duration() == 100.0;
    detail += (detail.empty() ? "" : "; ") + what + " (" + fmt(secs) + " s)";
  }
  return {pass, detail};
}

Outcome beats_pid(const Runs& runs) {
  const auto& g = runs.at("lti2_sine_a1_f1");
  const auto& pid = runs.at("pid_lti2_sine_a1_f1");
  return {g.ok() && pid.ok() && g.summary.rmse <= pid.summary.rmse,
          "G rmse " + fmt(g.summary.rmse) + " vs PID " + fmt(pid.summary.rmse)};
}

Outcome gust_robustness(const Runs& runs) {
  const auto& gust = runs.at("hexa_constant10_gust");
  const auto& calm = runs.at("hexa_constant10");
  const auto cfg = load_scenario((kScenarios / "hexa" / "hexa_constant10_gust.ini").string());
  const double gust_end = cfg.gust.onset_time + cfg.gust.duration;
  const double band = kSettleBand * 10.0;
  double worst_after = 0.0;
  for (const auto& r : gust.rows)
    if (r.t >= gust_end + 5.0) worst_after = std::max(worst_after, std::abs(r.e));
  const double ratio = gust.summary.rmse / calm.summary.rmse;
  return {gust.ok() && calm.ok() && cfg.gust_enabled && worst_after <= band && ratio < 1.25,
          "max |e| after t=" + fmt(gust_end + 5.0) + " is " + fmt(worst_after) + " (band " +
              fmt(band) + "), rmse ratio " + fmt(ratio)};
}

Outcome structure(const Runs& runs) {
  std::size_t scenarios = 0, bad = 0, lo = 1000, hi = 0;
  std::string where;
  for (const auto* res : runs.in({"lti2", "hexa", "bifw"})) {
    ++scenarios;
    const auto& first = res->rows.front();
    const bool boot = first.rules == 1u && first.event.find("bootstrap") != std::string::npos;
    const std::size_t final_rules = res->rows.back().rules.value_or(0);
    lo = std::min(lo, final_rules);
    hi = std::max(hi, final_rules);
    if (!res->ok() || !boot || final_rules < 1 || final_rules > 20) {
      ++bad;
      where = res->name;
    }
  }

  // Inject a rule of volume 1e-12 into live controllers (warmed up on the LTI
  // plant) and run one pruning pass.
  std::size_t injected_ok = 0;
  const std::vector<std::string> hosts{"lti2/lti2_sine_a1_f1.ini", "hexa/hexa_sine_a1_f1.ini"};
  for (const auto& host : hosts) {
    const auto cfg = load_scenario((kScenarios / host).string());
    GController g(cfg.g);
    PlantState x;
    for (int i = 0; i < 300; ++i) {
      const double r = std::sin(2.0 * std::numbers::pi * i * cfg.dt);
      x = step_lti2(x, g.step(r, x.position, cfg.dt).u, cfg.dt);
    }
    FuzzyRule tiny;
    tiny.center = Vec::Zero(2);
    tiny.inv_dispersion = 1e6 * Mat::Identity(2, 2);
    tiny.support = 1;
    tiny.consequent = Vec::Constant(3, 1.0);
    g.inject_rule(tiny);
    const std::size_t idx = g.rules().size() - 1;
    const auto pruned = g.prune_now();
    if (std::find(pruned.begin(), pruned.end(), idx) != pruned.end() &&
        static_cast<std::size_t>(g.smc().omega.size()) == g.rules().size() * 3)
      ++injected_ok;
  }

  std::string detail = std::to_string(scenarios) + " scenarios, final rules " +
                       std::to_string(lo) + ".." + std::to_string(hi) + ", injected rule pruned " +
                       std::to_string(injected_ok) + "/" + std::to_string(hosts.size());
  if (!where.empty()) detail += " (bad: " + where + ")";
  return {scenarios > 0 && bad == 0 && injected_ok == hosts.size(), detail};
}

Outcome determinism(const Runs& runs) {
  std::vector<std::future<std::pair<std::string, std::string>>> reruns;
  for (const auto& [name, dir] : runs.dir_of)
    reruns.push_back(std::async(std::launch::async, [name = name, dir = dir] {
      const auto res = run_scenario(load_scenario((kScenarios / dir / (name + ".ini")).string()));
      return std::pair{name, csv_text(res)};
    }));

  std::size_t differ = 0, inconsistent = 0;
  double worst = 0.0;
  std::string where;
  const auto out_dir = fs::temp_directory_path() / "gctl_acceptance";
  fs::remove_all(out_dir);
  for (auto& f : reruns) {
    const auto [name, text] = f.get();
    const auto& first = runs.at(name);
    if (csv_text(first) != text) {
      ++differ;
      where = name;
    }
    const auto files = emit(first, out_dir);
    const auto rows = read_csv(files.csv);
    if (rows.size() < 2) {
      ++inconsistent;
      continue;
    }
    const Summary again = metrics(rows);
    const Summary& s = first.summary;
    auto gap = [](const std::optional<double>& a, const std::optional<double>& b) {
      if (a.has_value() != b.has_value()) return std::numeric_limits<double>::infinity();
      return a ? std::abs(*a - *b) : 0.0;
    };
    const double d = std::max({std::abs(again.rmse - s.rmse), gap(again.rise_time_s, s.rise_time_s),
                               gap(again.settling_time_s, s.settling_time_s),
                               gap(again.step_time_s, s.step_time_s),
                               std::abs(again.max_abs_u - s.max_abs_u)});
    worst = std::max(worst, d);
    if (!(d <= 1e-12) || again.final_rule_count != s.final_rule_count) {
      ++inconsistent;
      where = name;
    }
  }
  fs::remove_all(out_dir);
  std::string detail = std::to_string(runs.by_name.size()) + " configs, " +
                       std::to_string(differ) + " non-identical CSVs, max metric gap " +
                       fmt(worst);
  if (!where.empty()) detail += " (" + where + ")";
  return {differ == 0 && inconsistent == 0, detail};
}

Outcome euler_consistency() {
  // Replays the same continuous-time (psi, s_H) signals at dt, dt/2, dt/4, dt/8.
  auto replay = [](double dt) {
    SmcConfig cfg;
    cfg.g0 = 1.0;
    cfg.alpha_initial = cfg.alpha_target = {1.0, 0.0, 0.0};
    cfg.gain_update = GainUpdate::euler;
    SmcState st = SmcState::initial(cfg, 2);
    const std::size_t one = 1, two = 2;
    st = resize(st, 1, 2, std::span(&one, 1));
    st = resize(st, 2, 3, std::span(&two, 1));
    const auto n = std::lround(2.0 / dt);
    for (long i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) * dt;
      const double z1 = std::sin(1.3 * t), z2 = std::cos(0.7 * t);
      Vec w(3);
      w << std::exp(-std::pow(z1 - 0.5, 2)), std::exp(-std::pow(z1 + 0.5, 2)),
          std::exp(-z2 * z2);
      w /= w.sum();
      Vec psi(9);
      for (int r = 0; r < 3; ++r) psi.segment(3 * r, 3) << w(r), w(r) * z1, w(r) * z2;
      st = adapt(st, psi, std::sin(2.0 * t) + 0.3, dt);
    }
    return Vec(st.omega);
  };
  std::vector<Vec> w;
  for (double dt : {0.02, 0.01, 0.005, 0.0025}) w.push_back(replay(dt));
  bool pass = true;
  std::string detail = "ratios";
  for (std::size_t i = 0; i + 2 < w.size(); ++i) {
    const double ratio = (w[i] - w[i + 1]).norm() / (w[i + 1] - w[i + 2]).norm();
    pass = pass && ratio >= 1.5 && ratio <= 2.5;
    detail += " " + fmt(ratio);
  }
  return {pass, detail};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  criteria.emplace_back("inference oracle", inference_oracle);
  criteria.emplace_back("rank-one dispersion update", rank_one_update);
  criteria.emplace_back("winner oracle", winner_oracle);
  criteria.emplace_back("case-dispatch partition", case_partition);

  std::optional<Runs> runs;
  std::string run_error;
  try {
    runs = run_all();
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  auto with_runs = [&](Outcome (*f)(const Runs&)) {
    return [&runs, &run_error, f]() -> Outcome {
      if (!runs) return {false, "scenario runs failed: " + run_error};
      return f(*runs);
    };
  };
  criteria.emplace_back("Lyapunov monotonicity", with_runs(lyapunov_monotone));
  criteria.emplace_back("gain contraction", with_runs(gain_contraction));
  criteria.emplace_back("LTI tracking ceilings", lti_tracking);
  criteria.emplace_back("G-controller vs tuned PID", with_runs(beats_pid));
  criteria.emplace_back("gust robustness", with_runs(gust_robustness));
  criteria.emplace_back("structural behavior", with_runs(structure));
  criteria.emplace_back("determinism and metrics self-consistency", with_runs(determinism));
  criteria.emplace_back("Euler consistency", euler_consistency);

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " "
              << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
