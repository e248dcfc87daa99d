// Command-line front end for the excursia library.
//
// Exit codes: 0 success, 1 usage error, 2 model failed IIA validation,
// 3 numerical failure.

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "excursia/excursia.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace excursia;

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

/// Shortest decimal string that reads back to the same double.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

/// A refusal carrying the validity report that caused it.
struct Refusal {
  json report;
  std::string message;
};

json report_json(const ValidityReport& rep) {
  json j;
  j["verdict"] = to_string(rep.verdict);
  j["monotone"] = rep.monotone_nonincreasing;
  j["nonnegative"] = rep.nonnegative;
  j["integrable"] = rep.integrable;
  j["tail_class"] = to_string(rep.tail_class.kind);
  if (rep.tail_class.kind == TailClass::Kind::exponential)
    j["tail_rate"] = rep.tail_class.value;
  else
    j["tail_rate"] = nullptr;
  if (rep.tail_class.kind == TailClass::Kind::power_law)
    j["tail_exponent"] = rep.tail_class.value;
  if (const auto v = rep.first_violation())
    j["first_violation_t"] = *v;
  else
    j["first_violation_t"] = nullptr;
  j["classification_inconclusive"] = rep.classification_inconclusive;
  j["grid"] = {{"t_max", rep.t_max}, {"step", rep.step}};
  return j;
}

/// Validates and builds a sampler, or throws Refusal.
DivisorSampler checked_sampler(const CovarianceModel& m) {
  const auto rep = validate_iia(m);
  if (!samplable(rep.verdict))
    throw Refusal{report_json(rep), m.spec() + " failed IIA validation (" +
                                        std::string(to_string(rep.verdict)) + ")"};
  return DivisorSampler::for_model(m, rep);
}

json estimate_json(const ExponentEstimate& e) {
  json j;
  j["method"] = to_string(e.method);
  j["theta"] = e.theta;
  if (e.method == ExponentEstimate::Method::tail_regression) {
    j["half_width"] = e.half_width ? json(*e.half_width) : json(nullptr);
    j["intercept"] = e.intercept ? json(*e.intercept) : json(nullptr);
    j["n"] = e.n;
    j["k"] = e.k;
    j["reps"] = e.reps;
    j["seed"] = e.seed;
    j["replicates"] = e.replicates;
  } else {
    if (e.bracket) j["bracket"] = {e.bracket->first, e.bracket->second};
    if (e.residual) j["residual"] = *e.residual;
    if (e.boundary_margin) j["boundary_margin"] = *e.boundary_margin;
  }
  return j;
}

json bound_json(reference::ValueBound b) { return {{"value", b.value}, {"half_width", b.half_width}}; }

/// Published values for models that have them, or null.
json reference_json(const CovarianceModel& m) {
  json j;
  switch (m.kind()) {
    case ModelKind::diffusion: {
      if (const auto row = reference::diffusion_row(m.dimension())) {
        j["divisor_mc"] = bound_json(row->divisor);
        j["iia_mc"] = bound_json(row->iia);
      }
      for (const auto& b : reference::kDiffusionBaselines)
        if (b.d == m.dimension()) j["process_estimates"] = {b.first, b.second};
      if (m.dimension() == 1) j["process_exact"] = reference::kDiffusionExactD1;
      if (m.dimension() == 2) {
        j["process_exact"] = reference::kDiffusionExactD2;
        j["iia_pole"] = reference::kPoleDiffusion2;
      }
      break;
    }
    case ModelKind::random_acceleration:
      j["iia_pole"] = reference::kPoleRandomAcceleration;
      j["iia_mc"] = bound_json(reference::kMcRandomAcceleration);
      break;
    case ModelKind::shifted_gaussian:
      if (m.param() == 0.0) {
        j["iia_pole"] = reference::kPoleShiftedGaussian0;
        j["iia_mc"] = bound_json(reference::kMcShiftedGaussian0);
        j["trajectory_mc"] = bound_json(reference::kTrajectoryShiftedGaussian0);
      } else if (m.param() == 2.0) {
        j["iia_pole"] = reference::kPoleShiftedGaussian2;
        j["trajectory_mc"] = bound_json(reference::kTrajectoryShiftedGaussian2);
      }
      break;
    case ModelKind::matern:
      if (m.param() == 2.5) {
        j["iia_mc"] = bound_json(reference::kMcMatern52);
        j["trajectory_mc"] = bound_json(reference::kTrajectoryMatern52);
      }
      break;
    default:
      break;
  }
  return j.empty() ? json(nullptr) : j;
}

/// Run metadata: written as '#' lines for CSV/text and as "meta" for JSON.
class Meta {
 public:
  explicit Meta(std::string command) {
    j_["tool"] = "excursia";
    j_["version"] = EXCURSIA_VERSION;
    j_["command"] = std::move(command);
  }
  template <class T>
  Meta& add(const std::string& key, T&& value) {
    j_[key] = std::forward<T>(value);
    return *this;
  }
  void write_comments(std::ostream& os) const {
    for (const auto& [k, v] : j_.items())
      os << "# " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  [[nodiscard]] const json& get() const { return j_; }

 private:
  json j_;
};

/// Destination stream: a file when a path is given, stdout otherwise.
class Sink {
 public:
  Sink(const std::string& path, bool binary) {
    if (!path.empty()) {
      file_.open(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
      if (!file_) throw DomainError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

struct Global {
  std::size_t threads = 0;
  bool timing = false;
  std::string output;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  [[nodiscard]] std::size_t workers() const { return threads > 0 ? threads : default_thread_count(); }
  [[nodiscard]] double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void finish_json(Global& g, Meta& meta, json body) {
  if (g.timing) meta.add("wall_time_s", g.elapsed());
  json out;
  out["meta"] = meta.get();
  for (auto& [k, v] : body.items()) out[k] = v;
  Sink sink(g.output, false);
  sink.os() << out.dump(2) << '\n';
}

void finish_csv_trailer(Global& g, std::ostream& os) {
  if (g.timing) os << "# wall_time_s: " << num(g.elapsed()) << '\n';
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::size_t resolve_k(std::size_t k, double tail_frac, std::size_t n) {
  if (k > 0) return k;
  if (tail_frac > 0.0) return static_cast<std::size_t>(std::llround(tail_frac * static_cast<double>(n)));
  return default_tail_count(n);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

void cmd_models(Global& g) {
  Sink sink(g.output, false);
  auto& os = sink.os();
  Meta meta("models");
  meta.write_comments(os);
  std::istringstream help{std::string(kModelHelp)};
  for (std::string line; std::getline(help, line);) os << "# " << line << '\n';
  os << "spec,r2_0,mean_excursion,crossing_intensity,tail_hint,tail_value\n";
  for (const auto& m : builtin_models()) {
    const auto tail = m.tail_rate_hint();
    os << '"' << m.spec() << "\"," << num(m.d2r0()) << ',' << num(mean_excursion(m)) << ','
       << num(crossing_intensity(m)) << ',' << to_string(tail.kind) << ',' << num(tail.value)
       << '\n';
  }
  finish_csv_trailer(g, os);
}

struct ValidateArgs {
  std::string model;
  double t_max = 50.0;
  double step = 0.01;
};

void cmd_validate(Global& g, const ValidateArgs& a) {
  const auto m = parse_model(a.model);
  const auto rep = validate_iia(m, a.t_max, a.step);
  Meta meta("validate");
  meta.add("model", m.spec()).add("t_max", a.t_max).add("step", a.step);
  json body = report_json(rep);
  body["model"] = m.spec();
  finish_json(g, meta, std::move(body));
}

struct CurveArgs {
  std::string what = "e0";
  std::string model;
  double t_max = 20.0;
  double step = 0.01;
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  std::size_t streams = 16;
};

void cmd_curve(Global& g, const CurveArgs& a) {
  const auto m = parse_model(a.model);
  if (!(a.step > 0.0) || !(a.t_max > 0.0)) throw DomainError("--tmax and --step must be > 0");
  const auto grid = uniform_grid(0.0, a.t_max, a.step);
  Meta meta("e0");
  meta.add("what", a.what).add("model", m.spec()).add("t_max", a.t_max).add("step", a.step);

  std::vector<double> value(grid.size());
  std::vector<double> se;
  if (a.what == "e0") {
    for (std::size_t i = 0; i < grid.size(); ++i) value[i] = e0(m, grid[i]);
  } else if (a.what == "rcl") {
    for (std::size_t i = 0; i < grid.size(); ++i) value[i] = clipped_autocovariance(m, grid[i]);
  } else {
    const auto sampler = checked_sampler(m);
    meta.add("n", a.n).add("seed", a.seed).add("streams", a.streams);
    auto xs = sample_many(sampler, SampleTarget::excursion, a.n, a.seed, a.streams, g.workers());
    std::sort(xs.begin(), xs.end());
    const auto n = static_cast<double>(xs.size());
    se.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto above = xs.end() - std::upper_bound(xs.begin(), xs.end(), grid[i]);
      value[i] = static_cast<double>(above) / n;
      se[i] = std::sqrt(value[i] * (1.0 - value[i]) / n);
    }
  }

  Sink sink(g.output, false);
  auto& os = sink.os();
  meta.write_comments(os);
  os << (se.empty() ? "t,value,log_value\n" : "t,value,log_value,SE\n");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << num(grid[i]) << ',' << num(value[i]) << ',' << num(std::log(value[i]));
    if (!se.empty()) os << ',' << num(se[i]);
    os << '\n';
  }
  finish_csv_trailer(g, os);
}

struct SampleArgs {
  std::string model;
  std::string what = "excursion";
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::size_t streams = 16;
  bool binary = false;
};

void cmd_sample(Global& g, const SampleArgs& a) {
  const auto m = parse_model(a.model);
  const auto sampler = checked_sampler(m);
  const auto target = a.what == "divisor" ? SampleTarget::divisor : SampleTarget::excursion;
  const auto xs = sample_many(sampler, target, a.n, a.seed, a.streams, g.workers());
  Sink sink(g.output, a.binary);
  auto& os = sink.os();
  if (a.binary) {
    static_assert(std::endian::native == std::endian::little, "binary output assumes little-endian");
    os.write(reinterpret_cast<const char*>(xs.data()),
             static_cast<std::streamsize>(xs.size() * sizeof(double)));
    return;
  }
  Meta meta("sample");
  meta.add("model", m.spec()).add("what", a.what).add("n", a.n).add("seed", a.seed).add("streams", a.streams);
  meta.write_comments(os);
  for (const double x : xs) os << num(x) << '\n';
  finish_csv_trailer(g, os);
}

struct PoleArgs {
  std::string model;
  double t_max = 1e5;
  double rel_tol = 1e-9;
  double margin = 0.95;
};

PoleOptions pole_options(const PoleArgs& a) {
  PoleOptions opts;
  opts.boundary_margin = a.margin;
  opts.laplace.rel_tol = a.rel_tol;
  opts.laplace.t_cap = a.t_max;
  return opts;
}

ExponentEstimate checked_pole(const CovarianceModel& m, const PoleOptions& opts) {
  const auto rep = validate_iia(m);
  if (rep.verdict != Verdict::valid)
    throw Refusal{report_json(rep), "pole search needs a valid light-tailed model; " + m.spec() +
                                        " has verdict " + std::string(to_string(rep.verdict))};
  return find_pole(divisor_of(m), opts);
}

void cmd_pole(Global& g, const PoleArgs& a) {
  const auto m = parse_model(a.model);
  const auto est = checked_pole(m, pole_options(a));
  Meta meta("pole");
  meta.add("model", m.spec()).add("t_max", a.t_max).add("rel_tol", a.rel_tol).add("boundary_margin", a.margin);
  json body = estimate_json(est);
  body["model"] = m.spec();
  body["reference"] = reference_json(m);
  finish_json(g, meta, std::move(body));
}

struct PersistencyArgs {
  std::string model;
  std::size_t n = 100000;
  std::size_t k = 0;
  double tail_frac = 0.0;
  std::size_t reps = 10;
  std::uint64_t seed = 1;
  std::string method = "both";
  std::string target = "excursion";
  PoleArgs pole;
};

void cmd_persistency(Global& g, const PersistencyArgs& a) {
  const auto m = parse_model(a.model);
  const std::size_t k = resolve_k(a.k, a.tail_frac, a.n);
  Meta meta("persistency");
  meta.add("model", m.spec()).add("method", a.method).add("target", a.target);
  json estimates = json::array();
  if (a.method != "pole") {
    meta.add("n", a.n).add("k", k).add("reps", a.reps).add("seed", a.seed);
    const auto sampler = checked_sampler(m);
    const bool divisor = a.target == "divisor";
    auto draw = [&](RngStream& rng) {
      return divisor ? sampler(rng) : sample_excursion(sampler, rng).value;
    };
    estimates.push_back(estimate_json(tail_exponent_ci(draw, a.n, k, a.reps, a.seed, g.workers())));
  }
  if (a.method != "mc") {
    if (a.target == "divisor") throw DomainError("pole search applies to the excursion target only");
    estimates.push_back(estimate_json(checked_pole(m, pole_options(a.pole))));
  }
  json body;
  body["model"] = m.spec();
  body["estimates"] = std::move(estimates);
  body["reference"] = reference_json(m);
  finish_json(g, meta, std::move(body));
}

struct SwitchArgs {
  std::string dist;
  std::string mode = "origin";
  double horizon = 5.0;
  std::size_t n = 100000;
  double grid = 0.1;
  double t0 = 0.0;
  std::uint64_t seed = 1;
};

void cmd_switch(Global& g, const SwitchArgs& a) {
  const auto dist = parse_switching(a.dist);
  if (!(a.grid > 0.0) || !(a.horizon > 0.0)) throw DomainError("--horizon and --grid must be > 0");
  if (a.n < 2) throw DomainError("--n must be >= 2");
  const auto lags = uniform_grid(0.0, a.horizon, a.grid);
  const bool stationary = a.mode == "stationary";
  const auto est = estimate_switch(dist, stationary ? SwitchMode::stationary : SwitchMode::origin,
                                   lags, a.n, a.seed, a.t0, g.workers());

  std::vector<double> r_hat(lags.size());
  if (stationary) {
    r_hat = est.cov;
  } else {
    // R(t) = 1 - (2/mu) int_0^t E, trapezoid on the lag grid
    double integral = 0.0;
    r_hat[0] = 1.0;
    for (std::size_t i = 1; i < lags.size(); ++i) {
      integral += 0.5 * (est.mean[i] + est.mean[i - 1]) * (lags[i] - lags[i - 1]);
      r_hat[i] = 1.0 - 2.0 / dist.mean * integral;
    }
  }

  Sink sink(g.output, false);
  auto& os = sink.os();
  Meta meta("switch");
  meta.add("dist", dist.label).add("mode", a.mode).add("horizon", a.horizon).add("grid", a.grid);
  meta.add("t0", a.t0).add("n", a.n).add("seed", a.seed).add("mean_switching_time", dist.mean);
  meta.add("se_column", stationary ? "R_hat" : "E_hat");
  meta.write_comments(os);
  os << "t,E_hat,R_hat,SE\n";
  for (std::size_t i = 0; i < lags.size(); ++i)
    os << num(lags[i]) << ',' << num(est.mean[i]) << ',' << num(r_hat[i]) << ','
       << num(stationary ? est.cov_se[i] : est.mean_se[i]) << '\n';
  finish_csv_trailer(g, os);
}

struct Table2Args {
  std::size_t n = 100000;
  std::size_t k = 0;
  std::size_t k_divisor = 0;
  std::size_t k_iia = 0;
  std::size_t reps = 10;
  std::uint64_t seed = 42;
  int d_max = 10;
};

void cmd_table2(Global& g, const Table2Args& a) {
  if (a.d_max < 1 || a.d_max > 10) throw DomainError("--dmax must be in 1..10");
  const std::size_t k_div = resolve_k(a.k_divisor > 0 ? a.k_divisor : a.k, 0.0, a.n);
  const std::size_t k_iia = resolve_k(a.k_iia > 0 ? a.k_iia : a.k, 0.0, a.n);

  Sink sink(g.output, false);
  auto& os = sink.os();
  Meta meta("reproduce table2");
  meta.add("n", a.n).add("k_divisor", k_div).add("k_iia", k_iia).add("reps", a.reps).add("seed", a.seed);
  meta.add("d_max", a.d_max);
  meta.add("seed_rule", "replication r of dimension d uses stream r of splitmix(seed, 2d) for the "
                        "divisor and splitmix(seed, 2d+1) for excursions");
  meta.add("reference_columns", "published values, not computed");
  meta.write_comments(os);
  os << "d,divisor_theta,divisor_ref,iia_theta,iia_ref,pole_theta,"
        "divisor_half_width,divisor_ref_half_width,iia_half_width,iia_ref_half_width\n";
  for (int d = 1; d <= a.d_max; ++d) {
    const auto m = CovarianceModel::diffusion(d);
    const auto sampler = checked_sampler(m);
    const auto row = *reference::diffusion_row(d);
    const auto ud = static_cast<std::uint64_t>(d);
    auto draw_div = [&](RngStream& rng) { return sampler(rng); };
    auto draw_exc = [&](RngStream& rng) { return sample_excursion(sampler, rng).value; };
    const auto div = tail_exponent_ci(draw_div, a.n, k_div, a.reps, derived_seed(a.seed, 2 * ud), g.workers());
    const auto exc =
        tail_exponent_ci(draw_exc, a.n, k_iia, a.reps, derived_seed(a.seed, 2 * ud + 1), g.workers());
    const auto pole = find_pole(divisor_of(m));
    os << d << ',' << num(div.theta) << ',' << num(row.divisor.value) << ',' << num(exc.theta) << ','
       << num(row.iia.value) << ',' << num(pole.theta) << ',' << num(*div.half_width) << ','
       << num(row.divisor.half_width) << ',' << num(*exc.half_width) << ',' << num(row.iia.half_width)
       << '\n';
  }
  finish_csv_trailer(g, os);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Independent interval approximation of zero-crossing intervals for smooth stationary "
               "Gaussian processes"};
  app.set_version_flag("--version", std::string(EXCURSIA_VERSION));
  app.require_subcommand(1);
  Global g;
  app.add_option("--threads", g.threads, "Worker threads (0: EXCURSIA_THREADS or all cores)")
      ->capture_default_str();
  app.add_flag("--timing", g.timing, "Append wall time to the output metadata");
  app.add_option("-o,--output", g.output, "Output file (default: stdout)");

  auto* models = app.add_subcommand("models", "List built-in covariance models");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check that E0 is a valid divisor survival function");
  validate->add_option("--model", va.model, "Model spec, e.g. diffusion(d=2)")->required();
  validate->add_option("--tmax", va.t_max, "Validation grid end")->capture_default_str();
  validate->add_option("--step", va.step, "Validation grid step")->capture_default_str();

  CurveArgs ca;
  auto* curve = app.add_subcommand("e0", "Write E0, the clipped covariance or a Monte Carlo survival curve");
  curve->add_option("--what", ca.what, "Curve to emit")
      ->check(CLI::IsMember({"e0", "rcl", "survival_mc"}))
      ->capture_default_str();
  curve->add_option("--model", ca.model, "Model spec")->required();
  curve->add_option("--tmax", ca.t_max, "Grid end")->capture_default_str();
  curve->add_option("--step", ca.step, "Grid step")->capture_default_str();
  curve->add_option("--n", ca.n, "Excursion draws for survival_mc")->capture_default_str();
  curve->add_option("--seed", ca.seed, "Random seed")->capture_default_str();
  curve->add_option("--streams", ca.streams, "RNG streams for survival_mc")->capture_default_str();

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw divisor or excursion-time samples");
  sample->add_option("--model", sa.model, "Model spec")->required();
  sample->add_option("--what", sa.what, "Quantity to sample")
      ->check(CLI::IsMember({"divisor", "excursion"}))
      ->capture_default_str();
  sample->add_option("--n", sa.n, "Number of draws")->capture_default_str();
  sample->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
  sample->add_option("--streams", sa.streams, "RNG streams; output depends on (n, seed, streams)")
      ->capture_default_str();
  sample->add_flag("--binary", sa.binary, "Raw little-endian float64 output without metadata");

  PoleArgs pa;
  auto add_pole_flags = [](CLI::App* sub, PoleArgs& p) {
    sub->add_option("--tmax", p.t_max, "Largest t integrated before tail completion")->capture_default_str();
    sub->add_option("--rel-tol", p.rel_tol, "Quadrature relative tolerance")->capture_default_str();
    sub->add_option("--margin", p.margin, "Bracket end as a fraction of the convergence boundary")
        ->capture_default_str();
  };
  auto* pole = app.add_subcommand("pole", "Persistency exponent from the Laplace pole");
  pole->add_option("--model", pa.model, "Model spec")->required();
  add_pole_flags(pole, pa);

  PersistencyArgs ra;
  auto* persistency = app.add_subcommand("persistency", "Persistency exponent by tail regression and/or pole");
  persistency->add_option("--model", ra.model, "Model spec")->required();
  persistency->add_option("--n", ra.n, "Draws per replication")->capture_default_str();
  auto* k_opt = persistency->add_option("--k", ra.k, "Tail count (default max(1000, n/100))");
  persistency->add_option("--tail-frac", ra.tail_frac, "Tail count as a fraction of n")->excludes(k_opt);
  persistency->add_option("--reps", ra.reps, "Replications")->capture_default_str();
  persistency->add_option("--seed", ra.seed, "Random seed")->capture_default_str();
  persistency->add_option("--method", ra.method, "Estimator")
      ->check(CLI::IsMember({"mc", "pole", "both"}))
      ->capture_default_str();
  persistency->add_option("--target", ra.target, "Sampled quantity for mc")
      ->check(CLI::IsMember({"excursion", "divisor"}))
      ->capture_default_str();
  add_pole_flags(persistency, ra.pole);

  SwitchArgs wa;
  auto* sw = app.add_subcommand(
      "switch",
      "Simulate switch processes. origin: E_hat = mean D(t), R_hat from the integral relation, SE of "
      "E_hat. stationary: E_hat = mean D_s(t0+t), R_hat = mean D_s(t0) D_s(t0+t), SE of R_hat");
  sw->add_option("--dist", wa.dist, "exp:<rate> | gamma:<k>,<rate> | divisor:<model>")->required();
  sw->add_option("--mode", wa.mode, "Process version")
      ->check(CLI::IsMember({"origin", "stationary"}))
      ->capture_default_str();
  sw->add_option("--horizon", wa.horizon, "Largest lag")->capture_default_str();
  sw->add_option("--n", wa.n, "Number of paths")->capture_default_str();
  sw->add_option("--grid", wa.grid, "Lag step")->capture_default_str();
  sw->add_option("--t0", wa.t0, "Reference time for stationary estimates")->capture_default_str();
  sw->add_option("--seed", wa.seed, "Random seed")->capture_default_str();

  Table2Args ta;
  auto* reproduce = app.add_subcommand("reproduce", "Reproduce published tables");
  reproduce->require_subcommand(1);
  auto* table2 = reproduce->add_subcommand("table2", "Diffusion divisor and IIA exponents for d = 1..10");
  table2->add_option("--n", ta.n, "Draws per replication")->capture_default_str();
  table2->add_option("--k", ta.k, "Tail count for both columns (default max(1000, n/100))");
  table2->add_option("--k-divisor", ta.k_divisor, "Tail count for the divisor column");
  table2->add_option("--k-iia", ta.k_iia, "Tail count for the IIA column");
  table2->add_option("--reps", ta.reps, "Replications")->capture_default_str();
  table2->add_option("--seed", ta.seed, "Random seed")->capture_default_str();
  table2->add_option("--dmax", ta.d_max, "Largest dimension")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*models) cmd_models(g);
    else if (*validate) cmd_validate(g, va);
    else if (*curve) cmd_curve(g, ca);
    else if (*sample) cmd_sample(g, sa);
    else if (*pole) cmd_pole(g, pa);
    else if (*persistency) cmd_persistency(g, ra);
    else if (*sw) cmd_switch(g, wa);
    else if (*table2) cmd_table2(g, ta);
    return 0;
  } catch (const Refusal& r) {
    std::cerr << "error: " << r.message << '\n' << r.report.dump(2) << '\n';
    return kExitValidation;
  } catch (const ValidityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PoleNotFound& e) {
    std::cerr << "error: " << e.what() << " (h(lo) = " << num(e.h_lo()) << ", h(hi) = " << num(e.h_hi())
              << ")\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
