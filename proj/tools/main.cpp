#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "descent/format.hpp"
#include "descent/model.hpp"
#include "descent/quad.hpp"
#include "descent/sde.hpp"
#include "descent/spectral.hpp"
#include "descent/stats.hpp"
#include "svg.hpp"

#ifndef DESCENT_VERSION
#define DESCENT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace descent;
using descent::cli::Config;
using descent::cli::ConfigError;
using descent::cli::Series;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  bool strict = false;
  int threads = 1;
};

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Reads parameters of one command and remembers every resolved value for the
// output headers.
class Run {
 public:
  Run(const Globals& g, std::string command)
      : g_(g), command_(std::move(command)), cfg_(Config::load(g.config)), model_(cfg_.model()) {
    seed_ = g.seed ? *g.seed
                   : static_cast<std::uint64_t>(cfg_.count("run", "seed", std::size_t{1}));
    fs::create_directories(g.out);
  }

  const DriftModel& model() const { return model_; }
  std::uint64_t seed() const { return seed_; }
  int threads() const { return g_.threads; }
  bool strict() const { return g_.strict; }

  double number(const std::string& key, std::optional<double> fb = std::nullopt,
                const std::string& section = "") {
    return note(section, key, cfg_.number(sec(section), key, fb));
  }
  double positive(const std::string& key, std::optional<double> fb = std::nullopt,
                  const std::string& section = "") {
    return note(section, key, cfg_.positive(sec(section), key, fb));
  }
  std::size_t count(const std::string& key, std::optional<std::size_t> fb = std::nullopt) {
    const auto v = cfg_.count(command_, key, fb);
    resolved_.push_back(command_ + "." + key + "=" + std::to_string(v));
    return v;
  }
  std::vector<double> numbers(const std::string& key,
                              std::optional<std::vector<double>> fb = std::nullopt) {
    const auto v = cfg_.numbers(command_, key, fb);
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ",") + g17(x);
    resolved_.push_back(command_ + "." + key + "=" + s);
    return v;
  }
  std::optional<std::vector<double>> maybe_numbers(const std::string& key) {
    if (!cfg_.has(command_, key)) return std::nullopt;
    return numbers(key);
  }
  bool flag(const std::string& key, bool fb) {
    const bool v = cfg_.flag(command_, key, fb);
    resolved_.push_back(command_ + "." + key + "=" + (v ? "true" : "false"));
    return v;
  }
  bool has(const std::string& key) const { return cfg_.has(command_, key); }

  PotentialTables tables() {
    TableOptions opt;
    opt.tol = positive("tol", 1e-9, "quad");
    opt.x_max = number("x_max", 0.0, "quad");
    if (opt.x_max < 0) throw ConfigError("[quad] x_max must be non-negative");
    return build_tables(model_, opt);
  }

  std::vector<std::string> header() const {
    std::vector<std::string> h = {"tool=descent " DESCENT_VERSION,
                                  "config_hash=" + hex(cfg_.hash()), "command=" + command_,
                                  "model=" + model_.describe(), "seed=" + std::to_string(seed_)};
    for (const auto& e : cfg_.echo()) h.push_back("config " + e);
    for (const auto& e : resolved_) h.push_back("param " + e);
    return h;
  }

  std::string path(const std::string& file) const { return (fs::path(g_.out) / file).string(); }

  std::ofstream open(const std::string& file) const {
    std::ofstream os(path(file), std::ios::binary);
    if (!os) throw Error("cannot write " + path(file));
    return os;
  }

 private:
  std::string sec(const std::string& s) const { return s.empty() ? command_ : s; }
  double note(const std::string& section, const std::string& key, double v) {
    resolved_.push_back(sec(section) + "." + key + "=" + g17(v));
    return v;
  }

  Globals g_;
  std::string command_;
  Config cfg_;
  DriftModel model_;
  std::uint64_t seed_ = 1;
  std::vector<std::string> resolved_;
};

McOptions mc_options(Run& run) {
  McOptions o;
  o.delta = run.positive("delta", 1e-3);
  o.ks_threshold = run.positive("ks_threshold", 0.05);
  o.se_multiplier = run.positive("se_multiplier", 3.0);
  o.bridge_correction = run.flag("bridge", false);
  o.threads = run.threads();
  return o;
}

int exit_for(const Run& run, bool pass) { return run.strict() && !pass ? 1 : 0; }

Series empirical_cdf(std::vector<double> s, const std::string& label) {
  std::sort(s.begin(), s.end());
  Series out{label, {}, {}};
  const std::size_t stride = std::max<std::size_t>(1, s.size() / 400);
  for (std::size_t i = 0; i < s.size(); i += stride) {
    out.x.push_back(s[i]);
    out.y.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(s.size()));
  }
  return out;
}

Series normal_curve(double lo, double hi) {
  Series out{"standard normal", {}, {}};
  for (int i = 0; i <= 200; ++i) {
    const double x = lo + (hi - lo) * i / 200.0;
    out.x.push_back(x);
    out.y.push_back(normal_cdf(x));
  }
  return out;
}

void plot_standardized(const Run& run, const std::string& file, const std::string& title,
                       const std::vector<double>& samples) {
  cli::write_svg(run.path(file), title, "standardized value", "CDF",
                 {empirical_cdf(samples, "empirical"), normal_curve(-4, 4)});
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

Spectrum spectrum_for(Run& run, const PotentialTables& tables, double z, double t) {
  SpectrumOptions opt;
  opt.x_max = run.number("x_max", 0.0);
  opt.lambda_cap = run.number("lambda_cap", 0.0);
  if (run.has("K")) return solve_spectrum(tables, z, static_cast<int>(run.count("K")), opt);
  return solve_spectrum_for_time(tables, z, t, static_cast<int>(run.count("k_max", 64)), opt);
}

// ---------------------------------------------------------------------------

int cmd_check(const Globals& g) {
  Run run(g, "check");
  const double x_max = run.positive("x_max", 128.0);
  const double tol = run.positive("tol", 1e-6);
  const auto r = check_hypotheses(run.model(), x_max, tol);

  auto opt = [](const std::optional<double>& v) { return v ? g17(*v) : std::string("none"); };
  const std::vector<std::vector<std::string>> rows = {
      {"h1", to_string(r.h1), g17(r.h1_estimate)},
      {"h1_tail", "", g17(r.h1_tail)},
      {"h2", to_string(r.h2), g17(r.h2_slope_tail)},
      {"h2_q_tail", "", g17(r.h2_q_tail)},
      {"h3", to_string(r.h3), g17(r.h3_a)},
      {"as_lln", to_string(r.as_lln), g17(r.as_lln_integral)},
      {"b_limit", "", opt(r.b_limit)},
      {"sigma", "", opt(r.sigma)},
  };
  auto os = run.open("check.csv");
  write_header_lines(os, run.header());
  os << "field,verdict,value\n";
  std::printf("%-10s %-13s %s\n", "field", "verdict", "value");
  for (const auto& row : rows) {
    os << row[0] << ',' << row[1] << ',' << row[2] << '\n';
    std::printf("%-10s %-13s %s\n", row[0].c_str(), row[1].c_str(), row[2].c_str());
  }
  return r.h1 == Verdict::pass ? 0 : 1;
}

int cmd_moments(const Globals& g) {
  Run run(g, "moments");
  const auto tables = run.tables();
  const auto zs = run.numbers("z", std::vector<double>{1, 2, 5, 10, 20});
  for (double z : zs)
    if (!(z >= 0)) throw ConfigError("[moments] z must be non-negative");
  auto os = run.open("moments.csv");
  write_header_lines(os, run.header());
  os << "z,m,M,var,central4_over_var2,second_over_m2\n";
  for (double z : zs) {
    const double m = tables.m(z), v = tables.var(z);
    os << g17(z) << ',' << g17(m) << ',' << g17(tables.M(z)) << ',' << g17(v) << ','
       << g17(tables.central4(z) / (v * v)) << ',' << g17((v + m * m) / (m * m)) << '\n';
  }
  return 0;
}

int cmd_simulate(const Globals& g) {
  Run run(g, "simulate");
  const auto tables = run.tables();
  const double x0 = run.positive("x0", kInfinity);
  const double dt = run.positive("dt", 1e-4);
  const double t_max = run.positive("t_max", 1.0);
  const auto n = run.count("n_paths", 1000);
  auto thresholds = run.numbers("thresholds", std::vector<double>{1, 2, 5});
  std::sort(thresholds.begin(), thresholds.end());
  const bool dump_paths = run.flag("dump_paths", false);
  const bool dump_hits = run.flag("dump_hits", false);

  SimOptions sim;
  sim.stop = StopRule::horizon;
  sim.bridge_correction = run.flag("bridge", false);
  sim.record_path = dump_paths;
  sim.record_stride = run.count("record_stride", 1);
  sim.threads = run.threads();

  std::vector<PathSample> paths;
  if (std::isinf(x0)) {
    DescentConfig cfg;
    cfg.delta = run.positive("delta", 1e-3);
    cfg.dt = dt;
    cfg.t_max = t_max;
    cfg.n_paths = n;
    cfg.base_seed = run.seed();
    paths = simulate_from_infinity(run.model(), tables, cfg, thresholds, sim).paths;
  } else {
    paths.resize(n);
    parallel_for(n, run.threads(), [&](std::size_t i) {
      paths[i] = simulate_path(run.model(), x0, dt, t_max, run.seed(), thresholds, sim, i);
    });
  }

  auto os = run.open("simulate.csv");
  write_header_lines(os, run.header());
  os << "z,n_hit,mean,se,reference\n";
  for (double z : thresholds) {
    std::vector<double> t;
    for (const auto& p : paths)
      if (auto h = p.hit(z)) t.push_back(*h);
    const auto s = summarize(t);
    double ref = std::nan("");
    if (std::isinf(x0))
      ref = tables.m(z);
    else if (z < x0 && x0 <= tables.x_max())
      ref = hitting_moment(tables, x0, z, 1);
    os << g17(z) << ',' << t.size() << ',' << g17(s.mean) << ',' << g17(s.se) << ',' << g17(ref)
       << '\n';
  }
  if (dump_hits) {
    auto hs = run.open("hits.csv");
    write_header_lines(hs, run.header());
    hs << "path_id,z,t_hit\n";
    for (std::size_t i = 0; i < paths.size(); ++i)
      for (const auto& [z, t] : paths[i].hits) hs << i << ',' << g17(z) << ',' << g17(t) << '\n';
  }
  if (dump_paths) {
    auto ps = run.open("paths.csv");
    write_header_lines(ps, run.header());
    ps << "path_id,t,x\n";
    std::vector<Series> plot;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const auto& p = paths[i];
      for (std::size_t j = 0; j < p.times.size(); ++j)
        ps << i << ',' << g17(p.times[j]) << ',' << g17(p.states[j]) << '\n';
      if (i < 5) plot.push_back({"path " + std::to_string(i), p.times, p.states});
    }
    cli::write_svg(run.path("paths.svg"), "sample paths", "t", "x", plot);
  }
  return 0;
}

int cmd_clt(const Globals& g) {
  Run run(g, "clt");
  const auto tables = run.tables();
  const double z = run.positive("z", 30);
  const auto n = run.count("n_paths", 5000);
  const double dt = run.positive("dt", 1e-6);
  const auto opt = mc_options(run);
  std::vector<double> standardized;
  const auto r = clt_check(run.model(), tables, z, n, dt, run.seed(), opt, &standardized);
  auto os = run.open("clt.csv");
  write_reports_csv(os, std::span(&r, 1), run.header());
  plot_standardized(run, "clt.svg", "standardized descent time", standardized);
  std::printf("clt_ks %s pass=%d\n", g17(r.estimate).c_str(), r.pass);
  return exit_for(run, r.pass);
}

int cmd_fluct(const Globals& g) {
  Run run(g, "fluct");
  const auto tables = run.tables();
  const double t = run.has("t") ? run.positive("t") : tables.m(run.positive("t_from_z", 30));
  const auto n = run.count("n_paths", 5000);
  const double dt = run.positive("dt", 1e-6);
  std::optional<double> sigma;
  if (run.has("sigma")) sigma = run.positive("sigma");
  const auto opt = mc_options(run);
  const auto f = fluctuation_check(run.model(), tables, t, n, dt, run.seed(), opt, sigma);
  const std::vector<McReport> reports = {f.ks, f.mean};
  auto os = run.open("fluct.csv");
  write_reports_csv(os, reports, run.header());
  plot_standardized(run, "fluct.svg", "standardized position", f.standardized);
  std::printf("fluct_ks %s pass=%d\nfluct_mean %s pass=%d\n", g17(f.ks.estimate).c_str(),
              f.ks.pass, g17(f.mean.estimate).c_str(), f.mean.pass);
  return exit_for(run, f.ks.pass && f.mean.pass);
}

int cmd_yaglom(const Globals& g) {
  Run run(g, "yaglom");
  const auto tables = run.tables();
  const double z = run.number("z", 1.0);
  const double m = tables.m(z);
  const double t_lo = run.positive("t_min", m);
  const double t_hi = run.positive("t_max", 4 * m);
  if (!(t_hi > t_lo)) throw ConfigError("[yaglom] t_max must exceed t_min");
  const auto times = linspace(t_lo, t_hi, run.count("t_count", 40));
  const auto n = run.count("n_paths", 100000);
  const double dt = run.positive("dt", 1e-4);
  const double rate_tol = run.positive("rate_tolerance", 0.02);
  const double intercept_tol = run.positive("intercept_tolerance", 0.05);
  auto opt = mc_options(run);
  const auto s = spectrum_for(run, tables, z, t_lo);
  const double lambda1 = s.lambda(1);

  std::vector<std::pair<double, double>> spectral;
  for (double t : times) spectral.emplace_back(t, survival_probability(s, t, kInfinity).value);
  const double levels[] = {z};
  const auto hits = sample_descent_times(run.model(), tables, levels, n, dt, run.seed(), opt)[0];
  const auto mc = empirical_survival(hits, times);

  const auto fit_s = tail_rate_fit(spectral);
  const auto fit_mc = tail_rate_fit(mc);
  auto report = [&](double estimate, double reference, double tol, const std::string& note) {
    McReport r;
    r.quantity = Quantity::tail_rate;
    r.estimate = estimate;
    r.reference = reference;
    r.tolerance = tol;
    r.n = n;
    r.dt = dt;
    r.seed = run.seed();
    r.level = z;
    r.delta = opt.delta;
    r.note = note;
    r.pass = r.evaluate();
    return r;
  };
  const double c1 = yaglom_constant(s, kInfinity);
  const std::vector<McReport> reports = {
      report(fit_s.rate, -lambda1, 1e-3 * lambda1, "spectral survival rate"),
      report(fit_mc.rate, -lambda1, rate_tol * lambda1, "Monte Carlo survival rate"),
      report(fit_s.intercept, c1, intercept_tol * c1, "spectral intercept"),
  };

  auto os = run.open("yaglom.csv");
  write_header_lines(os, run.header());
  os << "t,spectral,monte_carlo\n";
  Series a{"spectral", {}, {}}, b{"Monte Carlo", {}, {}};
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << g17(times[i]) << ',' << g17(spectral[i].second) << ',' << g17(mc[i].second) << '\n';
    a.x.push_back(times[i]);
    a.y.push_back(std::log(spectral[i].second));
    if (mc[i].second > 0) {
      b.x.push_back(times[i]);
      b.y.push_back(std::log(mc[i].second));
    }
  }
  auto fs_ = run.open("yaglom_fit.csv");
  write_reports_csv(fs_, reports, run.header());
  cli::write_svg(run.path("yaglom.svg"), "survival from infinity", "t", "log P(T > t)", {a, b});
  bool pass = true;
  for (const auto& r : reports) {
    std::printf("%s %s reference %s pass=%d\n", r.note.c_str(), g17(r.estimate).c_str(),
                g17(r.reference).c_str(), r.pass);
    pass = pass && r.pass;
  }
  return exit_for(run, pass);
}

int cmd_spectrum(const Globals& g) {
  Run run(g, "spectrum");
  const auto tables = run.tables();
  const double z = run.number("z", 0.0);
  if (!run.has("K") && !run.has("t")) throw ConfigError("[spectrum] needs K or t");
  const double t = run.has("K") ? 1.0 : run.positive("t");
  const auto s = spectrum_for(run, tables, z, t);
  auto os = run.open("spectrum.csv");
  write_spectrum_csv(os, s, run.header());

  std::vector<Series> plot;
  const double hi = std::min(s.x_max(), z + run.positive("plot_width", 3.0));
  const auto xs = linspace(z, hi, 300);
  for (int k = 1; k <= std::min(4, s.size()); ++k) {
    Series c{"psi_" + std::to_string(k), xs, {}};
    for (double x : xs) c.y.push_back(s.psi(k, x));
    plot.push_back(std::move(c));
  }
  cli::write_svg(run.path("spectrum.svg"), "eigenfunctions", "x", "psi", plot);
  return 0;
}

int cmd_density(const Globals& g) {
  Run run(g, "density");
  const auto tables = run.tables();
  const double z = run.number("z", 0.0);
  const double t = run.positive("t", 1.0);
  const double y = run.positive("y", kInfinity);
  if (!(y > z)) throw ConfigError("[density] y must exceed z");
  const auto s = spectrum_for(run, tables, z, t);
  // Past x_hi the speed density is below e^-40.
  double x_hi = run.number("x_hi", 0.0);
  if (x_hi <= 0) {
    const double gz = tables.gamma(z);
    x_hi = s.x_max();
    for (double x : tables.grid())
      if (x > z && tables.gamma(x) - gz > 40) {
        x_hi = x;
        break;
      }
  }
  const auto xs = linspace(z, x_hi, run.count("points", 2001));
  std::vector<double> r(xs.size()), d(xs.size());
  const double gz = tables.gamma(z);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    r[i] = transition_density(s, t, y, xs[i]).value;
    d[i] = r[i] * 2 * std::exp(-(tables.gamma(xs[i]) - gz));
  }
  auto os = run.open("density.csv");
  write_header_lines(os, run.header());
  os << "x,r,density\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << g17(xs[i]) << ',' << g17(r[i]) << ',' << g17(d[i]) << '\n';
  cli::write_svg(run.path("density.svg"), "density of surviving paths", "x", "density",
                 {{"t=" + g17(t), xs, d}});
  return 0;
}

int cmd_ratio(const Globals& g) {
  Run run(g, "ratio");
  const auto tables = run.tables();
  const double z = run.number("z", 0.0);
  const double t = run.positive("t", 1.0);
  auto starts = run.numbers("starts", std::vector<double>{5, 10, 20});
  std::sort(starts.begin(), starts.end());
  const auto s = spectrum_for(run, tables, z, t);
  const auto sup = ratio_uniformity(s, starts, t);
  auto os = run.open("ratio.csv");
  write_header_lines(os, run.header());
  os << "z,sup,sup_over_M\n";
  Series c{"sup |ratio - 1|", {}, {}};
  bool decreasing = true;
  for (std::size_t i = 0; i < sup.size(); ++i) {
    const auto [y, v] = sup[i];
    os << g17(y) << ',' << g17(v) << ',' << g17(v / tables.M(y)) << '\n';
    c.x.push_back(y);
    c.y.push_back(v);
    if (i > 0 && !(v < sup[i - 1].second)) decreasing = false;
  }
  cli::write_svg(run.path("ratio.svg"), "ratio to the law from infinity", "start", "sup", {c});
  std::printf("decreasing=%d\n", decreasing);
  return exit_for(run, decreasing);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusions coming down from infinity: quadrature, simulation and spectra"};
  app.set_version_flag("--version", DESCENT_VERSION);
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config,-c", g.config, "run configuration (INI)")->required();
  auto* seed_opt = app.add_option("--seed", seed, "base seed, overrides [run] seed");
  app.add_option("--out,-o", g.out, "output directory");
  app.add_flag("--strict", g.strict, "nonzero exit when a statistical check fails");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.require_subcommand(1);

  using Handler = int (*)(const Globals&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands = {
      {"check", "growth conditions on the drift", cmd_check},
      {"moments", "moments of descent times", cmd_moments},
      {"simulate", "Euler paths and hitting times", cmd_simulate},
      {"clt", "normal limit of descent times", cmd_clt},
      {"fluct", "fluctuations of the position from infinity", cmd_fluct},
      {"yaglom", "survival tail against the first eigenvalue", cmd_yaglom},
      {"spectrum", "eigenpairs of the killed generator", cmd_spectrum},
      {"density", "density of surviving paths", cmd_density},
      {"ratio", "dependence of the density on the start", cmd_ratio},
  };
  Handler chosen = nullptr;
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->callback([&chosen, fn = fn] { chosen = fn; });
  }
  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;

  try {
    return chosen(g);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
