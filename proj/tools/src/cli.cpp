#include "lod/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "lod/csv.hpp"
#include "lod/rng.hpp"

namespace lod::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

struct Subcommand {
  const char* name;
  const char* description;
  int (*fn)(Context&);
};

constexpr Subcommand kSubcommands[] = {
    {"moran", "Simulate the Moran model forward; CSV time,frequency", cmd_moran},
    {"ode", "Solve the deterministic ODE on a time grid; CSV time,z", cmd_ode},
    {"equilibrium", "Deterministic equilibrium over a grid of u; CSV u,z_inf,regime", cmd_equilibrium},
    {"diffusion-moments", "Moments of Wright's density by quadrature and recursion", cmd_diffusion_moments},
    {"killed-asg", "Absorption probabilities of the killed ASG line count", cmd_killed_asg},
    {"duality", "Moment duality check; JSON report, exit 1 on failure", cmd_duality},
    {"ldasg", "Pruned lookdown ASG: stationary tails with goodness of fit, or a level path with --t",
     cmd_ldasg},
    {"fearnhead", "Solve Fearnhead's recursion; CSV n,a", cmd_fearnhead},
    {"ancestral", "Ancestral type probability h(x); CSV x,h,tail_bound", cmd_ancestral},
    {"phase-diagram", "Curves over u for fig2-left, fig2-right, fig8-left, fig8-right", cmd_phase_diagram},
};

nlohmann::json parameters_json(const Options& o) {
  nlohmann::json p = nlohmann::json::object();
  auto put = [&](const char* key, const auto& value) {
    if (value) p[key] = *value;
  };
  put("s", o.s);
  put("u", o.u);
  put("nu0", o.nu0);
  put("nu1", o.nu1);
  put("sigma", o.sigma);
  put("theta", o.theta);
  put("x", o.x);
  put("t", o.t);
  put("tol", o.tol);
  put("dt", o.dt);
  put("N", o.population);
  put("n", o.n);
  put("nmax", o.nmax);
  put("reps", o.reps);
  p["limit"] = o.limit;
  p["mode"] = o.mode;
  if (!o.grid.empty()) p["grid"] = o.grid;
  if (!o.figure.empty()) p["figure"] = o.figure;
  p["x_rule"] = o.x_rule;
  return p;
}

void write_manifest(const Context& ctx, const std::string& subcommand, const std::vector<std::string>& args,
                    double seconds) {
  const Options& o = ctx.options();
  nlohmann::json manifest;
  manifest["subcommand"] = subcommand;
  manifest["parameters"] = parameters_json(o);
  manifest["seed"] = ctx.seed();
  manifest["replicates"] = ctx.resolved_replicates();
  manifest["threads"] = o.threads;
  manifest["outputs"] = ctx.outputs();
  manifest["version"] = LOD_VERSION;
  manifest["wall_clock_seconds"] = seconds;
  nlohmann::json command = nlohmann::json::array({"lod"});
  for (const auto& a : args) command.push_back(a);
  manifest["command_line"] = command;
  manifest["result"] = ctx.result();

  const std::string path = o.out + ".manifest.json";
  std::ofstream file(path, std::ios::binary);
  if (!file) throw OutputError("cannot write " + path);
  file << manifest.dump(2) << '\n';
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) throw ParameterError("grid", "is empty");
  std::vector<double> grid;
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    const double a = parse_number(text.substr(0, first));
    const double b = parse_number(text.substr(first + 1, second - first - 1));
    const double k = parse_number(text.substr(second + 1));
    if (!(k >= 1.0) || k != std::floor(k)) throw ParameterError("grid", "point count must be a positive integer");
    const auto points = static_cast<int>(k);
    if (points == 1) return {a};
    for (int i = 0; i < points; ++i) {
      grid.push_back(i + 1 == points ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    return grid;
  }
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) throw ParameterError("grid", "empty entry in '" + text + "'");
    grid.push_back(parse_number(item));
  }
  return grid;
}

Context::Context(Options options, std::ostream& stdout_stream)
    : options_(std::move(options)),
      seed_(options_.seed ? *options_.seed : seed_from_environment(kDefaultSeed)),
      stdout_(stdout_stream) {}

std::ostream& Context::output() {
  if (options_.out.empty()) return stdout_;
  if (!file_) {
    file_ = std::make_unique<std::ofstream>(options_.out, std::ios::binary);
    if (!*file_) throw OutputError("cannot write " + options_.out);
    outputs_.push_back(options_.out);
  }
  return *file_;
}

void Context::finish() {
  if (file_) {
    file_->close();
    if (!*file_) throw OutputError("failed writing " + options_.out);
  } else {
    stdout_.flush();
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ancestral lines and lookdown constructions for the two-type Moran model", "lod"};
  app.set_version_flag("--version", std::string(LOD_VERSION));
  app.set_config("--params", "", "File of key=value lines supplying flag values");
  app.require_subcommand(1);

  Options o;
  app.add_option("--s", o.s, "Selective advantage (deterministic limit)");
  app.add_option("--u", o.u, "Mutation rate (deterministic limit)");
  app.add_option("--nu0", o.nu0, "Probability a mutation produces type 0");
  app.add_option("--nu1", o.nu1, "Probability a mutation produces type 1");
  app.add_option("--sigma", o.sigma, "Scaled selection strength (diffusion limit)");
  app.add_option("--theta", o.theta, "Scaled mutation rate (diffusion limit)");
  app.add_option("--N", o.population, "Population size, or a comma list for phase-diagram");
  app.add_option("--x", o.x, "Initial or evaluation frequency of type 0");
  app.add_option("--t", o.t, "Time horizon");
  app.add_option("--n", o.n, "Sample size / initial line count");
  app.add_option("--reps", o.reps, "Replicates or samples");
  app.add_option("--seed", o.seed, "Master seed (default: LOD_SEED, then 1)");
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  app.add_option("--out", o.out, "Output file; a manifest is written next to it");
  app.add_option("--nmax", o.nmax, "Truncation level / largest n reported");
  app.add_option("--tol", o.tol, "Convergence tolerance");
  app.add_option("--dt", o.dt, "Euler-Maruyama step (diffusion)");
  app.add_option("--limit", o.limit, "det | diff")->check(CLI::IsMember({"det", "deterministic", "diff", "diffusion"}));
  app.add_option("--mode", o.mode, "fecundity | viability")->check(CLI::IsMember({"fecundity", "viability"}));
  app.add_option("--grid", o.grid, "Grid: a:b:k or a comma list");
  app.add_option("--figure", o.figure, "fig2-left | fig2-right | fig8-left | fig8-right");
  app.add_option("--x-rule", o.x_rule, "fixed | equilibrium | wright (ancestral scans)");

  std::vector<std::pair<CLI::App*, const Subcommand*>> subs;
  for (const auto& entry : kSubcommands) {
    CLI::App* sub = app.add_subcommand(entry.name, entry.description);
    sub->fallthrough();
    subs.emplace_back(sub, &entry);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInvalidInput;
  }

  const Subcommand* chosen = nullptr;
  for (const auto& [sub, entry] : subs) {
    if (sub->parsed()) chosen = entry;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    Context ctx(o, out);
    const int code = chosen->fn(ctx);
    ctx.finish();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.out.empty()) write_manifest(ctx, chosen->name, args, seconds);
    return code;
  } catch (const ConvergenceError& e) {
    err << "error: no convergence: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const ParameterError& e) {
    err << "error: invalid parameter " << e.what() << '\n';
    return kInvalidInput;
  } catch (const RegimeError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace lod::cli
