#include <algorithm>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stt/cli.hpp"

namespace stt {
namespace {

const char* const kCommands[] = {"rank-table", "poisson",     "cdr",
                                 "semilinear", "convergence", "custom"};

bool known_command(const std::string& name) {
  return std::find(std::begin(kCommands), std::end(kCommands), name) != std::end(kCommands);
}

// (0, 1) exclusive, which CLI::Range cannot express.
std::string check_unit_interval(const std::string& text) {
  double value = 0.0;
  try {
    value = std::stod(text);
  } catch (...) {
    return "'" + text + "' is not a number";
  }
  if (value <= 0.0 || value >= 1.0) return "'" + text + "' is not inside (0, 1)";
  return {};
}

std::vector<int> default_grids(const std::string& command) {
  if (command == "rank-table") return {17, 33};
  if (command == "convergence") return {8, 16, 32};
  return {8};
}

}  // namespace

std::string usage_text() {
  return
      "usage: stt <command> [flags]\n"
      "\n"
      "commands:\n"
      "  rank-table    diffusion-operator rank table across coefficient functions\n"
      "  poisson       stationary diffusion with manufactured solution\n"
      "  cdr           space-time convection-diffusion-reaction benchmark\n"
      "  semilinear    space-time cubic-reaction benchmark\n"
      "  convergence   error-vs-grid study for one problem (--problem)\n"
      "  custom        single runs of any catalog problem (--problem required)\n"
      "\n"
      "flags:\n"
      "  --grids a,b,...    element counts per dimension (default depends on command)\n"
      "  --format NAME      full | tt | qtt (default tt)\n"
      "  --tt-tol X         train truncation tolerance in (0,1), default 1e-10\n"
      "  --solver-tol X     solver relative-residual target in (0,1), default 1e-6\n"
      "  --rmax N           rank cap for solves, default 500\n"
      "  --seed N           cross-interpolation seed, default 1\n"
      "  --problem NAME     poisson | cdr | semilinear | trivial\n"
      "  --outdir DIR       output directory (default '.', env STT_OUTDIR)\n"
      "  --cache-dir DIR    cache assembled operators between runs\n"
      "  --plot             also write a log-log SVG of the error rows\n"
      "  --config FILE      INI file with the same keys; flags override it\n"
      "\n"
      "outputs: <outdir>/<command>.csv, <outdir>/<command>.jsonl, optional .svg\n"
      "exit codes: 0 ok, 1 solver warning or I/O failure, 2 usage error\n";
}

ParseResult parse_config(const std::vector<std::string>& args) {
  ParseResult out;
  if (args.empty()) {
    out.status = kExitUsage;
    out.message = usage_text();
    return out;
  }
  if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    out.status = kExitOk;
    out.message = usage_text();
    return out;
  }
  if (!known_command(args[0])) {
    out.status = kExitUsage;
    out.message = "unknown command '" + args[0] + "'\n\n" + usage_text();
    return out;
  }
  RunConfig& cfg = out.config;
  cfg.command = args[0];

  CLI::App app{"space-time train-format solver", "stt " + cfg.command};
  std::string format = "tt";
  app.add_option("--grids", cfg.grids, "element counts per dimension")
      ->delimiter(',')
      ->check(CLI::Range(2, 1 << 20));
  app.add_option("--format", format, "full | tt | qtt")
      ->check(CLI::IsMember({"full", "tt", "qtt"}));
  app.add_option("--tt-tol", cfg.tt_tol, "train truncation tolerance")
      ->check(CLI::Validator(check_unit_interval, "IN_(0,1)"));
  app.add_option("--solver-tol", cfg.solver_tol, "solver residual target")
      ->check(CLI::Validator(check_unit_interval, "IN_(0,1)"));
  app.add_option("--rmax", cfg.rmax, "rank cap")->check(CLI::Range(1, 1 << 20));
  app.add_option("--seed", cfg.seed, "cross-interpolation seed");
  app.add_option("--problem", cfg.problem, "catalog problem name");
  app.add_option("--outdir", cfg.outdir, "output directory")->envname("STT_OUTDIR");
  app.add_option("--cache-dir", cfg.cache_dir, "operator cache directory");
  app.add_flag("--plot,!--no-plot", cfg.plot, "write a log-log SVG");
  app.set_config("--config", "", "INI file; flags override its keys");
  app.allow_config_extras(CLI::config_extras_mode::error);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out.status = kExitOk;
    out.message = app.help();
    return out;
  } catch (const CLI::ParseError& error) {
    out.status = kExitUsage;
    out.message = std::string(error.what()) + "\n\n" + usage_text();
    return out;
  }
  cfg.format = parse_format(format);

  if (cfg.grids.empty()) cfg.grids = default_grids(cfg.command);
  if (cfg.command == "convergence" && cfg.problem.empty()) cfg.problem = "poisson";
  if (cfg.command == "custom" && cfg.problem.empty()) {
    out.status = kExitUsage;
    out.message = "the custom command needs --problem\n\n" + usage_text();
    return out;
  }
  if (!cfg.problem.empty()) {
    try {
      catalog_problem(cfg.problem);
    } catch (const std::invalid_argument& error) {
      out.status = kExitUsage;
      out.message = std::string(error.what()) + "\n\n" + usage_text();
      return out;
    }
  }
  if (cfg.command == "convergence" && cfg.grids.size() < 2) {
    out.status = kExitUsage;
    out.message = "a convergence study needs at least two --grids\n\n" + usage_text();
    return out;
  }
  return out;
}

}  // namespace stt
