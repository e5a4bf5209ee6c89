#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stt/driver.hpp"

namespace stt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitWarning = 1;  // solver warning or I/O failure
inline constexpr int kExitUsage = 2;

// One resolved invocation: a command plus every knob it needs. Flags override
// values from an INI file passed with --config; the STT_OUTDIR environment
// variable supplies the default output directory.
struct RunConfig {
  std::string command;  // rank-table | poisson | cdr | semilinear | convergence | custom
  std::string problem;  // catalog problem for the convergence and custom commands
  std::vector<int> grids;  // element counts per dimension
  SolveFormat format = SolveFormat::tt;
  double tt_tol = 1e-10;
  double solver_tol = 1e-6;
  int rmax = 500;
  std::uint64_t seed = 1;
  std::string outdir = ".";
  std::string cache_dir;  // operator cache directory (empty disables caching)
  bool plot = false;      // also write a log-log SVG of the error rows
};

struct ParseResult {
  RunConfig config;
  // kExitOk with an empty message means "run it"; kExitOk with a message is
  // help text for stdout; kExitUsage carries the error text for stderr.
  int status = kExitOk;
  std::string message;
};

std::string usage_text();

// Parse `<command> [flags...]` (program name already stripped). Unknown
// flags, unknown config-file keys, and out-of-range values are rejected by
// name with a usage status.
ParseResult parse_config(const std::vector<std::string>& args);

// Run the configured command. Writes <outdir>/<command>.csv, a JSON-lines
// progress log <outdir>/<command>.jsonl, and optionally <outdir>/<command>.svg.
// Returns a process exit status; solver warnings and I/O failures map to
// kExitWarning with details on stderr.
int dispatch(const RunConfig& config);

// Report rendering (pure string builders, exposed for tests).
// Solve-row schema: experiment,N,format,tt_tol,solver_tol,error,order,
// max_rank,compression,seconds — order is the two-point rate against the
// previous row.
std::string study_csv(const std::vector<SolveReport>& rows);
// Rank-table schema mirrors the diffusion-operator table: coefficient label,
// tolerance, coefficient ranks, then operator ranks per grid.
std::string rank_table_csv(const std::vector<RankStudyRow>& rows,
                           const std::vector<int>& grids);
// Self-contained log-log SVG of error vs grid size, one series per format.
std::string study_svg(const std::vector<SolveReport>& rows);

}  // namespace stt
