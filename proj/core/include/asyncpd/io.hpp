#pragma once

#include <string>

#include "asyncpd/problem.hpp"
#include "asyncpd/reference.hpp"
#include "asyncpd/simulator.hpp"

namespace asyncpd {

/// Headered RFC-4180 CSV, one trace record per row. Doubles print with 17
/// significant digits, so identical runs produce byte-identical files.
std::string trace_csv(const RunResult& result);
void write_trace_csv(const std::string& path, const RunResult& result);

/// Run summary: status, counters, final distances, message accounting, and
/// the config echo.
std::string summary_json(const SimulationConfig& cfg, const RunResult& result);
void write_summary_json(const std::string& path, const SimulationConfig& cfg,
                        const RunResult& result);

/// Bound report: rate/penalty constants at (gamma, rho), the regularization
/// error bounds, and (when eps1, eps2 > 0) the parameter recipes with their
/// round-trip check. Throws InfeasibleParameterError when eps2 is below the
/// achievable frontier.
std::string bounds_report_json(const ProblemSpec& p, const DualGeometry& geom,
                               const ProblemConstants& consts, double gamma,
                               double rho, double eps1 = 0.0, double eps2 = 0.0);
void write_bounds_json(const std::string& path, const ProblemSpec& p,
                       const DualGeometry& geom, const ProblemConstants& consts,
                       double gamma, double rho, double eps1 = 0.0, double eps2 = 0.0);

}  // namespace asyncpd
