#pragma once

#include <string>

#include "asyncpd/problem.hpp"
#include "asyncpd/simulator.hpp"

namespace asyncpd {

/// Problem JSON schema (documented in the repository README): dimensions, an
/// objective descriptor (kind + coefficients), affine constraint matrix and
/// offsets, box bounds, Slater point, f_star_lower, and block size lists.
/// Callable objectives/constraints are not serializable.
ProblemSpec problem_from_json(const std::string& text);
ProblemSpec load_problem(const std::string& path);
std::string problem_to_json(const ProblemSpec& p);
void save_problem(const std::string& path, const ProblemSpec& p);

SimulationConfig config_from_json(const std::string& text);
SimulationConfig load_config(const std::string& path);
std::string config_to_json(const SimulationConfig& cfg);
void save_config(const std::string& path, const SimulationConfig& cfg);

}  // namespace asyncpd
