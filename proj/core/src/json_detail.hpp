#pragma once

// Internal helpers shared between serialize.cpp and io.cpp; not installed.

#include <json.hpp>

#include "asyncpd/problem.hpp"
#include "asyncpd/simulator.hpp"

namespace asyncpd::detail {

nlohmann::json config_to_json_obj(const SimulationConfig& cfg);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

}  // namespace asyncpd::detail
