#include "asyncpd/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "asyncpd/errors.hpp"
#include "asyncpd/version.hpp"
#include "json_detail.hpp"

namespace asyncpd {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << text;
}

}  // namespace

std::string trace_csv(const RunResult& result) {
  std::ostringstream out;
  const int np = result.trace.empty() ? 0 : static_cast<int>(result.trace.front().agent_dist_sq.size());
  const int n = result.trace.empty() ? 0 : static_cast<int>(result.trace.front().x_concat.size());
  out << "tick,ops,T,K,stamp,discards,consec_dist,bound,bound_violated,max_dist_sq";
  for (int i = 0; i < np; ++i) out << ",dist_sq_" << i;
  for (int a = 0; a < n; ++a) out << ",x_" << a;
  out << "\n";
  for (const auto& rec : result.trace) {
    out << rec.tick << ',' << rec.ops << ',' << rec.t_min << ',' << rec.k_min << ",\"";
    for (std::size_t c = 0; c < rec.stamp.size(); ++c) {
      if (c) out << ';';
      out << rec.stamp[c];
    }
    out << "\"," << rec.discarded_messages << ',' << fmt(rec.consecutive_distance)
        << ',' << fmt(rec.bound_value) << ',' << (rec.bound_violated ? 1 : 0) << ','
        << fmt(rec.agent_dist_sq.size() ? rec.agent_dist_sq.maxCoeff() : 0.0);
    for (int i = 0; i < np; ++i) out << ',' << fmt(rec.agent_dist_sq[i]);
    for (int a = 0; a < n; ++a) out << ',' << fmt(rec.x_concat[a]);
    out << "\n";
  }
  return out.str();
}

void write_trace_csv(const std::string& path, const RunResult& result) {
  write_file(path, trace_csv(result));
}

std::string summary_json(const SimulationConfig& cfg, const RunResult& result) {
  json j;
  j["version"] = kVersion;
  j["status"] = result.status == RunStatus::Converged ? "converged" : "tick_budget_exhausted";
  j["seed"] = cfg.seed;
  j["ticks"] = result.ticks;
  j["ops"] = result.observer.ops;
  j["T"] = result.observer.t_min;
  j["K"] = result.observer.k_min;
  j["discarded_messages"] = result.discarded_messages;
  j["mixed_stamp_consumptions"] = result.mixed_stamp_consumptions;
  j["messages"] = {{"sent", result.messages_sent},
                   {"delivered", result.messages_delivered},
                   {"queued_at_end", result.messages_queued_at_end}};
  j["final"] = {{"consecutive_distance", result.final_consecutive_distance},
                {"x", detail::vector_to_json(result.final_x)},
                {"mu", detail::vector_to_json(result.final_mu)}};
  if (result.oracle_available) {
    j["final"]["distance_to_saddle"] = result.final_distance_to_saddle;
    j["final"]["max_agent_dist_sq"] = result.final_max_agent_dist_sq;
    j["saddle"] = {{"residual", result.saddle.residual},
                   {"converged", result.saddle.converged},
                   {"iterations", result.saddle.iterations},
                   {"mu0_dist_sq", result.mu0_dist_sq}};
    j["any_bound_violation"] = result.any_bound_violation;
  }
  j["config"] = detail::config_to_json_obj(cfg);
  return j.dump(2) + "\n";
}

void write_summary_json(const std::string& path, const SimulationConfig& cfg,
                        const RunResult& result) {
  write_file(path, summary_json(cfg, result));
}

std::string bounds_report_json(const ProblemSpec& p, const DualGeometry& geom,
                               const ProblemConstants& consts, double gamma,
                               double rho, double eps1, double eps2) {
  json j;
  j["version"] = kVersion;
  j["constants"] = {{"beta", consts.beta},
                    {"gamma_max", consts.gamma_max},
                    {"B", geom.dual_bound},
                    {"delta", geom.delta},
                    {"M", consts.lipschitz_global},
                    {"D_x", consts.diameter},
                    {"M_per_constraint", detail::vector_to_json(consts.lipschitz_per_constraint)},
                    {"M_per_block", detail::vector_to_json(consts.lipschitz_per_block)}};

  if (p.m > 0) {
    const RateConstants rc = rate_constants(p, geom, consts, gamma, rho);
    j["rate"] = {{"gamma", gamma},
                 {"rho", rho},
                 {"q_p", rc.q_p},
                 {"q_d", rc.q_d},
                 {"C1", rc.c1},
                 {"C2", rc.c2},
                 {"C3", rc.c3},
                 {"E1", detail::vector_to_json(rc.e1)},
                 {"E2", detail::vector_to_json(rc.e2)},
                 {"E3", detail::vector_to_json(rc.e3)}};
  }

  const RegularizationBounds reg = regularization_error_bounds(p, geom, consts);
  j["regularization"] = {
      {"solution_gap_bound_sq", reg.solution_gap_sq},
      {"constraint_violation_bounds", detail::vector_to_json(reg.constraint_violation)}};

  if (eps1 > 0.0 && eps2 > 0.0) {
    const ParameterRecipe cp = parameter_recipe(p, geom, consts, eps1, eps2, gamma);
    j["recipes"] = {{"eps1", eps1},
                      {"eps2", eps2},
                      {"K_min", cp.k_min},
                      {"T_min", cp.t_min},
                      {"rho", cp.rho},
                      {"delta_min", cp.delta},
                      {"mu0_dist_sq", cp.mu0_dist_sq},
                      {"mu0_from_oracle", cp.mu0_from_oracle},
                      {"round_trip_bound", cp.round_trip_bound},
                      {"eps_sum", eps1 + eps2}};
  }
  return j.dump(2) + "\n";
}

void write_bounds_json(const std::string& path, const ProblemSpec& p,
                       const DualGeometry& geom, const ProblemConstants& consts,
                       double gamma, double rho, double eps1, double eps2) {
  write_file(path, bounds_report_json(p, geom, consts, gamma, rho, eps1, eps2));
}

}  // namespace asyncpd
