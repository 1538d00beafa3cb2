#include "asyncpd/serialize.hpp"

#include <fstream>
#include <sstream>

#include "asyncpd/errors.hpp"
#include "json_detail.hpp"

namespace asyncpd {

using nlohmann::json;

namespace detail {

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("expected a numeric array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json config_to_json_obj(const SimulationConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["max_ticks"] = cfg.max_ticks;
  j["p_update"] = cfg.p_update;
  j["p_comm"] = cfg.p_comm;
  j["delay_q"] = cfg.delay_q;
  j["gamma"] = cfg.gamma;
  j["rho"] = cfg.rho;
  j["delta"] = cfg.delta;
  j["stop_tol"] = cfg.stop_tol;
  j["snapshot_every"] = cfg.snapshot_every;
  j["workers"] = cfg.workers;
  j["oracle"] = cfg.oracle;
  if (cfg.x0.size() != 0) j["x0"] = vector_to_json(cfg.x0);
  if (cfg.mu0.size() != 0) j["mu0"] = vector_to_json(cfg.mu0);
  return j;
}

}  // namespace detail

namespace {

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("expected a matrix (array of rows)");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw ValidationError("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<int> sizes_from_json(const json& j) {
  std::vector<int> sizes;
  for (const auto& s : j) sizes.push_back(s.get<int>());
  return sizes;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << text;
}

json parse_or_throw(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("JSON parse error: ") + e.what());
  }
}

}  // namespace

ProblemSpec problem_from_json(const std::string& text) {
  const json j = parse_or_throw(text);
  try {
    ProblemSpec p;
    p.n = j.at("n").get<int>();
    p.m = j.at("m").get<int>();

    const json& obj = j.at("objective");
    const std::string kind = obj.at("kind").get<std::string>();
    if (kind == "quadratic") {
      p.objective = std::make_shared<QuadraticObjective>(
          matrix_from_json(obj.at("q")), detail::vector_from_json(obj.at("c")),
          obj.value("d", 0.0));
    } else if (kind == "log_utility") {
      p.objective = std::make_shared<LogUtilityObjective>(obj.at("weight").get<double>(), p.n);
    } else {
      throw ValidationError("unknown objective kind '" + kind + "'");
    }

    if (p.m > 0) {
      const json& con = j.at("constraints");
      const std::string ckind = con.at("kind").get<std::string>();
      if (ckind != "affine")
        throw ValidationError("unknown constraint kind '" + ckind + "'");
      p.constraints = std::make_shared<AffineConstraints>(
          matrix_from_json(con.at("a")), detail::vector_from_json(con.at("b")));
    }

    p.box_lower = detail::vector_from_json(j.at("box_lower"));
    p.box_upper = detail::vector_from_json(j.at("box_upper"));
    p.slater_point = detail::vector_from_json(j.at("slater_point"));
    p.f_star_lower = j.value("f_star_lower", 0.0);
    p.primal_partition = Partition(sizes_from_json(j.at("primal_blocks")));
    p.dual_partition = p.m > 0 ? Partition(sizes_from_json(j.at("dual_blocks"))) : Partition();
    validate(p);
    return p;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("problem JSON schema violation: ") + e.what());
  }
}

ProblemSpec load_problem(const std::string& path) {
  return problem_from_json(read_file(path));
}

std::string problem_to_json(const ProblemSpec& p) {
  json j;
  j["n"] = p.n;
  j["m"] = p.m;

  if (const auto* q = dynamic_cast<const QuadraticObjective*>(p.objective.get())) {
    j["objective"] = {{"kind", "quadratic"},
                      {"q", matrix_to_json(q->q())},
                      {"c", detail::vector_to_json(q->c())},
                      {"d", q->d()}};
  } else if (const auto* lu = dynamic_cast<const LogUtilityObjective*>(p.objective.get())) {
    j["objective"] = {{"kind", "log_utility"}, {"weight", lu->weight()}};
  } else {
    throw ValidationError("objective is not serializable (callable class)");
  }

  if (p.m > 0) {
    const auto* affine = dynamic_cast<const AffineConstraints*>(p.constraints.get());
    if (!affine)
      throw ValidationError("constraints are not serializable (callable class)");
    j["constraints"] = {{"kind", "affine"},
                        {"a", matrix_to_json(affine->a())},
                        {"b", detail::vector_to_json(affine->b())}};
  }

  j["box_lower"] = detail::vector_to_json(p.box_lower);
  j["box_upper"] = detail::vector_to_json(p.box_upper);
  j["slater_point"] = detail::vector_to_json(p.slater_point);
  j["f_star_lower"] = p.f_star_lower;
  j["primal_blocks"] = p.primal_partition.sizes();
  j["dual_blocks"] = p.dual_partition.sizes();
  return j.dump(2) + "\n";
}

void save_problem(const std::string& path, const ProblemSpec& p) {
  write_file(path, problem_to_json(p));
}

SimulationConfig config_from_json(const std::string& text) {
  const json j = parse_or_throw(text);
  try {
    SimulationConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.max_ticks = j.value("max_ticks", cfg.max_ticks);
    cfg.p_update = j.value("p_update", cfg.p_update);
    cfg.p_comm = j.value("p_comm", cfg.p_comm);
    cfg.delay_q = j.value("delay_q", cfg.delay_q);
    cfg.gamma = j.at("gamma").get<double>();
    cfg.rho = j.value("rho", cfg.rho);
    cfg.delta = j.at("delta").get<double>();
    cfg.stop_tol = j.value("stop_tol", cfg.stop_tol);
    cfg.snapshot_every = j.value("snapshot_every", cfg.snapshot_every);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.oracle = j.value("oracle", cfg.oracle);
    if (j.contains("x0")) cfg.x0 = detail::vector_from_json(j.at("x0"));
    if (j.contains("mu0")) cfg.mu0 = detail::vector_from_json(j.at("mu0"));
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config JSON schema violation: ") + e.what());
  }
}

SimulationConfig load_config(const std::string& path) {
  return config_from_json(read_file(path));
}

std::string config_to_json(const SimulationConfig& cfg) {
  return detail::config_to_json_obj(cfg).dump(2) + "\n";
}

void save_config(const std::string& path, const SimulationConfig& cfg) {
  write_file(path, config_to_json(cfg));
}

}  // namespace asyncpd
