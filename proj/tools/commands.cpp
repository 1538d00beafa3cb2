#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "asyncpd/errors.hpp"
#include "asyncpd/io.hpp"
#include "asyncpd/netflow.hpp"
#include "asyncpd/serialize.hpp"
#include "manifest.hpp"

namespace asyncpd::cli {

namespace fs = std::filesystem;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int cmd_solve(const SolveOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  try {
    const ProblemSpec problem = load_problem(opts.problem_file);
    const SimulationConfig cfg = load_config(opts.config_file);
    const DualGeometry geom = make_dual_geometry(problem, cfg.delta);
    const ProblemConstants consts = compute_constants(problem, geom);
    validate_config(problem, geom, consts, cfg);

    fs::create_directories(opts.out_dir);
    const RunResult result = run(problem, geom, consts, cfg);

    const std::string trace_path = (fs::path(opts.out_dir) / "trace.csv").string();
    const std::string summary_path = (fs::path(opts.out_dir) / "summary.json").string();
    const std::string bounds_path = (fs::path(opts.out_dir) / "bounds.json").string();
    write_trace_csv(trace_path, result);
    write_summary_json(summary_path, cfg, result);
    write_bounds_json(bounds_path, problem, geom, consts, cfg.gamma, cfg.rho);

    RunManifest manifest;
    manifest.command = "solve";
    manifest.input_hashes = {
        {opts.problem_file, hash_string(fnv1a64_file(opts.problem_file))},
        {opts.config_file, hash_string(fnv1a64_file(opts.config_file))}};
    manifest.outputs = {describe_output(trace_path), describe_output(summary_path),
                        describe_output(bounds_path)};
    manifest.config_echo = config_to_json(cfg);
    manifest.wall_seconds = seconds_since(start);
    write_manifest((fs::path(opts.out_dir) / "manifest.json").string(), manifest);

    return result.status == RunStatus::Converged ? kExitOk : kExitBudget;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

int cmd_sweep(const SweepOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  try {
    SweepKind kind;
    if (opts.kind == "blocks")
      kind = SweepKind::Blocks;
    else if (opts.kind == "beta")
      kind = SweepKind::Beta;
    else if (opts.kind == "commrate")
      kind = SweepKind::CommRate;
    else
      throw ValidationError("sweep kind must be one of blocks, beta, commrate");

    BenchmarkOptions bench;
    if (opts.scale == "paper")
      bench.scale = BenchmarkScale::Paper;
    else if (opts.scale == "small")
      bench.scale = BenchmarkScale::Small;
    else
      throw ValidationError("scale must be paper or small");
    if (opts.seeds < 1) throw ValidationError("seeds must be >= 1");

    SimulationConfig base;
    base.max_ticks = opts.max_ticks;
    base.stop_tol = opts.stop_tol;
    base.snapshot_every = 200;
    base.delta = 0.1;
    base.gamma = 0.01;
    base.rho = base.delta / (1.0 + base.delta * base.delta);

    fs::create_directories(opts.out_dir);

    struct Job {
      SweepEntry entry;
      std::uint64_t seed;
      std::string dir;
      std::int64_t ticks = 0;
      bool converged = false;
      bool done = false;
    };
    std::vector<Job> jobs;
    for (int s = 0; s < opts.seeds; ++s) {
      const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(s);
      const auto [net, problem] = generate_benchmark(seed, bench);
      (void)problem;
      for (auto& entry : experiment_sweeps(net, base, kind)) {
        Job job;
        job.entry = entry;
        job.entry.config.seed = seed;
        job.seed = seed;
        job.dir = (fs::path(opts.out_dir) / entry.label / ("seed" + std::to_string(seed)))
                      .string();
        jobs.push_back(std::move(job));
      }
    }

    std::mutex io_mutex;
    auto run_job = [&](Job& job) {
      const DualGeometry geom = make_dual_geometry(job.entry.problem, job.entry.config.delta);
      const ProblemConstants consts = compute_constants(job.entry.problem, geom);
      const RunResult result = run(job.entry.problem, geom, consts, job.entry.config);
      fs::create_directories(job.dir);
      write_trace_csv((fs::path(job.dir) / "trace.csv").string(), result);
      write_summary_json((fs::path(job.dir) / "summary.json").string(), job.entry.config,
                         result);
      job.ticks = result.ticks;
      job.converged = result.status == RunStatus::Converged;
      job.done = true;
      std::lock_guard<std::mutex> lock(io_mutex);
      std::cout << job.entry.label << " seed " << job.seed << ": "
                << (job.converged ? "converged" : "budget") << " after " << job.ticks
                << " ticks\n";
    };

    if (opts.workers <= 1) {
      for (auto& job : jobs) run_job(job);
    } else {
      std::vector<std::thread> pool;
      const int used = std::min<int>(opts.workers, static_cast<int>(jobs.size()));
      for (int w = 0; w < used; ++w) {
        pool.emplace_back([&, w]() {
          for (std::size_t k = w; k < jobs.size(); k += used) run_job(jobs[k]);
        });
      }
      for (auto& t : pool) t.join();
    }

    const std::string agg_path = (fs::path(opts.out_dir) / "aggregate.csv").string();
    {
      std::ofstream agg(agg_path, std::ios::binary);
      agg << "label,seed,ticks_to_threshold,converged\n";
      for (const auto& job : jobs)
        agg << job.entry.label << ',' << job.seed << ',' << job.ticks << ','
            << (job.converged ? 1 : 0) << "\n";
    }

    RunManifest manifest;
    manifest.command = "sweep";
    manifest.outputs.push_back(describe_output(agg_path));
    for (const auto& job : jobs) {
      manifest.outputs.push_back(describe_output((fs::path(job.dir) / "trace.csv").string()));
      manifest.outputs.push_back(
          describe_output((fs::path(job.dir) / "summary.json").string()));
    }
    manifest.config_echo = config_to_json(base);
    manifest.wall_seconds = seconds_since(start);
    write_manifest((fs::path(opts.out_dir) / "manifest.json").string(), manifest);
    return kExitOk;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

int cmd_bounds(const BoundsOptions& opts) {
  try {
    const ProblemSpec problem = load_problem(opts.problem_file);
    const DualGeometry geom = make_dual_geometry(problem, opts.delta);
    const ProblemConstants consts = compute_constants(problem, geom);
    const double gamma = opts.gamma > 0.0 ? opts.gamma : 0.5 * consts.gamma_max;
    const double rho =
        opts.rho > 0.0 ? opts.rho : opts.delta / (1.0 + opts.delta * opts.delta);
    const std::string report =
        bounds_report_json(problem, geom, consts, gamma, rho, opts.eps1, opts.eps2);
    std::cout << report;
    if (!opts.out_file.empty()) {
      std::ofstream out(opts.out_file, std::ios::binary);
      if (!out) throw ValidationError("cannot open " + opts.out_file + " for writing");
      out << report;
    }
    return kExitOk;
  } catch (const InfeasibleParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFrontier;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace asyncpd::cli
