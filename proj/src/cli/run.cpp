#include "coiso/cli/run.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "coiso/verify.hpp"

namespace coiso::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class FilesystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FilesystemError("cannot open " + path.string() + " for writing");
  return os;
}

void close_out(std::ofstream& os, const fs::path& path) {
  os.close();
  if (!os) throw FilesystemError("failed writing " + path.string());
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json structure_json(const StructureReport& r) {
  return {{"maxBracketResidual", r.maxBracketResidual},
          {"minNondegSingularValue", number_or_null(r.minNondegSingularValue)},
          {"samplesTested", r.samplesTested},
          {"nondegFailures", r.nondegFailures},
          {"verdictCoisotropy", r.verdictCoisotropy},
          {"verdictNondegeneracy", r.verdictNondegeneracy},
          {"coisotropyTol", r.coisotropyTol},
          {"nondegeneracyTol", r.nondegeneracyTol}};
}

std::string csv_row(std::size_t step, const std::vector<double>& values) {
  std::string row = std::to_string(step);
  for (double v : values) row += "," + format_double(v);
  return row + "\r\n";
}

void write_report(const fs::path& dir, const json& report) {
  const fs::path path = dir / "report.json";
  auto os = open_out(path);
  os << report.dump(2) << '\n';
  close_out(os, path);
}

void emit_trajectory(const fs::path& dir, const Trajectory& tr, int d) {
  const fs::path path = dir / "trajectory.csv";
  auto os = open_out(path);
  os << "step";
  for (int i = 0; i < d; ++i) os << ",q" << i;
  for (int i = 0; i < d; ++i) os << ",p" << i;
  os << ",gmax,rhomax,energy\r\n";
  for (const auto& r : tr.records) {
    const Vec& z = r.output().vec();
    std::vector<double> vals(z.data(), z.data() + z.size());
    vals.insert(vals.end(), {r.gResidual, r.rhoResidual, r.energy});
    os << csv_row(r.index, vals);
  }
  close_out(os, path);
}

void emit_energy(const fs::path& dir, const Trajectory& tr) {
  const fs::path path = dir / "energy.csv";
  auto os = open_out(path);
  os << "step,energy,deviation\r\n";
  const double e0 = tr.records.front().energy;
  for (const auto& r : tr.records) os << csv_row(r.index, {r.energy, r.energy - e0});
  close_out(os, path);
}

void emit_residuals(const fs::path& dir, const Trajectory& tr, const BuiltinProblem& pb) {
  const fs::path path = dir / "residuals.csv";
  auto os = open_out(path);
  os << "step,g_minus,rho_minus,g,rho\r\n";
  for (const auto& r : tr.records) {
    const double gm = max_abs(pb.constraints.value(r.zMinus));
    const double rm = max_abs(hidden_residual(pb.system, pb.constraints, r.zMinus));
    os << csv_row(r.index, {gm, rm, r.gResidual, r.rhoResidual});
  }
  close_out(os, path);
}

void emit_hopf(const fs::path& dir, const Trajectory& tr) {
  const fs::path path = dir / "hopf.csv";
  auto os = open_out(path);
  os << "step,re,im\r\n";
  for (const auto& r : tr.records) {
    try {
      const auto w = stereographic(hopf_map(r.output()));
      os << csv_row(r.index, {w.real(), w.imag()});
    } catch (const Error&) {
      os << r.index << ",,\r\n";  // north pole has no finite image
    }
  }
  close_out(os, path);
}

json emit_fibre_scan(const fs::path& dir, const Trajectory& tr, const BuiltinProblem& pb, int samples) {
  const fs::path path = dir / "fibre_scan.csv";
  auto os = open_out(path);
  os << "step,theta,dH\r\n";
  std::map<int, int> histogram;
  int exceptional = 0;
  for (const auto& r : tr.records) {
    const FiberScan sc = fiber_criticality_scan(pb.system, r.zMinus, samples);
    if (sc.identicallyZero) {
      ++exceptional;
    } else {
      ++histogram[sc.crossings];
    }
    for (std::size_t k = 0; k < sc.theta.size(); ++k) os << csv_row(r.index, {sc.theta[k], sc.derivative[k]});
  }
  close_out(os, path);
  json counts = json::object();
  for (const auto& [k, n] : histogram) counts[std::to_string(k)] = n;
  return {{"crossing_counts", counts}, {"exceptional_fibres", exceptional}};
}

json emit_convergence(const fs::path& dir, const OrderEstimate& oe) {
  const fs::path path = dir / "convergence.csv";
  auto os = open_out(path);
  os << "h,error,slope\r\n";
  for (std::size_t i = 0; i < oe.h.size(); ++i) {
    os << format_double(oe.h[i]) << "," << format_double(oe.errors[i]) << ",\r\n";
  }
  os << ",," << (oe.saturated ? std::string("saturated") : format_double(oe.slope)) << "\r\n";
  close_out(os, path);
  return {{"slope", number_or_null(oe.slope)}, {"saturated", oe.saturated}, {"reference_step", oe.referenceStep}};
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

PhasePoint resolve_initial(const RunConfig& cfg, const BuiltinProblem& problem, std::vector<std::string>& notes) {
  if (cfg.initial.explicitZ) return PhasePoint(*cfg.initial.explicitZ);
  if (cfg.initial.name == "default") return problem.defaultInitial;
  const auto table = table1_initial_conditions();
  const int which = cfg.initial.name == "z_a" ? 0 : cfg.initial.name == "z_b" ? 1 : 2;
  const PhasePoint raw = table[static_cast<std::size_t>(which)];
  const PhasePoint z = carry_to_Mp(problem.system, problem.constraints, raw, cfg.newton);
  notes.push_back(cfg.initial.name + " carried onto Mp (distance " + format_double((z.vec() - raw.vec()).norm()) +
                  ")");
  return z;
}

int run(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  BuiltinProblem pb;
  OneStepMethod method;
  try {
    validate(cfg);
    pb = builtin_problem(cfg.problem, cfg.params);
    method = make_method(*parse_method(cfg.underlying));
  } catch (const Error& e) {
    log << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  const fs::path dir(cfg.outputDir);
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error& e) {
    log << "filesystem error: " << e.what() << '\n';
    return kFilesystemError;
  }

  json report;
  report["config_echo"] = cfg.echo();
  report["structure_report"] = nullptr;
  report["summary_stats"] = json::object();
  report["error"] = nullptr;
  json& stats = report["summary_stats"];

  auto fail = [&](std::size_t step, ErrorKind cause, const std::string& msg) {
    report["error"] = {{"step", step}, {"cause", std::string(to_string(cause))}, {"message", msg}};
    log << "run failed at step " << step << " (" << to_string(cause) << "): " << msg << '\n';
    write_report(dir, report);
    return kRunFailed;
  };

  try {
    if (cfg.emits("structure-report")) {
      const StructureReport sr = analyse_structure(pb, 256, cfg.structureSamples, cfg.seed, cfg.newton);
      report["structure_report"] = structure_json(sr);
      const fs::path path = dir / "structure_report.txt";
      auto os = open_out(path);
      os << sr.to_key_value();
      close_out(os, path);
    }

    std::vector<std::string> notes;
    PhasePoint z0;
    try {
      z0 = resolve_initial(cfg, pb, notes);
    } catch (const Error& e) {
      return fail(0, e.kind(), std::string("preparing the initial point: ") + e.what());
    }

    Trajectory tr;
    try {
      tr = integrate(pb.system, pb.constraints, method, cfg.mode, cfg.h, cfg.steps, z0, cfg.newton);
    } catch (const StepFailed& e) {
      return fail(e.index(), e.cause(), e.what());
    }
    notes.insert(notes.end(), tr.warnings.begin(), tr.warnings.end());

    if (cfg.emits("trajectory")) emit_trajectory(dir, tr, pb.system.d);
    if (cfg.emits("energy")) emit_energy(dir, tr);
    if (cfg.emits("residuals")) emit_residuals(dir, tr, pb);
    if (cfg.emits("hopf")) emit_hopf(dir, tr);
    if (cfg.emits("fibre-scan")) stats["fibre_scan"] = emit_fibre_scan(dir, tr, pb, cfg.fibreScanSamples);

    double gmax = 0.0, rhomax = 0.0;
    for (const auto& r : tr.records) {
      gmax = std::max(gmax, r.gResidual);
      rhomax = std::max(rhomax, r.rhoResidual);
    }
    const EnergyDrift ed = energy_drift(tr);
    stats["steps"] = tr.records.size() - 1;
    stats["initial_point"] = std::vector<double>(z0.vec().data(), z0.vec().data() + z0.vec().size());
    stats["max_g"] = gmax;
    stats["max_rho"] = rhomax;
    stats["energy_max_deviation"] = ed.maxDeviation;
    stats["energy_slope"] = ed.linearSlope;
    stats["energy_slope_stderr"] = ed.slopeStdErr;
    stats["notes"] = notes;

    if (cfg.emits("convergence")) {
      try {
        const OrderEstimate oe =
            estimate_order(pb, z0, cfg.mode, method, cfg.convergence.hList, cfg.convergence.T, cfg.newton);
        stats["convergence"] = emit_convergence(dir, oe);
      } catch (const Error& e) {
        return fail(0, e.kind(), std::string("convergence study: ") + e.what());
      }
    }

    stats["runtime_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double limit = 10.0 * cfg.newton.tol;
    if (gmax > limit || (cfg.mode == Mode::Rattle && rhomax > limit)) {
      std::size_t worst = 0;
      for (const auto& r : tr.records) {
        if (r.gResidual > limit || (cfg.mode == Mode::Rattle && r.rhoResidual > limit)) {
          worst = r.index;
          break;
        }
      }
      return fail(worst, ErrorKind::ToleranceViolation,
                  "constraint residual exceeds 10*newton.tol (max g " + format_double(gmax) + ", max rho " +
                      format_double(rhomax) + ")");
    }
    write_report(dir, report);
  } catch (const FilesystemError& e) {
    log << "filesystem error: " << e.what() << '\n';
    return kFilesystemError;
  } catch (const fs::filesystem_error& e) {
    log << "filesystem error: " << e.what() << '\n';
    return kFilesystemError;
  } catch (const Error& e) {
    return fail(0, e.kind(), e.what());
  }
  log << "wrote results to " << dir.string() << '\n';
  return kOk;
}

int check(const RunConfig& cfg, std::ostream& out) {
  try {
    validate(cfg);
    const BuiltinProblem pb = builtin_problem(cfg.problem, cfg.params);
    const StructureReport sr = analyse_structure(pb, 256, cfg.structureSamples, cfg.seed, cfg.newton);
    out << "problem=" << pb.name << '\n' << sr.to_key_value();
    return sr.verdictCoisotropy && sr.verdictNondegeneracy ? kOk : kRunFailed;
  } catch (const ConfigError& e) {
    out << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    out << "check failed (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kRunFailed;
  }
}

void list_problems(std::ostream& out) {
  for (const auto& name : problem_names()) {
    const BuiltinProblem pb = builtin_problem(name);
    out << name << "  d=" << pb.system.d << " m=" << pb.constraints.m
        << (pb.hopfType ? "  (hopf fibres)" : "") << '\n';
  }
}

}  // namespace coiso::cli
