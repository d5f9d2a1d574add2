#include "coiso/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coiso/cli/toml_lite.hpp"

namespace coiso::cli {

namespace {

using json = nlohmann::ordered_json;

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

class Reader {
 public:
  std::vector<std::string> issues;

  void check_keys(const json& obj, const std::string& where, const std::vector<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!contains(allowed, it.key())) {
        issues.push_back(where + it.key() + ": unknown key (allowed: " + join(allowed) + ")");
      }
    }
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      issues.push_back(where + key + ": expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<long long> integer(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      issues.push_back(where + key + ": expected an integer");
      return std::nullopt;
    }
    return v.get<long long>();
  }

  std::optional<std::string> string(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      issues.push_back(where + key + ": expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
      issues.push_back(where + key + ": expected an array of numbers");
      return std::nullopt;
    }
    return v.get<std::vector<double>>();
  }

  const json* table(const json& obj, const std::string& key) {
    if (!obj.contains(key)) return nullptr;
    if (!obj.at(key).is_object()) {
      issues.push_back(key + ": expected a table");
      return nullptr;
    }
    return &obj.at(key);
  }
};

json vec_json(const Vec& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::vector<std::string> collect_issues(const RunConfig& c) {
  std::vector<std::string> issues;
  const auto names = problem_names();
  if (c.problem.empty()) {
    issues.push_back("problem: required (valid: " + join(names) + ")");
  } else if (!contains(names, c.problem)) {
    issues.push_back("problem: unknown name '" + c.problem + "' (valid: " + join(names) + ")");
  }
  if (!parse_method(c.underlying)) {
    issues.push_back("underlying: unknown method '" + c.underlying + "' (valid: " + join(method_names()) + ")");
  }
  if (!(c.h > 0.0) || !std::isfinite(c.h)) issues.push_back("h: must be a finite number > 0");
  if (c.emit.empty()) issues.push_back("emit: must list at least one of " + join(emit_names()));
  for (const auto& e : c.emit) {
    if (!contains(emit_names(), e)) {
      issues.push_back("emit: unknown item '" + e + "' (valid: " + join(emit_names()) + ")");
    }
  }
  const bool hopf = c.problem == "hopf-free" || c.problem == "hopf-gravity";
  if (!hopf && (c.emits("hopf") || c.emits("fibre-scan"))) {
    issues.push_back("emit: 'hopf' and 'fibre-scan' need a hopf-free or hopf-gravity problem");
  }
  if (!c.initial.explicitZ) {
    const std::string& n = c.initial.name;
    if (n != "default" && n != "z_a" && n != "z_b" && n != "z_c") {
      issues.push_back("initial: expected z_a, z_b, z_c, default or an array of 2d numbers");
    } else if (n != "default" && !hopf) {
      issues.push_back("initial: " + n + " is only defined for hopf-free and hopf-gravity");
    }
  } else if (c.initial.explicitZ->size() != 4 || !c.initial.explicitZ->allFinite()) {
    issues.push_back("initial: explicit point must hold 4 finite numbers (q0, q1, p0, p1)");
  }
  if (c.params.gv.size() != 2 || !c.params.gv.allFinite()) issues.push_back("params.gv: expected 2 finite numbers");
  try {
    c.newton.validate();
  } catch (const Error& e) {
    issues.push_back(std::string("newton: ") + e.what());
  }
  if (c.emits("convergence")) {
    const auto& hl = c.convergence.hList;
    if (hl.size() < 2) issues.push_back("convergence.h_list: needs at least two step sizes");
    for (std::size_t i = 0; i < hl.size(); ++i) {
      if (!(hl[i] > 0.0)) issues.push_back("convergence.h_list: entries must be > 0");
      if (i > 0 && !(hl[i] < hl[i - 1])) issues.push_back("convergence.h_list: must be strictly descending");
      if (hl[i] > 0.0) {
        const double n = std::round(c.convergence.T / hl[i]);
        if (n < 1.0 || std::abs(n * hl[i] - c.convergence.T) > 1e-9 * c.convergence.T) {
          std::ostringstream os;
          os << "convergence.T: not an integer multiple of h = " << hl[i];
          issues.push_back(os.str());
        }
      }
    }
    if (!(c.convergence.T > 0.0)) issues.push_back("convergence.T: must be > 0");
  }
  if (c.fibreScanSamples < 8) issues.push_back("fibre_scan_samples: must be >= 8");
  if (c.structureSamples < 1) issues.push_back("structure_samples: must be >= 1");
  if (c.outputDir.empty()) issues.push_back("output_dir: must not be empty");
  return issues;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error(ErrorKind::InvalidArgument, "invalid configuration:\n  " + [&] {
        std::string s;
        for (const auto& i : issues) s += (s.empty() ? "" : "\n  ") + i;
        return s;
      }()),
      issues_(std::move(issues)) {}

bool RunConfig::emits(const std::string& what) const { return contains(emit, what); }

nlohmann::ordered_json RunConfig::echo() const {
  json j;
  j["problem"] = problem;
  j["params"] = {{"gv", vec_json(params.gv)}};
  j["mode"] = std::string(mode_name(mode));
  j["underlying"] = underlying;
  j["h"] = h;
  j["steps"] = steps;
  j["initial"] = initial.explicitZ ? vec_json(*initial.explicitZ) : json(initial.name);
  j["newton"] = {{"tol", newton.tol},
                 {"max_iter", newton.maxIter},
                 {"damping", newton.damping},
                 {"fd_scale", newton.fdScale}};
  j["emit"] = emit;
  j["convergence"] = {{"h_list", convergence.hList}, {"T", convergence.T}};
  j["fibre_scan_samples"] = fibreScanSamples;
  j["structure_samples"] = structureSamples;
  j["output_dir"] = outputDir;
  j["seed"] = seed;
  return j;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  json doc;
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '{') {
      doc = json::parse(text);
    } else {
      doc = parse_toml_lite(text);
    }
  } catch (const ParseError& e) {
    throw ConfigError({std::string("parse error at ") + e.what()});
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("JSON parse error: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"configuration must be a table/object"});

  Reader rd;
  rd.check_keys(doc, "", {"problem", "params", "mode", "underlying", "h", "steps", "initial", "emit", "newton",
                          "convergence", "output_dir", "seed", "fibre_scan_samples", "structure_samples"});
  RunConfig c;
  if (auto v = rd.string(doc, "problem", "")) c.problem = *v;
  if (auto v = rd.string(doc, "mode", "")) {
    if (auto m = parse_mode(*v)) {
      c.mode = *m;
    } else {
      rd.issues.push_back("mode: expected 'shake' or 'rattle', got '" + *v + "'");
    }
  }
  if (auto v = rd.string(doc, "underlying", "")) c.underlying = *v;
  if (auto v = rd.number(doc, "h", "")) c.h = *v;
  if (auto v = rd.integer(doc, "steps", "")) {
    if (*v < 0) {
      rd.issues.push_back("steps: must be >= 0");
    } else {
      c.steps = static_cast<std::size_t>(*v);
    }
  }
  if (doc.contains("initial")) {
    const json& init = doc.at("initial");
    if (init.is_string()) {
      c.initial.name = init.get<std::string>();
    } else if (init.is_array() && std::all_of(init.begin(), init.end(), [](const json& x) { return x.is_number(); })) {
      const auto xs = init.get<std::vector<double>>();
      c.initial.name.clear();
      c.initial.explicitZ = Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    } else {
      rd.issues.push_back("initial: expected a name or an array of numbers");
    }
  }
  if (doc.contains("emit")) {
    const json& e = doc.at("emit");
    if (e.is_string()) {
      c.emit = split_list(e.get<std::string>());
    } else if (e.is_array() && std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_string(); })) {
      c.emit = e.get<std::vector<std::string>>();
    } else {
      rd.issues.push_back("emit: expected an array of names");
    }
  }
  if (auto v = rd.string(doc, "output_dir", "")) c.outputDir = *v;
  if (auto v = rd.integer(doc, "seed", "")) {
    if (*v < 0) {
      rd.issues.push_back("seed: must be >= 0");
    } else {
      c.seed = static_cast<unsigned>(*v);
    }
  }
  if (auto v = rd.integer(doc, "fibre_scan_samples", "")) c.fibreScanSamples = static_cast<int>(*v);
  if (auto v = rd.integer(doc, "structure_samples", "")) c.structureSamples = static_cast<int>(*v);

  if (const json* p = rd.table(doc, "params")) {
    rd.check_keys(*p, "params.", {"gv"});
    if (auto v = rd.numbers(*p, "gv", "params.")) {
      c.params.gv = Eigen::Map<const Vec>(v->data(), static_cast<Eigen::Index>(v->size()));
    }
  }
  if (const json* n = rd.table(doc, "newton")) {
    rd.check_keys(*n, "newton.", {"tol", "max_iter", "damping", "fd_scale"});
    if (auto v = rd.number(*n, "tol", "newton.")) c.newton.tol = *v;
    if (auto v = rd.integer(*n, "max_iter", "newton.")) c.newton.maxIter = static_cast<int>(*v);
    if (auto v = rd.number(*n, "damping", "newton.")) c.newton.damping = *v;
    if (auto v = rd.number(*n, "fd_scale", "newton.")) c.newton.fdScale = *v;
  }
  if (const json* cv = rd.table(doc, "convergence")) {
    rd.check_keys(*cv, "convergence.", {"h_list", "T"});
    if (auto v = rd.numbers(*cv, "h_list", "convergence.")) c.convergence.hList = *v;
    if (auto v = rd.number(*cv, "T", "convergence.")) c.convergence.T = *v;
  }

  auto issues = rd.issues;
  const auto more = collect_issues(c);
  issues.insert(issues.end(), more.begin(), more.end());
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

void validate(const RunConfig& cfg) {
  auto issues = collect_issues(cfg);
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

}  // namespace coiso::cli
