#include "cmcglue/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include "json.hpp"
#include <sstream>

namespace cmcglue {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || !std::isfinite(x))
    throw Error(ErrorKind::configuration, "config: " + key + " is not a finite number: " + v);
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9)
    throw Error(ErrorKind::configuration, "config: " + key + " is not an integer: " + v);
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorKind::configuration, "config: " + key + " is not a boolean: " + v);
}

Mat to_matrix(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::configuration, "group file: bad matrix");
  const int r = static_cast<int>(j.size()), c = static_cast<int>(j[0].size());
  Mat M(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(j[i].size()) != c)
      throw Error(ErrorKind::configuration, "group file: ragged matrix");
    for (int k = 0; k < c; ++k) M(i, k) = j[i][k].get<double>();
  }
  return M;
}

}  // namespace

double closure_tau(double alpha, int N, int m) { return 2 * pi * m / N - 2 * alpha; }

std::vector<GroupElement> load_group_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::configuration, "group file: cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::configuration, std::string("group file: ") + e.what());
  }
  std::vector<GroupElement> g;
  for (const auto& e : j.at("generators")) g.push_back({to_matrix(e.at("omega1")), to_matrix(e.at("omega2"))});
  return g;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  // Gather (section, key, value) first: the construction decides which
  // sections count.
  struct Entry {
    std::string section, key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::istringstream is(text);
  std::string line, section = "common";
  int ln = 0;
  while (std::getline(is, line)) {
    ++ln;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(ErrorKind::configuration, "config line " + std::to_string(ln) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::configuration, "config line " + std::to_string(ln) + ": expected key=value");
    entries.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), ln});
  }

  std::string construction = "delaunay";
  for (const Entry& e : entries)
    if (e.key == "construction" && e.section == "common") construction = e.value;
  RunConfig c;
  c.params.construction = parse_construction(construction);

  std::map<std::string, std::string> kv;
  for (const Entry& e : entries)
    if (e.section == "common" || e.section == construction) kv[e.key] = e.value;
    else if (e.section != "delaunay" && e.section != "two_geodesic" && e.section != "handle" &&
             e.section != "doubling")
      throw Error(ErrorKind::configuration, "config line " + std::to_string(e.line) +
                                                ": unknown section [" + e.section + "]");

  AssemblyParams& p = c.params;
  bool have_tau = false;
  for (const auto& [k, v] : kv) {
    if (k == "construction") continue;
    else if (k == "n") p.n = to_int(k, v);
    else if (k == "n1") p.n1 = to_int(k, v);
    else if (k == "n2") p.n2 = to_int(k, v);
    else if (k == "alpha") p.alpha = to_double(k, v);
    else if (k == "tau") { p.tau = to_double(k, v); have_tau = true; }
    else if (k == "N") p.N = to_int(k, v);
    else if (k == "m") p.m = to_int(k, v);
    else if (k == "rho0") p.rho0 = to_double(k, v);
    else if (k == "resolution") p.resolution = to_int(k, v);
    else if (k == "delta") c.delta = to_double(k, v);
    else if (k == "seed") p.seed = static_cast<unsigned>(to_int(k, v));
    else if (k == "eps_override") p.eps_override = to_double(k, v);
    else if (k == "profile_only") p.profile_only = to_bool(k, v);
    else if (k == "require_symmetric_sigma") p.require_symmetric_sigma = to_bool(k, v);
    else if (k == "group") p.group_name = v;
    else if (k == "group_file") c.group_file = v;
    else if (k == "tau_min") c.tau_min = to_double(k, v);
    else if (k == "tau_max") c.tau_max = to_double(k, v);
    else if (k == "steps") c.steps = to_int(k, v);
    else if (k == "oracle_samples") c.oracle_samples = to_int(k, v);
    else if (k == "oracle_tol") c.oracle_tol = to_double(k, v);
    else if (k == "slope_tol") c.slope_tol = to_double(k, v);
    else if (k == "sigma") {
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) p.sigma.push_back(to_double(k, trim(item)));
    } else {
      throw Error(ErrorKind::configuration, "config: unknown key " + k);
    }
  }
  // Chain constructions may give (alpha, N, m) and leave tau to the closure.
  const bool chain = p.construction == Construction::delaunay ||
                     p.construction == Construction::two_geodesic;
  if (chain && !have_tau && p.N > 0 && p.m > 0) p.tau = closure_tau(p.alpha, p.N, p.m);
  if (!c.group_file.empty()) {
    std::filesystem::path gp(c.group_file);
    if (gp.is_relative()) gp = std::filesystem::path(base_dir) / gp;
    p.group = load_group_file(gp.string());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::configuration, "config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace cmcglue
