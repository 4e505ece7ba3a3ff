#pragma once

// Scenario documents (JSON), method dispatch, sweeps, the maximum-interferer
// search and CSV output.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "finnet/baselines.hpp"
#include "finnet/errors.hpp"
#include "finnet/geometry.hpp"
#include "finnet/mgf.hpp"
#include "finnet/montecarlo.hpp"
#include "finnet/rlpg.hpp"
#include "finnet/scenario.hpp"

namespace finnet {

using json = nlohmann::json;

struct ScenarioFile {
  json document;  // as parsed, used for sweeps and the fingerprint
  Scenario scenario;
  double beta_db = 0.0;
  double snr_db = 0.0;
  std::string method = "auto";
  EulerInversionParams inversion;
  double quadrature_rel_tol = 1e-11;
  std::uint64_t mc_trials = 1000000;
  std::uint64_t mc_seed = 1;
  std::optional<double> ppp_density;  // defaults to M / |A|
};

// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string scenario_fingerprint(const ScenarioFile& f) { return fnv1a_hex(f.document.dump()); }

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline double number(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return number(j, key, where);
}

inline long long integer(const json& j, const char* key, const std::string& where) {
  const double v = number(j, key, where);
  if (v != std::floor(v)) throw ParseError(where + "." + key + ": expected an integer");
  return static_cast<long long>(v);
}

inline Point point(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError(where + ": expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

inline Region parse_region(const json& j) {
  const std::string w = "region";
  const json& t = field(j, "type", w);
  if (!t.is_string()) throw ParseError("region.type: expected a string");
  const std::string type = t.get<std::string>();
  const Point center = j.contains("center") ? point(j.at("center"), "region.center") : Point{};
  if (type == "disk") {
    return Disk(center, j.contains("W") ? number(j, "W", w) : number(j, "radius", w));
  }
  if (type == "regular_polygon") {
    const long long sides = integer(j, "L", w);
    if (sides < 3 || sides > 100000) throw ParseError("region.L: need 3 <= L");
    double radius = 0.0;
    if (j.contains("W") == j.contains("area")) throw ParseError("region: give exactly one of \"W\" and \"area\"");
    if (j.contains("W")) {
      radius = number(j, "W", w);
    } else {
      radius = regular_polygon_circumradius_for_area(static_cast<int>(sides), number(j, "area", w));
    }
    return make_regular_polygon(static_cast<int>(sides), radius, center, number_or(j, "rotation", 0.0, w));
  }
  if (type == "polygon") {
    const json& v = field(j, "vertices", w);
    if (!v.is_array()) throw ParseError("region.vertices: expected an array of [x, y]");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < v.size(); ++i) pts.push_back(point(v[i], "region.vertices[" + std::to_string(i) + "]"));
    return ConvexPolygon(std::move(pts));
  }
  if (type == "fig2") return make_benchmark_quadrilateral(number_or(j, "W", 100.0, w));
  throw ParseError("region.type: unknown region \"" + type + "\" (disk, regular_polygon, polygon, fig2)");
}

// Vertex and edge indices are 1-based: vertex k is V_k, edge k runs from V_k to V_{k+1}.
inline Point parse_receiver(const json& j, const Region& region) {
  const std::string w = "receiver";
  const json& m = field(j, "mode", w);
  if (!m.is_string()) throw ParseError("receiver.mode: expected a string");
  const std::string mode = m.get<std::string>();
  if (mode == "coords") return {number(j, "x", w), number(j, "y", w)};
  if (mode == "center") return region.center();
  if (mode == "disk_offset_d") {
    if (!region.is_disk()) throw ParseError("receiver.mode \"disk_offset_d\" needs a disk region");
    const double d = number(j, "d", w);
    const Disk& disk = region.disk();
    if (d < 0.0 || d > disk.radius()) throw ParseError("receiver.d: need 0 <= d <= W");
    return {disk.center().x + d, disk.center().y};
  }
  if (mode == "vertex_index" || mode == "edge_midpoint_index") {
    if (region.is_disk()) throw ParseError("receiver.mode \"" + mode + "\" needs a polygon region");
    const auto& poly = region.polygon();
    const long long k = integer(j, "index", w);
    if (k < 1 || k > static_cast<long long>(poly.size())) {
      throw ParseError("receiver.index: must lie in 1.." + std::to_string(poly.size()));
    }
    const auto i = static_cast<std::size_t>(k - 1);
    return mode == "vertex_index" ? poly.vertices()[i] : poly.edge_midpoint(i);
  }
  throw ParseError("receiver.mode: unknown mode \"" + mode + "\"");
}

}  // namespace detail

inline ScenarioFile parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ParseError("scenario: expected a JSON object");
  ScenarioFile f;
  f.document = doc;
  const std::string w = "scenario";
  try {
    Scenario& sc = f.scenario;
    sc.region = detail::parse_region(detail::field(doc, "region", w));
    sc.receiver = detail::parse_receiver(detail::field(doc, "receiver", w), sc.region);
    sc.r0 = detail::number(doc, "r0", w);
    const long long M = detail::integer(doc, "M", w);
    if (M < 0 || M > 1000000) throw ParseError("scenario.M: out of range");
    sc.interferers = static_cast<int>(M);
    const double m0 = detail::number(doc, "m0", w);
    sc.channel = NakagamiChannel(m0, detail::number_or(doc, "m", m0, w));
    sc.alpha = detail::number(doc, "alpha", w);
    f.beta_db = detail::number(doc, "beta_db", w);
    f.snr_db = detail::number(doc, "snr_db", w);
    sc.beta = db_to_linear(f.beta_db);
    sc.rho0 = db_to_linear(f.snr_db);
    if (doc.contains("method")) {
      if (!doc.at("method").is_string()) throw ParseError("scenario.method: expected a string");
      f.method = doc.at("method").get<std::string>();
    }
    if (doc.contains("inversion")) {
      const json& inv = doc.at("inversion");
      if (inv.contains("zeta")) {
        f.inversion = EulerInversionParams::for_accuracy(detail::number(inv, "zeta", "inversion"));
      } else {
        f.inversion.A = detail::number_or(inv, "A", f.inversion.A, "inversion");
        f.inversion.B = static_cast<int>(inv.contains("B") ? detail::integer(inv, "B", "inversion") : f.inversion.B);
        f.inversion.C = static_cast<int>(inv.contains("C") ? detail::integer(inv, "C", "inversion") : f.inversion.C);
      }
      f.inversion.validate();
    }
    f.quadrature_rel_tol = detail::number_or(doc, "quadrature_rel_tol", f.quadrature_rel_tol, w);
    if (!(f.quadrature_rel_tol > 0.0) || f.quadrature_rel_tol > 1e-3) {
      throw ParseError("scenario.quadrature_rel_tol: must lie in (0, 1e-3]");
    }
    if (doc.contains("mc")) {
      const json& mc = doc.at("mc");
      if (mc.contains("trials")) {
        const long long t = detail::integer(mc, "trials", "mc");
        if (t < 1) throw ParseError("mc.trials: must be positive");
        f.mc_trials = static_cast<std::uint64_t>(t);
      }
      if (mc.contains("seed")) {
        const json& s = mc.at("seed");
        if (!s.is_number_unsigned()) throw ParseError("mc.seed: expected a non-negative integer");
        f.mc_seed = s.get<std::uint64_t>();
      }
    }
    if (doc.contains("ppp_density")) f.ppp_density = detail::number(doc, "ppp_density", w);
    sc.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  return f;
}

inline ScenarioFile parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

inline ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

// "auto" routes integer m0 to RLPG and everything else to MGF.
inline Method resolve_method(const std::string& name, double m0) {
  if (name == "auto") return m0 == std::floor(m0) ? Method::Rlpg : Method::Mgf;
  if (name == "mgf") return Method::Mgf;
  if (name == "rlpg") return Method::Rlpg;
  if (name == "mc") return Method::MonteCarlo;
  if (name == "ppp") return Method::Ppp;
  throw ParseError("unknown method \"" + name + "\" (auto, mgf, rlpg, mc, ppp)");
}

struct EvalOptions {
  std::optional<std::string> method;  // overrides the document
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  unsigned threads = 0;
};

inline OutageResult evaluate(const ScenarioFile& f, const EvalOptions& eo = {}) {
  const Scenario& sc = f.scenario;
  switch (resolve_method(eo.method.value_or(f.method), sc.channel.m0)) {
    case Method::Mgf: {
      MgfOptions o;
      o.euler = f.inversion;
      o.inner_rel_tol = o.outer_rel_tol = f.quadrature_rel_tol;
      return outage_mgf(sc, o);
    }
    case Method::Rlpg: {
      RlpgOptions o;
      o.rel_tol = f.quadrature_rel_tol;
      return outage_rlpg(sc, o);
    }
    case Method::MonteCarlo:
      return to_outage_result(
          simulate_outage(sc, eo.trials.value_or(f.mc_trials), eo.seed.value_or(f.mc_seed), eo.threads));
    case Method::Ppp: {
      if (sc.channel.m0 != 1.0 || sc.channel.m != 1.0) {
        throw Unsupported("the PPP baseline covers Rayleigh fading only (m0 = m = 1)");
      }
      OutageResult out;
      out.method = Method::Ppp;
      const double lambda = f.ppp_density.value_or(sc.interferers / sc.region.area());
      out.epsilon = outage_ppp_rayleigh(lambda, sc.r0, sc.alpha, sc.beta, sc.rho0);
      return out;
    }
  }
  throw Unsupported("unknown method");
}

// ---------------------------------------------------------------------------
// Sweeps.

inline const std::vector<std::string>& sweep_variables() {
  static const std::vector<std::string> v{"d", "snr_db", "alpha", "L", "M", "beta_db"};
  return v;
}

// Copy of the document with one variable replaced.
inline ScenarioFile with_variable(const ScenarioFile& f, const std::string& var, double value) {
  json doc = f.document;
  if (var == "d") {
    if (!f.scenario.region.is_disk()) throw ParseError("sweep variable d needs a disk region");
    doc["receiver"] = json{{"mode", "disk_offset_d"}, {"d", value}};
  } else if (var == "L") {
    if (doc["region"].value("type", "") != "regular_polygon") {
      throw ParseError("sweep variable L needs a regular_polygon region");
    }
    if (value != std::floor(value)) throw ParseError("sweep variable L takes integer values");
    doc["region"]["L"] = static_cast<long long>(value);
  } else if (var == "M") {
    if (value != std::floor(value)) throw ParseError("sweep variable M takes integer values");
    doc["M"] = static_cast<long long>(value);
  } else if (var == "snr_db" || var == "alpha" || var == "beta_db") {
    doc[var] = value;
  } else {
    throw ParseError("unknown sweep variable \"" + var + "\" (d, snr_db, alpha, L, M, beta_db)");
  }
  return parse_scenario(doc);
}

// Grid syntax: "start:stop:step" (inclusive, stop within step/1e9) or "v1,v2,...".
inline std::vector<double> parse_grid(const std::string& text) {
  auto to_num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ParseError("grid: cannot read number \"" + s + "\"");
    }
    if (used != s.size()) throw ParseError("grid: cannot read number \"" + s + "\"");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ParseError("grid: expected start:stop:step");
    const double a = to_num(parts[0]);
    const double b = to_num(parts[1]);
    const double h = to_num(parts[2]);
    if (!(h > 0.0) || b < a) throw ParseError("grid: need step > 0 and stop >= start");
    const auto n = static_cast<long long>(std::floor((b - a) / h + 1e-9));
    if (n > 100000) throw ParseError("grid: too many points");
    for (long long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * h);
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    if (!p.empty()) out.push_back(to_num(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV rows.

struct CsvRow {
  std::string fingerprint;
  std::string method;
  std::string variable;  // empty for single runs
  double value = NAN;    // grid value or target
  double r0 = 0.0;
  int M = 0;
  double m0 = 0.0;
  double m = 0.0;
  double alpha = 0.0;
  double beta_db = 0.0;
  double snr_db = 0.0;
  double x = 0.0;
  double y = 0.0;
  double epsilon = 0.0;
  std::optional<double> std_error;
  std::string note;
};

inline const char* csv_header() {
  return "fingerprint,method,variable,value,r0,M,m0,m,alpha,beta_db,snr_db,x,y,epsilon,std_error,note";
}

inline CsvRow make_row(const ScenarioFile& f, const OutageResult& r, const std::string& variable = "",
                       double value = NAN) {
  CsvRow row;
  row.fingerprint = scenario_fingerprint(f);
  row.method = std::string(method_name(r.method));
  row.variable = variable;
  row.value = value;
  row.r0 = f.scenario.r0;
  row.M = f.scenario.interferers;
  row.m0 = f.scenario.channel.m0;
  row.m = f.scenario.channel.m;
  row.alpha = f.scenario.alpha;
  row.beta_db = f.beta_db;
  row.snr_db = f.snr_db;
  row.x = f.scenario.receiver.x;
  row.y = f.scenario.receiver.y;
  row.epsilon = r.epsilon;
  row.std_error = r.std_error;
  for (const auto& w : r.warnings) row.note += (row.note.empty() ? "" : "; ") + w;
  return row;
}

namespace detail {

inline std::string num12(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline std::string format_csv(const std::vector<CsvRow>& rows) {
  std::string out = std::string(csv_header()) + "\n";
  for (const auto& r : rows) {
    const std::vector<std::string> cells{r.fingerprint,
                                         r.method,
                                         r.variable,
                                         detail::num12(r.value),
                                         detail::num12(r.r0),
                                         std::to_string(r.M),
                                         detail::num12(r.m0),
                                         detail::num12(r.m),
                                         detail::num12(r.alpha),
                                         detail::num12(r.beta_db),
                                         detail::num12(r.snr_db),
                                         detail::num12(r.x),
                                         detail::num12(r.y),
                                         detail::num12(r.epsilon),
                                         r.std_error ? detail::num12(*r.std_error) : "",
                                         r.note};
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += detail::csv_field(cells[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::vector<CsvRow> parse_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line != csv_header()) throw ParseError("csv: unexpected header");
  auto num = [](const std::string& s) { return s.empty() ? NAN : std::stod(s); };
  std::vector<CsvRow> rows;
  while (std::getline(ss, line)) {
    const auto c = detail::split_csv_line(line);
    if (c.size() != 16) throw ParseError("csv: expected 16 fields, got " + std::to_string(c.size()));
    CsvRow r;
    r.fingerprint = c[0];
    r.method = c[1];
    r.variable = c[2];
    r.value = num(c[3]);
    r.r0 = num(c[4]);
    r.M = std::stoi(c[5]);
    r.m0 = num(c[6]);
    r.m = num(c[7]);
    r.alpha = num(c[8]);
    r.beta_db = num(c[9]);
    r.snr_db = num(c[10]);
    r.x = num(c[11]);
    r.y = num(c[12]);
    r.epsilon = num(c[13]);
    if (!c[14].empty()) r.std_error = num(c[14]);
    r.note = c[15];
    rows.push_back(std::move(r));
  }
  return rows;
}

inline void emit_csv(const std::vector<CsvRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << format_csv(rows);
  if (!out) throw std::runtime_error("failed writing " + path);
}

// ---------------------------------------------------------------------------
// Drivers.

inline std::vector<CsvRow> run_scenario(const ScenarioFile& f, const EvalOptions& eo = {}) {
  return {make_row(f, evaluate(f, eo))};
}

// One row per (grid point, method), grid-major. Grid points run concurrently when threads > 1.
inline std::vector<CsvRow> sweep(const ScenarioFile& f, const std::string& var, const std::vector<double>& grid,
                                 const std::vector<std::string>& methods, const EvalOptions& eo = {},
                                 unsigned threads = 1) {
  // Validate every grid point before doing any numerical work.
  std::vector<ScenarioFile> points;
  points.reserve(grid.size());
  for (double v : grid) points.push_back(with_variable(f, var, v));
  auto body = [&](std::uint64_t first, std::uint64_t last) {
    std::vector<CsvRow> rows;
    for (std::uint64_t i = first; i < last; ++i) {
      for (const auto& m : methods) {
        EvalOptions e = eo;
        e.method = m;
        rows.push_back(make_row(points[i], evaluate(points[i], e), var, grid[i]));
      }
    }
    return rows;
  };
  std::vector<CsvRow> out;
  if (grid.empty()) return out;
  for (auto& part : detail::run_chunks<std::vector<CsvRow>>(grid.size(), threads, body)) {
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

struct MaxInterferers {
  int m_star = 0;
  bool infeasible = false;  // epsilon(M = 0) already exceeds the target
  std::vector<double> epsilon;  // epsilon(M) for M = 0 .. m_star + 1
};

// Largest M with epsilon(M) <= target, found by increasing M from 0.
inline MaxInterferers max_supported_interferers(const ScenarioFile& f, double target, const EvalOptions& eo = {},
                                                int limit = 100000) {
  if (!(target > 0.0 && target < 1.0)) throw InvalidParameter("outage target must lie in (0, 1)");
  const Method method = resolve_method(eo.method.value_or(f.method), f.scenario.channel.m0);
  MaxInterferers out;
  std::function<double(int)> eps;
  std::optional<RlpgEngine> engine;
  if (method == Method::Rlpg) {
    RlpgOptions o;
    o.rel_tol = f.quadrature_rel_tol;
    engine.emplace(f.scenario, o);
    eps = [&](int M) { return engine->outage(M).epsilon; };
  } else if (method == Method::Mgf) {
    eps = [&](int M) {
      Scenario sc = f.scenario;
      sc.interferers = M;
      MgfOptions o;
      o.euler = f.inversion;
      o.inner_rel_tol = o.outer_rel_tol = f.quadrature_rel_tol;
      return outage_mgf(sc, o).epsilon;
    };
  } else {
    throw Unsupported("the interferer search needs an analytic method (rlpg or mgf)");
  }
  for (int M = 0; M <= limit; ++M) {
    const double e = eps(M);
    out.epsilon.push_back(e);
    if (e > target) {
      out.infeasible = M == 0;
      out.m_star = std::max(M - 1, 0);
      return out;
    }
  }
  throw NumericFailure("outage stayed below the target up to M = " + std::to_string(limit));
}

inline std::vector<CsvRow> maxm_rows(const ScenarioFile& f, double target, const EvalOptions& eo = {}) {
  const auto res = max_supported_interferers(f, target, eo);
  ScenarioFile at = f;
  at.scenario.interferers = res.m_star;
  OutageResult r;
  r.method = resolve_method(eo.method.value_or(f.method), f.scenario.channel.m0);
  r.epsilon = res.epsilon[res.infeasible ? 0 : res.m_star];
  CsvRow row = make_row(at, r, "maxm", target);
  row.note = res.infeasible ? "infeasible: epsilon(M=0) exceeds target" : "";
  return {row};
}

}  // namespace finnet
