#include "anosov/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include "anosov/expr.hpp"

namespace anosov {

using nlohmann::json;

double RunConfig::num(const std::string& key, double def) const {
  if (!doc.contains(key)) return def;
  if (!doc[key].is_number()) throw ConfigError("'" + key + "' must be a number");
  return doc[key].get<double>();
}

int RunConfig::integer(const std::string& key, int def) const {
  if (!doc.contains(key)) return def;
  if (!doc[key].is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return doc[key].get<int>();
}

std::string RunConfig::str(const std::string& key, const std::string& def) const {
  if (!doc.contains(key)) return def;
  if (!doc[key].is_string()) throw ConfigError("'" + key + "' must be a string");
  return doc[key].get<std::string>();
}

double RunConfig::tolerance(const std::string& key, double def) const {
  const double v = num(key, def);
  if (!(v > 0) || !std::isfinite(v)) throw ConfigError("'" + key + "' must be positive");
  return v;
}

std::string config_hash(const json& doc) {
  const std::string s = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig make_config(json doc, long long seed_override, int workers_override,
                      const std::string& out_override) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (seed_override >= 0) doc["seed"] = seed_override;
  if (workers_override >= 0) doc["workers"] = workers_override;
  if (!out_override.empty()) doc["out"] = out_override;
  RunConfig c;
  c.doc = doc;
  const int seed = c.integer("seed", 1);
  if (seed < 0) throw ConfigError("'seed' must be non-negative");
  c.seed = static_cast<unsigned long long>(seed);
  c.workers = c.integer("workers", 0);
  if (c.workers < 0) throw ConfigError("'workers' must be non-negative");
  if (c.workers == 0) c.workers = int(std::max(1u, std::thread::hardware_concurrency()));
  c.out_dir = c.str("out", ".");
  // the output directory and worker count do not change results
  json hashed = doc;
  hashed.erase("out");
  hashed.erase("workers");
  c.hash = config_hash(hashed);
  return c;
}

RunConfig load_config(const std::string& path, long long seed_override, int workers_override,
                      const std::string& out_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return make_config(std::move(doc), seed_override, workers_override, out_override);
}

std::string surface_type(const json& spec) {
  if (!spec.is_object() || !spec.contains("type") || !spec["type"].is_string())
    throw ConfigError("surface spec needs a string 'type'");
  return spec["type"].get<std::string>();
}

namespace {
double need_number(const json& spec, const char* key) {
  if (!spec.contains(key) || !spec[key].is_number())
    throw ConfigError(std::string("surface spec: '") + key + "' must be a number");
  const double v = spec[key].get<double>();
  if (!std::isfinite(v)) throw ConfigError(std::string("surface spec: '") + key + "' not finite");
  return v;
}
}  // namespace

SurfaceModel parse_surface(const json& spec) {
  const std::string type = surface_type(spec);
  if (type == "octagon") return build_octagon();
  if (type == "constant") return ConstantCurvature{need_number(spec, "K")};
  if (type != "conformal_torus") throw ConfigError("unknown surface type '" + type + "'");

  const double Lx = need_number(spec, "Lx"), Ly = need_number(spec, "Ly");
  if (!(Lx > 0 && Ly > 0)) throw ConfigError("surface spec: Lx and Ly must be positive");
  const double nxd = need_number(spec, "nx"), nyd = need_number(spec, "ny");
  const int nx = int(nxd), ny = int(nyd);
  if (nx != nxd || ny != nyd || nx < 4 || ny < 4)
    throw ConfigError("surface spec: nx and ny must be integers >= 4");
  if (!spec.contains("lambda")) return ConformalTorus::flat(nx, ny, Lx, Ly);
  const json& lam = spec["lambda"];
  std::vector<double> values(std::size_t(nx) * ny);
  if (lam.is_string()) {
    try {
      Expr e(lam.get<std::string>());
      std::map<std::string, double> vars{{"Lx", Lx}, {"Ly", Ly}};
      PeriodicGrid g(nx, ny, Lx, Ly);
      for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
          vars["x"] = g.x(ix);
          vars["y"] = g.y(iy);
          values[std::size_t(iy) * nx + ix] = e(vars);
        }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("surface spec: lambda: ") + e.what());
    }
  } else if (lam.is_array()) {
    if (lam.size() != std::size_t(ny)) throw ConfigError("surface spec: lambda needs ny rows");
    for (int iy = 0; iy < ny; ++iy) {
      const json& row = lam[std::size_t(iy)];
      if (!row.is_array() || row.size() != std::size_t(nx))
        throw ConfigError("surface spec: every lambda row needs nx numbers");
      for (int ix = 0; ix < nx; ++ix) {
        if (!row[std::size_t(ix)].is_number()) throw ConfigError("surface spec: lambda entries must be numbers");
        values[std::size_t(iy) * nx + ix] = row[std::size_t(ix)].get<double>();
      }
    }
  } else {
    throw ConfigError("surface spec: lambda must be an expression or a grid");
  }
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError("surface spec: lambda is not finite");
  return ConformalTorus(PeriodicGrid(nx, ny, Lx, Ly), std::move(values));
}

}  // namespace anosov
