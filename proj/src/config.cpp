#include "taxis/config.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "taxis/errors.hpp"

namespace taxis {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& v, int line, const std::string& key) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'", line);
  return out;
}

std::uint64_t parse_uint(const std::string& v, int line, const std::string& key) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("'" + key + "' expects a nonnegative integer, got '" + v + "'", line);
  return out;
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'", line);
}

std::pair<double, double> parse_pair(const std::string& v, int line, const std::string& key) {
  std::istringstream is(v);
  std::string a, b, extra;
  if (!(is >> a >> b) || (is >> extra))
    throw ConfigError("'" + key + "' expects two numbers 'x y', got '" + v + "'", line);
  return {parse_double(a, line, key), parse_double(b, line, key)};
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Setter = std::function<void(Config&, const std::string&, int)>;

void law_keys(std::map<std::string, Setter>& m, const std::string& p, LawConfig Config::*lc,
              const std::string& exponent_key) {
  const std::string s = p == "f" ? "_f" : "_g";
  m[p + "_law"] = [lc](Config& c, const std::string& v, int line) {
    if (v != "power" && v != "allee" && v != "logistic")
      throw ConfigError("unknown law '" + v + "' (power, allee, logistic)", line);
    (c.*lc).law = v;
  };
  m[p + "_K"] = [lc, p](Config& c, const std::string& v, int l) { (c.*lc).K = parse_double(v, l, p + "_K"); };
  m[p + "_L"] = [lc, p](Config& c, const std::string& v, int l) { (c.*lc).L = parse_double(v, l, p + "_L"); };
  m[p + "_a"] = [lc, p](Config& c, const std::string& v, int l) { (c.*lc).a = parse_double(v, l, p + "_a"); };
  m[p + "_b"] = [lc, p](Config& c, const std::string& v, int l) { (c.*lc).b = parse_double(v, l, p + "_b"); };
  m[exponent_key] = [lc, exponent_key](Config& c, const std::string& v, int l) {
    (c.*lc).exponent = parse_double(v, l, exponent_key);
  };
  m["K" + s] = [lc](Config& c, const std::string& v, int l) { (c.*lc).env_K = parse_double(v, l, "K"); };
  m["L" + s] = [lc](Config& c, const std::string& v, int l) { (c.*lc).env_L = parse_double(v, l, "L"); };
  m["k" + s] = [lc](Config& c, const std::string& v, int l) { (c.*lc).env_k = parse_double(v, l, "k"); };
  m["l" + s] = [lc](Config& c, const std::string& v, int l) { (c.*lc).env_l = parse_double(v, l, "l"); };
}

void recipe_keys(std::map<std::string, Setter>& m, const std::string& p, InitialRecipe Config::*r) {
  m[p + "_recipe"] = [r](Config& c, const std::string& v, int line) {
    if (v != "constant" && v != "gaussian" && v != "random")
      throw ConfigError("unknown recipe '" + v + "' (constant, gaussian, random)", line);
    (c.*r).kind = v;
  };
  auto dbl = [&m, &p, r](const std::string& key, double InitialRecipe::*field) {
    const std::string full = p + "_" + key;
    m[full] = [r, field, full](Config& c, const std::string& v, int l) {
      (c.*r).*field = parse_double(v, l, full);
    };
  };
  dbl("value", &InitialRecipe::value);
  dbl("width", &InitialRecipe::width);
  dbl("amplitude", &InitialRecipe::amplitude);
  dbl("floor", &InitialRecipe::floor);
  dbl("mean", &InitialRecipe::mean);
  m[p + "_center"] = [r, p](Config& c, const std::string& v, int l) {
    const auto [x, y] = parse_pair(v, l, p + "_center");
    (c.*r).cx = x;
    (c.*r).cy = y;
  };
  m[p + "_seed"] = [r, p](Config& c, const std::string& v, int l) {
    (c.*r).seed = parse_uint(v, l, p + "_seed");
  };
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const auto table = [] {
    std::map<std::string, std::map<std::string, Setter>> t;
    auto& grid = t["grid"];
    grid["nx"] = [](Config& c, const std::string& v, int l) { c.nx = parse_uint(v, l, "nx"); };
    grid["ny"] = [](Config& c, const std::string& v, int l) { c.ny = parse_uint(v, l, "ny"); };
    grid["lx"] = [](Config& c, const std::string& v, int l) { c.lx = parse_double(v, l, "lx"); };
    grid["ly"] = [](Config& c, const std::string& v, int l) { c.ly = parse_double(v, l, "ly"); };

    auto& time = t["time"];
    time["t_end"] = [](Config& c, const std::string& v, int l) { c.t_end = parse_double(v, l, "t_end"); };
    time["dt_max"] = [](Config& c, const std::string& v, int l) { c.dt_max = parse_double(v, l, "dt_max"); };
    time["safety"] = [](Config& c, const std::string& v, int l) { c.safety = parse_double(v, l, "safety"); };
    time["adaptive"] = [](Config& c, const std::string& v, int l) { c.adaptive = parse_bool(v, l, "adaptive"); };
    time["solve_tol"] = [](Config& c, const std::string& v, int l) { c.solve_tol = parse_double(v, l, "solve_tol"); };
    time["max_iter"] = [](Config& c, const std::string& v, int l) {
      c.max_iter = static_cast<int>(parse_uint(v, l, "max_iter"));
    };

    auto& model = t["model"];
    model["mu"] = [](Config& c, const std::string& v, int l) { c.mu = parse_double(v, l, "mu"); };
    model["epsilon"] = [](Config& c, const std::string& v, int l) { c.epsilon = parse_double(v, l, "epsilon"); };

    auto& kin = t["kinetics"];
    law_keys(kin, "f", &Config::f, "alpha");
    law_keys(kin, "g", &Config::g, "beta");

    auto& res = t["resupply"];
    res["profile"] = [](Config& c, const std::string& v, int line) {
      if (v != "constant" && v != "gaussian")
        throw ConfigError("unknown resupply profile '" + v + "' (constant, gaussian)", line);
      c.profile = v;
    };
    res["amplitude"] = [](Config& c, const std::string& v, int l) { c.r_amplitude = parse_double(v, l, "amplitude"); };
    res["center"] = [](Config& c, const std::string& v, int l) {
      const auto [x, y] = parse_pair(v, l, "center");
      c.r_cx = x;
      c.r_cy = y;
    };
    res["width"] = [](Config& c, const std::string& v, int l) { c.r_width = parse_double(v, l, "width"); };
    res["decay_lambda"] = [](Config& c, const std::string& v, int l) { c.r_decay = parse_double(v, l, "decay_lambda"); };

    auto& init = t["initial"];
    recipe_keys(init, "u", &Config::u0);
    recipe_keys(init, "v", &Config::v0);
    recipe_keys(init, "w", &Config::w0);

    auto& mon = t["monitors"];
    mon["cadence"] = [](Config& c, const std::string& v, int l) { c.cadence = parse_uint(v, l, "cadence"); };
    mon["delta"] = [](Config& c, const std::string& v, int l) { c.delta = parse_double(v, l, "delta"); };
    mon["q"] = [](Config& c, const std::string& v, int l) { c.q = parse_double(v, l, "q"); };

    auto& out = t["output"];
    out["dir"] = [](Config& c, const std::string& v, int) { c.out_dir = v; };
    out["snapshot_every"] = [](Config& c, const std::string& v, int l) {
      c.snapshot_every = parse_uint(v, l, "snapshot_every");
    };
    return t;
  }();
  return table;
}

} // namespace

Config parse_config(std::string_view text) {
  Config c;
  const auto& table = schema();
  const std::map<std::string, Setter>* section = nullptr;
  std::string section_name;
  std::map<std::string, int> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section_name = trim(std::string_view(line).substr(1, line.size() - 2));
      const auto it = table.find(section_name);
      if (it == table.end()) throw ConfigError("unknown section [" + section_name + "]", line_no);
      section = &it->second;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    if (!section) throw ConfigError("key outside any section", line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::size_t hash = value.find(" #");
    if (hash != std::string::npos) value = trim(std::string_view(value).substr(0, hash));
    const auto it = section->find(key);
    if (it == section->end())
      throw ConfigError("unknown key '" + key + "' in [" + section_name + "]", line_no);
    const std::string full = section_name + "." + key;
    if (seen.count(full))
      throw ConfigError("duplicate key '" + key + "' (first on line " +
                            std::to_string(seen[full]) + ")",
                        line_no);
    seen[full] = line_no;
    it->second(c, value, line_no);
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

void write_law(std::ostream& os, const std::string& p, const LawConfig& lc,
               const std::string& exponent_key) {
  const std::string s = p == "f" ? "_f" : "_g";
  os << p << "_law = " << lc.law << '\n';
  os << p << "_K = " << num(lc.K) << '\n';
  os << p << "_L = " << num(lc.L) << '\n';
  os << p << "_a = " << num(lc.a) << '\n';
  os << p << "_b = " << num(lc.b) << '\n';
  os << exponent_key << " = " << num(lc.exponent) << '\n';
  if (lc.env_K) os << "K" << s << " = " << num(*lc.env_K) << '\n';
  if (lc.env_L) os << "L" << s << " = " << num(*lc.env_L) << '\n';
  if (lc.env_k) os << "k" << s << " = " << num(*lc.env_k) << '\n';
  if (lc.env_l) os << "l" << s << " = " << num(*lc.env_l) << '\n';
}

void write_recipe(std::ostream& os, const std::string& p, const InitialRecipe& r) {
  os << p << "_recipe = " << r.kind << '\n';
  os << p << "_value = " << num(r.value) << '\n';
  os << p << "_center = " << num(r.cx) << ' ' << num(r.cy) << '\n';
  os << p << "_width = " << num(r.width) << '\n';
  os << p << "_amplitude = " << num(r.amplitude) << '\n';
  os << p << "_floor = " << num(r.floor) << '\n';
  os << p << "_mean = " << num(r.mean) << '\n';
  os << p << "_seed = " << r.seed << '\n';
}

} // namespace

std::string to_ini(const Config& c) {
  std::ostringstream os;
  os << "[grid]\nnx = " << c.nx << "\nny = " << c.ny << "\nlx = " << num(c.lx)
     << "\nly = " << num(c.ly) << "\n\n";
  os << "[time]\nt_end = " << num(c.t_end) << "\ndt_max = " << num(c.dt_max)
     << "\nsafety = " << num(c.safety) << "\nadaptive = " << (c.adaptive ? "true" : "false")
     << "\nsolve_tol = " << num(c.solve_tol) << "\nmax_iter = " << c.max_iter << "\n\n";
  os << "[model]\nmu = " << num(c.mu) << "\nepsilon = " << num(c.epsilon) << "\n\n";
  os << "[kinetics]\n";
  write_law(os, "f", c.f, "alpha");
  write_law(os, "g", c.g, "beta");
  os << "\n[resupply]\nprofile = " << c.profile << "\namplitude = " << num(c.r_amplitude)
     << "\ncenter = " << num(c.r_cx) << ' ' << num(c.r_cy) << "\nwidth = " << num(c.r_width)
     << "\ndecay_lambda = " << num(c.r_decay) << "\n\n";
  os << "[initial]\n";
  write_recipe(os, "u", c.u0);
  write_recipe(os, "v", c.v0);
  write_recipe(os, "w", c.w0);
  os << "\n[monitors]\ncadence = " << c.cadence << "\ndelta = " << num(c.delta)
     << "\nq = " << num(c.q) << "\n\n";
  os << "[output]\ndir = " << c.out_dir << "\nsnapshot_every = " << c.snapshot_every << '\n';
  return os.str();
}

Grid make_grid(const Config& c) { return Grid(c.nx, c.ny, c.lx, c.ly); }

GrowthLaw make_law(const LawConfig& lc) {
  if (lc.law == "power") return PurePower{lc.K, lc.L, lc.exponent};
  if (lc.law == "allee") return Allee{};
  if (lc.law == "logistic") return Logistic{lc.a, lc.b, lc.exponent};
  throw ConfigError("unknown law '" + lc.law + "'");
}

namespace {

Envelope make_envelope(const LawConfig& lc, const GrowthLaw& law) {
  Envelope e = default_envelope(law);
  if (lc.env_K) e.K = *lc.env_K;
  if (lc.env_L) e.L = *lc.env_L;
  if (lc.env_k) e.k = *lc.env_k;
  if (lc.env_l) e.l = *lc.env_l;
  return e;
}

} // namespace

KineticSpec make_kinetics(const Config& c) {
  KineticSpec k;
  k.law_f = make_law(c.f);
  k.law_g = make_law(c.g);
  k.env_f = make_envelope(c.f, k.law_f);
  k.env_g = make_envelope(c.g, k.law_g);
  return k;
}

ResupplySpec make_resupply(const Config& c) {
  ResupplySpec r;
  if (c.profile == "gaussian")
    r.profile = GaussianProfile{c.r_cx, c.r_cy, c.r_width, c.r_amplitude};
  else
    r.profile = ConstantProfile{c.r_amplitude};
  r.decay_lambda = c.r_decay;
  return r;
}

ModelParams make_params(const Config& c) {
  return ModelParams{c.mu, c.epsilon, make_resupply(c), make_kinetics(c)};
}

Field make_initial_field(const InitialRecipe& r, const Grid& g) {
  if (r.kind == "constant") return Field(g, r.value);
  if (r.kind == "gaussian")
    return sample(g, [&](double x, double y) {
      const double dx = x - r.cx, dy = y - r.cy;
      return r.floor + r.amplitude * std::exp(-(dx * dx + dy * dy) / (r.width * r.width));
    });
  if (r.kind == "random") {
    std::mt19937_64 rng(r.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::max(0.0, r.mean + r.amplitude * dist(rng));
    return f;
  }
  throw ConfigError("unknown recipe '" + r.kind + "'");
}

InitialData make_initial(const Config& c, const Grid& g) {
  return InitialData{make_initial_field(c.u0, g), make_initial_field(c.v0, g),
                     make_initial_field(c.w0, g)};
}

StepControl make_control(const Config& c) {
  return StepControl{c.dt_max, c.safety, c.solve_tol, c.max_iter, c.adaptive};
}

MonitorSettings make_monitor_settings(const Config& c, bool decay_armed) {
  return MonitorSettings{c.delta, c.q, decay_armed};
}

void validate_config(const Config& c) {
  auto wrap = [](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  };
  wrap([&] {
    const Grid g = make_grid(c);
    if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) throw ConfigError("t_end must be finite and >= 0");
    validate(make_control(c));
    const ModelParams p = make_params(c);
    validate(p);
    const auto issues = structural_issues(p.kinetics);
    if (!issues.empty()) throw ConfigError("kinetics: " + issues.front());
    const EnvelopeReport env = validate_envelope(p.kinetics);
    if (!env.holds)
      throw ConfigError("kinetics: envelope violated (" + env.worst_label + " at s = " +
                        num(env.worst_s) + ")");
    const auto rissues = resupply_issues(p.resupply);
    if (!rissues.empty()) throw ConfigError("resupply: " + rissues.front());
    for (const InitialRecipe* r : {&c.u0, &c.v0, &c.w0})
      if (r->kind == "gaussian" && !(r->width > 0.0))
        throw ConfigError("initial: gaussian width must be positive");
    validate(make_initial(c, g), g);
    if (c.cadence == 0) throw ConfigError("monitors: cadence must be positive");
    if (!(c.delta > 0.0)) throw ConfigError("monitors: delta must be positive");
    if (!(c.q > 1.0)) throw ConfigError("monitors: q must exceed 1");
    if (c.out_dir.empty()) throw ConfigError("output: dir must not be empty");
  });
}

std::string content_hash(std::string_view text) {
  const std::string header = "blob " + std::to_string(text.size()) + '\0';
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, text.data(), text.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned k = 0; k < len; ++k) {
    const unsigned char b = md[k];
    out += hex[b >> 4];
    out += hex[b & 15];
  }
  return out;
}

} // namespace taxis
