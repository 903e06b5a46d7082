#include "upress/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace upress {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& pointer,
                       const std::string& message) {
  throw ConfigError(source + ": " + pointer + ": " + message);
}

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

class Reader {
 public:
  Reader(const json& j, std::string source) : root_(j), source_(std::move(source)) {}

  const json* find(const json& obj, const std::string& pointer, const std::string& key) const {
    if (!obj.is_object()) fail(source_, pointer, "expected an object");
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  double number(const json& j, const std::string& pointer) const {
    if (!j.is_number()) fail(source_, pointer, "expected a number");
    return j.get<double>();
  }
  long long integer(const json& j, const std::string& pointer) const {
    if (!j.is_number_integer()) fail(source_, pointer, "expected an integer");
    return j.get<long long>();
  }
  std::string text(const json& j, const std::string& pointer) const {
    if (!j.is_string()) fail(source_, pointer, "expected a string");
    return j.get<std::string>();
  }

  double number_or(const json& obj, const std::string& pointer, const std::string& key,
                   double fallback) const {
    const json* j = find(obj, pointer, key);
    return j ? number(*j, pointer + "/" + key) : fallback;
  }
  long long integer_or(const json& obj, const std::string& pointer, const std::string& key,
                       long long fallback) const {
    const json* j = find(obj, pointer, key);
    return j ? integer(*j, pointer + "/" + key) : fallback;
  }

  const json& root() const { return root_; }
  const std::string& source() const { return source_; }

 private:
  const json& root_;
  std::string source_;
};

IMat2 parse_matrix(const Reader& r, const json& j, const std::string& pointer) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
      !j[1].is_array() || j[1].size() != 2)
    fail(r.source(), pointer, "expected a 2x2 integer matrix [[a,b],[c,d]]");
  return {r.integer(j[0][0], pointer), r.integer(j[0][1], pointer), r.integer(j[1][0], pointer),
          r.integer(j[1][1], pointer)};
}

SystemSpec parse_system(const Reader& r, const json& j, const std::string& pointer) {
  const json* f = r.find(j, pointer, "family");
  if (!f) fail(r.source(), pointer, "missing \"family\"");
  const std::string fam = r.text(*f, pointer + "/family");

  IMat2 matrix = SystemSpec::default_matrix();
  if (const json* m = r.find(j, pointer, "matrix")) matrix = parse_matrix(r, *m, pointer + "/matrix");
  const double alpha = r.number_or(j, pointer, "rotation_angle", 0.0);
  const double eps = r.number_or(j, pointer, "perturbation_amplitude", 0.0);
  PerturbationShape shape;
  if (const json* s = r.find(j, pointer, "perturbation_shape")) {
    if (!s->is_array() || s->size() != 2)
      fail(r.source(), pointer + "/perturbation_shape", "expected [s1, s2]");
    shape.s1 = r.number((*s)[0], pointer + "/perturbation_shape");
    shape.s2 = r.number((*s)[1], pointer + "/perturbation_shape");
  }

  try {
    if (fam == "linear_toral") return SystemSpec::linear_toral(matrix);
    if (fam == "linear_times_rotation") return SystemSpec::linear_times_rotation(alpha, matrix);
    if (fam == "perturbed_times_rotation")
      return SystemSpec::perturbed_times_rotation(alpha, eps, shape, matrix);
  } catch (const std::invalid_argument& e) {
    fail(r.source(), pointer, e.what());
  }
  fail(r.source(), pointer + "/family",
       "unknown family (expected linear_toral, linear_times_rotation, or "
       "perturbed_times_rotation)");
}

Potential parse_potential(const Reader& r, const json& j, const std::string& pointer) {
  const json* k = r.find(j, pointer, "kind");
  if (!k) fail(r.source(), pointer, "missing \"kind\"");
  const std::string kind = r.text(*k, pointer + "/kind");
  if (kind == "constant") {
    const json* v = r.find(j, pointer, "value");
    if (!v) fail(r.source(), pointer, "constant potential needs \"value\"");
    return Potential::constant(r.number(*v, pointer + "/value"));
  }
  if (kind == "geometric") return Potential::geometric();
  if (kind == "trig") {
    const json* terms = r.find(j, pointer, "terms");
    if (!terms || !terms->is_array() || terms->empty())
      fail(r.source(), pointer, "trig potential needs a nonempty \"terms\" array");
    std::vector<TrigTerm> parsed;
    int idx = 0;
    for (const json& term : *terms) {
      const std::string tp = pointer + "/terms/" + std::to_string(idx++);
      const json* freq = r.find(term, tp, "freq");
      if (!freq || !freq->is_array() || freq->empty() || freq->size() > 3)
        fail(r.source(), tp, "term needs \"freq\" with 1 to 3 integer entries");
      TrigTerm t;
      for (std::size_t i = 0; i < freq->size(); ++i)
        t.freq[i] = static_cast<int>(r.integer((*freq)[i], tp + "/freq"));
      t.cos_coeff = r.number_or(term, tp, "cos", 0.0);
      t.sin_coeff = r.number_or(term, tp, "sin", 0.0);
      parsed.push_back(t);
    }
    return Potential::trig(std::move(parsed));
  }
  if (kind == "affine") {
    const json* base = r.find(j, pointer, "base");
    const json* dir = r.find(j, pointer, "direction");
    if (!base || !dir) fail(r.source(), pointer, "affine potential needs \"base\" and \"direction\"");
    const double t = r.number_or(j, pointer, "t", 1.0);
    return Potential::affine(parse_potential(r, *base, pointer + "/base"),
                             parse_potential(r, *dir, pointer + "/direction"), t);
  }
  fail(r.source(), pointer + "/kind",
       "unknown kind (expected constant, trig, geometric, or affine)");
}

void parse_estimator(const Reader& r, const json& j, const std::string& pointer,
                     SeparationParams& p) {
  p.delta = r.number_or(j, pointer, "delta", p.delta);
  if (const json* e = r.find(j, pointer, "eps_list")) {
    if (!e->is_array() || e->empty()) fail(r.source(), pointer + "/eps_list", "expected an array");
    p.eps_list.clear();
    for (const json& v : *e) p.eps_list.push_back(r.number(v, pointer + "/eps_list"));
  }
  p.n_min = static_cast<int>(r.integer_or(j, pointer, "n_min", p.n_min));
  p.n_max = static_cast<int>(r.integer_or(j, pointer, "n_max", p.n_max));
  p.offsets = static_cast<int>(r.integer_or(j, pointer, "offsets", p.offsets));
  p.base_point_count =
      static_cast<int>(r.integer_or(j, pointer, "base_points", p.base_point_count));
  p.seed = static_cast<std::uint64_t>(r.integer_or(j, pointer, "seed", 1));
  p.resolution = r.number_or(j, pointer, "resolution", p.resolution);
  p.plateau_tol = r.number_or(j, pointer, "plateau_tol", p.plateau_tol);
  p.leaf_depth = static_cast<int>(r.integer_or(j, pointer, "leaf_depth", p.leaf_depth));
  p.threads = static_cast<int>(r.integer_or(j, pointer, "threads", p.threads));
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    fail(r.source(), pointer, e.what());
  }
}

SftSpec parse_sft(const Reader& r, const json& j, const std::string& pointer) {
  const json* trans = r.find(j, pointer, "transition");
  if (!trans || !trans->is_array() || trans->empty())
    fail(r.source(), pointer, "oracle block needs a \"transition\" matrix");
  const int k = static_cast<int>(trans->size());
  Matrix m = Matrix::zero(k);
  for (int i = 0; i < k; ++i) {
    const json& row = (*trans)[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != k)
      fail(r.source(), pointer + "/transition", "matrix must be square");
    for (int c = 0; c < k; ++c)
      m(i, c) = r.number(row[static_cast<std::size_t>(c)], pointer + "/transition");
  }
  SftSpec sft;
  sft.transition = m;
  sft.site_potential.assign(static_cast<std::size_t>(k), 0.0);
  if (const json* pot = r.find(j, pointer, "site_potential")) {
    if (!pot->is_array() || static_cast<int>(pot->size()) != k)
      fail(r.source(), pointer + "/site_potential", "length must match the symbol count");
    for (int i = 0; i < k; ++i)
      sft.site_potential[static_cast<std::size_t>(i)] =
          r.number((*pot)[static_cast<std::size_t>(i)], pointer + "/site_potential");
  }
  try {
    sft.validate();
  } catch (const std::invalid_argument& e) {
    fail(r.source(), pointer, e.what());
  }
  return sft;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& source_name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source_name + ":" + std::to_string(line_of_byte(text, e.byte)) + ": " +
                      e.what());
  }
  Reader r(j, source_name);
  if (!j.is_object()) fail(source_name, "/", "top level must be an object");

  RunConfig cfg;
  cfg.config_hash = hash_hex(fnv1a64(text));

  if (const json* sys = r.find(j, "/", "system")) cfg.system = parse_system(r, *sys, "/system");
  if (const json* pots = r.find(j, "/", "potentials")) {
    if (!pots->is_array()) fail(source_name, "/potentials", "expected an array");
    int idx = 0;
    for (const json& p : *pots)
      cfg.potentials.push_back(parse_potential(r, p, "/potentials/" + std::to_string(idx++)));
  }
  if (const json* est = r.find(j, "/", "estimator")) parse_estimator(r, *est, "/estimator", cfg.estimator);
  if (const json* meas = r.find(j, "/", "measure")) {
    cfg.measure.orbit_length = r.integer_or(*meas, "/measure", "orbit_length", cfg.measure.orbit_length);
    cfg.measure.burn_in = r.integer_or(*meas, "/measure", "burn_in", cfg.measure.burn_in);
    if (cfg.measure.orbit_length < 10000)
      fail(source_name, "/measure/orbit_length", "must be >= 10000");
    if (cfg.measure.burn_in < 0) fail(source_name, "/measure/burn_in", "must be >= 0");
  }
  if (const json* d = r.find(j, "/", "derivative")) {
    cfg.derivative.base_index = static_cast<int>(r.integer_or(*d, "/derivative", "base", 0));
    cfg.derivative.direction_index =
        static_cast<int>(r.integer_or(*d, "/derivative", "direction", 1));
    if (const json* grid = r.find(*d, "/derivative", "t_grid")) {
      if (!grid->is_array()) fail(source_name, "/derivative/t_grid", "expected an array");
      cfg.derivative.t_grid.clear();
      for (const json& v : *grid) cfg.derivative.t_grid.push_back(r.number(v, "/derivative/t_grid"));
    }
  }
  if (const json* o = r.find(j, "/", "oracle")) cfg.sft = parse_sft(r, *o, "/oracle");
  if (const json* out = r.find(j, "/", "output")) {
    if (const json* dir = r.find(*out, "/output", "directory"))
      cfg.output.directory = r.text(*dir, "/output/directory");
    if (const json* formats = r.find(*out, "/output", "formats")) {
      if (!formats->is_array()) fail(source_name, "/output/formats", "expected an array");
      cfg.output.csv = false;
      cfg.output.json = false;
      for (const json& f : *formats) {
        const std::string name = r.text(f, "/output/formats");
        if (name == "csv") cfg.output.csv = true;
        else if (name == "json") cfg.output.json = true;
        else fail(source_name, "/output/formats", "unknown format \"" + name + "\"");
      }
    }
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace upress
