#include "qmetro/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qmetro {

using json = nlohmann::ordered_json;

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Evolve: return "evolve";
    case Experiment::Qfi: return "qfi";
    case Experiment::Nonmarkov: return "nonmarkov";
    case Experiment::Steady: return "steady";
    case Experiment::FiCompare: return "fi-compare";
    case Experiment::Coherence: return "coherence";
    case Experiment::Sweep: return "sweep";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::Evolve, Experiment::Qfi, Experiment::Nonmarkov,
                       Experiment::Steady, Experiment::FiCompare, Experiment::Coherence,
                       Experiment::Sweep})
    if (to_string(e) == name) return e;
  return std::nullopt;
}

TimeGrid GridSpec::build() const {
  const Spacing s = spacing.value_or(horizon > 1e3 ? Spacing::Log : Spacing::Linear);
  return s == Spacing::Log ? log_grid(horizon, points, t_min) : linear_grid(horizon, points);
}

Mat2 QubitSpec::matrix(const SystemParams& p) const {
  switch (kind) {
    case Kind::Ground: return states::ground();
    case Kind::Excited: return states::excited();
    case Kind::Plus: return states::plus();
    case Kind::Minus: return states::minus();
    case Kind::Thermal: {
      const double n = thermal_occupation(p.omega_a, p.temperature).n_th;
      Mat2 m = Mat2::Zero();
      m(0, 0) = n / (2.0 * n + 1.0);
      m(1, 1) = (n + 1.0) / (2.0 * n + 1.0);
      return m;
    }
    case Kind::Bloch: {
      const Mat2 m = density_from_bloch(bloch).matrix();
      return m;
    }
  }
  fail(ErrorCode::Internal, "unknown qubit state kind");
}

std::string QubitSpec::name() const {
  switch (kind) {
    case Kind::Ground: return "ground";
    case Kind::Excited: return "excited";
    case Kind::Plus: return "plus";
    case Kind::Minus: return "minus";
    case Kind::Thermal: return "thermal";
    case Kind::Bloch: return "bloch";
  }
  return "?";
}

DensityMatrix InitialSpec::state(const SystemParams& p) const {
  return product_state(probe.matrix(p), ancilla.matrix(p));
}

namespace {

const std::vector<std::string> kParamFields = {"omega_p", "omega_a", "g", "gamma",
                                               "temperature", "interaction"};

bool is_param_field(const std::string& f) {
  return std::find(kParamFields.begin(), kParamFields.end(), f) != kParamFields.end();
}

}  // namespace

void apply_sweep_value(SystemParams& p, const std::string& field, const SweepValue& v) {
  if (field == "interaction") {
    if (!std::holds_alternative<InteractionKind>(v))
      fail(ErrorCode::Config, "sweep over 'interaction' needs interaction names");
    p.interaction = std::get<InteractionKind>(v);
    return;
  }
  if (!std::holds_alternative<double>(v))
    fail(ErrorCode::Config, "sweep over '" + field + "' needs numbers");
  const double x = std::get<double>(v);
  if (field == "omega_p") p.omega_p = x;
  else if (field == "omega_a") p.omega_a = x;
  else if (field == "g") p.g = x;
  else if (field == "gamma") p.gamma = x;
  else if (field == "temperature") p.temperature = x;
  else fail(ErrorCode::Config, "sweep field '" + field + "' is not a SystemParams field");
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  void mark_override(const std::string& path) { overridden_.insert(path); }

  [[noreturn]] void error(const std::string& path, const std::string& message) const {
    std::ostringstream os;
    os << "config: " << message << " at '" << path << "'" << where(path);
    fail(ErrorCode::Config, os.str());
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) error(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
      const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                  [&](const char* a) { return key == a; });
      if (!ok) {
        std::ostringstream os;
        os << "config: unknown key '" << join(path, key) << "'" << where(join(path, key));
        fail(ErrorCode::Config, os.str());
      }
    }
  }

  double number(const json& obj, const std::string& path, const char* key, double fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) error(join(path, key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) error(join(path, key), "expected a finite number");
    return x;
  }

  std::size_t count(const json& obj, const std::string& path, const char* key,
                    std::size_t fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_number_integer() && v.get<long long>() >= 0)
      return static_cast<std::size_t>(v.get<long long>());
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (x >= 0.0 && x == std::floor(x) && x < 1e15) return static_cast<std::size_t>(x);
    }
    error(join(path, key), "expected a non-negative integer");
  }

  std::string string(const json& obj, const std::string& path, const char* key,
                     const std::string& fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) error(join(path, key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) error(join(path, key), "expected true or false");
    return v.get<bool>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::string where(const std::string& path) const {
    for (const std::string& o : overridden_)
      if (path == o || path.rfind(o + ".", 0) == 0 || o.rfind(path + ".", 0) == 0)
        return " (from --param)";
    const std::size_t dot = path.find_last_of('.');
    const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
    const std::string quoted = "\"" + key + "\"";
    const std::size_t pos = text_.find(quoted);
    if (pos == std::string_view::npos) return "";
    const auto line = 1 + std::count(text_.begin(), text_.begin() + static_cast<long>(pos), '\n');
    return " (line " + std::to_string(line) + ")";
  }

  std::string_view text_;
  std::set<std::string> overridden_;
};

void apply_override(json& doc, const std::string& spec, Reader& reader) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    fail(ErrorCode::Config, "config: --param expects key=value, got '" + spec + "'");
  std::string key = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);
  if (key.find('.') == std::string::npos && is_param_field(key)) key = "params." + key;

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }

  json* node = &doc;
  std::string path;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos
                                                                        : dot - start);
    if (part.empty()) fail(ErrorCode::Config, "config: malformed --param key '" + key + "'");
    path = Reader::join(path, part);
    if (!node->is_object())
      fail(ErrorCode::Config, "config: --param '" + key + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    if (!node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
  reader.mark_override(key);
}

InteractionKind interaction_from(const json& v, const std::string& path, const Reader& r) {
  if (!v.is_string()) r.error(path, "expected an interaction name");
  const auto kind = parse_interaction(v.get<std::string>());
  if (!kind) r.error(path, "unknown interaction '" + v.get<std::string>() + "' (XX, XXplusZX, ZX, XZ)");
  return *kind;
}

void check_param_value(const std::string& field, double x, const std::string& path,
                       const Reader& r) {
  if (field == "g") {
    if (x < 0.0) r.error(path, "g must be >= 0");
  } else if (!(x > 0.0)) {
    r.error(path, field + " must be > 0");
  }
}

SystemParams read_params(const json& doc, const Reader& r) {
  SystemParams p;
  if (!doc.contains("params")) return p;
  const json& o = doc.at("params");
  r.check_keys(o, "params",
               {"omega_p", "omega_a", "g", "gamma", "temperature", "interaction"});
  p.omega_p = r.number(o, "params", "omega_p", p.omega_p);
  p.omega_a = r.number(o, "params", "omega_a", p.omega_a);
  p.g = r.number(o, "params", "g", p.g);
  p.gamma = r.number(o, "params", "gamma", p.gamma);
  p.temperature = r.number(o, "params", "temperature", p.temperature);
  if (o.contains("interaction")) p.interaction = interaction_from(o.at("interaction"), "params.interaction", r);
  check_param_value("omega_p", p.omega_p, "params.omega_p", r);
  check_param_value("omega_a", p.omega_a, "params.omega_a", r);
  check_param_value("g", p.g, "params.g", r);
  check_param_value("gamma", p.gamma, "params.gamma", r);
  check_param_value("temperature", p.temperature, "params.temperature", r);
  return p;
}

GridSpec read_grid(const json& doc, const Reader& r) {
  GridSpec g;
  if (!doc.contains("grid")) return g;
  const json& o = doc.at("grid");
  r.check_keys(o, "grid", {"horizon", "points", "spacing", "t_min"});
  g.horizon = r.number(o, "grid", "horizon", g.horizon);
  g.points = r.count(o, "grid", "points", g.points);
  g.t_min = r.number(o, "grid", "t_min", g.t_min);
  if (o.contains("spacing")) {
    const std::string s = r.string(o, "grid", "spacing", "");
    if (s == "linear") g.spacing = Spacing::Linear;
    else if (s == "log") g.spacing = Spacing::Log;
    else r.error("grid.spacing", "expected 'linear' or 'log'");
  }
  if (!(g.horizon > 0.0)) r.error("grid.horizon", "horizon must be > 0");
  if (g.points < 2) r.error("grid.points", "points must be >= 2");
  const Spacing s = g.spacing.value_or(g.horizon > 1e3 ? Spacing::Log : Spacing::Linear);
  if (s == Spacing::Log) {
    if (g.points < 3) r.error("grid.points", "a log grid needs points >= 3");
    if (!(g.t_min > 0.0) || !(g.t_min < g.horizon))
      r.error("grid.t_min", "a log grid needs 0 < t_min < horizon");
  }
  return g;
}

QubitSpec read_qubit(const json& o, const std::string& path, const Reader& r) {
  QubitSpec q;
  if (o.is_string()) {
    const std::string s = o.get<std::string>();
    if (s == "ground") q.kind = QubitSpec::Kind::Ground;
    else if (s == "excited") q.kind = QubitSpec::Kind::Excited;
    else if (s == "plus") q.kind = QubitSpec::Kind::Plus;
    else if (s == "minus") q.kind = QubitSpec::Kind::Minus;
    else if (s == "thermal") q.kind = QubitSpec::Kind::Thermal;
    else r.error(path, "unknown state '" + s + "' (ground, excited, plus, minus, thermal, {\"bloch\": [x, y, z]})");
    return q;
  }
  r.check_keys(o, path, {"bloch"});
  const json& v = o.contains("bloch") ? o.at("bloch") : json();
  if (!v.is_array() || v.size() != 3 || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); }))
    r.error(Reader::join(path, "bloch"), "expected three numbers");
  q.kind = QubitSpec::Kind::Bloch;
  q.bloch = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  if (!(q.bloch.norm() <= 1.0 + 1e-10)) r.error(Reader::join(path, "bloch"), "Bloch vector longer than 1");
  return q;
}

InitialSpec read_initial(const json& doc, const Reader& r) {
  InitialSpec s;
  if (!doc.contains("initial")) return s;
  const json& o = doc.at("initial");
  r.check_keys(o, "initial", {"probe", "ancilla"});
  if (o.contains("probe")) s.probe = read_qubit(o.at("probe"), "initial.probe", r);
  if (o.contains("ancilla")) s.ancilla = read_qubit(o.at("ancilla"), "initial.ancilla", r);
  return s;
}

std::vector<SweepAxis> read_sweep(const json& doc, const Reader& r,
                                  std::optional<Experiment>& child) {
  std::vector<SweepAxis> axes;
  if (!doc.contains("sweep")) return axes;
  const json& s = doc.at("sweep");
  std::vector<const json*> items;
  if (s.is_array())
    for (const json& e : s) items.push_back(&e);
  else
    items.push_back(&s);
  if (items.empty()) r.error("sweep", "expected at least one sweep axis");

  for (std::size_t i = 0; i < items.size(); ++i) {
    const json& o = *items[i];
    const std::string path = s.is_array() ? "sweep[" + std::to_string(i) + "]" : "sweep";
    r.check_keys(o, path, {"field", "values", "experiment"});
    SweepAxis axis;
    axis.field = r.string(o, path, "field", "");
    if (!is_param_field(axis.field))
      r.error(Reader::join(path, "field"), "'" + axis.field + "' is not a SystemParams field");
    if (o.contains("experiment")) {
      const auto e = parse_experiment(r.string(o, path, "experiment", ""));
      if (!e || *e == Experiment::Sweep)
        r.error(Reader::join(path, "experiment"), "expected the experiment run at each point");
      if (child && *child != *e) r.error(Reader::join(path, "experiment"), "conflicting sweep experiments");
      child = e;
    }
    if (!o.contains("values") || !o.at("values").is_array() || o.at("values").empty())
      r.error(Reader::join(path, "values"), "expected a non-empty list");
    for (const json& v : o.at("values")) {
      const std::string vpath = Reader::join(path, "values");
      if (axis.field == "interaction") {
        axis.values.emplace_back(interaction_from(v, vpath, r));
      } else {
        if (!v.is_number() || !std::isfinite(v.get<double>())) r.error(vpath, "expected finite numbers");
        const double x = v.get<double>();
        check_param_value(axis.field, x, vpath, r);
        axis.values.emplace_back(x);
      }
    }
    for (const SweepAxis& prev : axes)
      if (prev.field == axis.field) r.error(Reader::join(path, "field"), "field swept twice");
    axes.push_back(std::move(axis));
  }
  return axes;
}

json echo_qubit(const QubitSpec& q) {
  if (q.kind != QubitSpec::Kind::Bloch) return q.name();
  return json{{"bloch", {q.bloch.x, q.bloch.y, q.bloch.z}}};
}

std::string echo(const ExperimentConfig& c) {
  json j;
  j["experiment"] = std::string(to_string(c.experiment));
  if (c.experiment == Experiment::Sweep) j["child"] = std::string(to_string(c.child));
  j["params"] = {{"omega_p", c.params.omega_p},     {"omega_a", c.params.omega_a},
                 {"g", c.params.g},                 {"gamma", c.params.gamma},
                 {"temperature", c.params.temperature},
                 {"interaction", std::string(to_string(c.params.interaction))}};
  j["target"] = std::string(to_string(c.target));
  json subs = json::array();
  for (Subsystem s : c.subsystems) subs.push_back(std::string(to_string(s)));
  j["subsystems"] = subs;
  const Spacing sp = c.grid.spacing.value_or(c.grid.horizon > 1e3 ? Spacing::Log : Spacing::Linear);
  j["grid"] = {{"horizon", c.grid.horizon},
               {"points", c.grid.points},
               {"spacing", sp == Spacing::Log ? "log" : "linear"},
               {"t_min", c.grid.t_min}};
  j["initial"] = {{"probe", echo_qubit(c.initial.probe)}, {"ancilla", echo_qubit(c.initial.ancilla)}};
  json sweep = json::array();
  for (const SweepAxis& a : c.sweep) {
    json values = json::array();
    for (const SweepValue& v : a.values) {
      if (std::holds_alternative<double>(v))
        values.push_back(std::get<double>(v));
      else
        values.push_back(std::string(to_string(std::get<InteractionKind>(v))));
    }
    sweep.push_back({{"field", a.field}, {"values", values}});
  }
  j["sweep"] = sweep;
  const SaturationOptions& s = c.saturation;
  j["nonmarkov"] = {{"mode", c.saturate ? "saturate" : "grid"},
                    {"step", s.step},
                    {"tail_relative", s.tail_relative},
                    {"max_horizon", s.max_horizon},
                    {"check_every", s.check_every},
                    {"extend_factor", s.extend_factor},
                    {"extend_points", s.extend_points},
                    {"output_points", s.output_points},
                    {"maximize_pair", s.maximize_pair},
                    {"pair_polar", s.pair_polar},
                    {"pair_azimuth", s.pair_azimuth}};
  j["steady"] = {{"method", std::string(to_string(c.steady_method))}};
  j["derivative"] = {{"relative_step", c.derivative.relative_step},
                     {"step_floor", c.derivative.step_floor},
                     {"richardson_tolerance", c.derivative.richardson_tolerance},
                     {"noise_floor", c.derivative.noise_floor},
                     {"strict", c.derivative.strict}};
  j["output"] = c.output;
  return j.dump(2);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides,
                              std::optional<std::string_view> experiment) {
  Reader r(text);
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n');
    std::ostringstream os;
    os << "config: malformed JSON near line " << line << ": " << e.what();
    fail(ErrorCode::Config, os.str());
  }
  if (!doc.is_object()) fail(ErrorCode::Config, "config: top level must be a JSON object");
  for (const std::string& o : overrides) apply_override(doc, o, r);

  r.check_keys(doc, "",
               {"experiment", "params", "target", "subsystems", "grid", "initial", "sweep",
                "nonmarkov", "steady", "derivative", "output"});

  ExperimentConfig c;
  std::string exp_name = r.string(doc, "", "experiment", "");
  if (experiment) exp_name = std::string(*experiment);
  if (exp_name.empty()) fail(ErrorCode::Config, "config: no experiment given");
  const auto exp = parse_experiment(exp_name);
  if (!exp) {
    std::ostringstream os;
    os << "config: unknown experiment '" << exp_name
       << "' (evolve, qfi, nonmarkov, steady, fi-compare, coherence, sweep)";
    fail(ErrorCode::Config, os.str());
  }

  c.params = read_params(doc, r);
  try {
    c.params.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Config, std::string("config: ") + e.what());
  }

  if (doc.contains("target")) {
    const auto t = parse_target(r.string(doc, "", "target", ""));
    if (!t) r.error("target", "expected temperature, omega_a or gamma");
    c.target = *t;
  }
  if (doc.contains("subsystems")) {
    const json& s = doc.at("subsystems");
    std::vector<json> items;
    if (s.is_array())
      items.assign(s.begin(), s.end());
    else
      items.push_back(s);
    c.subsystems.clear();
    for (const json& v : items) {
      const auto sub = v.is_string() ? parse_subsystem(v.get<std::string>()) : std::nullopt;
      if (!sub) r.error("subsystems", "expected probe, ancilla or full");
      if (std::find(c.subsystems.begin(), c.subsystems.end(), *sub) == c.subsystems.end())
        c.subsystems.push_back(*sub);
    }
    if (c.subsystems.empty()) r.error("subsystems", "expected at least one subsystem");
  }

  c.grid = read_grid(doc, r);
  c.initial = read_initial(doc, r);

  std::optional<Experiment> child;
  c.sweep = read_sweep(doc, r, child);
  if (*exp == Experiment::Sweep) {
    if (c.sweep.empty()) r.error("sweep", "experiment 'sweep' needs a sweep specification");
    if (!child) r.error("sweep.experiment", "experiment 'sweep' needs the experiment run per point");
    c.experiment = Experiment::Sweep;
    c.child = *child;
  } else if (!c.sweep.empty()) {
    if (child && *child != *exp) r.error("sweep.experiment", "differs from the top-level experiment");
    c.experiment = Experiment::Sweep;
    c.child = *exp;
  } else {
    c.experiment = *exp;
    c.child = *exp;
  }

  if (doc.contains("nonmarkov")) {
    const json& o = doc.at("nonmarkov");
    const std::string path = "nonmarkov";
    r.check_keys(o, path,
                 {"mode", "step", "tail_relative", "max_horizon", "check_every", "extend_factor",
                  "extend_points", "output_points", "maximize_pair", "pair_polar", "pair_azimuth"});
    const std::string mode = r.string(o, path, "mode", "saturate");
    if (mode != "saturate" && mode != "grid") r.error("nonmarkov.mode", "expected 'saturate' or 'grid'");
    c.saturate = mode == "saturate";
    SaturationOptions& s = c.saturation;
    s.step = r.number(o, path, "step", s.step);
    s.tail_relative = r.number(o, path, "tail_relative", s.tail_relative);
    s.max_horizon = r.number(o, path, "max_horizon", s.max_horizon);
    s.check_every = r.count(o, path, "check_every", s.check_every);
    s.extend_factor = r.number(o, path, "extend_factor", s.extend_factor);
    s.extend_points = r.count(o, path, "extend_points", s.extend_points);
    s.output_points = r.count(o, path, "output_points", s.output_points);
    s.maximize_pair = r.boolean(o, path, "maximize_pair", s.maximize_pair);
    s.pair_polar = r.count(o, path, "pair_polar", s.pair_polar);
    s.pair_azimuth = r.count(o, path, "pair_azimuth", s.pair_azimuth);
    if (!(s.step > 0.0)) r.error("nonmarkov.step", "step must be > 0");
    if (!(s.tail_relative > 0.0)) r.error("nonmarkov.tail_relative", "must be > 0");
    if (!(s.max_horizon > s.step)) r.error("nonmarkov.max_horizon", "must exceed the step");
    if (s.check_every == 0) r.error("nonmarkov.check_every", "must be >= 1");
    if (!(s.extend_factor >= 1.0)) r.error("nonmarkov.extend_factor", "must be >= 1");
    if (s.output_points < 4 || s.output_points <= s.extend_points + 2)
      r.error("nonmarkov.output_points", "must exceed extend_points + 2 and be >= 4");
  }

  if (doc.contains("steady")) {
    const json& o = doc.at("steady");
    r.check_keys(o, "steady", {"method"});
    const std::string m = r.string(o, "steady", "method", "automatic");
    if (m == "automatic") c.steady_method = SteadyDerivativeMethod::Automatic;
    else if (m == "finite-difference") c.steady_method = SteadyDerivativeMethod::FiniteDifference;
    else if (m == "linear-response") c.steady_method = SteadyDerivativeMethod::LinearResponse;
    else r.error("steady.method", "expected automatic, finite-difference or linear-response");
  }

  if (doc.contains("derivative")) {
    const json& o = doc.at("derivative");
    const std::string path = "derivative";
    r.check_keys(o, path, {"relative_step", "step_floor", "richardson_tolerance", "noise_floor", "strict"});
    DerivativeOptions& d = c.derivative;
    d.relative_step = r.number(o, path, "relative_step", d.relative_step);
    d.step_floor = r.number(o, path, "step_floor", d.step_floor);
    d.richardson_tolerance = r.number(o, path, "richardson_tolerance", d.richardson_tolerance);
    d.noise_floor = r.number(o, path, "noise_floor", d.noise_floor);
    d.strict = r.boolean(o, path, "strict", d.strict);
    if (!(d.relative_step > 0.0)) r.error("derivative.relative_step", "must be > 0");
    if (!(d.step_floor > 0.0)) r.error("derivative.step_floor", "must be > 0");
    if (!(d.richardson_tolerance > 0.0)) r.error("derivative.richardson_tolerance", "must be > 0");
    if (!(d.noise_floor > 0.0)) r.error("derivative.noise_floor", "must be > 0");
  }

  const std::string fallback = c.experiment == Experiment::Sweep
                                   ? std::string(to_string(c.child)) + "-sweep.csv"
                                   : std::string(to_string(c.experiment)) + ".csv";
  c.output = r.string(doc, "", "output", fallback);
  if (c.output.empty()) r.error("output", "output path is empty");

  c.echo = echo(c);
  return c;
}

}  // namespace qmetro
