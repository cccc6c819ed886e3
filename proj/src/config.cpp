#include "drivetherm/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include <limits>

namespace drivetherm {

using nlohmann::json;

// ---------------------------------------------------------------- operators

HermitianOperator build_operator(const OperatorSpec& spec) {
  if (const auto* q = std::get_if<QubitSpec>(&spec)) return (0.5 * q->omega) * pauli::z();
  if (const auto* p = std::get_if<PauliSpec>(&spec)) {
    switch (p->axis) {
      case 'x': return p->scale * pauli::x();
      case 'y': return p->scale * pauli::y();
      case 'z': return p->scale * pauli::z();
    }
    throw DomainError(std::string("unknown Pauli axis '") + p->axis + "'");
  }
  if (const auto* d = std::get_if<DiagonalSpec>(&spec)) {
    return HermitianOperator::diagonal(Eigen::Map<const VectorXr>(d->values.data(), Index(d->values.size())));
  }
  const auto& dense = std::get<DenseSpec>(spec);
  const Index n = Index(dense.re.size());
  if (!dense.im.empty() && Index(dense.im.size()) != n) throw DomainError("dense operator: re and im differ in size");
  MatrixXc m(n, n);
  for (Index i = 0; i < n; ++i) {
    if (Index(dense.re[i].size()) != n) throw DomainError("dense operator must be square");
    if (!dense.im.empty() && Index(dense.im[i].size()) != n) throw DomainError("dense operator must be square");
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(dense.re[i][j], dense.im.empty() ? 0.0 : dense.im[i][j]);
  }
  // silent symmetrization would change the physics; only round-off is tolerated
  const double defect = (m - m.adjoint()).norm();
  if (defect > 1e-12 * std::max(1.0, m.norm())) {
    throw DomainError("dense operator is not Hermitian (defect " + std::to_string(defect) + ")");
  }
  return HermitianOperator(m);
}

Index operator_dim(const OperatorSpec& spec) {
  if (std::holds_alternative<QubitSpec>(spec) || std::holds_alternative<PauliSpec>(spec)) return 2;
  if (const auto* d = std::get_if<DiagonalSpec>(&spec)) return Index(d->values.size());
  return Index(std::get<DenseSpec>(spec).re.size());
}

// ---------------------------------------------------------------- equality

namespace {

bool same_table(const MonotoneCubic& a, const MonotoneCubic& b) {
  return a.abscissae() == b.abscissae() && a.values() == b.values();
}

bool same_envelope(const Envelope& a, const Envelope& b) {
  if (a.index() != b.index()) return false;
  if (const auto* g = std::get_if<GaussianEnvelope>(&a)) {
    const auto& h = std::get<GaussianEnvelope>(b);
    return g->beta0 == h.beta0 && g->s_beta == h.s_beta;
  }
  if (const auto* t = std::get_if<TabulatedEnvelope>(&a)) return same_table(t->table, std::get<TabulatedEnvelope>(b).table);
  return true;
}

bool same_modulation(const Modulation& a, const Modulation& b) {
  if (a.index() != b.index()) return false;
  if (const auto* c = std::get_if<CosineModulation>(&a)) {
    const auto& d = std::get<CosineModulation>(b);
    return c->omega_d == d.omega_d && c->phi == d.phi;
  }
  if (const auto* t = std::get_if<TabulatedModulation>(&a)) return same_table(t->table, std::get<TabulatedModulation>(b).table);
  return true;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return model == o.model && drive.lambda0 == o.drive.lambda0 && same_envelope(drive.envelope, o.drive.envelope) &&
         same_modulation(drive.temporal, o.drive.temporal) && grid == o.grid && scan == o.scan &&
         n_measurements == o.n_measurements && output == o.output && seed == o.seed && tolerances == o.tolerances;
}

// ---------------------------------------------------------------- YAML

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) { throw ConfigError(msg, line_of(n)); }

double get_double(const YAML::Node& n, const std::string& what) {
  if (!n || !n.IsScalar()) fail(n, what + ": expected a number");
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail(n, what + ": '" + n.Scalar() + "' is not a number");
  }
}

std::vector<double> get_vector(const YAML::Node& n, const std::string& what) {
  if (!n || !n.IsSequence()) fail(n, what + ": expected a list of numbers");
  std::vector<double> out;
  for (const auto& e : n) out.push_back(get_double(e, what));
  return out;
}

std::vector<std::vector<double>> get_matrix(const YAML::Node& n, const std::string& what) {
  if (!n || !n.IsSequence()) fail(n, what + ": expected a list of rows");
  std::vector<std::vector<double>> out;
  for (const auto& row : n) out.push_back(get_vector(row, what));
  return out;
}

bool is_word(const YAML::Node& n, const char* word) { return n && n.IsScalar() && n.Scalar() == word; }

void check_keys(const YAML::Node& n, std::initializer_list<const char*> allowed, const std::string& section) {
  if (!n.IsMap()) fail(n, section + ": expected a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(kv.first, section + ": unknown key '" + key + "'");
  }
}

OperatorSpec parse_operator(const YAML::Node& n, const std::string& what) {
  if (!n) fail(n, what + ": missing");
  if (n.IsScalar()) {
    const auto s = n.Scalar();
    if (s == "sigma_x" || s == "sigma_y" || s == "sigma_z") return PauliSpec{s.back(), 1.0};
    fail(n, what + ": unknown operator '" + s + "'");
  }
  if (!n.IsMap() || n.size() != 1) fail(n, what + ": expected one of qubit, pauli, diagonal, dense");
  const auto key = n.begin()->first.as<std::string>();
  const YAML::Node body = n.begin()->second;
  if (key == "qubit") {
    check_keys(body, {"omega"}, what + ".qubit");
    const double omega = get_double(body["omega"], what + ".qubit.omega");
    if (!(omega > 0)) fail(body["omega"], what + ".qubit.omega must be positive");
    return QubitSpec{omega};
  }
  if (key == "pauli") {
    check_keys(body, {"axis", "scale"}, what + ".pauli");
    const auto axis = body["axis"] ? body["axis"].as<std::string>() : std::string("x");
    if (axis != "x" && axis != "y" && axis != "z") fail(body["axis"], what + ".pauli.axis must be x, y or z");
    return PauliSpec{axis[0], body["scale"] ? get_double(body["scale"], what + ".pauli.scale") : 1.0};
  }
  if (key == "diagonal") {
    auto v = get_vector(body, what + ".diagonal");
    if (v.empty()) fail(body, what + ".diagonal is empty");
    return DiagonalSpec{std::move(v)};
  }
  if (key == "dense") {
    check_keys(body, {"re", "im"}, what + ".dense");
    DenseSpec d{get_matrix(body["re"], what + ".dense.re"), {}};
    if (body["im"]) d.im = get_matrix(body["im"], what + ".dense.im");
    const std::size_t n_rows = d.re.size();
    if (n_rows == 0) fail(body, what + ".dense is empty");
    for (const auto& r : d.re)
      if (r.size() != n_rows) fail(body["re"], what + ".dense.re must be square");
    if (!d.im.empty()) {
      if (d.im.size() != n_rows) fail(body["im"], what + ".dense.im must match re");
      for (const auto& r : d.im)
        if (r.size() != n_rows) fail(body["im"], what + ".dense.im must match re");
    }
    return d;
  }
  fail(n, what + ": unknown operator form '" + key + "'");
}

MonotoneCubic parse_table(const YAML::Node& body, const char* x_key, const std::string& what) {
  try {
    return MonotoneCubic(get_vector(body[x_key], what + "." + x_key), get_vector(body["value"], what + ".value"));
  } catch (const DomainError& e) {
    fail(body, what + ": " + e.what());
  }
}

std::vector<double> parse_axis_values(const YAML::Node& n) {
  if (n && n.IsMap()) {
    check_keys(n, {"start", "stop", "count"}, "scan.values");
    const double start = get_double(n["start"], "scan.values.start");
    const double stop = get_double(n["stop"], "scan.values.stop");
    const double count = get_double(n["count"], "scan.values.count");
    if (count < 1 || count != std::floor(count)) fail(n["count"], "scan.values.count must be a positive integer");
    std::vector<double> v(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = v.size() == 1 ? start : start + (stop - start) * double(i) / double(v.size() - 1);
    return v;
  }
  return get_vector(n, "scan.values");
}

struct RawDrive {
  YAML::Node beta0_node, s_beta_node;
  bool sample_beta0 = false;
  bool auto_s_beta = false;
};

}  // namespace

void apply_tolerance_scale(ToleranceConfig& tol, double scale) {
  if (!(scale > 0) || !std::isfinite(scale)) throw ConfigError("tolerance scale must be positive");
  tol.scale *= scale;
  tol.unitarity *= scale;
  tol.rel_disagreement *= scale;
  tol.mixed_term *= scale;
  tol.increment_floor *= scale;
}

LoadedConfig parse_config(const std::string& yaml_text, double tolerance_scale) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string("malformed YAML: ") + e.msg, e.mark.line + 1);
  }
  if (!root || !root.IsMap()) throw ConfigError("configuration must be a mapping");
  check_keys(root, {"model", "drive", "grid", "scan", "estimation", "output", "seed", "tolerances"}, "config");

  LoadedConfig loaded;
  RunConfig& cfg = loaded.config;
  ResolvedDefaults& resolved = loaded.resolved;

  // tolerances first: the Gibbs guard depends on them
  ToleranceConfig& tol = cfg.tolerances;
  apply_tolerance_scale(tol, tolerance_scale);
  if (const auto t = root["tolerances"]) {
    check_keys(t, {"rank_floor", "beta_max", "unitarity", "rel_disagreement", "mixed_term", "increment_floor"},
               "tolerances");
    if (t["rank_floor"]) tol.rank_floor = get_double(t["rank_floor"], "tolerances.rank_floor");
    if (t["beta_max"]) tol.beta_max = get_double(t["beta_max"], "tolerances.beta_max");
    if (t["unitarity"]) tol.unitarity = get_double(t["unitarity"], "tolerances.unitarity");
    if (t["rel_disagreement"]) tol.rel_disagreement = get_double(t["rel_disagreement"], "tolerances.rel_disagreement");
    if (t["mixed_term"]) tol.mixed_term = get_double(t["mixed_term"], "tolerances.mixed_term");
    if (t["increment_floor"]) tol.increment_floor = get_double(t["increment_floor"], "tolerances.increment_floor");
  }

  // model
  const YAML::Node m = root["model"];
  if (!m) throw ConfigError("missing 'model' section");
  check_keys(m, {"dim", "H0", "V", "beta_star"}, "model");
  cfg.model.H0 = parse_operator(m["H0"], "model.H0");
  cfg.model.V = parse_operator(m["V"], "model.V");
  const Index d = operator_dim(cfg.model.H0);
  if (m["dim"]) {
    const double dim = get_double(m["dim"], "model.dim");
    if (dim != double(d)) fail(m["dim"], "model.dim does not match H0 (dimension " + std::to_string(d) + ")");
  } else {
    resolved["model.dim"] = d;
  }
  cfg.model.dim = d;
  if (d < 1 || d > kMaxDimension) fail(m["H0"], "model dimension must be in [1, 32]");
  if (operator_dim(cfg.model.V) != d) fail(m["V"], "model.V dimension differs from H0");
  cfg.model.beta_star = get_double(m["beta_star"], "model.beta_star");
  if (!(cfg.model.beta_star >= 0)) fail(m["beta_star"], "model.beta_star must be >= 0");

  auto build_at = [](const YAML::Node& n, const OperatorSpec& spec, const std::string& what) {
    try {
      return build_operator(spec);
    } catch (const DomainError& e) {
      fail(n, what + ": " + e.what());
    }
  };
  const HermitianOperator H0 = build_at(m["H0"], cfg.model.H0, "model.H0");
  build_at(m["V"], cfg.model.V, "model.V");
  GibbsModel gibbs;
  try {
    gibbs = make_gibbs(H0, cfg.model.beta_star, gibbs_options(cfg));
  } catch (const FullRankViolation& e) {
    fail(m["beta_star"], std::string("FullRankViolation: ") + e.what());
  }
  const double bandwidth = bohr_bandwidth(gibbs);

  // seed
  if (const auto s = root["seed"]) {
    if (!s.IsNull()) {
      try {
        cfg.seed = s.as<std::uint64_t>();
      } catch (const YAML::Exception&) {
        fail(s, "seed must be a non-negative integer");
      }
    }
  }

  // drive
  const YAML::Node dn = root["drive"];
  if (!dn) throw ConfigError("missing 'drive' section");
  check_keys(dn, {"lambda0", "envelope", "temporal"}, "drive");
  cfg.drive.lambda0 = dn["lambda0"] ? get_double(dn["lambda0"], "drive.lambda0") : 0.1;
  if (!dn["lambda0"]) resolved["drive.lambda0"] = cfg.drive.lambda0;

  const YAML::Node env = dn["envelope"];
  const std::string env_type = env && env["type"] ? env["type"].as<std::string>() : "gaussian";
  if (env_type == "gaussian") {
    if (env) check_keys(env, {"type", "beta0", "s_beta"}, "drive.envelope");
    GaussianEnvelope g;
    const YAML::Node s_node = env ? env["s_beta"] : YAML::Node();
    if (!s_node || is_word(s_node, "auto")) {
      g.s_beta = cramer_rao_width(equilibrium_qfi(gibbs));
      resolved["drive.envelope.s_beta"] = g.s_beta;
    } else {
      g.s_beta = get_double(s_node, "drive.envelope.s_beta");
      if (!(g.s_beta > 0)) fail(s_node, "drive.envelope.s_beta must be positive");
    }
    const YAML::Node b_node = env ? env["beta0"] : YAML::Node();
    if (!b_node) fail(env ? env : dn, "drive.envelope.beta0 is required (a number or 'sample')");
    if (is_word(b_node, "sample")) {
      if (!cfg.seed) fail(b_node, "drive.envelope.beta0: 'sample' needs a top-level seed");
      g.beta0 = sample_envelope_center(cfg.model.beta_star, equilibrium_qfi(gibbs), *cfg.seed);
      resolved["drive.envelope.beta0"] = g.beta0;
    } else {
      g.beta0 = get_double(b_node, "drive.envelope.beta0");
    }
    cfg.drive.envelope = g;
  } else if (env_type == "constant") {
    check_keys(env, {"type"}, "drive.envelope");
    cfg.drive.envelope = ConstantEnvelope{};
  } else if (env_type == "tabulated") {
    check_keys(env, {"type", "beta", "value"}, "drive.envelope");
    cfg.drive.envelope = TabulatedEnvelope{parse_table(env, "beta", "drive.envelope")};
  } else {
    fail(env["type"], "drive.envelope.type must be gaussian, constant or tabulated");
  }

  const YAML::Node tmp = dn["temporal"];
  const std::string tmp_type = tmp && tmp["type"] ? tmp["type"].as<std::string>() : "cosine";
  if (tmp_type == "cosine") {
    if (tmp) check_keys(tmp, {"type", "omega_d", "phi"}, "drive.temporal");
    CosineModulation c;
    c.omega_d = tmp && tmp["omega_d"] ? get_double(tmp["omega_d"], "drive.temporal.omega_d") : bandwidth;
    if (!(tmp && tmp["omega_d"])) resolved["drive.temporal.omega_d"] = c.omega_d;
    if (!(c.omega_d >= 0)) fail(tmp["omega_d"], "drive.temporal.omega_d must be >= 0");
    c.phi = tmp && tmp["phi"] ? get_double(tmp["phi"], "drive.temporal.phi") : 0.0;
    cfg.drive.temporal = c;
  } else if (tmp_type == "constant") {
    check_keys(tmp, {"type"}, "drive.temporal");
    cfg.drive.temporal = ConstantModulation{};
  } else if (tmp_type == "tabulated") {
    check_keys(tmp, {"type", "t", "value"}, "drive.temporal");
    cfg.drive.temporal = TabulatedModulation{parse_table(tmp, "t", "drive.temporal")};
  } else {
    fail(tmp["type"], "drive.temporal.type must be cosine, constant or tabulated");
  }

  // grid
  const YAML::Node g = root["grid"];
  if (!g) throw ConfigError("missing 'grid' section");
  check_keys(g, {"t_end", "periods", "n_steps"}, "grid");
  if (g["t_end"] && g["periods"]) fail(g, "grid: give either t_end or periods, not both");
  if (g["t_end"]) {
    cfg.grid.t_end = get_double(g["t_end"], "grid.t_end");
  } else if (g["periods"]) {
    if (!(bandwidth > 0)) fail(g["periods"], "grid.periods needs a non-degenerate H0");
    cfg.grid.t_end = get_double(g["periods"], "grid.periods") * 2.0 * std::numbers::pi / bandwidth;
    resolved["grid.t_end"] = cfg.grid.t_end;
  } else {
    fail(g, "grid.t_end is required");
  }
  if (!(cfg.grid.t_end >= 0) || !std::isfinite(cfg.grid.t_end)) fail(g, "grid.t_end must be finite and >= 0");
  if (g["n_steps"] && !is_word(g["n_steps"], "auto")) {
    const double n = get_double(g["n_steps"], "grid.n_steps");
    if (n < 1 || n != std::floor(n)) fail(g["n_steps"], "grid.n_steps must be a positive integer or 'auto'");
    cfg.grid.n_steps = static_cast<std::size_t>(n);
  } else {
    cfg.grid.n_steps = TimeGrid::auto_steps(cfg.grid.t_end, std::max(bandwidth, cfg.drive.modulation_frequency()));
    resolved["grid.n_steps"] = *cfg.grid.n_steps;
  }
  if (cfg.grid.t_end == 0.0) cfg.grid.n_steps = 0;

  const double tabulated_limit = [&] {
    if (const auto* t = std::get_if<TabulatedModulation>(&cfg.drive.temporal)) return t->table.back();
    return std::numeric_limits<double>::infinity();
  }();

  // scan
  if (const auto s = root["scan"]) {
    check_keys(s, {"axis", "values", "reduce"}, "scan");
    ScanConfig sc;
    const auto axis = s["axis"] ? s["axis"].as<std::string>() : std::string();
    if (axis == "frequency") sc.axis = ScanAxis::frequency;
    else if (axis == "temperature") sc.axis = ScanAxis::temperature;
    else if (axis == "time") sc.axis = ScanAxis::time;
    else fail(s["axis"] ? s["axis"] : s, "scan.axis must be frequency, temperature or time");
    sc.values = parse_axis_values(s["values"]);
    if (sc.values.empty()) fail(s["values"], "scan.values is empty");
    for (std::size_t i = 1; i < sc.values.size(); ++i)
      if (!(sc.values[i] > sc.values[i - 1])) fail(s["values"], "scan.values must be strictly increasing");
    if (sc.axis == ScanAxis::frequency && !std::holds_alternative<CosineModulation>(cfg.drive.temporal)) {
      fail(s["axis"], "a frequency scan needs drive.temporal.type = cosine");
    }
    if (sc.axis == ScanAxis::temperature) {
      for (double b : sc.values) {
        try {
          make_gibbs(H0, b, gibbs_options(cfg));
        } catch (const Error& e) {
          fail(s["values"], std::string("scan.values: ") + e.what());
        }
      }
    }
    if (const auto r = s["reduce"]) {
      check_keys(r, {"value_at_t", "max_over_t"}, "scan.reduce");
      if (r.size() != 1) fail(r, "scan.reduce: give exactly one of value_at_t, max_over_t");
      if (r["value_at_t"]) sc.reduce = ValueAtTime{get_double(r["value_at_t"], "scan.reduce.value_at_t")};
      else sc.reduce = MaxOverTime{get_double(r["max_over_t"], "scan.reduce.max_over_t")};
    } else {
      sc.reduce = ValueAtTime{cfg.grid.t_end};
      resolved["scan.reduce.value_at_t"] = cfg.grid.t_end;
    }
    cfg.scan = sc;
  }
  if (cfg.grid.t_end > tabulated_limit) fail(g, "grid.t_end exceeds the tabulated temporal profile");

  if (const auto e = root["estimation"]) {
    check_keys(e, {"n_measurements"}, "estimation");
    const double n = get_double(e["n_measurements"], "estimation.n_measurements");
    if (n < 1 || n != std::floor(n)) fail(e["n_measurements"], "estimation.n_measurements must be a positive integer");
    cfg.n_measurements = static_cast<std::size_t>(n);
  }

  if (const auto o = root["output"]) {
    check_keys(o, {"results", "manifest", "kernel"}, "output");
    if (o["results"]) cfg.output.results = o["results"].as<std::string>();
    if (o["manifest"]) cfg.output.manifest = o["manifest"].as<std::string>();
    if (o["kernel"]) cfg.output.kernel = o["kernel"].as<std::string>();
  }
  return loaded;
}

LoadedConfig load_config(const std::filesystem::path& path, double tolerance_scale) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), tolerance_scale);
}

double tolerance_scale_from_env() {
  const char* v = std::getenv("DRIVETHERM_TOLERANCE_SCALE");
  if (!v || !*v) return 1.0;
  char* end = nullptr;
  const double s = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(s > 0) || !std::isfinite(s)) {
    throw ConfigError(std::string("DRIVETHERM_TOLERANCE_SCALE must be a positive number, got '") + v + "'");
  }
  return s;
}

// ---------------------------------------------------------------- JSON

namespace {

json operator_json(const OperatorSpec& s) {
  if (const auto* q = std::get_if<QubitSpec>(&s)) return {{"qubit", {{"omega", q->omega}}}};
  if (const auto* p = std::get_if<PauliSpec>(&s)) return {{"pauli", {{"axis", std::string(1, p->axis)}, {"scale", p->scale}}}};
  if (const auto* d = std::get_if<DiagonalSpec>(&s)) return {{"diagonal", d->values}};
  const auto& dense = std::get<DenseSpec>(s);
  return {{"dense", {{"re", dense.re}, {"im", dense.im}}}};
}

OperatorSpec operator_from_json(const json& j) {
  if (j.contains("qubit")) return QubitSpec{j["qubit"].at("omega").get<double>()};
  if (j.contains("pauli")) return PauliSpec{j["pauli"].at("axis").get<std::string>().at(0), j["pauli"].at("scale").get<double>()};
  if (j.contains("diagonal")) return DiagonalSpec{j["diagonal"].get<std::vector<double>>()};
  const auto& d = j.at("dense");
  return DenseSpec{d.at("re").get<std::vector<std::vector<double>>>(), d.at("im").get<std::vector<std::vector<double>>>()};
}

json table_json(const MonotoneCubic& t, const char* x_key) { return {{x_key, t.abscissae()}, {"value", t.values()}}; }

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"dim", c.model.dim}, {"H0", operator_json(c.model.H0)}, {"V", operator_json(c.model.V)},
                {"beta_star", c.model.beta_star}};

  json env;
  if (const auto* g = std::get_if<GaussianEnvelope>(&c.drive.envelope)) {
    env = {{"type", "gaussian"}, {"beta0", g->beta0}, {"s_beta", g->s_beta}};
  } else if (const auto* t = std::get_if<TabulatedEnvelope>(&c.drive.envelope)) {
    env = table_json(t->table, "beta");
    env["type"] = "tabulated";
  } else {
    env = {{"type", "constant"}};
  }
  json tmp;
  if (const auto* cm = std::get_if<CosineModulation>(&c.drive.temporal)) {
    tmp = {{"type", "cosine"}, {"omega_d", cm->omega_d}, {"phi", cm->phi}};
  } else if (const auto* t = std::get_if<TabulatedModulation>(&c.drive.temporal)) {
    tmp = table_json(t->table, "t");
    tmp["type"] = "tabulated";
  } else {
    tmp = {{"type", "constant"}};
  }
  j["drive"] = {{"lambda0", c.drive.lambda0}, {"envelope", env}, {"temporal", tmp}};

  j["grid"] = {{"t_end", c.grid.t_end}, {"n_steps", c.grid.n_steps ? json(*c.grid.n_steps) : json(nullptr)}};
  if (c.scan) {
    json reduce;
    if (const auto* v = std::get_if<ValueAtTime>(&c.scan->reduce)) reduce = {{"value_at_t", v->t}};
    else reduce = {{"max_over_t", std::get<MaxOverTime>(c.scan->reduce).t_window}};
    j["scan"] = {{"axis", to_string(c.scan->axis)}, {"values", c.scan->values}, {"reduce", reduce}};
  } else {
    j["scan"] = nullptr;
  }
  j["estimation"] = {{"n_measurements", c.n_measurements}};
  j["output"] = {{"results", c.output.results}, {"manifest", c.output.manifest}, {"kernel", c.output.kernel}};
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  const auto& t = c.tolerances;
  j["tolerances"] = {{"rank_floor", t.rank_floor},
                     {"beta_max", t.beta_max ? json(*t.beta_max) : json(nullptr)},
                     {"unitarity", t.unitarity},
                     {"rel_disagreement", t.rel_disagreement},
                     {"mixed_term", t.mixed_term},
                     {"increment_floor", t.increment_floor},
                     {"scale", t.scale}};
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  const auto& m = j.at("model");
  c.model.dim = m.at("dim").get<Index>();
  c.model.H0 = operator_from_json(m.at("H0"));
  c.model.V = operator_from_json(m.at("V"));
  c.model.beta_star = m.at("beta_star").get<double>();

  const auto& d = j.at("drive");
  c.drive.lambda0 = d.at("lambda0").get<double>();
  const auto& env = d.at("envelope");
  const auto env_type = env.at("type").get<std::string>();
  if (env_type == "gaussian") c.drive.envelope = GaussianEnvelope{env.at("beta0").get<double>(), env.at("s_beta").get<double>()};
  else if (env_type == "tabulated")
    c.drive.envelope = TabulatedEnvelope{MonotoneCubic(env.at("beta").get<std::vector<double>>(), env.at("value").get<std::vector<double>>())};
  else c.drive.envelope = ConstantEnvelope{};
  const auto& tmp = d.at("temporal");
  const auto tmp_type = tmp.at("type").get<std::string>();
  if (tmp_type == "cosine") c.drive.temporal = CosineModulation{tmp.at("omega_d").get<double>(), tmp.at("phi").get<double>()};
  else if (tmp_type == "tabulated")
    c.drive.temporal = TabulatedModulation{MonotoneCubic(tmp.at("t").get<std::vector<double>>(), tmp.at("value").get<std::vector<double>>())};
  else c.drive.temporal = ConstantModulation{};

  c.grid.t_end = j.at("grid").at("t_end").get<double>();
  if (!j["grid"]["n_steps"].is_null()) c.grid.n_steps = j["grid"]["n_steps"].get<std::size_t>();

  if (!j.at("scan").is_null()) {
    const auto& s = j["scan"];
    ScanConfig sc;
    const auto axis = s.at("axis").get<std::string>();
    sc.axis = axis == "frequency" ? ScanAxis::frequency : axis == "temperature" ? ScanAxis::temperature : ScanAxis::time;
    sc.values = s.at("values").get<std::vector<double>>();
    const auto& r = s.at("reduce");
    if (r.contains("value_at_t")) sc.reduce = ValueAtTime{r["value_at_t"].get<double>()};
    else sc.reduce = MaxOverTime{r.at("max_over_t").get<double>()};
    c.scan = sc;
  }
  c.n_measurements = j.at("estimation").at("n_measurements").get<std::size_t>();
  const auto& o = j.at("output");
  c.output = {o.at("results").get<std::string>(), o.at("manifest").get<std::string>(), o.at("kernel").get<std::string>()};
  if (!j.at("seed").is_null()) c.seed = j["seed"].get<std::uint64_t>();
  const auto& t = j.at("tolerances");
  c.tolerances.rank_floor = t.at("rank_floor").get<double>();
  if (!t.at("beta_max").is_null()) c.tolerances.beta_max = t["beta_max"].get<double>();
  c.tolerances.unitarity = t.at("unitarity").get<double>();
  c.tolerances.rel_disagreement = t.at("rel_disagreement").get<double>();
  c.tolerances.mixed_term = t.at("mixed_term").get<double>();
  c.tolerances.increment_floor = t.at("increment_floor").get<double>();
  c.tolerances.scale = t.at("scale").get<double>();
  return c;
}

// ---------------------------------------------------------------- problems

GibbsOptions gibbs_options(const RunConfig& config) {
  GibbsOptions o;
  o.rank_floor = config.tolerances.rank_floor;
  o.beta_max = config.tolerances.beta_max;
  return o;
}

Problem make_problem(const RunConfig& config) {
  Problem p;
  p.H0 = build_operator(config.model.H0);
  p.V = build_operator(config.model.V);
  p.beta = config.model.beta_star;
  p.drive = config.drive;
  p.t_end = config.grid.t_end;
  p.n_steps = config.grid.n_steps;
  p.gibbs = gibbs_options(config);
  p.engine.n_measurements = config.n_measurements;
  p.propagation.unitarity_tolerance = config.tolerances.unitarity;
  return p;
}

RunConfig default_config() {
  const std::string yaml = R"(
model:
  H0: {qubit: {omega: 1.0}}
  V: sigma_x
  beta_star: 2.0
drive:
  lambda0: 0.1
  envelope: {type: gaussian, beta0: 4.0, s_beta: 3.0}
  temporal: {type: cosine, omega_d: 1.0, phi: 0.0}
grid:
  periods: 10
)";
  return parse_config(yaml, tolerance_scale_from_env()).config;
}

}  // namespace drivetherm
