#include "dppdyn/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace dppdyn {

namespace {

// Message of a nested error without its "Code: " prefix.
std::string detail(const Error& err) {
  const std::string what = err.what();
  const std::string prefix = std::string(to_string(err.code())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

std::string where(const toml::node& node) {
  const auto& src = node.source();
  if (!src.begin) return "";
  return " (line " + std::to_string(src.begin.line) + ")";
}

[[noreturn]] void invalid(const std::string& path, const std::string& message, const toml::node* node = nullptr) {
  throw Error(ErrorCode::ValidationError, path + ": " + message + (node ? where(*node) : ""));
}

void reject_unknown(const toml::table& table, const std::string& prefix, const std::set<std::string>& allowed) {
  for (const auto& [key, node] : table) {
    const std::string name(key.str());
    if (!allowed.count(name)) invalid(prefix.empty() ? name : prefix + "." + name, "unknown key", &node);
  }
}

const toml::table* section(const toml::table& root, const std::string& name) {
  const toml::node* node = root.get(name);
  if (!node) return nullptr;
  if (!node->is_table()) invalid(name, "must be a table", node);
  return node->as_table();
}

std::optional<double> get_double(const toml::table& t, const std::string& prefix, const std::string& key) {
  const toml::node* node = t.get(key);
  if (!node) return std::nullopt;
  if (auto v = node->value<double>(); v && (node->is_floating_point() || node->is_integer())) return *v;
  invalid(prefix + "." + key, "must be a number", node);
}

std::optional<std::int64_t> get_int(const toml::table& t, const std::string& prefix, const std::string& key) {
  const toml::node* node = t.get(key);
  if (!node) return std::nullopt;
  if (!node->is_integer()) invalid(prefix + "." + key, "must be an integer", node);
  return node->value<std::int64_t>();
}

std::optional<std::string> get_string(const toml::table& t, const std::string& prefix, const std::string& key) {
  const toml::node* node = t.get(key);
  if (!node) return std::nullopt;
  if (!node->is_string()) invalid(prefix + "." + key, "must be a string", node);
  return *node->value<std::string>();
}

const toml::array* get_array(const toml::table& t, const std::string& prefix, const std::string& key) {
  const toml::node* node = t.get(key);
  if (!node) return nullptr;
  if (!node->is_array()) invalid(prefix + "." + key, "must be an array", node);
  return node->as_array();
}

std::vector<int> int_list(const toml::array& arr, const std::string& path) {
  std::vector<int> out;
  for (size_t i = 0; i < arr.size(); ++i) {
    const toml::node& e = *arr.get(i);
    if (!e.is_integer()) invalid(path + "[" + std::to_string(i) + "]", "must be an integer", &e);
    out.push_back(static_cast<int>(*e.value<std::int64_t>()));
  }
  return out;
}

std::vector<double> double_list(const toml::array& arr, const std::string& path) {
  std::vector<double> out;
  for (size_t i = 0; i < arr.size(); ++i) {
    const toml::node& e = *arr.get(i);
    if (!(e.is_integer() || e.is_floating_point()))
      invalid(path + "[" + std::to_string(i) + "]", "must be a number", &e);
    out.push_back(*e.value<double>());
  }
  return out;
}

template <class Scalar, class Convert>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix_of(const toml::array& rows, const std::string& path,
                                                              Convert convert) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const toml::node& row = *rows.get(i);
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.as_array()->size()) != n)
      throw Error(ErrorCode::DimensionMismatch, rp + ": every row must have " + std::to_string(n) + " entries");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = convert(*row.as_array()->get(j), rp + "[" + std::to_string(j) + "]");
  }
  return m;
}

Complex complex_entry(const toml::node& e, const std::string& path) {
  if (e.is_integer() || e.is_floating_point()) return {*e.value<double>(), 0.0};
  if (e.is_string()) {
    try {
      return parse_complex(*e.value<std::string>());
    } catch (const Error& err) {
      invalid(path, detail(err), &e);
    }
  }
  invalid(path, "must be a number or a complex string", &e);
}

double real_entry(const toml::node& e, const std::string& path) {
  if (e.is_integer() || e.is_floating_point()) return *e.value<double>();
  invalid(path, "must be a number", &e);
}

const char* variant_name(KernelSpec::Variant v) {
  switch (v) {
    case KernelSpec::Variant::ExplicitMatrix: return "explicit-matrix";
    case KernelSpec::Variant::ScalarDiagonal: return "scalar-diagonal";
    case KernelSpec::Variant::TorusConvolution: return "torus-convolution";
  }
  return "unknown";
}

void parse_kernel(const toml::table& t, ExperimentConfig& cfg, const std::string& base_dir) {
  const std::string p = "kernel";
  reject_unknown(t, p, {"variant", "n", "sides", "a", "matrix", "matrix_file", "coupling", "decay", "q"});
  const auto variant = get_string(t, p, "variant");
  if (!variant) invalid(p + ".variant", "is required");
  KernelSpec& spec = cfg.kernel;
  if (*variant == "explicit-matrix") {
    spec.variant = KernelSpec::Variant::ExplicitMatrix;
  } else if (*variant == "scalar-diagonal") {
    spec.variant = KernelSpec::Variant::ScalarDiagonal;
  } else if (*variant == "torus-convolution") {
    spec.variant = KernelSpec::Variant::TorusConvolution;
  } else {
    invalid(p + ".variant", "must be explicit-matrix, scalar-diagonal or torus-convolution", t.get("variant"));
  }

  const auto n = get_int(t, p, "n");
  const toml::array* sides = get_array(t, p, "sides");
  if (n && sides) invalid(p, "give either n or sides, not both");
  if (sides) {
    try {
      cfg.space = SiteSpace::torus(int_list(*sides, p + ".sides"));
    } catch (const Error& err) {
      if (err.code() == ErrorCode::ValidationError) throw;
      invalid(p + ".sides", detail(err));
    }
  } else if (n) {
    if (*n < 1) invalid(p + ".n", "must be >= 1");
    cfg.space = SiteSpace::plain(static_cast<int>(*n));
  }

  if (auto a = get_double(t, p, "a")) spec.a = *a;
  if (auto q = get_double(t, p, "q")) spec.q_override = *q;

  const toml::array* matrix = get_array(t, p, "matrix");
  const auto matrix_file = get_string(t, p, "matrix_file");
  if (spec.variant == KernelSpec::Variant::ExplicitMatrix) {
    if (matrix && matrix_file) invalid(p, "give either matrix or matrix_file, not both");
    if (matrix) {
      spec.matrix = matrix_of<Complex>(*matrix, p + ".matrix", complex_entry);
    } else if (matrix_file) {
      std::string path = *matrix_file;
      if (!path.empty() && path[0] != '/' && !base_dir.empty()) path = base_dir + "/" + path;
      spec.matrix = load_matrix_file(path);
    } else {
      invalid(p + ".matrix", "explicit-matrix kernels need matrix or matrix_file");
    }
    const int size = static_cast<int>(spec.matrix.rows());
    if (!n && !sides) {
      cfg.space = SiteSpace::plain(size);
    } else if (cfg.space.n_sites() != size) {
      throw Error(ErrorCode::DimensionMismatch, p + ".matrix: " + std::to_string(size) + " rows but the site space has " +
                                                    std::to_string(cfg.space.n_sites()) + " sites");
    }
  } else {
    if (matrix || matrix_file) invalid(p + ".matrix", "only allowed for explicit-matrix kernels");
    if (!n && !sides) invalid(p + ".n", "site count (n or sides) is required");
  }

  if (const toml::array* coupling = get_array(t, p, "coupling")) {
    if (spec.variant != KernelSpec::Variant::TorusConvolution)
      invalid(p + ".coupling", "only allowed for torus-convolution kernels");
    spec.coupling = double_list(*coupling, p + ".coupling");
  }
  if (const toml::node* decay = t.get("decay")) {
    if (spec.variant != KernelSpec::Variant::TorusConvolution)
      invalid(p + ".decay", "only allowed for torus-convolution kernels", decay);
    if (!decay->is_table()) invalid(p + ".decay", "must be a table", decay);
    const toml::table& d = *decay->as_table();
    const std::string dp = p + ".decay";
    reject_unknown(d, dp, {"amplitude", "rate", "cutoff"});
    DecayProfile prof;
    if (auto v = get_double(d, dp, "amplitude")) prof.amplitude = *v;
    if (auto v = get_double(d, dp, "rate")) prof.rate = *v;
    if (auto v = get_int(d, dp, "cutoff")) prof.cutoff = static_cast<int>(*v);
    spec.decay = prof;
  }
  if (spec.variant == KernelSpec::Variant::TorusConvolution) {
    if (!sides) invalid(p + ".sides", "torus-convolution kernels need a torus (sides)");
    if (spec.coupling.empty() == !spec.decay.has_value())
      invalid(p, "torus-convolution kernels need exactly one of coupling or decay");
  }
}

void parse_rates(const toml::table& t, ExperimentConfig& cfg) {
  const std::string p = "rates";
  reject_unknown(t, p, {"t", "weight", "decay_rate", "weights"});
  if (auto v = get_double(t, p, "t")) cfg.rates.t = *v;
  if (auto v = get_string(t, p, "weight")) {
    try {
      cfg.rates.weight = parse_weight_kind(*v);
    } catch (const Error& err) {
      invalid(p + ".weight", detail(err), t.get("weight"));
    }
  }
  if (auto v = get_double(t, p, "decay_rate")) cfg.rates.decay_rate = *v;
  if (const toml::array* w = get_array(t, p, "weights")) {
    if (cfg.rates.weight != WeightKind::Explicit) invalid(p + ".weights", "only allowed with weight = \"explicit\"");
    cfg.rates.weights = matrix_of<double>(*w, p + ".weights", real_entry);
  } else if (cfg.rates.weight == WeightKind::Explicit) {
    invalid(p + ".weights", "explicit weights need a weights matrix");
  }
}

void parse_run(const toml::table& t, ExperimentConfig& cfg) {
  const std::string p = "run";
  reject_unknown(t, p, {"mode", "horizon", "burn_in", "thinning", "seed", "initial", "initial_sites", "replicas",
                        "batches", "refactor_period", "observables"});
  SimConfig& sim = cfg.run.sim;
  if (auto v = get_string(t, p, "mode")) {
    try {
      sim.mode = parse_dynamics(*v);
    } catch (const Error& err) {
      invalid(p + ".mode", detail(err), t.get("mode"));
    }
  }
  if (auto v = get_double(t, p, "horizon")) sim.horizon = *v;
  if (auto v = get_double(t, p, "burn_in")) sim.burn_in = *v;
  if (auto v = get_double(t, p, "thinning")) sim.thinning = *v;
  if (auto v = get_int(t, p, "seed")) {
    if (*v < 0) invalid(p + ".seed", "must be >= 0");
    sim.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = get_string(t, p, "initial")) {
    try {
      sim.initial = parse_initial_state(*v);
    } catch (const Error& err) {
      invalid(p + ".initial", detail(err), t.get("initial"));
    }
  }
  if (const toml::array* s = get_array(t, p, "initial_sites")) sim.initial_sites = int_list(*s, p + ".initial_sites");
  if (auto v = get_int(t, p, "replicas")) cfg.run.replicas = static_cast<int>(*v);
  if (auto v = get_int(t, p, "batches")) sim.batches = static_cast<int>(*v);
  if (auto v = get_int(t, p, "refactor_period")) sim.refactor_period = static_cast<int>(*v);
  if (const toml::array* obs = get_array(t, p, "observables")) {
    for (size_t i = 0; i < obs->size(); ++i) {
      const toml::node& e = *obs->get(i);
      const std::string ep = p + ".observables[" + std::to_string(i) + "]";
      if (!e.is_array()) invalid(ep, "must be an array of sites", &e);
      cfg.run.observables.push_back(int_list(*e.as_array(), ep));
    }
  }
}

void parse_verify(const toml::table& t, ExperimentConfig& cfg) {
  const std::string p = "verify";
  reject_unknown(t, p, {"suites", "detailed_balance", "invariance", "duality", "difference", "lemma41",
                        "contraction", "gap", "functions", "times", "seed"});
  VerifySection& v = cfg.verify;
  if (const toml::array* s = get_array(t, p, "suites")) {
    v.suites.clear();
    for (size_t i = 0; i < s->size(); ++i) {
      const toml::node& e = *s->get(i);
      if (!e.is_string()) invalid(p + ".suites[" + std::to_string(i) + "]", "must be a string", &e);
      v.suites.push_back(*e.value<std::string>());
    }
  }
  for (auto [key, slot] : {std::pair{"detailed_balance", &v.detailed_balance}, {"invariance", &v.invariance},
                           {"duality", &v.duality}, {"difference", &v.difference}, {"lemma41", &v.lemma41},
                           {"contraction", &v.contraction}, {"gap", &v.gap}})
    if (auto x = get_double(t, p, key)) *slot = *x;
  if (auto x = get_int(t, p, "functions")) v.functions = static_cast<int>(*x);
  if (const toml::array* times = get_array(t, p, "times")) v.times = double_list(*times, p + ".times");
  if (auto x = get_int(t, p, "seed")) {
    if (*x < 0) invalid(p + ".seed", "must be >= 0");
    v.seed = static_cast<std::uint64_t>(*x);
  }
}

void parse_output(const toml::table& t, ExperimentConfig& cfg) {
  const std::string p = "output";
  reject_unknown(t, p, {"dir", "report", "events"});
  if (auto v = get_string(t, p, "dir")) cfg.output.dir = *v;
  if (auto v = get_string(t, p, "report")) cfg.output.report = *v;
  if (auto v = get_string(t, p, "events")) cfg.output.events = *v;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string complex_text(Complex z) {
  if (z.imag() == 0.0) return num(z.real());
  char buf[80];
  std::snprintf(buf, sizeof buf, "\"%.17g%+.17gj\"", z.real(), z.imag());
  return buf;
}

template <class T, class F>
std::string list(const std::vector<T>& v, F fmt) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out + "]";
}

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}
bool same_matrix(const RealMatrix& a, const RealMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

const std::set<std::string> kSuites = {"kernel", "papangelou", "dpp", "rates", "exactcheck", "simulate"};

}  // namespace

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  const KernelSpec& a = kernel;
  const KernelSpec& b = o.kernel;
  const bool kernels = a.variant == b.variant && same_matrix(a.matrix, b.matrix) && a.a == b.a &&
                       a.coupling == b.coupling && a.decay == b.decay && a.q_override == b.q_override;
  const bool rate = rates.t == o.rates.t && rates.weight == o.rates.weight && rates.decay_rate == o.rates.decay_rate &&
                    same_matrix(rates.weights, o.rates.weights);
  const SimConfig& s = run.sim;
  const SimConfig& u = o.run.sim;
  const bool sim = s.mode == u.mode && s.horizon == u.horizon && s.burn_in == u.burn_in && s.thinning == u.thinning &&
                   s.seed == u.seed && s.initial == u.initial && s.initial_sites == u.initial_sites &&
                   s.refactor_period == u.refactor_period && s.batches == u.batches &&
                   run.replicas == o.run.replicas && run.observables == o.run.observables;
  const VerifySection& v = verify;
  const VerifySection& w = o.verify;
  const bool ver = v.suites == w.suites && v.detailed_balance == w.detailed_balance && v.invariance == w.invariance &&
                   v.duality == w.duality && v.difference == w.difference && v.lemma41 == w.lemma41 &&
                   v.contraction == w.contraction && v.gap == w.gap && v.functions == w.functions &&
                   v.times == w.times && v.seed == w.seed;
  const bool out = output.dir == o.output.dir && output.report == o.output.report && output.events == o.output.events;
  return kernels && space == o.space && rate && sim && ver && out;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& err) {
    const auto& b = err.source().begin;
    throw Error(ErrorCode::ParseError, source + ":" + std::to_string(b.line) + ":" + std::to_string(b.column) + ": " +
                                           std::string(err.description()));
  }
  reject_unknown(root, "", {"kernel", "rates", "run", "verify", "output"});
  ExperimentConfig cfg;
  std::string base_dir;
  if (const auto slash = source.find_last_of('/'); slash != std::string::npos) base_dir = source.substr(0, slash);

  const toml::table* kernel = section(root, "kernel");
  if (!kernel) invalid("kernel", "section is required");
  parse_kernel(*kernel, cfg, base_dir);
  if (const toml::table* t = section(root, "rates")) parse_rates(*t, cfg);
  if (const toml::table* t = section(root, "run")) parse_run(*t, cfg);
  if (const toml::table* t = section(root, "verify")) parse_verify(*t, cfg);
  if (const toml::table* t = section(root, "output")) parse_output(*t, cfg);
  validate_config(cfg);
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void validate_config(const ExperimentConfig& cfg) {
  const int n = cfg.space.n_sites();
  if (cfg.kernel.variant == KernelSpec::Variant::ExplicitMatrix && cfg.kernel.matrix.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "kernel.matrix: size does not match the site space");
  if (cfg.kernel.q_override && !(*cfg.kernel.q_override >= 0.0)) invalid("kernel.q", "must be >= 0");
  if (cfg.kernel.decay && !(cfg.kernel.decay->cutoff >= 1)) invalid("kernel.decay.cutoff", "must be >= 1");

  if (!(cfg.rates.t >= 0.0 && cfg.rates.t <= 1.0)) invalid("rates.t", "t must lie in [0,1]");
  if (cfg.rates.weight == WeightKind::Explicit && cfg.rates.weights.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "rates.weights: size does not match the site space");
  try {
    build_rate_spec(cfg);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::DimensionMismatch) throw;
    invalid("rates", detail(err));
  }

  try {
    validate(cfg.run.sim);
  } catch (const Error& err) {
    invalid("run", detail(err));
  }
  if (cfg.run.replicas < 1) invalid("run.replicas", "must be >= 1");
  std::set<int> seen;
  for (int s : cfg.run.sim.initial_sites) {
    if (s < 0 || s >= n) invalid("run.initial_sites", "site " + std::to_string(s) + " out of range");
    if (!seen.insert(s).second) invalid("run.initial_sites", "site " + std::to_string(s) + " repeated");
  }
  for (size_t i = 0; i < cfg.run.observables.size(); ++i) {
    const auto& obs = cfg.run.observables[i];
    const std::string p = "run.observables[" + std::to_string(i) + "]";
    if (obs.empty()) invalid(p, "needs at least one site");
    std::set<int> distinct;
    for (int s : obs) {
      if (s < 0 || s >= n) invalid(p, "site " + std::to_string(s) + " out of range");
      if (!distinct.insert(s).second) invalid(p, "site " + std::to_string(s) + " repeated");
    }
  }

  for (const auto& s : cfg.verify.suites)
    if (!kSuites.count(s)) invalid("verify.suites", "unknown suite '" + s + "'");
  for (auto [name, value] : {std::pair{"detailed_balance", cfg.verify.detailed_balance},
                             {"invariance", cfg.verify.invariance}, {"duality", cfg.verify.duality},
                             {"difference", cfg.verify.difference}, {"lemma41", cfg.verify.lemma41},
                             {"contraction", cfg.verify.contraction}, {"gap", cfg.verify.gap}})
    if (!(value >= 0.0)) invalid(std::string("verify.") + name, "must be >= 0");
  if (cfg.verify.functions < 0) invalid("verify.functions", "must be >= 0");
  for (double t : cfg.verify.times)
    if (!(t >= 0.0)) invalid("verify.times", "must be >= 0");
}

Kernel build_kernel(const ExperimentConfig& cfg) { return build_kernel(cfg.kernel, cfg.space); }

RateSpec build_rate_spec(const ExperimentConfig& cfg) {
  return make_rate_spec(cfg.space, cfg.rates.t, cfg.rates.weight, cfg.rates.decay_rate, cfg.rates.weights);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream o;
  const KernelSpec& k = cfg.kernel;
  o << "[kernel]\n";
  o << "variant = \"" << variant_name(k.variant) << "\"\n";
  if (cfg.space.has_torus()) {
    o << "sides = " << list(cfg.space.sides(), [](int s) { return std::to_string(s); }) << "\n";
  } else {
    o << "n = " << cfg.space.n_sites() << "\n";
  }
  o << "a = " << num(k.a) << "\n";
  if (k.q_override) o << "q = " << num(*k.q_override) << "\n";
  if (k.variant == KernelSpec::Variant::ExplicitMatrix) {
    o << "matrix = [\n";
    for (Eigen::Index i = 0; i < k.matrix.rows(); ++i) {
      o << "  [";
      for (Eigen::Index j = 0; j < k.matrix.cols(); ++j) o << (j ? ", " : "") << complex_text(k.matrix(i, j));
      o << "],\n";
    }
    o << "]\n";
  }
  if (!k.coupling.empty()) o << "coupling = " << list(k.coupling, num) << "\n";
  if (k.decay)
    o << "decay = { amplitude = " << num(k.decay->amplitude) << ", rate = " << num(k.decay->rate)
      << ", cutoff = " << k.decay->cutoff << " }\n";

  o << "\n[rates]\n";
  o << "t = " << num(cfg.rates.t) << "\n";
  o << "weight = \"" << to_string(cfg.rates.weight) << "\"\n";
  o << "decay_rate = " << num(cfg.rates.decay_rate) << "\n";
  if (cfg.rates.weight == WeightKind::Explicit) {
    o << "weights = [\n";
    for (Eigen::Index i = 0; i < cfg.rates.weights.rows(); ++i) {
      o << "  [";
      for (Eigen::Index j = 0; j < cfg.rates.weights.cols(); ++j) o << (j ? ", " : "") << num(cfg.rates.weights(i, j));
      o << "],\n";
    }
    o << "]\n";
  }

  const SimConfig& s = cfg.run.sim;
  o << "\n[run]\n";
  o << "mode = \"" << to_string(s.mode) << "\"\n";
  o << "horizon = " << num(s.horizon) << "\n";
  o << "burn_in = " << num(s.burn_in) << "\n";
  o << "thinning = " << num(s.thinning) << "\n";
  o << "seed = " << s.seed << "\n";
  o << "initial = \"" << to_string(s.initial) << "\"\n";
  o << "initial_sites = " << list(s.initial_sites, [](int x) { return std::to_string(x); }) << "\n";
  o << "replicas = " << cfg.run.replicas << "\n";
  o << "batches = " << s.batches << "\n";
  o << "refactor_period = " << s.refactor_period << "\n";
  o << "observables = " << list(cfg.run.observables, [](const SiteList& sites) {
    return list(sites, [](int x) { return std::to_string(x); });
  }) << "\n";

  const VerifySection& v = cfg.verify;
  o << "\n[verify]\n";
  o << "suites = " << list(v.suites, quoted) << "\n";
  o << "detailed_balance = " << num(v.detailed_balance) << "\n";
  o << "invariance = " << num(v.invariance) << "\n";
  o << "duality = " << num(v.duality) << "\n";
  o << "difference = " << num(v.difference) << "\n";
  o << "lemma41 = " << num(v.lemma41) << "\n";
  o << "contraction = " << num(v.contraction) << "\n";
  o << "gap = " << num(v.gap) << "\n";
  o << "functions = " << v.functions << "\n";
  o << "times = " << list(v.times, num) << "\n";
  o << "seed = " << v.seed << "\n";

  o << "\n[output]\n";
  o << "dir = " << quoted(cfg.output.dir) << "\n";
  o << "report = " << quoted(cfg.output.report) << "\n";
  o << "events = " << quoted(cfg.output.events) << "\n";
  return o.str();
}

ExperimentConfig demo_config() {
  ExperimentConfig cfg;
  Matrix a(2, 2);
  a << 2.0, 0.5, 0.5, 2.0;
  cfg.kernel = KernelSpec::explicit_matrix(a);
  cfg.space = SiteSpace::plain(2);
  cfg.run.observables = {{0}, {1}, {0, 1}};
  return cfg;
}

}  // namespace dppdyn
