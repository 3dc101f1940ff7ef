#include "adiascat/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "adiascat/coherent.hpp"
#include "adiascat/error.hpp"
#include "adiascat/network.hpp"
#include "adiascat/soluble.hpp"

namespace adiascat {

namespace {

namespace pt = boost::property_tree;

constexpr std::pair<ExperimentKind, std::string_view> kExperimentNames[] = {
    {ExperimentKind::coherent_props, "coherent-props"}, {ExperimentKind::soluble_exact, "soluble-exact"},
    {ExperimentKind::omega_scaling, "omega-scaling"},   {ExperimentKind::epsilon_scaling, "epsilon-scaling"},
    {ExperimentKind::energy_shift, "energy-shift"},     {ExperimentKind::outgoing_state, "outgoing-state"},
    {ExperimentKind::combined, "combined"}};

std::string trim(std::string_view v) {
  const auto b = v.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = v.find_last_not_of(" \t\r\n");
  return std::string(v.substr(b, e - b + 1));
}

double parse_double(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ValidationError(field, "not a number: '" + t + "'");
  return value;
}

long parse_integer(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ValidationError(field, "not an integer: '" + t + "'");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep))
    if (!trim(cur).empty()) parts.push_back(trim(cur));
  return parts;
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_double(p, field));
  return out;
}

// "height, center, width; height, center, width"
std::vector<GaussianBump> parse_bumps(const std::string& text, const std::string& field) {
  std::vector<GaussianBump> out;
  for (const auto& b : split(text, ';')) {
    const auto v = parse_list(b, field);
    if (v.size() != 3) throw ValidationError(field, "each bump needs height, center, width");
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out;
}

std::optional<std::string> get(const pt::ptree& tree, const std::string& path) {
  if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
  return std::nullopt;
}

std::string_view model_kind_name(ModelSpec::Kind k) {
  switch (k) {
    case ModelSpec::Kind::soluble: return "soluble";
    case ModelSpec::Kind::matrix: return "matrix";
    case ModelSpec::Kind::rank_one: return "rank-one";
  }
  return "soluble";
}

ModelSpec::Kind parse_model_kind(const std::string& name) {
  if (name == "soluble") return ModelSpec::Kind::soluble;
  if (name == "matrix") return ModelSpec::Kind::matrix;
  if (name == "rank-one") return ModelSpec::Kind::rank_one;
  throw ValidationError("model.kind", "expected soluble, matrix or rank-one, got '" + name + "'");
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment",       "seed",           "model.kind",     "model.bumps",    "model.schedule",
      "model.amplitude",  "model.offset",   "model.scale",    "model.channels", "model.kappa",
      "model.within_channel", "grid.x_min", "grid.x_max",     "grid.n",         "grid.T",
      "sweep.experiment", "sweep.seed",     "sweep.omega",    "sweep.eps",      "sweep.s",
      "sweep.e",          "sweep.j",        "sweep.jp",       "sweep.trials",   "sweep.rho",
      "sweep.rho_center", "sweep.rho_width", "sweep.rho_coefficients", "output.dir"};
  return keys;
}

void reject_unknown(const pt::ptree& tree) {
  static const std::vector<std::string> sections = {"model", "grid", "sweep", "output"};
  const auto& keys = known_keys();
  for (const auto& [name, node] : tree) {
    if (std::find(sections.begin(), sections.end(), name) == sections.end()) {
      if (std::find(keys.begin(), keys.end(), name) == keys.end()) throw ValidationError(name, "unknown key");
      continue;
    }
    for (const auto& [key, leaf] : node) {
      const std::string full = name + "." + key;
      if (std::find(keys.begin(), keys.end(), full) == keys.end()) throw ValidationError(full, "unknown key");
    }
  }
}

// Distance from the origin beyond which the coupling vanishes.
double coupling_reach(const ScatterModel& model) {
  const auto [a, b] = model.coupling_support();
  return std::max(std::abs(a), std::abs(b));
}

bool uses_fields(const ExperimentConfig& c) { return c.experiment == ExperimentKind::energy_shift; }

}  // namespace

ExperimentKind parse_experiment(std::string_view name) {
  for (const auto& [k, n] : kExperimentNames)
    if (n == name) return k;
  throw ValidationError("experiment", "unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [k, n] : kExperimentNames)
    if (k == kind) return n;
  return "coherent-props";
}

EnergyFunction RhoSpec::build() const {
  if (kind == "fermi") return EnergyFunction::fermi(center, width);
  if (kind == "gaussian") return EnergyFunction::gaussian(center, width);
  if (kind == "polynomial") return EnergyFunction::polynomial(coefficients);
  if (kind == "constant") return EnergyFunction::constant(coefficients.empty() ? 1.0 : coefficients.front());
  throw ValidationError("sweep.rho", "expected fermi, gaussian, polynomial or constant");
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.model.bumps = {{1.0, 0.0, 1.0}};
  c.sweep.s = {0.3};
  c.sweep.e = {1.0};
  c.sweep.eps = {0.5};
  c.sweep.omega = {0.1};
  switch (kind) {
    case ExperimentKind::coherent_props:
      // eps and e give the ranges the random labels are drawn from
      c.sweep.eps = {0.5, 1.0};
      c.sweep.e = {-2.0, 2.0};
      c.sweep.trials = 100;
      break;
    case ExperimentKind::soluble_exact:
      c.sweep.omega = {0.2, 0.1};
      c.sweep.trials = 5;
      break;
    case ExperimentKind::omega_scaling:
      c.model.bumps = {{1.0, 0.5, 1.0}};
      c.sweep.omega = {0.2, 0.1, 0.05};
      break;
    case ExperimentKind::epsilon_scaling:
      c.model.kind = ModelSpec::Kind::rank_one;
      c.model.channels = 2;
      c.model.kappa = 2.0;
      c.model.schedule = Schedule(Schedule::Kind::tanh, 0.5, 0.5);
      c.sweep.eps = {0.4, 0.2, 0.1};
      break;
    case ExperimentKind::energy_shift:
      c.model.kind = ModelSpec::Kind::matrix;
      c.grid = {-100.0, 100.0, 8192, std::nullopt};
      c.sweep.omega = {0.16, 0.04, 0.01};
      c.sweep.eps = {0.4, 0.2, 0.1};
      break;
    case ExperimentKind::outgoing_state:
      c.grid = {-20.0, 20.0, 512, std::nullopt};
      break;
    case ExperimentKind::combined:
      c.model.kind = ModelSpec::Kind::matrix;
      c.sweep.omega = {0.2, 0.1, 0.05};
      break;
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError("config", e.message() + " at line " + std::to_string(e.line()));
  }
  reject_unknown(tree);

  auto name = get(tree, "experiment");
  if (!name) name = get(tree, "sweep.experiment");
  if (!name) throw ValidationError("experiment", "missing");
  ExperimentConfig c = defaults(parse_experiment(*name));

  auto seed = get(tree, "seed");
  if (!seed) seed = get(tree, "sweep.seed");
  if (seed) {
    const long v = parse_integer(*seed, "seed");
    if (v < 0) throw ValidationError("seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(v);
  }

  if (auto v = get(tree, "model.kind")) {
    const auto kind = parse_model_kind(*v);
    if (kind != c.model.kind) {
      const ModelSpec fresh;
      c.model = fresh;
      c.model.kind = kind;
      c.model.bumps = {{1.0, 0.0, 1.0}};
      if (kind == ModelSpec::Kind::rank_one) {
        c.model.kappa = 2.0;
        c.model.schedule = Schedule(Schedule::Kind::tanh, 0.5, 0.5);
      }
    }
  }
  if (auto v = get(tree, "model.bumps")) c.model.bumps = parse_bumps(*v, "model.bumps");
  if (auto v = get(tree, "model.schedule"))
    c.model.schedule = Schedule(parse_schedule_kind(*v), c.model.schedule.amplitude(), c.model.schedule.offset());
  if (auto v = get(tree, "model.amplitude"))
    c.model.schedule =
        Schedule(c.model.schedule.kind(), parse_double(*v, "model.amplitude"), c.model.schedule.offset());
  if (auto v = get(tree, "model.offset"))
    c.model.schedule =
        Schedule(c.model.schedule.kind(), c.model.schedule.amplitude(), parse_double(*v, "model.offset"));
  if (auto v = get(tree, "model.scale")) c.model.coupling_scale = parse_double(*v, "model.scale");
  if (auto v = get(tree, "model.channels")) c.model.channels = static_cast<int>(parse_integer(*v, "model.channels"));
  if (auto v = get(tree, "model.kappa")) c.model.kappa = parse_double(*v, "model.kappa");
  if (auto v = get(tree, "model.within_channel"))
    c.model.within_channel = static_cast<int>(parse_integer(*v, "model.within_channel"));

  if (auto v = get(tree, "grid.x_min")) c.grid.x_min = parse_double(*v, "grid.x_min");
  if (auto v = get(tree, "grid.x_max")) c.grid.x_max = parse_double(*v, "grid.x_max");
  if (auto v = get(tree, "grid.n")) c.grid.n = static_cast<int>(parse_integer(*v, "grid.n"));
  if (auto v = get(tree, "grid.T")) c.grid.T = parse_double(*v, "grid.T");

  if (auto v = get(tree, "sweep.omega")) c.sweep.omega = parse_list(*v, "sweep.omega");
  if (auto v = get(tree, "sweep.eps")) c.sweep.eps = parse_list(*v, "sweep.eps");
  if (auto v = get(tree, "sweep.s")) c.sweep.s = parse_list(*v, "sweep.s");
  if (auto v = get(tree, "sweep.e")) c.sweep.e = parse_list(*v, "sweep.e");
  if (auto v = get(tree, "sweep.j")) c.sweep.j = static_cast<int>(parse_integer(*v, "sweep.j"));
  if (auto v = get(tree, "sweep.jp")) c.sweep.jp = static_cast<int>(parse_integer(*v, "sweep.jp"));
  if (auto v = get(tree, "sweep.trials")) c.sweep.trials = static_cast<int>(parse_integer(*v, "sweep.trials"));
  if (auto v = get(tree, "sweep.rho")) c.rho.kind = *v;
  if (auto v = get(tree, "sweep.rho_center")) c.rho.center = parse_double(*v, "sweep.rho_center");
  if (auto v = get(tree, "sweep.rho_width")) c.rho.width = parse_double(*v, "sweep.rho_width");
  if (auto v = get(tree, "sweep.rho_coefficients"))
    c.rho.coefficients = parse_list(*v, "sweep.rho_coefficients");

  if (auto v = get(tree, "output.dir")) c.out_dir = *v;
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return from_string(text.str());
}

std::string ExperimentConfig::to_ini() const {
  std::ostringstream o;
  o << "experiment = " << to_string(experiment) << "\n";
  o << "seed = " << seed << "\n\n[model]\n";
  o << "kind = " << model_kind_name(model.kind) << "\n";
  switch (model.kind) {
    case ModelSpec::Kind::soluble: {
      o << "bumps = ";
      for (std::size_t i = 0; i < model.bumps.size(); ++i) {
        const auto& b = model.bumps[i];
        o << (i ? "; " : "") << num(b.height) << ", " << num(b.center) << ", " << num(b.width);
      }
      o << "\n";
      break;
    }
    case ModelSpec::Kind::matrix:
      o << "scale = " << num(model.coupling_scale) << "\n";
      break;
    case ModelSpec::Kind::rank_one:
      o << "channels = " << model.channels << "\nkappa = " << num(model.kappa)
        << "\nwithin_channel = " << model.within_channel << "\n";
      break;
  }
  o << "schedule = " << to_string(model.schedule.kind()) << "\n";
  o << "amplitude = " << num(model.schedule.amplitude()) << "\n";
  o << "offset = " << num(model.schedule.offset()) << "\n\n[grid]\n";
  o << "x_min = " << num(grid.x_min) << "\nx_max = " << num(grid.x_max) << "\nn = " << grid.n << "\n";
  if (grid.T) o << "T = " << num(*grid.T) << "\n";
  o << "\n[sweep]\n";
  o << "omega = " << join(sweep.omega) << "\neps = " << join(sweep.eps) << "\ns = " << join(sweep.s)
    << "\ne = " << join(sweep.e) << "\nj = " << sweep.j << "\njp = " << sweep.jp << "\ntrials = " << sweep.trials
    << "\n";
  if (experiment == ExperimentKind::outgoing_state) {
    o << "rho = " << rho.kind << "\nrho_center = " << num(rho.center) << "\nrho_width = " << num(rho.width) << "\n";
    if (!rho.coefficients.empty()) o << "rho_coefficients = " << join(rho.coefficients) << "\n";
  }
  o << "\n[output]\ndir = " << out_dir.string() << "\n";
  return o.str();
}

Grid ExperimentConfig::build_grid() const { return Grid(grid.x_min, grid.x_max, grid.n); }

ScatterModel ExperimentConfig::build_model(double omega) const {
  switch (model.kind) {
    case ModelSpec::Kind::soluble:
      return SolubleModel(Profile(model.bumps), model.schedule, omega).as_network();
    case ModelSpec::Kind::matrix: {
      const MatrixPotential base = MatrixPotential::two_channel_fixture();
      std::vector<MatrixPotential::Term> terms = base.terms();
      for (auto& t : terms) t.coefficient *= model.coupling_scale;
      return ScatterModel(MatrixPotential(base.channels(), std::move(terms)), model.schedule, omega);
    }
    case ModelSpec::Kind::rank_one: {
      const Vector c = model.within_channel < 0 ? RankOneCoupling::cross_channel(model.channels)
                                                : RankOneCoupling::within_channel(model.channels, model.within_channel);
      return ScatterModel(RankOneCoupling{model.kappa, c}, model.schedule, model.channels, omega);
    }
  }
  throw ValidationError("model.kind", "unsupported");
}

std::vector<Diagnostic> validate(const ExperimentConfig& c) {
  std::vector<Diagnostic> out;
  auto add = [&out](std::string field, std::string msg) { out.push_back({std::move(field), std::move(msg)}); };

  bool grid_ok = true;
  if (c.grid.n < 2 || c.grid.n % 2 != 0) {
    add("grid.n", "must be an even integer >= 2");
    grid_ok = false;
  }
  if (!(c.grid.x_min < c.grid.x_max)) {
    add("grid.x_min", "must be below grid.x_max");
    grid_ok = false;
  }
  if (c.grid.T && !(*c.grid.T > 0.0)) add("grid.T", "must be positive");

  auto positive_list = [&](const std::vector<double>& v, const std::string& field) {
    if (v.empty()) add(field, "must not be empty");
    for (double x : v)
      if (!(x > 0.0) || !std::isfinite(x)) {
        add(field, "values must be positive, got " + num(x));
        break;
      }
  };
  positive_list(c.sweep.omega, "sweep.omega");
  positive_list(c.sweep.eps, "sweep.eps");
  if (c.sweep.s.empty()) add("sweep.s", "must not be empty");
  if (c.sweep.e.empty()) add("sweep.e", "must not be empty");

  int channels = 1;
  switch (c.model.kind) {
    case ModelSpec::Kind::soluble:
      if (c.model.bumps.empty()) add("model.bumps", "need at least one bump");
      for (const auto& b : c.model.bumps)
        if (!(b.width > 0.0)) add("model.bumps", "widths must be positive");
      break;
    case ModelSpec::Kind::matrix:
      channels = 2;
      break;
    case ModelSpec::Kind::rank_one:
      channels = c.model.channels;
      if (c.model.channels < 1) add("model.channels", "must be >= 1");
      if (!(c.model.kappa > 0.0)) add("model.kappa", "must be positive");
      if (c.model.within_channel >= c.model.channels) add("model.within_channel", "must be below model.channels");
      break;
  }
  if (c.sweep.j < 0 || c.sweep.j >= channels) add("sweep.j", "channel index out of range");
  if (c.sweep.jp < 0 || c.sweep.jp >= channels) add("sweep.jp", "channel index out of range");
  if ((c.experiment == ExperimentKind::coherent_props || c.experiment == ExperimentKind::soluble_exact) &&
      c.sweep.trials < 1)
    add("sweep.trials", "must be >= 1");
  if (c.experiment == ExperimentKind::coherent_props && c.sweep.eps.size() != 2)
    add("sweep.eps", "coherent-props takes an eps range: two values");
  if (c.experiment == ExperimentKind::coherent_props && c.sweep.e.size() != 2)
    add("sweep.e", "coherent-props takes an energy range: two values");
  if (c.experiment == ExperimentKind::energy_shift && c.sweep.omega.size() != c.sweep.eps.size())
    add("sweep.eps", "energy-shift sweeps omega and eps jointly; lists must have equal length");
  if (c.experiment == ExperimentKind::soluble_exact && c.model.kind != ModelSpec::Kind::soluble)
    add("model.kind", "soluble-exact needs the soluble model");
  if (c.experiment == ExperimentKind::omega_scaling && c.model.kind != ModelSpec::Kind::soluble)
    add("model.kind", "omega-scaling needs the soluble model");
  if (c.experiment == ExperimentKind::outgoing_state) {
    if (c.model.kind == ModelSpec::Kind::rank_one)
      add("model.kind", "outgoing-state needs a local dynamical S (soluble or matrix)");
    if (static_cast<long>(c.grid.n) * channels > 2048)
      add("grid.n", "outgoing-state builds dense matrices; need n * channels <= 2048");
    try {
      (void)c.rho.build();
    } catch (const ValidationError& e) {
      add(e.field(), e.what());
    }
  }
  if (!out.empty() || !grid_ok) return out;

  const Grid g = c.build_grid();
  const double half = std::min(-g.x_min(), g.x_max());
  const ScatterModel model = c.build_model(c.sweep.omega.front());
  const double reach = coupling_reach(model);

  if (c.experiment == ExperimentKind::coherent_props) {
    const double need = coherent_support_radius(c.sweep.eps.front()) + 12.0;
    if (need > half) add("sweep.eps", "labels need half-window >= 8/eps + 12 = " + num(need));
    return out;
  }
  if (c.experiment != ExperimentKind::epsilon_scaling && c.experiment != ExperimentKind::outgoing_state) {
    for (double eps : c.sweep.eps) {
      const double r = coherent_support_radius(eps);
      if (uses_fields(c)) {
        if (r + reach > half)
          add("sweep.eps", "packet radius 8/eps = " + num(r) + " does not fit the half-window " + num(half));
        continue;
      }
      const double need = 2.0 * r + reach + 2.0 * g.dx();
      if (need > half) {
        add("sweep.eps", "clearance: half-window " + num(half) + " below 2*8/eps + coupling reach = " + num(need));
      } else if (c.grid.T && (*c.grid.T < r + reach || *c.grid.T > half - r)) {
        add("grid.T", "T must lie in [" + num(r + reach) + ", " + num(half - r) + "]");
      }
    }
  }
  if (model.is_rank_one()) {
    for (double s : c.sweep.s)
      for (double e : c.sweep.e)
        for (double eps : c.sweep.eps) {
          const double lambda = model.schedule().value(s);
          if (rank_one::has_pole(model.rank_one(), lambda, e - 6.0 * eps, e + 6.0 * eps))
            add("model.schedule", "resonance: 1 - lambda g(E) vanishes within 6 eps of e = " + num(e) +
                                      " at s = " + num(s));
        }
  }
  return out;
}

}  // namespace adiascat
