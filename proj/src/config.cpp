#include "nodal/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nodal/errors.hpp"

namespace nodal {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigurationError("key '" + key + "': not a number: '" + v + "'");
  }
  if (pos != v.size()) throw ConfigurationError("key '" + key + "': trailing characters in '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw ConfigurationError("key '" + key + "': expected an integer, got '" + v + "'");
  return static_cast<long long>(x);
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split(v, ',')) out.push_back(to_double(key, s));
  return out;
}

template <class T>
void write_list(std::ostream& os, const std::vector<T>& xs) {
  for (std::size_t k = 0; k < xs.size(); ++k) os << (k ? "," : "") << format_number(xs[k]);
}

}  // namespace

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::TorsionOnly: return "torsion";
    case Mode::Barriers: return "barriers";
    case Mode::Nodal: return "nodal";
    case Mode::Positive: return "positive";
    case Mode::VerifyAll: return "verify-all";
    case Mode::Sweep: return "sweep";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::TorsionOnly, Mode::Barriers, Mode::Nodal, Mode::Positive, Mode::VerifyAll, Mode::Sweep})
    if (s == mode_name(m)) return m;
  if (s == "solve") return Mode::Nodal;
  throw ConfigurationError("unknown mode '" + s + "'");
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key == "domain") {
    if (v == "interval") domain.kind = DomainKind::Interval;
    else if (v == "ball") domain.kind = DomainKind::RadialBall;
    else throw ConfigurationError("unknown domain '" + v + "'");
  } else if (key == "a") domain.a = to_double(key, v);
  else if (key == "b") domain.b = to_double(key, v);
  else if (key == "radius") domain.radius = to_double(key, v);
  else if (key == "dimension") domain.dim = static_cast<int>(to_int(key, v));
  else if (key == "nodes") nodes = to_int(key, v);
  else if (key == "grading") grading = to_double(key, v);
  else if (key == "p1") p1 = to_double(key, v);
  else if (key == "p2") p2 = to_double(key, v);
  else if (key == "nonlinearity") nonlinearity = v;
  else if (key.rfind("nonlinearity.", 0) == 0) overrides[key.substr(13)] = to_double(key, v);
  else if (key == "mode") mode = parse_mode(v);
  else if (key == "newton_tol") solver.newton_tol = to_double(key, v);
  else if (key == "max_newton") solver.max_newton = static_cast<int>(to_int(key, v));
  else if (key == "eps_schedule") solver.eps_schedule = to_list(key, v);
  else if (key == "outer_tol") system.outer_tol = to_double(key, v);
  else if (key == "max_outer") system.max_outer = static_cast<int>(to_int(key, v));
  else if (key == "lambda_max") caps.lambda_max = to_double(key, v);
  else if (key == "theta_max") caps.theta_max = to_double(key, v);
  else if (key == "seed") {
    const long long s = to_int(key, v);
    if (s < 0) throw ConfigurationError("seed must be nonnegative");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "samples") samples = static_cast<int>(to_int(key, v));
  else if (key == "tau") tau = to_double(key, v);
  else if (key == "sweep.lambda") sweep.lambda = to_list(key, v);
  else if (key == "sweep.theta") sweep.theta = to_list(key, v);
  else if (key == "sweep.delta") sweep.delta = to_list(key, v);
  else if (key == "sweep.p") {
    sweep.p.clear();
    for (const auto& item : split(v, ',')) {
      const auto parts = split(item, ':');
      if (parts.size() == 1) {
        const double x = to_double(key, parts[0]);
        sweep.p.emplace_back(x, x);
      } else if (parts.size() == 2) {
        sweep.p.emplace_back(to_double(key, parts[0]), to_double(key, parts[1]));
      } else {
        throw ConfigurationError("key 'sweep.p': bad entry '" + item + "'");
      }
    }
  } else if (key == "out") out = v;
  else throw ConfigurationError("unknown key '" + key + "'");
}

void RunConfig::validate() const {
  domain.validate();
  if (nodes < 16) throw ConfigurationError("nodes must be at least 16");
  if (!(grading >= 1.0)) throw ConfigurationError("grading must be >= 1");
  if (!(p1 > 1.0) || !(p2 > 1.0)) throw ConfigurationError("exponents must exceed 1");
  solver.validate();
  if (!(system.outer_tol >= 0.0)) throw ConfigurationError("outer_tol must be nonnegative");
  if (system.max_outer < 1) throw ConfigurationError("max_outer must be positive");
  if (!(caps.lambda_max >= 2.0) || !(caps.theta_max > 0.0)) throw ConfigurationError("caps out of range");
  if (samples < 2) throw ConfigurationError("samples must be at least 2");
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigurationError("tau must lie in (0, 1)");
  make_nonlinearity(nonlinearity, overrides);  // throws on unknown names
  for (double x : sweep.lambda)
    if (!(x > 1.0) || !std::isfinite(x)) throw ConfigurationError("sweep.lambda entries must be finite and > 1");
  for (double x : sweep.theta)
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigurationError("sweep.theta entries must be finite and > 0");
  for (double x : sweep.delta)
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigurationError("sweep.delta entries must be finite and > 0");
  for (auto [a, b] : sweep.p)
    if (!(a > 1.0) || !(b > 1.0)) throw ConfigurationError("sweep.p entries must exceed 1");
}

void RunConfig::write(std::ostream& os) const {
  std::ostringstream s;
  const auto n = [](double x) { return format_number(x); };
  if (domain.kind == DomainKind::Interval) {
    s << "domain = interval\na = " << n(domain.a) << "\nb = " << n(domain.b) << '\n';
  } else {
    s << "domain = ball\nradius = " << n(domain.radius) << "\ndimension = " << domain.dim << '\n';
  }
  s << "nodes = " << nodes << "\ngrading = " << n(grading) << "\np1 = " << n(p1) << "\np2 = " << n(p2) << '\n';
  s << "nonlinearity = " << nonlinearity << '\n';
  for (const auto& [k, x] : overrides) s << "nonlinearity." << k << " = " << n(x) << '\n';
  s << "mode = " << mode_name(mode) << '\n';
  s << "newton_tol = " << n(solver.newton_tol) << "\nmax_newton = " << solver.max_newton << "\neps_schedule = ";
  write_list(s, solver.eps_schedule);
  s << "\nouter_tol = " << n(system.outer_tol) << "\nmax_outer = " << system.max_outer << '\n';
  s << "lambda_max = " << n(caps.lambda_max) << "\ntheta_max = " << n(caps.theta_max) << '\n';
  s << "seed = " << seed << "\nsamples = " << samples << "\ntau = " << n(tau) << '\n';
  s << "sweep.lambda = ";
  write_list(s, sweep.lambda);
  s << "\nsweep.theta = ";
  write_list(s, sweep.theta);
  s << "\nsweep.delta = ";
  write_list(s, sweep.delta);
  s << "\nsweep.p = ";
  for (std::size_t k = 0; k < sweep.p.size(); ++k)
    s << (k ? "," : "") << n(sweep.p[k].first) << ':' << sweep.p[k].second;
  s << '\n';
  os << s.str();
}

Exponents RunConfig::exponents() const { return Exponents::make(p1, p2, domain.dimension()); }

RunConfig parse_config(std::istream& is) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigurationError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigurationError("line " + std::to_string(lineno) + ": empty key");
    c.set(key, trim(line.substr(eq + 1)));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace nodal
