#include "nodal/domain.hpp"

#include <array>
#include <cmath>
#include <ostream>

#include "nodal/errors.hpp"

namespace nodal {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGaussX = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussW = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

// (b^e - a^e)/e for 0 <= a < b, e > 0, without cancellation for tiny e.
double power_difference(double e, double a, double b) {
  if (a == 0.0) return std::exp(e * std::log(b)) / e;
  return std::exp(e * std::log(a)) * std::expm1(e * std::log(b / a)) / e;
}

}  // namespace

DomainDesc DomainDesc::interval(double a, double b) {
  DomainDesc d;
  d.kind = DomainKind::Interval;
  d.a = a;
  d.b = b;
  d.validate();
  return d;
}

DomainDesc DomainDesc::ball(double radius, int dim) {
  DomainDesc d;
  d.kind = DomainKind::RadialBall;
  d.radius = radius;
  d.dim = dim;
  d.validate();
  return d;
}

void DomainDesc::validate() const {
  if (kind == DomainKind::Interval) {
    if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
      throw ConfigurationError("interval requires finite endpoints a < b");
  } else {
    if (!(radius > 0) || !std::isfinite(radius)) throw ConfigurationError("ball radius must be positive");
    if (dim < 2 || dim > 12) throw ConfigurationError("ball dimension must lie in [2, 12]");
  }
}

double DomainDesc::max_distance() const {
  return kind == DomainKind::Interval ? 0.5 * (b - a) : radius;
}

double DomainDesc::measure() const {
  if (kind == DomainKind::Interval) return b - a;
  return unit_sphere_area(dim) * std::pow(radius, dim) / dim;
}

int DomainDesc::dimension() const { return kind == DomainKind::Interval ? 1 : dim; }

double unit_sphere_area(int n) {
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

Grid::Grid(const DomainDesc& desc, Eigen::VectorXd nodes, double grading)
    : desc_(desc), nodes_(std::move(nodes)), grading_(grading) {
  desc_.validate();
  const Index n = nodes_.size();
  if (n < 2) throw ConfigurationError("grid needs at least two nodes");
  for (Index i = 0; i + 1 < n; ++i)
    if (!(nodes_[i + 1] > nodes_[i])) throw ConfigurationError("grid nodes must be strictly increasing");
  const bool interval = desc_.kind == DomainKind::Interval;
  const double lo = interval ? desc_.a : 0.0;
  const double hi = interval ? desc_.b : desc_.radius;
  if (nodes_[0] != lo || nodes_[n - 1] != hi) throw ConfigurationError("grid must span the domain");

  dist_.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double x = nodes_[i];
    dist_[i] = interval ? std::min(x - desc_.a, desc_.b - x) : desc_.radius - x;
  }
  dist_[n - 1] = 0.0;
  if (interval) dist_[0] = 0.0;

  cell_w_.resize(n - 1);
  node_w_.setZero(n);
  const double area = interval ? 1.0 : unit_sphere_area(desc_.dim);
  for (Index k = 0; k + 1 < n; ++k) {
    const double x0 = nodes_[k], x1 = nodes_[k + 1], h = x1 - x0;
    if (interval) {
      cell_w_[k] = h;
      node_w_[k] += 0.5 * h;
      node_w_[k + 1] += 0.5 * h;
    } else {
      const int N = desc_.dim;
      cell_w_[k] = area * (std::pow(x1, N) - std::pow(x0, N)) / N;
      double left = 0.0, right = 0.0;
      for (std::size_t q = 0; q < kGaussX.size(); ++q) {
        const double t = 0.5 * (kGaussX[q] + 1.0);
        const double w = 0.5 * h * kGaussW[q] * area * std::pow(x0 + t * h, N - 1);
        left += w * (1.0 - t);
        right += w * t;
      }
      node_w_[k] += left;
      node_w_[k + 1] += right;
    }
  }
}

bool Grid::is_boundary(Index i) const {
  if (i == size() - 1) return true;
  return desc_.kind == DomainKind::Interval && i == 0;
}

std::vector<Index> Grid::boundary_nodes() const {
  if (desc_.kind == DomainKind::Interval) return {0, size() - 1};
  return {size() - 1};
}

double Grid::outward_sign(Index i) const {
  if (i == size() - 1) return 1.0;
  if (i == 0 && desc_.kind == DomainKind::Interval) return -1.0;
  return 0.0;
}

double Grid::density(double x) const {
  if (desc_.kind == DomainKind::Interval) return 1.0;
  return unit_sphere_area(desc_.dim) * std::pow(x, desc_.dim - 1);
}

GridPtr build_grid(const DomainDesc& desc, Index n, double grading_exponent) {
  desc.validate();
  if (n < 16) throw ConfigurationError("grid needs at least 16 nodes");
  if (!(grading_exponent >= 1.0) || !std::isfinite(grading_exponent))
    throw ConfigurationError("grading exponent must be >= 1");
  const double g = grading_exponent;
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    if (desc.kind == DomainKind::Interval) {
      const double half = 0.5 * (desc.b - desc.a);
      // mirrored so that both ends are refined alike
      if (2 * i <= n - 1)
        x[i] = desc.a + half * std::pow(2.0 * s, g);
      else
        x[i] = desc.b - half * std::pow(2.0 * (1.0 - s), g);
    } else {
      x[i] = desc.radius * (1.0 - std::pow(1.0 - s, g));
    }
  }
  x[0] = desc.kind == DomainKind::Interval ? desc.a : 0.0;
  x[n - 1] = desc.kind == DomainKind::Interval ? desc.b : desc.radius;
  return std::make_shared<const Grid>(desc, std::move(x), g);
}

GridFunction::GridFunction(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw ConfigurationError("grid function without grid");
  if (values_.size() != grid_->size()) throw ConfigurationError("grid function length mismatch");
}

GridFunction GridFunction::constant(GridPtr grid, double c) {
  const Index n = grid->size();
  return GridFunction(std::move(grid), Eigen::VectorXd::Constant(n, c));
}

GridFunction GridFunction::from(GridPtr grid, const std::function<double(double)>& f) {
  Eigen::VectorXd v(grid->size());
  for (Index i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
  return GridFunction(std::move(grid), std::move(v));
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (a.grid() != b.grid()) {
    if (!a.grid() || !b.grid() || a.grid()->size() != b.grid()->size() ||
        a.grid()->nodes() != b.grid()->nodes())
      throw ConfigurationError("grid functions live on different grids");
  }
}

GridFunction distance(const GridPtr& grid) { return GridFunction(grid, grid->distance()); }

std::vector<Index> delta_strip(const Grid& grid, double delta) {
  if (!(delta > 0.0) || delta > grid.domain().max_distance())
    throw ConfigurationError("strip width out of range");
  std::vector<Index> out;
  const auto& d = grid.distance();
  for (Index i = 0; i < d.size(); ++i)
    if (d[i] < delta) out.push_back(i);
  return out;
}

WeightExponent WeightExponent::from_value(double beta) {
  if (!std::isfinite(beta)) throw SingularityError("weight exponent is not finite");
  return from_margin(beta + 1.0);
}

WeightExponent WeightExponent::from_margin(double m) {
  if (!(m > 0.0) || !std::isfinite(m))
    throw SingularityError("weight exponent must exceed -1 (d^beta not integrable)");
  return WeightExponent(m);
}

double WeightExponent::pow(double d) const { return std::exp(margin_ * std::log(d)) / d; }

double WeightExponent::log_pow(double d) const { return (margin_ - 1.0) * std::log(d); }

namespace {

// Integral of d^beta (A + B d) rho(d) over [e0, e1], rho the measure density
// written in the distance variable.
double piece_integral(const Grid& g, WeightExponent beta, double e0, double e1, double A, double B) {
  if (!(e1 > e0)) return 0.0;
  const double km = beta.margin();
  if (g.domain().kind == DomainKind::Interval) {
    double s = 0.0;
    if (A != 0.0) s += A * power_difference(km, e0, e1);
    if (B != 0.0) s += B * power_difference(km + 1.0, e0, e1);
    return s;
  }
  const int N = g.domain().dim;
  const double R = g.domain().radius;
  // rho(d) = |S| (R - d)^{N-1}
  std::vector<double> rho(N, 0.0);
  double binom = 1.0;
  for (int j = 0; j < N; ++j) {
    rho[j] = binom * std::pow(R, N - 1 - j) * ((j % 2) ? -1.0 : 1.0);
    binom = binom * (N - 1 - j) / (j + 1);
  }
  double s = 0.0;
  for (int i = 0; i <= N; ++i) {
    double c = 0.0;
    if (i < N) c += A * rho[i];
    if (i >= 1) c += B * rho[i - 1];
    if (c != 0.0) s += c * power_difference(km + i, e0, e1);
  }
  return unit_sphere_area(N) * s;
}

// Integrate d^beta * l over cell k within the band, l linear with end values
// (v0, v1). With absolute = true the integrand is |l|.
double cell_integral(const Grid& g, Index k, WeightExponent beta, double v0, double v1,
                     const Region& band, bool absolute) {
  const double x0 = g.node(k), x1 = g.node(k + 1);
  const double c_lo = std::max(x0, band.x_lo), c_hi = std::min(x1, band.x_hi);
  if (!(c_hi > c_lo)) return 0.0;
  auto dist_of = [&](double x) {
    if (x == x0) return g.distance()[k];
    if (x == x1) return g.distance()[k + 1];
    if (g.domain().kind == DomainKind::Interval) return std::min(x - g.domain().a, g.domain().b - x);
    return g.domain().radius - x;
  };
  std::array<double, 3> xs{c_lo, c_hi, c_hi};
  int np = 2;
  if (g.domain().kind == DomainKind::Interval) {
    const double mid = 0.5 * (g.domain().a + g.domain().b);
    if (c_lo < mid && mid < c_hi) {
      xs = {c_lo, mid, c_hi};
      np = 3;
    }
  }
  std::array<double, 3> ds{dist_of(xs[0]), dist_of(xs[1]), dist_of(xs[2])};
  const double h = x1 - x0;
  auto lin = [&](double x) {
    if (x == x0) return v0;
    if (x == x1) return v1;
    return v0 + (v1 - v0) * (x - x0) / h;
  };
  double total = 0.0;
  for (int p = 0; p + 1 < np; ++p) {
    double ea = ds[p], eb = ds[p + 1];
    double la = lin(xs[p]), lb = lin(xs[p + 1]);
    if (ea > eb) {
      std::swap(ea, eb);
      std::swap(la, lb);
    }
    if (!(eb > ea)) continue;
    const double c0 = std::max(ea, band.lo), c1 = std::min(eb, band.hi);
    if (!(c1 > c0)) continue;
    auto at = [&](double c) {
      if (c == ea) return la;
      if (c == eb) return lb;
      return la + (lb - la) * (c - ea) / (eb - ea);
    };
    const double l0 = at(c0), l1 = at(c1);
    auto add = [&](double e0, double e1, double f0, double f1) {
      const double B = (f1 - f0) / (e1 - e0);
      const double A = (e0 == 0.0) ? f0 : f0 - B * e0;
      double val = piece_integral(g, beta, e0, e1, A, B);
      if (absolute && f0 + f1 < 0.0) val = -val;
      total += val;
    };
    if (absolute && ((l0 < 0.0 && l1 > 0.0) || (l0 > 0.0 && l1 < 0.0))) {
      const double root = c0 + (c1 - c0) * l0 / (l0 - l1);
      add(c0, root, l0, 0.0);
      add(root, c1, 0.0, l1);
    } else {
      add(c0, c1, l0, l1);
    }
  }
  return total;
}

}  // namespace

double integrate_weighted(const GridFunction& u, WeightExponent beta, const Region& region) {
  const Grid& g = *u.grid();
  double s = 0.0;
  for (Index k = 0; k < g.cells(); ++k) s += cell_integral(g, k, beta, u[k], u[k + 1], region, true);
  return s;
}

double integrate_weighted(const GridFunction& u, double beta, const Region& region) {
  return integrate_weighted(u, WeightExponent::from_value(beta), region);
}

double integrate_signed(const GridFunction& u, WeightExponent beta, const Region& region) {
  const Grid& g = *u.grid();
  double s = 0.0;
  for (Index k = 0; k < g.cells(); ++k) s += cell_integral(g, k, beta, u[k], u[k + 1], region, false);
  return s;
}

Eigen::VectorXd weighted_load(const Grid& g, WeightExponent beta, const Region& region) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
  for (Index k = 0; k < g.cells(); ++k) {
    out[k] += cell_integral(g, k, beta, 1.0, 0.0, region, false);
    out[k + 1] += cell_integral(g, k, beta, 0.0, 1.0, region, false);
  }
  return out;
}

void write_tsv(std::ostream& os, const Grid& g) {
  os << "node\tx\td\tnode_weight\tcell_weight\n";
  for (Index i = 0; i < g.size(); ++i) {
    os << i << '\t' << g.node(i) << '\t' << g.distance()[i] << '\t' << g.node_weights()[i] << '\t';
    if (i + 1 < g.size()) os << g.cell_weights()[i];
    os << '\n';
  }
}

}  // namespace nodal
