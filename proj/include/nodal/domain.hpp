#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <vector>

namespace nodal {

using Index = Eigen::Index;

enum class DomainKind { Interval, RadialBall };

struct DomainDesc {
  DomainKind kind = DomainKind::Interval;
  double a = 0.0, b = 1.0;  // Interval endpoints
  double radius = 1.0;      // RadialBall
  int dim = 3;              // RadialBall spatial dimension

  static DomainDesc interval(double a, double b);
  static DomainDesc ball(double radius, int dim);

  void validate() const;
  // max over the closure of the distance to the boundary
  double max_distance() const;
  // Lebesgue measure of the domain
  double measure() const;
  // spatial dimension of the underlying domain (1 for the interval)
  int dimension() const;
};

// Area of the unit sphere in R^n.
double unit_sphere_area(int n);

class Grid {
 public:
  Grid(const DomainDesc& desc, Eigen::VectorXd nodes, double grading);

  const DomainDesc& domain() const { return desc_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  Index size() const { return nodes_.size(); }
  Index cells() const { return nodes_.size() - 1; }
  double node(Index i) const { return nodes_[i]; }
  double spacing(Index k) const { return nodes_[k + 1] - nodes_[k]; }
  double grading() const { return grading_; }

  // measure of cell k
  const Eigen::VectorXd& cell_weights() const { return cell_w_; }
  // lumped mass: integral of the hat function of node j
  const Eigen::VectorXd& node_weights() const { return node_w_; }
  // d at every node
  const Eigen::VectorXd& distance() const { return dist_; }

  bool is_boundary(Index i) const;
  std::vector<Index> boundary_nodes() const;
  // outward unit normal at a boundary node, in coordinate direction (+1 or -1)
  double outward_sign(Index i) const;

  // density of the measure in the grid coordinate (1 or |S^{N-1}| r^{N-1})
  double density(double x) const;

 private:
  DomainDesc desc_;
  Eigen::VectorXd nodes_;
  double grading_;
  Eigen::VectorXd cell_w_, node_w_, dist_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(const DomainDesc& desc, Index n, double grading_exponent = 1.0);

class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(GridPtr grid, Eigen::VectorXd values);

  static GridFunction constant(GridPtr grid, double c);
  static GridFunction from(GridPtr grid, const std::function<double(double)>& f);

  const GridPtr& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  Index size() const { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }
  double& operator[](Index i) { return values_[i]; }

 private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

void require_same_grid(const GridFunction& a, const GridFunction& b);

GridFunction distance(const GridPtr& grid);

// Nodes with d < delta. Requires 0 < delta <= max d.
std::vector<Index> delta_strip(const Grid& grid, double delta);

// Exponent of a power weight d^beta. Stored as beta + 1 so that exponents
// within 1e-300 of -1 keep their distance from the integrability threshold.
class WeightExponent {
 public:
  static WeightExponent from_value(double beta);
  static WeightExponent from_margin(double beta_plus_one);

  double value() const { return margin_ - 1.0; }
  double margin() const { return margin_; }
  // d^beta for d > 0
  double pow(double d) const;
  // log(d^beta)
  double log_pow(double d) const;

 private:
  explicit WeightExponent(double m) : margin_(m) {}
  double margin_;
};

// Set {lo <= d < hi} intersected with the coordinate window [x_lo, x_hi].
struct Region {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double x_lo = -std::numeric_limits<double>::infinity();
  double x_hi = std::numeric_limits<double>::infinity();

  static Region all() { return {}; }
  static Region strip(double delta) { return {0.0, delta}; }
  static Region outside(double delta) { return {delta, std::numeric_limits<double>::infinity()}; }
  static Region coordinates(double x_lo, double x_hi) {
    Region r;
    r.x_lo = x_lo;
    r.x_hi = x_hi;
    return r;
  }
};

// Integral of d^beta |u| over the region, with u piecewise linear. Exact up to
// roundoff: each cell is cut at the band ends, at the kink of d and at sign
// changes of u, and the pieces are integrated with closed-form antiderivatives.
double integrate_weighted(const GridFunction& u, WeightExponent beta,
                          const Region& region = Region::all());
double integrate_weighted(const GridFunction& u, double beta,
                          const Region& region = Region::all());

// Signed integral of d^beta u over the band.
double integrate_signed(const GridFunction& u, WeightExponent beta,
                        const Region& region = Region::all());

// Entries: integral of d^beta phi_j over the band, phi_j the hat of node j.
Eigen::VectorXd weighted_load(const Grid& grid, WeightExponent beta,
                              const Region& region = Region::all());

// node, x, d, node weight, weight of the cell to the right
void write_tsv(std::ostream& os, const Grid& grid);

}  // namespace nodal
