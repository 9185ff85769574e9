#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nodal/auxiliary.hpp"
#include "nodal/model.hpp"

namespace nodal {

enum class BarrierKind { Nodal, Positive };

struct BarrierParams {
  Exponents exponents;
  SingularWeightParams weight;
  double mu = 1.0;
  TorsionConstants constants;  // l = min over components, L and L_hat = max
  double d_star = 0.0;         // max d

  void validate() const;
};

struct BarrierSet {
  GridFunction u_sub, v_sub, u_sup, v_sup;
  BarrierParams params;
  BarrierKind kind = BarrierKind::Nodal;
  CertificationReport certificates;  // recorded by the builders
  std::array<GridFunction, 2> torsion;  // z_1, z_2 behind the super-solutions

  const GridFunction& sub(int i) const { return i == 0 ? u_sub : v_sub; }
  const GridFunction& sup(int i) const { return i == 0 ? u_sup : v_sup; }
};

// (z_delta - l delta / 2) / lambda
std::pair<GridFunction, GridFunction> build_sub(const BarrierParams& params, const GridFunction& z1d,
                                                const GridFunction& z2d);
// lambda^{p'} (z^omega - (L delta / lambda^theta)^omega)
std::pair<GridFunction, GridFunction> build_super(const BarrierParams& params, const GridFunction& z1,
                                                  const GridFunction& z2);

BarrierSet build_nodal_barriers(const BarrierParams& params, const GridFunction& z1, const GridFunction& z2,
                                const GridFunction& z1d, const GridFunction& z2d);
// (z_delta / lambda, lambda^{p'} z^omega); records the lower bound u_sub >= l d / (2 lambda)
BarrierSet build_positive_barriers(const BarrierParams& params, const GridFunction& z1, const GridFunction& z2,
                                   const GridFunction& z1d, const GridFunction& z2d);

struct SamplingOptions {
  int samples = 9;  // endpoints, midpoint, the rest uniform draws
  std::uint64_t seed = 20240601;
};

CertificationReport certify_ordering(const BarrierSet& bs);

// Analytic strong forms of -Delta_p of the barriers at node j.
double sub_strong_form(const BarrierParams& params, int i, double d);
double super_strong_form(const BarrierParams& params, int i, double z, double dz);

CertificationReport certify_sub_inequality(const BarrierSet& bs, const NonlinearitySpec& spec,
                                           const BarrierParams& params, const SamplingOptions& opt = {});
CertificationReport certify_super_inequality(const BarrierSet& bs, const NonlinearitySpec& spec,
                                             const BarrierParams& params, const SamplingOptions& opt = {});

// Sampled bound of |f|, |g| over the barrier box.
double box_bound(const BarrierSet& bs, const NonlinearitySpec& spec, int n_samples = 17);

struct Caps {
  double lambda_max = 65536.0;
  double theta_max = 64.0;
};

struct LadderRow {
  double lambda = 0.0, theta = 0.0;
  double delta0 = 0.0, delta = 0.0;
  bool pass = false;
  std::string reason;  // failing check or rejected precondition
};

struct Selection {
  BarrierParams params;
  BarrierSet barriers;
  std::array<GridFunction, 2> z, z_delta;
  std::array<TorsionConstants, 2> component_constants;
  std::array<double, 2> delta0{};
  CertificationReport report;  // strip pair per component, ordering, sub, super
  std::vector<LadderRow> ladder;
};

// Everything the ladder computes for one candidate (lambda, theta).
Selection evaluate_candidate(const NonlinearitySpec& spec, const Exponents& exps, const std::array<GridFunction, 2>& z,
                             double lambda, double theta, const SolverConfig& cfg, BarrierKind kind,
                             const SamplingOptions& opt, LadderRow& row, double fixed_delta = 0.0);

// Smallest (lambda, theta) in lexicographic order on the doubling ladder for
// which every barrier certificate passes.
Selection select_parameters(const NonlinearitySpec& spec, const Exponents& exps, const GridPtr& grid,
                            const Caps& caps, const SolverConfig& cfg, BarrierKind kind = BarrierKind::Nodal,
                            const SamplingOptions& opt = {});

double first_theta(const Exponents& exps);

// node, d, u_sub, u_sup, v_sub, v_sup, h1, h2
void write_tsv(std::ostream& os, const BarrierSet& bs);

}  // namespace nodal
