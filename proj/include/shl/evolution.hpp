#pragma once

#include <string>
#include <vector>

#include "shl/nonlinearity.hpp"
#include "shl/radial.hpp"
#include "shl/semigroup.hpp"

namespace shl {

enum class SourceMode { Explicit, SemiImplicit };

enum class InnerBc {
  NeumannZero,  // zero rho-slope at the innermost node (regular center)
  PinnedTrace   // hold the initial inner value (annulus problem with the
                // exact inner trace; used for equilibrium-defect studies)
};

struct EvolutionConfig {
  double dt = 2.5e-4;    // base marching step; adapted downward as needed
  double T = 0.1;        // requested horizon (may be truncated by blow-up)
  double theta = 1.0;    // implicitness of the diffusion term, in [1/2, 1]
  SourceMode source_mode = SourceMode::SemiImplicit;
  InnerBc inner_bc = InnerBc::NeumannZero;
  int max_perron_iters = 40;
  double perron_tol = 1e-8;   // sup-norm increment stop
  double blowup_cap = 1e6;    // ceiling for t > 0 fields
  int store_steps = 64;       // uniform samples kept on [0, T]
  int substeps = 8;           // marching substeps per stored interval (Perron)
  double u_cap = 26.0;        // argument cap guarding exp overflow in f
};

struct TrajDiag {
  double t = 0, sup = 0, l1 = 0, l2 = 0, l5 = 0, t310l5 = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<RadialField> fields;
  std::vector<TrajDiag> diag;
  bool blowup = false;
  double T_effective = 0.0;

  int index_of(double t) const;  // nearest stored sample
  const RadialField& at_time(double t) const { return fields[index_of(t)]; }
};

// Sample-time list for a horizon: uniform store_steps grid, dyadic times
// T 2^{-j} (j = 1..8) and the probe times, merged and deduplicated.
std::vector<double> sample_times(double T, int store_steps,
                                 const std::vector<double>& probes = {});

// theta-implicit solver for  w_t = Lap w + w^3/2,  w = wall_value on r = R.
// Adaptive step halving on large L2 increments; semi-implicit reaction with
// a diagonal-dominance cap dt <= 1/max(w^2). Truncates on blow-up.
Trajectory solve_cubic_auxiliary(const GridPtr& grid, const RadialField& w0,
                                 double wall_value, const EvolutionConfig& cfg,
                                 const std::vector<double>& store_times);

// ubar = F^{-1}(w^{-2}) sample by sample.
Trajectory build_supersolution(const Nonlinearity& f, const Trajectory& w_traj);

struct DefectFields {
  RadialField algebraic;  // 4 f(ub) w^{-4} |grad w|^2 (3/2 - f'F(ub))
  RadialField raw;        // dt ub - Lap ub - f(ub), spatial FD + the w-equation
  double algebraic_min = 0.0;
  double raw_min = 0.0;           // over every interior node
  double raw_min_resolved = 0.0;  // over nodes whose roundoff floor is below
                                  // 1e-4 (deep-core second differences of a
                                  // flat field amplify machine epsilon by
                                  // 1/(h^2 r^2) beyond any useful tolerance)
};

DefectFields supersolution_defect(const Nonlinearity& f,
                                  const Trajectory& w_traj, double beta,
                                  int time_index);

struct PerronResult {
  Trajectory u;                    // converged regular candidate
  int iterations = 0;
  std::vector<double> increments;  // sup over (t, x) per iteration
  bool converged = false;
  bool monotone_ok = true;
  bool dominated_ok = true;
  double worst_monotone = 0.0;    // most negative pointwise increment
  double worst_domination = 0.0;  // most positive excess over ubar
};

// Monotone iteration U^(n) = e^{t Lap} u0 + Duhamel(f(U^(n-1))), realized by
// the positivity-preserving implicit finite-difference propagator (so the
// monotone induction of the Perron method holds to roundoff). The spectral
// basis is used by the callers for residual certification.
PerronResult perron_iterate(const Nonlinearity& f, const RadialField& u0,
                            const Trajectory& ubar, const EvolutionConfig& cfg);

// Nonlinear theta-scheme for u_t = Lap u + f(u), zero Dirichlet wall.
Trajectory solve_direct(const Nonlinearity& f, const RadialField& u0,
                        const EvolutionConfig& cfg,
                        const std::vector<double>& store_times);

// Heat march with a frozen external source (linear in time between samples);
// building block of perron_iterate, exposed for the f == 0 oracle tests.
Trajectory heat_march(const RadialField& u0, double wall_value,
                      const EvolutionConfig& cfg,
                      const std::vector<double>& store_times,
                      const std::vector<RadialField>* src_samples);

struct MildOptions {
  OriginPatch u0_patch = OriginPatch::constant();
  OriginPatch source0_patch = OriginPatch::constant();  // the s = 0 slot
  OriginPatch source_patch = OriginPatch::constant();   // the s > 0 slots
  int p = 1;
};

// || u(t) - e^{t Lap} u(0) - int_0^t e^{(t-s) Lap} f(u(s)) ds ||_{L^p}
double mild_residual(const Nonlinearity& f, const Trajectory& traj,
                     const DiscSemigroup& sg, double t, const MildOptions& mo);

// Increasing concave extension H of F^{-1}(t^{-2}) past the wall value, with
// the tangent line below; H(0) = beta - 2 f(beta) F(beta) >= 0.
struct ConcaveExtension {
  Nonlinearity f;
  double beta, F_beta, t0, slope;
  explicit ConcaveExtension(const Nonlinearity& f_, double beta_);
  double operator()(double t) const;
};

struct NonUniquenessReport {
  std::vector<double> probe_times;
  std::vector<double> residual_stationary_l1, residual_stationary_l2;
  std::vector<double> residual_regular_l1, residual_regular_l2;
  double separation = 0.0;
  double bounded_indicator = 0.0;  // sup_{t >= t0} sup_x u_r
  double grid_max_u0 = 0.0;
  bool verdict = false;
  double T = 0.0, R = 0.0, beta = 0.0, wall_value = 0.0;
  double cross_validation_l2 = 0.0;
  double scheme_error_estimate = 0.0;
  int perron_iterations = 0;
  double perron_worst_monotone = 0.0, perron_worst_domination = 0.0;
  std::vector<double> perron_increments;
  bool ubar_heat_dominates = false, duhamel_sup_vanishing = false, l5_diag_decreasing = false;
  std::vector<std::pair<std::string, std::string>> stages;  // name -> info
  Trajectory w_traj, u_regular;  // kept for serialization by the front end
};

struct DemoConfig {
  std::string spec_key = "smoothed:B=2";
  int n = 2048;
  double rho_max = 12.0;
  int K = 256;
  double ode_tol = 1e-9;
  double r_seed = 1e-6;
  EvolutionConfig evo;
  std::vector<double> probes;          // empty -> {T/10, T/2, 9T/10}
  enum class U0Mode { Singular, Truncated, Zero } u0_mode = U0Mode::Singular;
  double u0_truncate = 5.0;
  double f3_threshold = 1e-2;
};

NonUniquenessReport nonuniqueness_demo(const Nonlinearity& f,
                                       const DemoConfig& cfg);

}  // namespace shl
