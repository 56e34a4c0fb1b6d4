#pragma once

#include <memory>
#include <vector>

#include "shl/radial.hpp"

namespace shl {

// Order-zero Dirichlet eigenpairs of the disc of radius R:
//   phi_k(r) = J0(j_{0,k} r / R),  lambda_k = (j_{0,k}/R)^2,
//   norm_k = (R^2/2) J1(j_{0,k})^2 = int_0^R phi_k^2 r dr.
struct DiscEigenbasis {
  double R = 1.0;
  int K = 0;
  std::vector<double> zeros, lambda, norm;
  static std::shared_ptr<const DiscEigenbasis> build(double R, int K);
};

using BasisPtr = std::shared_ptr<const DiscEigenbasis>;

// How to account for the field mass hidden below the innermost grid node.
struct OriginPatch {
  enum class Kind {
    ConstantField,   // extend by the innermost value (bounded fields)
    SingularSource,  // f(U)-type 1/r^2 law with the model exponents
    None
  };
  Kind kind = Kind::ConstantField;
  double B = 2.0;  // classification exponent for SingularSource
  static OriginPatch constant() { return {Kind::ConstantField, 0.0}; }
  static OriginPatch singular_source(double B) {
    return {Kind::SingularSource, B};
  }
  static OriginPatch none() { return {Kind::None, 0.0}; }
};

struct Projection {
  std::vector<double> c;
  double parseval_defect = 0.0;
};

// Spectral realization of e^{t Lap} bound to one grid (cached mode table).
class DiscSemigroup {
 public:
  DiscSemigroup(BasisPtr basis, GridPtr grid);

  const DiscEigenbasis& basis() const { return *basis_; }
  const GridPtr& grid() const { return grid_; }

  Projection project(const RadialField& u,
                     OriginPatch patch = OriginPatch::constant()) const;
  RadialField synthesize(const std::vector<double>& coeff) const;
  RadialField heat_apply(const RadialField& u, double t,
                         OriginPatch patch = OriginPatch::constant()) const;

  // Mode-wise product integration of int_0^t e^{-(t-s) lambda} c_k(s) ds
  // with c_k piecewise linear on the sample times (exact for linear data).
  std::vector<double> duhamel_modes(const std::vector<double>& times,
                                    const std::vector<Projection>& sources,
                                    double t) const;
  RadialField duhamel(const std::vector<double>& times,
                      const std::vector<Projection>& sources, double t) const {
    return synthesize(duhamel_modes(times, sources, t));
  }

 private:
  BasisPtr basis_;
  GridPtr grid_;
  std::vector<double> table_;  // J0(z_k r_i / R), k-major
  std::vector<double> weights_;
};

// L^p norm over the disc, 2*pi int |u|^p r dr (grid range), p >= 1 or inf.
double lp_norm(const RadialField& u, double p);

// Truncated Frechet metric of the space Y: sum_{k<=K} 2^{-k} ||d||_k/(1+||d||_k).
double y_distance(const RadialField& a, const RadialField& b, int K_terms = 20);

}  // namespace shl
