#include "shl/semigroup.hpp"

#include <cmath>
#include <limits>

#include "shl/bessel.hpp"
#include "shl/errors.hpp"
#include "shl/parallel.hpp"

namespace shl {

std::shared_ptr<const DiscEigenbasis> DiscEigenbasis::build(double R, int K) {
  if (K < 1 || !(R > 0.0)) throw DomainError("DiscEigenbasis: need K >= 1, R > 0");
  auto b = std::make_shared<DiscEigenbasis>();
  b->R = R;
  b->K = K;
  b->zeros = j0_zeros(K);
  b->lambda.resize(K);
  b->norm.resize(K);
  for (int k = 0; k < K; ++k) {
    double z = b->zeros[k];
    b->lambda[k] = z * z / (R * R);
    double j1 = cyl_j1(z);
    b->norm[k] = 0.5 * R * R * j1 * j1;
  }
  return b;
}

DiscSemigroup::DiscSemigroup(BasisPtr basis, GridPtr grid)
    : basis_(std::move(basis)), grid_(std::move(grid)) {
  const auto& b = *basis_;
  const auto& g = *grid_;
  table_.resize(static_cast<size_t>(b.K) * g.n);
  parallel_for(b.K, [&](int k) {
    double scale = b.zeros[k] / g.R;
    for (int i = 0; i < g.n; ++i)
      table_[static_cast<size_t>(k) * g.n + i] = cyl_j0(scale * g.r[i]);
  });
  weights_ = annulus_weights(g);
}

Projection DiscSemigroup::project(const RadialField& u,
                                  OriginPatch patch) const {
  const auto& g = *grid_;
  const auto& b = *basis_;
  if (!u.grid || u.grid->n != g.n || std::abs(u.grid->R - g.R) > 1e-12 * g.R)
    throw DomainError("project: field grid does not match the basis grid");

  // mass below the innermost node
  double mass = 0.0;
  double r_in = g.r_min();
  double u_in = u.u[g.n - 1];
  switch (patch.kind) {
    case OriginPatch::Kind::ConstantField:
      mass = 0.5 * u_in * r_in * r_in;
      break;
    case OriginPatch::Kind::SingularSource: {
      // field ~ kappa (4/(B B')) y^{1/B'-2} / r^2, y = -2 log r; calibrate
      // kappa at the innermost node and integrate the law below it.
      double B = patch.B;
      double Bp = B / (B - 1.0);
      double y = -2.0 * std::log(r_in);
      double kappa =
          u_in * r_in * r_in * (B * Bp / 4.0) * std::pow(y, 2.0 - 1.0 / Bp);
      mass = kappa * (2.0 / Bp) * std::pow(y, -1.0 / B);
      break;
    }
    case OriginPatch::Kind::None:
      break;
  }

  Projection p;
  p.c.assign(b.K, 0.0);
  parallel_for(b.K, [&](int k) {
    const double* row = &table_[static_cast<size_t>(k) * g.n];
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) acc += weights_[i] * u.u[i] * row[i];
    p.c[k] = (acc + mass) / b.norm[k];
  });

  double l2 = lp_norm(u, 2.0);
  double spec = 0.0;
  for (int k = 0; k < b.K; ++k) spec += p.c[k] * p.c[k] * b.norm[k];
  p.parseval_defect = std::abs(2.0 * M_PI * spec - l2 * l2);
  return p;
}

RadialField DiscSemigroup::synthesize(const std::vector<double>& coeff) const {
  const auto& g = *grid_;
  const auto& b = *basis_;
  if (static_cast<int>(coeff.size()) != b.K)
    throw DomainError("synthesize: coefficient count mismatch");
  RadialField out(grid_);
  parallel_for(g.n, [&](int i) {
    double acc = 0.0;
    for (int k = 0; k < b.K; ++k)
      acc += coeff[k] * table_[static_cast<size_t>(k) * g.n + i];
    out.u[i] = acc;
  });
  return out;
}

RadialField DiscSemigroup::heat_apply(const RadialField& u, double t,
                                      OriginPatch patch) const {
  if (t < 0.0) throw DomainError("heat_apply: t must be >= 0");
  Projection p = project(u, patch);
  for (int k = 0; k < basis_->K; ++k) p.c[k] *= std::exp(-basis_->lambda[k] * t);
  return synthesize(p.c);
}

std::vector<double> DiscSemigroup::duhamel_modes(
    const std::vector<double>& times, const std::vector<Projection>& sources,
    double t) const {
  const auto& b = *basis_;
  if (times.size() != sources.size() || times.size() < 2)
    throw DomainError("duhamel: need matching times/sources, at least 2");
  for (const auto& s : sources)
    if (static_cast<int>(s.c.size()) != b.K)
      throw DomainError("duhamel: source projection size mismatch");
  // locate t among the samples
  size_t jt = times.size();
  for (size_t j = 0; j < times.size(); ++j)
    if (std::abs(times[j] - t) <= 1e-12 * std::max(1.0, std::abs(t))) jt = j;
  if (jt == times.size())
    throw DomainError("duhamel: t must be one of the sample times");

  std::vector<double> I(b.K, 0.0);
  for (size_t j = 0; j + 1 <= jt; ++j) {
    double s0 = times[j], s1 = times[j + 1];
    double dt = s1 - s0;
    if (dt <= 0.0) throw DomainError("duhamel: times must increase");
    for (int k = 0; k < b.K; ++k) {
      double lam = b.lambda[k];
      double z = lam * dt;
      double E0 = std::exp(-lam * (t - s0));
      double E1 = std::exp(-lam * (t - s1));
      double g0, g1;
      if (z < 1e-4) {
        g0 = E0 * (0.5 + z / 6.0 + z * z / 24.0);
        g1 = E0 * (0.5 + z / 3.0 + z * z / 8.0);
      } else {
        g0 = (E1 - E0 * (1.0 + z)) / (z * z);
        g1 = (E1 * (z - 1.0) + E0) / (z * z);
      }
      I[k] += dt * (sources[j].c[k] * g0 + sources[j + 1].c[k] * g1);
    }
  }
  return I;
}

double lp_norm(const RadialField& u, double p) {
  const auto& g = *u.grid;
  if (p == std::numeric_limits<double>::infinity()) {
    double m = 0.0;
    for (double v : u.u) m = std::max(m, std::abs(v));
    return m;
  }
  if (p < 1.0) throw DomainError("lp_norm: p must be >= 1 or inf");
  auto w = annulus_weights(g);
  double acc = 0.0;
  for (int i = 0; i < g.n; ++i) acc += w[i] * std::pow(std::abs(u.u[i]), p);
  return std::pow(2.0 * M_PI * acc, 1.0 / p);
}

double y_distance(const RadialField& a, const RadialField& b, int K_terms) {
  if (!same_grid(a, b)) throw DomainError("y_distance: grid mismatch");
  RadialField d(a.grid);
  for (int i = 0; i < d.size(); ++i) d.u[i] = a.u[i] - b.u[i];
  double acc = 0.0, w = 1.0;
  for (int k = 1; k <= K_terms; ++k) {
    w *= 0.5;
    double nk = lp_norm(d, static_cast<double>(k));
    acc += w * nk / (1.0 + nk);
  }
  return acc;
}

}  // namespace shl
