#include "mbi/series.hpp"

#include <cmath>
#include <stdexcept>

namespace mbi {

double maclaurin_coefficient(int j) {
  if (j < 0) throw std::invalid_argument("maclaurin_coefficient: j < 0");
  if (j > 26)
    throw std::invalid_argument(
        "maclaurin_coefficient: j > 26 is not exactly representable");
  double m = 1.0;
  for (int i = 0; i < j; ++i) m *= -double(2 * i + 1) / double(2 * i + 2);
  return m;
}

MultiIndexEnumerator::MultiIndexEnumerator(int slots, int total)
    : slots_(slots), total_(total) {
  if (slots < 0) throw std::invalid_argument("MultiIndexEnumerator: slots < 0");
  if (total_ < 0 || (slots_ == 0 && total_ != 0)) done_ = true;
}

bool MultiIndexEnumerator::next(std::vector<int>& tuple) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    current_.assign(slots_, 0);
    if (slots_ > 0) current_[0] = total_;
    tuple = current_;
    if (slots_ == 0 || current_.back() == total_) done_ = true;
    return true;
  }
  // Move one unit from the leftmost positive slot to its right neighbour,
  // returning the remainder to slot zero.
  int i = 0;
  while (i < slots_ - 1 && current_[i] == 0) ++i;
  if (i >= slots_ - 1) {
    done_ = true;
    return false;
  }
  const int v = current_[i];
  current_[i] = 0;
  current_[0] = v - 1;
  current_[i + 1] += 1;
  tuple = current_;
  if (current_.back() == total_) done_ = true;
  return true;
}

namespace {

std::uint64_t cache_key(int type, int i, int j) {
  return (std::uint64_t(type) << 40) | (std::uint64_t(i) << 20) | std::uint64_t(j);
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

const ScalarField& DotCache::dh(int i, int j) {
  const auto key = cache_key(0, i, j);
  auto it = cache_.find(key);
  if (it == cache_.end())
    it = cache_.emplace(key, dot(D_.at(i), H_.at(j))).first;
  return it->second;
}

const ScalarField& DotCache::mp(int i, int j) {
  const auto key = cache_key(1, i, j);
  auto it = cache_.find(key);
  if (it == cache_.end())
    it = cache_.emplace(key, dot(sub(D_.at(i), H_.at(i)), add(D_.at(j), H_.at(j))))
             .first;
  return it->second;
}

const ScalarField& DotCache::dd(int i, int j) {
  const auto key = cache_key(2, i, j);
  auto it = cache_.find(key);
  if (it == cache_.end())
    it = cache_.emplace(key, dot(D_.at(i), D_.at(j))).first;
  return it->second;
}

const ScalarField& DotCache::hh(int i, int j) {
  const auto key = cache_key(3, i, j);
  auto it = cache_.find(key);
  if (it == cache_.end())
    it = cache_.emplace(key, dot(H_.at(i), H_.at(j))).first;
  return it->second;
}

ScalarField compute_Z(int h, int j, int l, DotCache& cache, const GridSpec& grid) {
  if (!(0 <= l && l <= j && j <= h))
    throw std::invalid_argument("compute_Z: need 0 <= l <= j <= h");
  ScalarField Z(grid);
  const int S = h + l - 2 * j;
  if (S < 0) return Z;  // empty multi-index sum

  auto accumulate_product = [&](const std::vector<int>& a,
                                const std::vector<int>& b) {
    // product of l factors (D-H).(D+H) and 2(j-l) factors D.H
    ScalarField prod(grid);
    bool first = true;
    for (int m = 0; m < l; ++m) {
      const ScalarField& f = cache.mp(a[2 * m], a[2 * m + 1]);
      if (first) {
        prod = f;
        first = false;
      } else {
        prod = mul(prod, f);
      }
    }
    for (int n = 0; n < 2 * (j - l); ++n) {
      const ScalarField& f = cache.dh(b[2 * n], b[2 * n + 1]);
      if (first) {
        prod = f;
        first = false;
      } else {
        prod = mul(prod, f);
      }
    }
    axpy(Z, 1.0, prod);
  };

  std::vector<int> a, b;
  if (l == 0) {
    MultiIndexEnumerator e(4 * j, S);
    while (e.next(b)) accumulate_product({}, b);
  } else if (l == j) {
    MultiIndexEnumerator e(2 * j, S);
    while (e.next(a)) accumulate_product(a, {});
  } else {
    for (int sa = 0; sa <= S; ++sa) {
      MultiIndexEnumerator ea(2 * l, sa);
      while (ea.next(a)) {
        MultiIndexEnumerator eb(4 * (j - l), S - sa);
        while (eb.next(b)) accumulate_product(a, b);
      }
    }
  }
  return Z;
}

ScalarField compute_X(int h, DotCache& cache, const GridSpec& grid) {
  if (h == 0) {
    ScalarField X(grid);
    for (double& v : X.values) v = -1.0;
    return X;
  }
  ScalarField X(grid);
  for (int j = 1; j <= h; ++j) {
    ScalarField inner(grid);
    for (int l = 0; l <= j; ++l) {
      const double c = ((j - l) % 2 == 0 ? 1.0 : -1.0) * binomial(j, l);
      axpy(inner, c, compute_Z(h, j, l, cache, grid));
    }
    axpy(X, -maclaurin_coefficient(j), inner);
  }
  return X;
}

ScalarField compute_Y(int h, const std::vector<ScalarField>& X, DotCache& cache,
                      const GridSpec& grid) {
  if (h < 1) throw std::invalid_argument("compute_Y: h >= 1 required");
  ScalarField Y(grid);
  std::vector<int> a;
  for (int g = 0; g <= h - 1; ++g) {
    ScalarField pg(grid);
    MultiIndexEnumerator e(2, g);
    while (e.next(a)) axpy(pg, 1.0, cache.dh(a[0], a[1]));
    axpy(Y, -1.0, mul(X.at(h - 1 - g), pg));
  }
  return Y;
}

namespace {

// Shared skeleton of the two pure-field weights; mirrors the enumeration and
// accumulation order of compute_Z(h,j,j) + compute_X so that the
// electromagnetic engine with a vanishing seed reproduces the specialised
// engines exactly.
template <typename DotFn>
ScalarField pure_weight(int h, const GridSpec& grid, bool absolute, DotFn&& dotf) {
  ScalarField W(grid);
  std::vector<int> t;
  for (int j = 1; j <= h; ++j) {
    ScalarField inner(grid);
    MultiIndexEnumerator e(2 * j, h - j);
    while (e.next(t)) {
      ScalarField prod(grid);
      bool first = true;
      for (int i = 0; i < j; ++i) {
        const ScalarField& f = dotf(t[2 * i], t[2 * i + 1]);
        if (first) {
          prod = f;
          first = false;
        } else {
          prod = mul(prod, f);
        }
      }
      axpy(inner, 1.0, prod);
    }
    const double mj = maclaurin_coefficient(j);
    axpy(W, -(absolute ? std::abs(mj) : mj), inner);
  }
  return W;
}

}  // namespace

ScalarField electrostatic_weight(int h, DotCache& cache, const GridSpec& grid) {
  return pure_weight(h, grid, false,
                     [&](int i, int j) -> const ScalarField& { return cache.dd(i, j); });
}

ScalarField magnetostatic_weight(int h, DotCache& cache, const GridSpec& grid) {
  return pure_weight(h, grid, true,
                     [&](int i, int j) -> const ScalarField& { return cache.hh(i, j); });
}

namespace {

// Truncated scalar-field power series helpers for the oracle.
using FieldSeries = std::vector<ScalarField>;

FieldSeries series_mul(const FieldSeries& a, const FieldSeries& b, int order,
                       const GridSpec& grid) {
  FieldSeries r(order + 1, ScalarField(grid));
  for (int i = 0; i <= order; ++i)
    for (int j = 0; i + j <= order && j < int(b.size()); ++j) {
      if (i >= int(a.size())) break;
      axpy(r[i + j], 1.0, mul(a[i], b[j]));
    }
  return r;
}

}  // namespace

std::pair<std::vector<ScalarField>, std::vector<ScalarField>> series_oracle_XY(
    const std::vector<VectorField3>& D, const std::vector<VectorField3>& H,
    int order) {
  if (D.empty() || H.empty())
    throw std::invalid_argument("series_oracle_XY: empty coefficient lists");
  const GridSpec grid = D[0].grid;

  // s(t) = |D|^2 - |H|^2 and p(t) = D.H as series in t = beta^4.
  FieldSeries s(order + 1, ScalarField(grid)), p(order + 1, ScalarField(grid));
  for (int g = 0; g <= order; ++g)
    for (int a = 0; a <= g; ++a) {
      const int b = g - a;
      if (a < int(D.size()) && b < int(D.size()))
        axpy(s[g], 1.0, dot(D[a], D[b]));
      if (a < int(H.size()) && b < int(H.size()))
        axpy(s[g], -1.0, dot(H[a], H[b]));
      if (a < int(D.size()) && b < int(H.size()))
        axpy(p[g], 1.0, dot(D[a], H[b]));
    }

  // radicand r(t) = 1 + t*s(t) - t^2*p(t)^2
  FieldSeries r(order + 1, ScalarField(grid));
  for (double& v : r[0].values) v = 1.0;
  for (int g = 1; g <= order; ++g) axpy(r[g], 1.0, s[g - 1]);
  const FieldSeries p2 = series_mul(p, p, order, grid);
  for (int g = 2; g <= order; ++g) axpy(r[g], -1.0, p2[g - 2]);

  // w = r^{-1/2} by Newton iteration w <- w (3 - r w^2)/2 on truncated series.
  FieldSeries w(order + 1, ScalarField(grid));
  for (double& v : w[0].values) v = 1.0;
  int correct = 1;
  while (correct <= order) {
    FieldSeries w2 = series_mul(w, w, order, grid);
    FieldSeries rw2 = series_mul(r, w2, order, grid);
    for (double& v : rw2[0].values) v = 3.0 - v;
    for (int g = 1; g <= order; ++g)
      for (double& v : rw2[g].values) v = -v;
    FieldSeries nw = series_mul(w, rw2, order, grid);
    for (auto& f : nw)
      for (double& v : f.values) v *= 0.5;
    w = std::move(nw);
    correct *= 2;
  }

  std::vector<ScalarField> X(order + 1, ScalarField(grid));
  for (int g = 0; g <= order; ++g) axpy(X[g], -1.0, w[g]);

  // Y-series = t * p(t) * w(t); Y^(h) = (p w)_{h-1}.
  const FieldSeries pw = series_mul(p, w, order, grid);
  std::vector<ScalarField> Y(order + 1, ScalarField(grid));
  for (int g = 1; g <= order; ++g) Y[g] = pw[g - 1];
  return {std::move(X), std::move(Y)};
}

SeriesEngine::SeriesEngine(const PotentialSolver& solver, EngineMode mode,
                           VectorField3 seed_D, VectorField3 seed_H, XYMethod xy)
    : solver_(solver), mode_(mode), cache_(state_.D, state_.H), xy_(xy) {
  require_same_grid(seed_D.grid, seed_H.grid);
  require_same_grid(solver.grid(), seed_D.grid);
  state_.D.push_back(std::move(seed_D));
  state_.H.push_back(std::move(seed_H));
  ScalarField X0(state_.grid());
  for (double& v : X0.values) v = -1.0;
  state_.X.push_back(std::move(X0));
  state_.Y.push_back(ScalarField(state_.grid()));
  state_.order = 0;
}

void SeriesEngine::step() {
  switch (mode_) {
    case EngineMode::em: step_em(); break;
    case EngineMode::electrostatic: step_electrostatic(); break;
    case EngineMode::magnetostatic: step_magnetostatic(); break;
  }
}

void SeriesEngine::extend_to(int K) {
  while (state_.order < K) step();
}

void SeriesEngine::step_em() {
  const int k = state_.order + 1;
  const GridSpec grid = state_.grid();

  if (xy_ == XYMethod::combinatorial) {
    state_.X.push_back(compute_X(k, cache_, grid));
    state_.Y.push_back(compute_Y(k, state_.X, cache_, grid));
  } else {
    auto [Xs, Ys] = series_oracle_XY(state_.D, state_.H, k);
    state_.X.push_back(std::move(Xs[k]));
    state_.Y.push_back(std::move(Ys[k]));
  }

  VectorField3 WD(grid), WH(grid);
  for (int h = 1; h <= k; ++h) {
    axpy(WD, 1.0, mul(state_.X[h], state_.D[k - h]));
    axpy(WD, 1.0, mul(state_.Y[h], state_.H[k - h]));
    axpy(WH, 1.0, mul(state_.X[h], state_.H[k - h]));
    axpy(WH, -1.0, mul(state_.Y[h], state_.D[k - h]));
  }
  ProjectorDiag pd, qd;
  state_.D.push_back(solver_.project_solenoidal(WD, &pd));
  state_.H.push_back(solver_.project_irrotational(WH, &qd));
  max_boundary_ratio_ =
      std::max({max_boundary_ratio_, pd.boundary_mass_ratio, qd.boundary_mass_ratio});
  state_.order = k;
}

void SeriesEngine::step_electrostatic() {
  const int k = state_.order + 1;
  const GridSpec grid = state_.grid();

  state_.X.push_back(electrostatic_weight(k, cache_, grid));
  state_.Y.push_back(ScalarField(grid));

  // V^(k) = sum_h XE^(h) D^(k-h)  (the leading minus sign lives in XE)
  VectorField3 V(grid);
  for (int h = 1; h <= k; ++h) axpy(V, 1.0, mul(state_.X[h], state_.D[k - h]));
  ProjectorDiag pd;
  state_.D.push_back(solver_.project_solenoidal(V, &pd));
  state_.H.push_back(VectorField3(grid));
  max_boundary_ratio_ = std::max(max_boundary_ratio_, pd.boundary_mass_ratio);
  state_.order = k;
}

void SeriesEngine::step_magnetostatic() {
  const int k = state_.order + 1;
  const GridSpec grid = state_.grid();

  state_.X.push_back(magnetostatic_weight(k, cache_, grid));
  state_.Y.push_back(ScalarField(grid));

  VectorField3 U(grid);
  for (int h = 1; h <= k; ++h) axpy(U, 1.0, mul(state_.X[h], state_.H[k - h]));
  ProjectorDiag qd;
  state_.H.push_back(solver_.project_irrotational(U, &qd));
  state_.D.push_back(VectorField3(grid));
  max_boundary_ratio_ = std::max(max_boundary_ratio_, qd.boundary_mass_ratio);
  state_.order = k;
}

std::pair<VectorField3, VectorField3> assemble(const SeriesState& st, double beta,
                                               int K) {
  if (K < 0 || K > st.order) K = st.order;
  VectorField3 D = st.D.at(0), H = st.H.at(0);
  const double b4 = std::pow(beta, 4);
  double w = 1.0;
  for (int k = 1; k <= K; ++k) {
    w *= b4;
    axpy(D, w, st.D.at(k));
    axpy(H, w, st.H.at(k));
  }
  return {std::move(D), std::move(H)};
}

FieldStrengthViolation::FieldStrengthViolation(std::vector<std::size_t> nodes)
    : std::runtime_error("aether-law radicand not positive at " +
                         std::to_string(nodes.size()) + " node(s)"),
      offending_nodes(std::move(nodes)) {}

std::pair<VectorField3, VectorField3> reconstruct_EB(const VectorField3& D,
                                                     const VectorField3& H,
                                                     double beta) {
  require_same_grid(D.grid, H.grid);
  const double b4 = std::pow(beta, 4);
  constexpr double kMargin = 1e-12;

  VectorField3 E(D.grid), B(D.grid);
  std::vector<std::size_t> bad;
  for (std::size_t n = 0; n < D.size(); ++n) {
    const Vec3 d{D.x[n], D.y[n], D.z[n]};
    const Vec3 hv{H.x[n], H.y[n], H.z[n]};
    const double dh = d.dot(hv);
    const double rad =
        1.0 + b4 * (d.norm2() - hv.norm2()) - b4 * b4 * dh * dh;
    if (!(rad > kMargin)) {
      if (bad.size() < 64) bad.push_back(n);
      continue;
    }
    const double inv = 1.0 / std::sqrt(rad);
    const Vec3 e = (d - (b4 * dh) * hv) * inv;
    const Vec3 b = (hv + (b4 * dh) * d) * inv;
    E.x[n] = e.x;
    E.y[n] = e.y;
    E.z[n] = e.z;
    B.x[n] = b.x;
    B.y[n] = b.y;
    B.z[n] = b.z;
  }
  if (!bad.empty()) throw FieldStrengthViolation(std::move(bad));
  return {std::move(E), std::move(B)};
}

ResidualReport residuals(const VectorField3& E, const VectorField3& B,
                         const VectorField3& D, const VectorField3& H,
                         const ScalarField& rho, const VectorField3& j) {
  constexpr int kMargin = 2;
  constexpr double kFourPi = 4.0 * std::numbers::pi;
  ResidualReport r;

  ScalarField divD = divergence(D);
  axpy(divD, -kFourPi, rho);
  r.div_D_minus_4pi_rho = max_abs_interior(divD, kMargin);

  VectorField3 curlH = curl(H);
  axpy(curlH, -kFourPi, j);
  r.curl_H_minus_4pi_j = max_abs_interior(curlH, kMargin);

  r.curl_E = max_abs_interior(curl(E), kMargin);
  r.div_B = max_abs_interior(divergence(B), kMargin);
  return r;
}

std::vector<OrderNormRow> norm_chain_report(const SeriesState& st, double alpha,
                                            double safety,
                                            const std::vector<double>& R) {
  const double N0 = proxy_norm(st.D.at(0), alpha).total +
                    proxy_norm(st.H.at(0), alpha).total;
  std::vector<OrderNormRow> rows;
  for (int k = 1; k <= st.order; ++k) {
    OrderNormRow row;
    row.k = k;
    row.measured = proxy_norm(st.D.at(k), alpha).total +
                   proxy_norm(st.H.at(k), alpha).total;
    row.majorant = (k < int(R.size()))
                       ? safety * R[k] * std::pow(N0, 2 * k + 1)
                       : std::numeric_limits<double>::infinity();
    row.within = row.measured <= row.majorant;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mbi
