#include "mbi/convergence.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mbi {

namespace {

using Series = std::vector<Rational>;

Series truncated(Series a, std::size_t n) {
  a.resize(n + 1, Rational(0));
  return a;
}

Series series_mul(const Series& a, const Series& b, std::size_t n) {
  Series r(n + 1, Rational(0));
  for (std::size_t i = 0; i < a.size() && i <= n; ++i) {
    if (a[i] == 0) continue;
    const std::size_t jmax = std::min(b.size() - 1, n - i);
    for (std::size_t j = 0; j <= jmax; ++j) {
      if (b[j] == 0) continue;
      r[i + j] += a[i] * b[j];
    }
  }
  return r;
}

void series_sub_inplace(Series& a, const Series& b) {
  if (a.size() < b.size()) a.resize(b.size(), Rational(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
}

// Reciprocal of a series with nonzero constant term, Newton iteration.
Series series_reciprocal(const Series& f, std::size_t n) {
  if (f.empty() || f[0] == 0)
    throw std::invalid_argument("series_reciprocal: zero constant term");
  Series r{1 / f[0]};
  std::size_t prec = 1;
  while (prec <= n) {
    prec = std::min(2 * prec, n + 1);
    // r <- r (2 - f r) truncated to prec terms
    Series fr = series_mul(truncated(f, prec - 1), r, prec - 1);
    Series two_minus(prec, Rational(0));
    two_minus[0] = 2;
    series_sub_inplace(two_minus, fr);
    r = series_mul(r, two_minus, prec - 1);
  }
  return truncated(r, n);
}

// f(G) for a polynomial/truncated series f and series G with G(0) = 0.
Series series_compose(const Series& f, const Series& G, std::size_t n) {
  Series r(n + 1, Rational(0));
  for (std::size_t i = f.size(); i-- > 0;) {
    r = series_mul(r, G, n);
    r[0] += f[i];
  }
  return r;
}

Series series_derivative(const Series& f) {
  if (f.size() <= 1) return {Rational(0)};
  Series d(f.size() - 1);
  for (std::size_t i = 1; i < f.size(); ++i) d[i - 1] = Rational(i) * f[i];
  return d;
}

}  // namespace

std::vector<Rational> xi_series_of_g(int order) {
  if (order < 1) throw std::invalid_argument("xi_series_of_g: order >= 1");
  const std::size_t n = std::size_t(order);
  // W = (1 - g^2 - g^4)^{-1/2} = sum_m binom(2m,m)/4^m (g^2+g^4)^m
  Series u(5, Rational(0));
  u[2] = 1;
  u[4] = 1;
  Series W(n + 1, Rational(0));
  Series upow{Rational(1)};
  Rational cm(1);
  for (std::size_t m = 0; 2 * m <= n; ++m) {
    if (m > 0) {
      upow = series_mul(upow, u, n);
      cm *= Rational(2 * m - 1, 2 * m);  // binom(2m,m)/4^m ratio
    }
    for (std::size_t i = 0; i < upow.size() && i <= n; ++i)
      W[i] += cm * upow[i];
  }
  // xi = 2g - (g + g^3) W
  Series A(4, Rational(0));
  A[1] = 1;
  A[3] = 1;
  Series xi = series_mul(A, W, n);
  for (auto& c : xi) c = -c;
  if (n >= 1) xi[1] += 2;
  return xi;
}

RationalSeq invert_series(const std::vector<Rational>& xi_coeffs, int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("invert_series: n_terms >= 1");
  if (xi_coeffs.size() < std::size_t(n_terms) + 1)
    throw std::invalid_argument("invert_series: xi series too short");
  if (xi_coeffs[0] != 0 || xi_coeffs[1] != 1)
    throw std::invalid_argument("invert_series: series must be t + O(t^2)");
  const std::size_t n = std::size_t(n_terms);

  const Series xi = truncated(xi_coeffs, n);
  const Series dxi = series_derivative(xi);

  // Newton for the compositional inverse: G <- G - (xi(G) - t)/xi'(G).
  Series G(2, Rational(0));
  G[1] = 1;
  std::size_t prec = 2;  // correct through this order
  while (prec < n) {
    prec = std::min(2 * prec, n);
    Series xg = series_compose(truncated(xi, prec), G, prec);
    xg[1] -= 1;  // xi(G) - t
    const Series xpg = series_compose(truncated(dxi, prec), G, prec);
    const Series corr = series_mul(xg, series_reciprocal(xpg, prec), prec);
    G = truncated(G, prec);
    series_sub_inplace(G, corr);
  }
  G = truncated(G, n);

  RationalSeq seq;
  for (std::size_t i = 0; i <= n; ++i) {
    if (i % 2 == 0) {
      if (G[i] != 0)
        throw std::logic_error(
            "invert_series: inverse series has a non-vanishing even coefficient");
      continue;
    }
    const std::size_t k = (i - 1) / 2;
    seq.R.push_back(G[i]);
    // S_{k+1} = 2^{2k} R_k must be an integer.
    BigInt num = seq.R[k].get_num();
    num <<= 2 * k;
    const BigInt& den = seq.R[k].get_den();
    if (!mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t()))
      throw std::logic_error("invert_series: 2^{2k} R_k is not an integer at k=" +
                             std::to_string(k));
    seq.S.push_back(num / den);
  }
  return seq;
}

namespace {

// |M_j| = binom(2j,j)/4^j as an exact rational.
Rational abs_maclaurin(int j) {
  Rational m(1);
  for (int i = 0; i < j; ++i) m *= Rational(2 * i + 1, 2 * i + 2);
  return m;
}

// Coefficient of x^T in rho(x)^L with rho = sum_k R_k x^k (exact).
Rational tuple_sum(const std::vector<Rational>& R, int L, int T) {
  if (T < 0) return Rational(0);
  if (L == 0) return T == 0 ? Rational(1) : Rational(0);
  Series rho(std::min<std::size_t>(R.size(), T + 1));
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = R[i];
  Series p{Rational(1)};
  for (int i = 0; i < L; ++i) p = series_mul(p, rho, T);
  return T < int(p.size()) ? p[T] : Rational(0);
}

Rational exact_binomial(int n, int k) {
  BigInt b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Rational(b);
}

}  // namespace

RationalSeq rk_recursion_oracle(int n) {
  if (n < 0) throw std::invalid_argument("rk_recursion_oracle: n >= 0");
  if (n > 12)
    throw std::invalid_argument(
        "rk_recursion_oracle: combinatorial cost explodes beyond n = 12");
  RationalSeq seq;
  seq.R.push_back(Rational(1));
  seq.C.push_back(Rational(1));  // C_0 = 1
  for (int k = 1; k <= n; ++k) {
    // C_k from the composition sums over R_0..R_{k-1}
    Rational Ck(0);
    for (int j = 1; j <= k; ++j) {
      Rational bracket = tuple_sum(seq.R, 4 * j, k - 2 * j) +
                         tuple_sum(seq.R, 2 * j, k - j);
      for (int l = 1; l <= j - 1; ++l)
        bracket += exact_binomial(j, l) *
                   tuple_sum(seq.R, 4 * j - 2 * l, k + l - 2 * j);
      Ck += abs_maclaurin(j) * bracket;
    }
    seq.C.push_back(Ck);

    Rational Rk(0);
    for (int h = 1; h <= k; ++h) {
      Rational weight = seq.C[h];
      for (int g = 0; g <= h - 1; ++g)
        weight += seq.C[h - 1 - g] * tuple_sum(seq.R, 2, g);
      Rk += weight * seq.R[k - h];
    }
    seq.R.push_back(Rk);

    BigInt num = seq.R[k].get_num();
    num <<= 2 * k;
    seq.S.push_back(num / seq.R[k].get_den());
  }
  seq.S.insert(seq.S.begin(), BigInt(1));  // S_1 = R_0
  return seq;
}

namespace {

using CLD = std::complex<long double>;

std::vector<long long> poly_mul_int(const std::vector<long long>& a,
                                    const std::vector<long long>& b) {
  std::vector<long long> r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

CLD horner(const std::vector<long long>& c, CLD x) {
  CLD r(0);
  for (std::size_t i = c.size(); i-- > 0;) r = r * x + CLD((long double)c[i]);
  return r;
}

CLD horner_derivative(const std::vector<long long>& c, CLD x) {
  CLD r(0);
  for (std::size_t i = c.size(); i-- > 1;)
    r = r * x + CLD((long double)(long long)(i)) * CLD((long double)c[i]);
  return r;
}

}  // namespace

CriticalPointReport critical_points() {
  CriticalPointReport rep;

  // ptilde(g) = (1 + 3g^2 - g^4 - g^6)^2 - 4 (1 - g^2 - g^4)^3, expanded in
  // u = g^2 with exact integer arithmetic and then spread to even g-powers.
  const std::vector<long long> A = {1, 3, -1, -1};
  const std::vector<long long> B = {1, -1, -1};
  std::vector<long long> pu = poly_mul_int(A, A);
  const std::vector<long long> B3 = poly_mul_int(poly_mul_int(B, B), B);
  pu.resize(std::max(pu.size(), B3.size()), 0);
  for (std::size_t i = 0; i < B3.size(); ++i) pu[i] -= 4 * B3[i];
  rep.ptilde_coeffs.assign(13, 0);
  for (std::size_t i = 0; i < pu.size(); ++i) rep.ptilde_coeffs[2 * i] = pu[i];

  // Companion matrix of the monic degree-12 polynomial.
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(12, 12);
  const double lead = double(rep.ptilde_coeffs[12]);
  for (int i = 1; i < 12; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < 12; ++i)
    comp(i, 11) = -double(rep.ptilde_coeffs[i]) / lead;
  const Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("critical_points: eigensolver failed");

  for (int i = 0; i < 12; ++i) {
    CLD g(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
    for (int it = 0; it < 80; ++it) {
      const CLD f = horner(rep.ptilde_coeffs, g);
      const CLD df = horner_derivative(rep.ptilde_coeffs, g);
      if (std::abs(df) == 0.0L) break;
      const CLD step = f / df;
      g -= step;
      if (std::abs(step) < 1e-30L) break;
    }
    rep.roots.emplace_back(double(g.real()), double(g.imag()));
    rep.residuals.push_back(double(std::abs(horner(rep.ptilde_coeffs, g))));

    // Genuine zeros of dxi/dg null the branch 1+3g^2-g^4-g^6 - 2 w^3 with the
    // principal square root w = sqrt(1 - g^2 - g^4).
    const CLD g2 = g * g, g4 = g2 * g2, g6 = g4 * g2;
    const CLD w = std::sqrt(CLD(1) - g2 - g4);
    const CLD poly = CLD(1) + CLD(3) * g2 - g4 - g6;
    const CLD w3 = w * w * w;
    const long double n_minus = std::abs(poly - CLD(2) * w3);
    const long double n_plus = std::abs(poly + CLD(2) * w3);
    if (n_minus < n_plus) {
      rep.genuine_zeros.emplace_back(double(g.real()), double(g.imag()));
      const CLD xi = CLD(2) * g - (g + g2 * g) / w;
      rep.xi_values.push_back(double(std::abs(xi)));
    }
  }

  if (rep.genuine_zeros.size() != 6)
    throw std::logic_error("critical_points: expected exactly 6 genuine zeros, got " +
                           std::to_string(rep.genuine_zeros.size()));
  rep.radius = *std::min_element(rep.xi_values.begin(), rep.xi_values.end());
  rep.g_bullet = double(std::sqrt((std::sqrt(5.0L) - 1.0L) / 2.0L));
  return rep;
}

double electrostatic_radius() {
  const long double b = std::pow(2.0L, 2.0L / 3.0L) - 1.0L;
  return double(b * std::sqrt(b));
}

namespace {

const CriticalPointReport& cached_critical_points() {
  static const CriticalPointReport rep = critical_points();
  return rep;
}

const RationalSeq& cached_R30() {
  static const RationalSeq seq = invert_series(xi_series_of_g(61), 61);
  return seq;
}

}  // namespace

QRatioReport q_ratio(const RationalSeq& seq) {
  QRatioReport r;
  const double radius = cached_critical_points().radius;
  r.q = 1.0 / (radius * radius);
  r.four_q = 4.0 * r.q;
  if (seq.R.size() >= 2) {
    r.last_index = int(seq.R.size()) - 2;
    const Rational ratio = seq.R.back() / seq.R[seq.R.size() - 2];
    r.last_ratio = ratio.get_d();
    r.gap = r.q - r.last_ratio;
  }
  return r;
}

std::vector<double> majorant_doubles(int n) {
  std::vector<double> out;
  const RationalSeq* seq = &cached_R30();
  RationalSeq bigger;
  if (n >= int(seq->R.size())) {
    bigger = invert_series(xi_series_of_g(2 * n + 1), 2 * n + 1);
    seq = &bigger;
  }
  for (int k = 0; k <= n; ++k) out.push_back(seq->R[k].get_d());
  return out;
}

Certificate certify(double beta, double norm_D, double norm_H, int K,
                    CertifyMode mode, double safety, double boundary_mass) {
  if (beta < 0.0) throw std::invalid_argument("certify: beta must be >= 0");
  if (safety < 1.0) throw std::invalid_argument("certify: safety must be >= 1");
  if (K < 0) throw std::invalid_argument("certify: K must be >= 0");

  Certificate c;
  c.beta = beta;
  c.norm_D = norm_D;
  c.norm_H = norm_H;
  c.safety = safety;
  c.K = K;
  c.boundary_mass = boundary_mass;
  c.boundary_ok = boundary_mass <= 1e-3;

  double N = 0.0;
  switch (mode) {
    case CertifyMode::em:
      N = norm_D + norm_H;
      c.radius_used = cached_critical_points().radius;
      c.mode = "em";
      break;
    case CertifyMode::electrostatic:
      N = norm_D;
      c.radius_used = electrostatic_radius();
      c.mode = "electrostatic";
      break;
    case CertifyMode::magnetostatic:
      N = norm_H;
      c.radius_used = electrostatic_radius();
      c.mode = "magnetostatic";
      break;
  }
  c.x = beta * beta * N;
  c.x_adjusted = beta * beta * safety * N;
  c.margin = c.radius_used - c.x_adjusted;
  c.margin_raw = c.radius_used - c.x;
  c.certified = c.x_adjusted < c.radius_used && c.margin > 0.0 && c.boundary_ok;

  if (!c.certified) {
    c.tail_bound = std::numeric_limits<double>::infinity();
    return c;
  }
  if (c.x_adjusted == 0.0) {
    c.tail_bound = 0.0;
    return c;
  }

  // sum_{k>K} R_k x^{2k} N: exact R_k through 29, then R_k < q^k with the
  // geometric tail q^k x^{2k} / (1 - q x^2). The em radius satisfies
  // q = 1/radius^2, so certification makes the geometric part converge; the
  // pure modes have an even larger radius margin against q... but x may
  // exceed 1/sqrt(q) there, in which case the bound degenerates to infinity.
  const double x2 = c.x_adjusted * c.x_adjusted;
  const double q = 1.0 / (cached_critical_points().radius *
                          cached_critical_points().radius);
  const std::vector<double> R = majorant_doubles(29);
  double tail = 0.0;
  for (int k = K + 1; k <= 29; ++k) tail += R[k] * std::pow(x2, k);
  const int k0 = std::max(30, K + 1);
  const double rterm = q * x2;
  if (rterm < 1.0) {
    tail += std::pow(rterm, k0) / (1.0 - rterm);
  } else {
    tail = std::numeric_limits<double>::infinity();
  }
  c.tail_bound = tail * N * safety;
  return c;
}

std::string rational_to_string(const Rational& r) {
  std::string s = r.get_num().get_str();
  if (r.get_den() != 1) s += "/" + r.get_den().get_str();
  return s;
}

}  // namespace mbi
