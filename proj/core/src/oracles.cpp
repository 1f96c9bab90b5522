#include "cloak/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cloak::oracles {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;

// Ascending series J_m(x) = sum_k (-1)^k (x/2)^(m+2k) / (k! (m+k)!), summed
// in long double. Safe for x <= ~17 (cancellation bounded) and for m >= x
// (leading term dominates).
long double j_series(int m, long double x) {
  const long double half = x / 2.0L;
  long double term = 1.0L;
  for (int i = 1; i <= m; ++i) term *= half / i;  // (x/2)^m / m!
  long double sum = term;
  const long double x2 = half * half;
  for (int k = 1; k < 400; ++k) {
    term *= -x2 / (static_cast<long double>(k) * (m + k));
    sum += term;
    if (std::abs(term) < 1e-24L * (std::abs(sum) + 1e-300L) && k > x / 2) break;
  }
  return sum;
}

// Downward (Miller) recurrence normalised by J_0 + 2 sum_k J_{2k} = 1.
// Stable for all orders below the start index; used for x > 17.
double j_miller(int m, double x) {
  const int start = std::max(m, static_cast<int>(std::ceil(x))) + 40;
  long double fkp1 = 0.0L, fk = 1e-300L;
  long double norm = 0.0L, target = 0.0L;
  for (int k = start; k >= 1; --k) {
    long double fkm1 = (2.0L * k / x) * fk - fkp1;
    fkp1 = fk;
    fk = fkm1;
    if (k - 1 == m) target = fk;
    if ((k - 1) % 2 == 0) norm += (k - 1 == 0) ? fk : 2.0L * fk;
    if (std::abs(fk) > 1e280L) {
      fk *= 1e-280L;
      fkp1 *= 1e-280L;
      norm *= 1e-280L;
      target *= 1e-280L;
    }
  }
  return static_cast<double>(target / norm);
}

long double harmonic(int k) {
  long double h = 0.0L;
  for (int i = 1; i <= k; ++i) h += 1.0L / i;
  return h;
}

// A&S 9.1.11 for n in {0,1}; long double keeps ~13 significant digits at the
// upper end of the series range (x ~ 17).
long double y_series(int n, long double x) {
  const long double half = x / 2.0L;
  const long double x2 = half * half;
  const long double jn = j_series(n, x);
  long double result = (2.0L / kPi) * std::log(half) * jn;
  if (n == 1) result -= 2.0L / (kPi * x);
  // -( (x/2)^n / pi ) sum_k [psi(k+1) + psi(n+k+1)] (-x^2/4)^k / (k! (n+k)!)
  long double pref = 1.0L;
  for (int i = 1; i <= n; ++i) pref *= half / i;  // (x/2)^n / n!
  long double term = pref;
  long double sum = 0.0L;
  for (int k = 0; k < 400; ++k) {
    const long double psi_sum = (-kEulerGamma + harmonic(k)) +
                                (-kEulerGamma + harmonic(n + k));
    sum += term * psi_sum;
    const long double next = -x2 / (static_cast<long double>(k + 1) * (n + k + 1));
    term *= next;
    if (std::abs(term) < 1e-24L * (std::abs(sum) + 1e-300L) && k > x / 2) break;
  }
  result -= sum / kPi;
  return result;
}

// Hankel's large-argument expansions (A&S 9.2.5/9.2.6), adaptively truncated
// at the smallest term. For x >= 17 the attainable error is far below 1e-11.
void jy_asymptotic(int nu, double x, double* j_out, double* y_out) {
  const long double mu = 4.0L * nu * nu;
  long double t = 1.0L;
  long double p = 0.0L, q = 0.0L;
  long double prev = 1e300L;
  for (int j = 0; j < 80; ++j) {
    if (j > 0) {
      t *= (mu - (2.0L * j - 1.0L) * (2.0L * j - 1.0L)) / (j * 8.0L * x);
      if (std::abs(t) > prev) break;  // divergent tail reached
      prev = std::abs(t);
    }
    const int phase = j % 4;
    if (phase == 0) p += t;
    else if (phase == 1) q += t;
    else if (phase == 2) p -= t;
    else q -= t;
    if (std::abs(t) < 1e-20L) break;
  }
  const long double chi = x - (0.5L * nu + 0.25L) * kPi;
  const long double amp = std::sqrt(2.0L / (kPi * x));
  *j_out = static_cast<double>(amp * (p * std::cos(chi) - q * std::sin(chi)));
  *y_out = static_cast<double>(amp * (p * std::sin(chi) + q * std::cos(chi)));
}

}  // namespace

double bessel_j(int order, double x) {
  if (order < 0) throw std::domain_error("bessel_j: order must be >= 0");
  if (x < 0.0 || x > 100.0) throw std::domain_error("bessel_j: x outside [0, 100]");
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  if (x <= 17.0 || order >= x) return static_cast<double>(j_series(order, x));
  return j_miller(order, x);
}

double bessel_y(int order, double x) {
  if (order < 0) throw std::domain_error("bessel_y: order must be >= 0");
  if (x <= 0.0 || x > 100.0) throw std::domain_error("bessel_y: x outside (0, 100]");
  double y0, y1;
  if (x < 17.0) {
    y0 = static_cast<double>(y_series(0, x));
    y1 = static_cast<double>(y_series(1, x));
  } else {
    double j;
    jy_asymptotic(0, x, &j, &y0);
    jy_asymptotic(1, x, &j, &y1);
  }
  if (order == 0) return y0;
  if (order == 1) return y1;
  // Upward recurrence is stable for Y.
  double ym1 = y0, ym = y1;
  for (int k = 1; k < order; ++k) {
    const double yp = (2.0 * k / x) * ym - ym1;
    ym1 = ym;
    ym = yp;
    if (std::abs(ym) > 1e300) throw std::domain_error("bessel_y: overflow (order too large for x)");
  }
  return ym;
}

double bessel(BesselKind kind, int order, double x) {
  return kind == BesselKind::J ? bessel_j(order, x) : bessel_y(order, x);
}

double bessel_jp(int order, double x) {
  if (order == 0) return -bessel_j(1, x);
  return bessel_j(order - 1, x) - (order / x) * bessel_j(order, x);
}

double bessel_yp(int order, double x) {
  if (order == 0) return -bessel_y(1, x);
  return bessel_y(order - 1, x) - (order / x) * bessel_y(order, x);
}

std::complex<double> hankel1(int order, double x) {
  return {bessel_j(order, x), bessel_y(order, x)};
}

std::complex<double> hankel1p(int order, double x) {
  return {bessel_jp(order, x), bessel_yp(order, x)};
}

double first_j0_zero() {
  double lo = 2.0, hi = 3.0;  // J_0(2) > 0 > J_0(3)
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (bessel_j(0, mid) > 0.0) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

double radial_ite_determinant(double kappa, const RadialProblem& prob) {
  if (kappa <= 0.0) throw std::domain_error("radial_ite_determinant: kappa must be > 0");
  const double s = std::sqrt(prob.n_c);
  const int m = prob.mode;
  const double aD = kappa * s * prob.r_cavity;
  const double aO = kappa * s * prob.r_outer;
  const double aw = kappa * prob.r_outer;

  double r1j, r1y;
  if (prob.bc == CavityBC::Dirichlet) {
    r1j = bessel_j(m, aD);
    r1y = bessel_y(m, aD);
  } else {
    r1j = bessel_jp(m, aD);
    r1y = bessel_yp(m, aD);
  }
  const double r2j = bessel_j(m, aO), r2y = bessel_y(m, aO), r2w = -bessel_j(m, aw);
  const double r3j = s * bessel_jp(m, aO), r3y = s * bessel_yp(m, aO),
               r3w = -bessel_jp(m, aw);

  return r1j * (r2y * r3w - r2w * r3y) - r1y * (r2j * r3w - r2w * r3j);
}

std::vector<RadialRoot> radial_ite_roots(double kappa_lo, double kappa_hi,
                                         const RadialProblem& prob_family,
                                         int max_mode) {
  if (kappa_lo <= 0.0) throw std::domain_error("radial_ite_roots: kappa_lo must be > 0");
  if (kappa_hi <= kappa_lo) throw std::invalid_argument("radial_ite_roots: empty interval");
  constexpr double kScanStep = 1e-3;
  constexpr double kBisectTol = 1e-9;
  std::vector<RadialRoot> roots;
  for (int m = 0; m <= max_mode; ++m) {
    RadialProblem prob = prob_family;
    prob.mode = m;
    double ka = kappa_lo;
    double fa = radial_ite_determinant(ka, prob);
    while (ka < kappa_hi) {
      const double kb = std::min(ka + kScanStep, kappa_hi);
      const double fb = radial_ite_determinant(kb, prob);
      if (fa == 0.0) {
        roots.push_back({ka, m});
      } else if (fa * fb < 0.0) {
        double lo = ka, hi = kb, flo = fa;
        while (hi - lo > kBisectTol) {
          const double mid = 0.5 * (lo + hi);
          const double fm = radial_ite_determinant(mid, prob);
          if (flo * fm <= 0.0) hi = mid;
          else {
            lo = mid;
            flo = fm;
          }
        }
        roots.push_back({0.5 * (lo + hi), m});
      }
      ka = kb;
      fa = fb;
    }
  }
  std::sort(roots.begin(), roots.end(), [](const RadialRoot& a, const RadialRoot& b) {
    return a.kappa != b.kappa ? a.kappa < b.kappa : a.mode < b.mode;
  });
  return roots;
}

std::vector<double> expand_multiplicity(const std::vector<RadialRoot>& roots) {
  std::vector<double> out;
  for (const auto& r : roots) {
    out.push_back(r.kappa);
    if (r.mode >= 1) out.push_back(r.kappa);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::VectorXcd mie_scatter(MieKind kind, double a, double n_inside,
                             double kappa, const Vec2& dir,
                             std::span<const Vec2> points) {
  if (a <= 0.0 || kappa <= 0.0) throw std::domain_error("mie_scatter: a and kappa must be > 0");
  const Vec2 d = dir.normalized();
  for (const Vec2& p : points) {
    if (p.norm() < a * (1.0 - 1e-12)) {
      throw std::invalid_argument("mie_scatter: evaluation point inside the disc");
    }
  }
  const double ki = kappa * std::sqrt(n_inside);
  const Complex I(0.0, 1.0);

  // Partial-wave coefficients b_m of u^s = sum_m b_m H_m(kappa rho) cos(m theta).
  auto coeff = [&](int m) -> Complex {
    const Complex im = std::pow(I, m);
    const double eps = (m == 0) ? 1.0 : 2.0;
    if (kind == MieKind::SoundSoftDisc) {
      return -eps * im * bessel_j(m, kappa * a) / hankel1(m, kappa * a);
    }
    const double jia = bessel_j(m, ki * a), jipa = bessel_jp(m, ki * a);
    const double ja = bessel_j(m, kappa * a), jpa = bessel_jp(m, kappa * a);
    const Complex ha = hankel1(m, kappa * a), hpa = hankel1p(m, kappa * a);
    const Complex num = ki * jipa * ja - kappa * jia * jpa;
    const Complex den = ki * jipa * ha - kappa * jia * hpa;
    return -eps * im * num / den;
  };

  int nterms = static_cast<int>(std::ceil(kappa * a)) + 20;
  std::vector<Complex> b(nterms + 1);
  for (int m = 0; m <= nterms; ++m) b[m] = coeff(m);
  // Extend until the tail coefficients are negligible relative to the head.
  double head = 0.0;
  for (const auto& c : b) head = std::max(head, std::abs(c));
  while (std::abs(b.back()) > 1e-12 * head && nterms < 200) {
    for (int k = 0; k < 5; ++k) b.push_back(coeff(++nterms));
  }

  Eigen::VectorXcd out(static_cast<Eigen::Index>(points.size()));
  for (size_t i = 0; i < points.size(); ++i) {
    const Vec2& p = points[i];
    const double rho = p.norm();
    const double theta = std::atan2(p.x() * d.y() - p.y() * d.x(), p.dot(d));
    Complex sum = 0.0;
    for (int m = 0; m <= nterms; ++m) {
      sum += b[m] * hankel1(m, kappa * rho) * std::cos(m * theta);
    }
    out[static_cast<Eigen::Index>(i)] = sum;
  }
  return out;
}

}  // namespace cloak::oracles
