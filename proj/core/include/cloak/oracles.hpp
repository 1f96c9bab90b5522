#pragma once

// Semi-analytic ground truth used to anchor the FEM solvers: cylinder Bessel
// functions, separated-variable transmission-eigenvalue roots for concentric
// discs, and Mie partial-wave series for disc scatterers.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace cloak::oracles {

using Vec2 = Eigen::Vector2d;
using Complex = std::complex<double>;

enum class BesselKind { J, Y };

// Cylinder Bessel functions of integer order, accurate to ~1e-11 relative on
// x in (0, 100] (J also defined at x = 0). Throws std::domain_error outside.
double bessel(BesselKind kind, int order, double x);

double bessel_j(int order, double x);
double bessel_y(int order, double x);
// First derivatives via C'_m = C_{m-1} - (m/x) C_m.
double bessel_jp(int order, double x);
double bessel_yp(int order, double x);
std::complex<double> hankel1(int order, double x);
std::complex<double> hankel1p(int order, double x);

// Smallest positive zero of J_0, found by bisection over bessel_j itself.
double first_j0_zero();

enum class CavityBC { Dirichlet, Neumann };

// Concentric-disc transmission eigenproblem in a single angular mode m:
//   w = J_m(kappa r)                                    on the full disc,
//   v = a J_m(kappa sqrt(n_c) r) + b Y_m(...)           on the annulus,
// with the cavity condition at r_D and matched Cauchy data at r_Omega.
struct RadialProblem {
  double n_c = 16.0;
  double r_cavity = 0.5;
  double r_outer = 1.0;
  CavityBC bc = CavityBC::Dirichlet;
  int mode = 0;
};

// Determinant of the 3x3 matching system; kappa is a transmission eigenvalue
// of angular order m exactly when this vanishes.
double radial_ite_determinant(double kappa, const RadialProblem& prob);

struct RadialRoot {
  double kappa = 0.0;
  int mode = 0;            // angular order; modes m >= 1 carry multiplicity 2
};

// All sign-change roots of the determinant for modes 0..max_mode on
// [kappa_lo, kappa_hi], scanned at step 1e-3 and bisected to 1e-9. Sorted
// ascending by kappa.
std::vector<RadialRoot> radial_ite_roots(double kappa_lo, double kappa_hi,
                                         const RadialProblem& prob_family,
                                         int max_mode);

// Expands roots into a sorted multiset including angular multiplicity
// (roots with m >= 1 appear twice), convenient for pairing with FEM output.
std::vector<double> expand_multiplicity(const std::vector<RadialRoot>& roots);

enum class MieKind { SoundSoftDisc, PenetrableDisc };

// Scattered field of a plane wave exp(i kappa x . dir) hitting a disc of
// radius `a` centred at the origin. Partial-wave series truncated at
// ceil(kappa a) + 20 terms with a convergence check on the tail.
Eigen::VectorXcd mie_scatter(MieKind kind, double a, double n_inside,
                             double kappa, const Vec2& dir,
                             std::span<const Vec2> points);

}  // namespace cloak::oracles
