#ifndef DIRAC_FORWARD_HPP
#define DIRAC_FORWARD_HPP

#include <functional>
#include <vector>

#include "dirac/types.hpp"

namespace dirac {

// Step count sufficient for a global RK4 error around `tol` when propagating
// over `length` at spectral parameter z (error model: length*|z|^5*h^4/120).
int suggested_steps(double length, Complex z, double tol = 1e-9);

// One point of a propagated trajectory: T(x, z) with T(0, z) = I.
struct TransferState {
    double x = 0.0;
    Matrix2c T = Matrix2c::Identity();
    Complex z;

    double det_deviation() const { return std::abs(T.determinant() - Complex(1.0)); }
};

// Transfer matrix T(x, z) with T(0, z) = I.
//
// Between point masses the coefficient is absolutely continuous and T obeys
//   T' = -J (mu(x) - z I) T,
// integrated with fixed-step RK4; at an atom position p <= x the propagation
// picks up the closed-form factor exp(-J mu{p}) on the left (solutions are
// right continuous, so an atom sitting exactly at x is included).
//
// `steps` is the RK4 budget for the whole of [0, x], split across the
// atom-free segments proportionally to their length.
Matrix2c transfer_matrix(const DiracMeasure& mu, double x, Complex z,
                         int steps = 512, const Tolerances& tol = {});

// Same propagation over [x0, x1] (atoms in (x0, x1]); used for composition
// checks and for splitting long solves.
Matrix2c transfer_matrix_between(const DiracMeasure& mu, double x0, double x1,
                                 Complex z, int steps = 512,
                                 const Tolerances& tol = {});

// Real-axis specialization (real lambda keeps the whole solve real).
Matrix2r transfer_matrix_real(const DiracMeasure& mu, double x, double lambda,
                              int steps = 512, const Tolerances& tol = {});

// The whole right-continuous trajectory over [0, x] at the propagation nodes.
std::vector<TransferState> transfer_trajectory(const DiracMeasure& mu, double x,
                                               Complex z, int steps = 512,
                                               const Tolerances& tol = {});

// Real-axis trajectory as parallel arrays; used by quadratures that need the
// path (eigenfunction norms, transforms of u).
void transfer_trajectory_real(const DiracMeasure& mu, double x, double lambda,
                              int steps, Eigen::VectorXd& xs,
                              std::vector<Matrix2r>& Ts,
                              const Tolerances& tol = {});

// E_N(z) = u1(N, z) - i u2(N, z), u = first column of T(N, z).
Complex db_function(const DiracMeasure& mu, double N, Complex z,
                    int steps = 512, const Tolerances& tol = {});

// E_N on a symmetric real grid [-omega, omega] with step pi/(oversample*N);
// per-node step counts scale with |t|. Runs the nodes in parallel.
GridFunction1D sample_db_function(const DiracMeasure& mu, double N, double omega,
                                  int oversample = 8, int min_steps = 512,
                                  double step_tol = 1e-10,
                                  double* max_det_deviation = nullptr);

// Weyl function of the regular problem: the Moebius action of T^{-1}(N, z)
// on the boundary direction e_beta = (cos beta, sin beta), i.e.
//   m(z) = w1/w2 for w = T^{-1}(N, z) e_beta.
// Requires Im z > 0; the result is Herglotz (Im m > 0).
Complex weyl_function(const DiracMeasure& mu, double N, double beta, Complex z,
                      int steps = 512, const Tolerances& tol = {});

struct EigenvalueOptions {
    double scan_step_factor = 8.0; // scan resolution pi/(factor * N)
    int steps = 512;               // floor for per-solve RK4 steps
    int max_refine = 3;            // gap-driven rescan rounds
    double eval_tol = 1e-8;        // per-solve accuracy target for w(lambda)
    Tolerances tol;
};

// All lambda in [lo, hi] with sin(beta) u1(N, lambda) - cos(beta) u2(N, lambda) = 0,
// located by a sign scan at resolution pi/(factor*N) plus bisection. Gaps that
// look wide against the running median trigger a local rescan at higher
// resolution; if refinement keeps changing the answer the scan fails.
std::vector<double> eigenvalues(const DiracMeasure& mu, double N, double beta,
                                double lo, double hi,
                                const EigenvalueOptions& opt = {});

// Discrete spectral measure: atoms (lambda_k, w_k) with
//   w_k = 1 / int_0^N |u(s, lambda_k)|^2 ds,
// the normalization that makes the eigenfunction expansion isometric.
SpectralMeasure spectral_measure(const DiracMeasure& mu, double N, double beta,
                                 double lo, double hi, int quad_steps = 512,
                                 const EigenvalueOptions& opt = {});

// int_0^N |u(s, lambda)|^2 ds by trapezoid on the propagation nodes.
double eigenfunction_norm_sq(const DiracMeasure& mu, double N, double lambda,
                             int quad_steps = 512);

// int_0^N u^*(s, lambda) f(s) ds for a caller-supplied f.
double eigenfunction_pairing(const DiracMeasure& mu, double N, double lambda,
                             const std::function<Eigen::Vector2d(double)>& f,
                             int quad_steps = 512);

// Exponential type of the system: int_0^N sqrt(max(det H, 0)) dx.
double exponential_type(const CanonicalSystem& H);

// Transfer matrix U(x, z) of u' = z J H(x) u with U(0) = I; H is evaluated by
// piecewise-linear interpolation of its samples.
Matrix2c canonical_transfer(const CanonicalSystem& H, Complex z, int steps = 512);

// Weyl function of the canonical system against an arbitrary boundary
// direction at N: m = w1/w2 for w = U^{-1}(N, z) * boundary.
Complex weyl_function_canonical(const CanonicalSystem& H, const Vector2c& boundary,
                                Complex z, int steps = 512);

} // namespace dirac

#endif
