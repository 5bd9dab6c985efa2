#ifndef DIRAC_GL_HPP
#define DIRAC_GL_HPP

#include <functional>

#include "dirac/types.hpp"

namespace dirac {

struct PositivityReport {
    double min_eigenvalue = 0.0;
    int matrix_dim = 0;
    bool passed = false;
};

// phi from a de Branges function sampled on [-omega, omega]:
// g(t) = 1/|E(t)|^2 - 1 is the transform of phi, so phi is recovered by the
// inverse transform of g after a raised-cosine taper on the outer 10% of the
// window, restricted to (-2N, 2N) and symmetrized exactly.
//
// Requires step <= pi/(8N), |E| bounded away from 0, and a window large
// enough that the trailing 10% of |g| has mean below tol.window_tail.
GLFunction phi_from_E(const GridFunction1D& E_grid, double N,
                      Eigen::Index out_samples = 2049, const Tolerances& tol = {});

// phi from a series-side transform rho_hat: with
//   g_hat(t) = rho_hat(t) + conj(rho_hat(t)) + |rho_hat(t)|^2
// the transform of phi is -g_hat / (1 + g_hat); inversion and symmetrization
// as in phi_from_E. |1 + g_hat| must stay above tol.wiener_min.
GLFunction phi_from_series(const std::function<Complex(double)>& rho_hat,
                           double N, double omega, Eigen::Index grid_count,
                           Eigen::Index out_samples = 2049,
                           const Tolerances& tol = {});

// Positivity of 1 + T_phi on L^2(-N, N): assemble the symmetrized Nystrom
// matrix I + W^{1/2} K W^{1/2} with trapezoid weights (endpoints halved) and
// kernel phi(t - s); report its smallest eigenvalue. passed <=> min > 0.
PositivityReport check_phi(const GLFunction& phi, double N, int dim);

struct MollifiedGL {
    GLFunction phi;
    double core_halfwidth; // |t| below this is dominated by the mollified delta
};

// phi from a discrete spectral measure, Gaussian-mollified:
//   phi(t) = 1/2 [ sum_k w_k e^{-i t lambda_k} G(lambda_k) - F(t) ],
// G(l) = exp(-l^2/(2 W^2)) the frequency cutoff of width W = mollifier_width,
// F(t) = sqrt(2 pi) W / pi * exp(-W^2 t^2 / 2) the matching transform of the
// subtracted (1/pi) dl term. The measure must cover |lambda| >= 5 W.
MollifiedGL phi_from_spectral_measure(const SpectralMeasure& rho,
                                      double mollifier_width,
                                      Eigen::Index out_samples = 2049,
                                      const Tolerances& tol = {});

struct PhiFromDiracOptions {
    double initial_window = 16.0;
    int max_doublings = 7;
    int oversample = 8;       // grid step pi/(oversample * N)
    Eigen::Index out_samples = 2049;
    int min_ode_steps = 512;
    double step_tol = 1e-10;  // per-node propagation accuracy target
    Tolerances tol;
};

struct PhiFromDiracResult {
    GLFunction phi;
    GridFunction1D E_grid;
    double omega = 0.0;
    double tail_mean = 0.0;
    double max_det_deviation = 0.0;
};

// Forward solve + window search: doubles the window until the trailing 10%
// of |g| drops below tol.window_tail, then extracts phi.
PhiFromDiracResult phi_from_dirac(const DiracMeasure& mu, double N,
                                  const PhiFromDiracOptions& opt = {});

// Mean of |1/|E|^2 - 1| over the outer 10% of the grid (both ends).
double window_tail_mean(const GridFunction1D& E_grid);

} // namespace dirac

#endif
