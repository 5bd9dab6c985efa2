#ifndef DIRAC_INVERSE_HPP
#define DIRAC_INVERSE_HPP

#include <functional>

#include "dirac/types.hpp"

namespace dirac {

// Nystrom solution of the two convolution equations on [-x, x]:
//   j(x,t)   + int phi(t-s) j(x,s)   ds = 1/2
//   k_c(x,t) + int phi(t-s) k_c(x,s) ds = i Phi(t-x) - i/2
// with k = k_c + i on [0, x] (the discontinuous part of the conjugate kernel
// is split off analytically so the unknown stays continuous).
struct KernelSolution {
    double x = 0.0;
    Eigen::VectorXd nodes;  // symmetric about 0, odd count, 0 is a node
    Eigen::VectorXcd j;
    Eigen::VectorXcd k_c;

    Complex k(Eigen::Index i) const {
        return k_c[i] + (nodes[i] >= 0.0 ? Complex(0.0, 1.0) : Complex(0.0, 0.0));
    }
    Complex j_plus() const { return j[j.size() - 1]; }    // j(x, x)
    Complex j_minus() const { return j[0]; }              // j(x, -x)
    Complex k_plus() const { return k_c[k_c.size() - 1] + Complex(0.0, 1.0); }
    Complex k_minus() const { return k_c[0]; }

    // Largest deviation from j(x,-t) = conj j(x,t) and k(x,-t) = conj k(x,t)
    // over mirrored node pairs; at the self-mirrored node 0 the k identity
    // holds in the almost-everywhere sense and reads Im k_c(x,0) = -1/2.
    double symmetry_defect() const;
};

// Corner combinations driving the reconstruction:
//   A = 2 j(x,x) j(x,-x)              B = j(x,-x) k(x,x) + j(x,x) k(x,-x)
//   C = 2 k(x,x) k(x,-x)              D = j(x,-x) k(x,x) - j(x,x) k(x,-x)
struct ReconstructionIntermediates {
    double x = 0.0;
    Complex A, B, C, D;
};

ReconstructionIntermediates corner_intermediates(const KernelSolution& ks);

// Dense Nystrom solve of p + T_phi p = rhs on [-x, x] with `dim` symmetric
// trapezoid nodes (dim odd so that t = 0 is a node). Guards: 1-norm condition
// estimate below tol.condition_limit, residual below tol.fredholm_residual.
Eigen::VectorXcd fredholm_solve(const GLFunction& phi, double x,
                                const std::function<Complex(double)>& rhs,
                                int dim, const Tolerances& tol = {},
                                double* cond_estimate = nullptr);

KernelSolution kernel_pair(const GLFunction& phi, double x, int dim,
                           const Tolerances& tol = {});

// Hamiltonian on (0, N] from the corner values:
//   H11 = i A / D,  H12 = i B / D,  H22 = i C / D,   H(0) = I.
// The node count of each solve scales with x (floored at 17). Every sample is
// checked real to tol.imag_residue before the imaginary part is dropped.
CanonicalSystem reconstruct_H(const GLFunction& phi, int x_count, int dim,
                              const Tolerances& tol = {});

// Independent route to the same H(x) through the x-derivative equations:
//   p_x + T_phi p_x = -phi(t-x) p(x,x) - phi(t+x) p(x,-x)   (p = j, k_c)
//   H11 = j(x,x) + j(x,-x) + int j_x
//   H12 = k(x,x) + k(x,-x) + int (k_c)_x
//   H22 = conj(psi(x)) k(x,x) + conj(psi(-x)) k(x,-x) + int conj(psi) (k_c)_x
// with psi(s) = i (2 Phi(s) + sgn(s)).
Eigen::Matrix2d reconstruct_H_derivative_form(const GLFunction& phi, double x,
                                              int dim, const Tolerances& tol = {});

// H(x) = T0(x)^T T0(x) with T0 the transfer matrix at z = 0; real symmetric,
// det H = 1 exactly up to the propagation error, H(0) = I.
CanonicalSystem dirac_to_h(const DiracMeasure& mu, Eigen::Index samples = 513,
                           int ode_steps = 2048);

// Inverse of dirac_to_h for absolutely continuous H: integrates
//   T0' = -J mu(x) T0,   mu(x) = -1/2 T0^{-T} H'(x) T0^{-1} J,
// H' by centered differences (one-sided at the ends). The defect of mu from
// the symmetric traceless form signals det H != 1 or a non-AC input; the
// guard scales with the O(h^2) derivative-consistency drift of the grid.
DiracMeasure h_to_dirac(const CanonicalSystem& H, const Tolerances& tol = {});

} // namespace dirac

#endif
