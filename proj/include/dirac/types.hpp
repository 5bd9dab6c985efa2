#ifndef DIRAC_TYPES_HPP
#define DIRAC_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace dirac {

using Complex = std::complex<double>;
using Matrix2r = Eigen::Matrix2d;
using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;

// Thrown when a numerical guard trips (conditioning limit, window tail not
// met, vanishing denominators, ...). Kept separate from std::invalid_argument
// so the CLI can map the two failure classes to different exit codes.
class NumericalGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Centralized tolerance configuration shared by all pipelines.
struct Tolerances {
    double det_tol = 1e-10;           // |det T - 1| allowed during propagation
    double psd_tol = 1e-9;            // slack on h11*h22 - h12^2 >= 0
    double unimodular_tol = 1e-6;     // |det H - 1| allowed on Hamiltonian inputs
    double hyperbolic_taylor_cut = 1e-4; // switch point for small-t expansions
    double min_E_modulus = 1e-8;      // lower guard on |E(t)| on the real axis
    double window_tail = 1e-4;        // mean |g| allowed on the outer 10% of the window
    double wiener_min = 1e-8;         // lower guard on |1 + g_hat|
    double fredholm_residual = 1e-9;  // Nystrom linear-solve residual acceptance
    double condition_limit = 1e12;    // dense-solve conditioning guard
    double imag_residue = 1e-8;       // allowed imaginary part on reconstructed H
    double min_abs_D = 1e-10;         // |D(x)| guard in the reconstruction
    double bisect_tol = 1e-11;        // eigenvalue bisection width
    double kernel_symmetry = 1e-10;   // mirrored-node defect allowed on j, k
    double mu_structure = 1e-7;       // symmetric/traceless defect floor in h_to_dirac
};

// J = [[0,-1],[1,0]], the symplectic rotation all equations are built from.
inline const Matrix2r& symplectic_j() {
    static const Matrix2r J = (Matrix2r() << 0.0, -1.0, 1.0, 0.0).finished();
    return J;
}

// A single point mass of the coefficient measure. The 2x2 matrix it carries
// is [[mu1, mu2], [mu2, -mu1]]; its scalar weight is t = sqrt(mu1^2 + mu2^2).
struct PointMass {
    double position = 0.0; // in (0, N]
    double mu1 = 0.0;
    double mu2 = 0.0;

    double weight() const { return std::sqrt(mu1 * mu1 + mu2 * mu2); }
    Matrix2r matrix() const {
        Matrix2r m;
        m << mu1, mu2, mu2, -mu1;
        return m;
    }
};

// Coefficient of the operator: an absolutely continuous part, sampled as a
// symmetric traceless density on a uniform grid over [0, N], plus finitely
// many point masses at strictly increasing positions in (0, N].
struct DiracMeasure {
    double N = 1.0;
    Eigen::VectorXd mu1; // density samples, uniform on [0, N], both endpoints
    Eigen::VectorXd mu2;
    std::vector<PointMass> point_masses;

    static DiracMeasure zero(double N, Eigen::Index samples = 2);

    Eigen::Index sample_count() const { return mu1.size(); }
    double grid_step() const { return N / double(mu1.size() - 1); }

    // Density at x by piecewise-linear interpolation, as (mu1, mu2).
    Eigen::Vector2d density(double x) const;
    Matrix2r density_matrix(double x) const;

    bool has_atoms() const { return !point_masses.empty(); }

    // Total variation of component i (1 or 2) over (0, upto]: L1 norm of the
    // density plus the absolute atom weights.
    double variation(int component, double upto) const;

    void validate() const; // throws std::invalid_argument on a malformed measure
};

// Uniform complex samples on [lo, hi], both endpoints included.
struct GridFunction1D {
    double lo = 0.0;
    double hi = 1.0;
    Eigen::VectorXcd samples;

    Eigen::Index count() const { return samples.size(); }
    double step() const { return (hi - lo) / double(samples.size() - 1); }
    double node(Eigen::Index i) const { return lo + double(i) * step(); }

    Complex value(double x) const; // piecewise-linear, throws outside [lo, hi]

    void validate() const;
};

struct SpectralAtom {
    double lambda = 0.0;
    double weight = 0.0;
};

// Discrete spectral measure of the regular problem on [0, N]: eigenvalues
// with their normalization weights, sorted by eigenvalue.
struct SpectralMeasure {
    double N = 1.0;
    double beta = 0.0; // boundary angle at N, in [0, pi)
    std::vector<SpectralAtom> atoms;

    void validate() const;
};

// The spectral-side function phi on (-2N, 2N). Construction symmetrizes the
// raw samples so that phi(-x) = conj(phi(x)) holds exactly afterwards; an
// antiderivative table for Phi(x) = int_0^x phi is kept alongside, built so
// that conj(Phi(-x)) = -Phi(x) is exact as well.
class GLFunction {
public:
    GLFunction(double N, GridFunction1D raw);

    static GLFunction zero(double N, Eigen::Index count = 257);

    double interval_length() const { return N_; }
    const GridFunction1D& grid() const { return samples_; }

    Complex operator()(double x) const;      // piecewise-linear in [-2N, 2N]
    Complex antiderivative(double x) const;  // Phi(x) = int_0^x phi(s) ds

    double l1_norm() const; // int |phi| over (-2N, 2N), trapezoid

private:
    double N_;
    GridFunction1D samples_;
    Eigen::VectorXcd cum_; // Phi at nodes >= 0, cum_[m] corresponds to node mid+m
};

// Sampled Hamiltonian H(x) on [0, N]: columns of `h` hold (h11, h12, h22) at
// uniform nodes including both endpoints.
struct CanonicalSystem {
    double N = 1.0;
    Eigen::Matrix<double, 3, Eigen::Dynamic> h;

    static CanonicalSystem identity(double N, Eigen::Index count);

    Eigen::Index count() const { return h.cols(); }
    double step() const { return N / double(h.cols() - 1); }
    double node(Eigen::Index i) const { return double(i) * step(); }

    Matrix2r at(Eigen::Index i) const;
    Matrix2r value(double x) const; // piecewise-linear

    double max_det_deviation() const;   // max_i |det H_i - 1|
    double min_psd_margin() const;      // min_i min(h11, h22, det)

    void validate(const Tolerances& tol = {}) const;
};

enum class JumpDirection { left_to_right, right_to_left };

// Closed-form jump factor exp(-+ J mu{x}) across a point mass, evaluated via
// (J mu{x})^2 = t^2 I:
//   exp(-+ J mu{x}) = cosh(t) I -+ sinh(t)/t * (J mu{x})
// left_to_right returns exp(-J mu{x}), so that f(x) = exp(-J mu{x}) f(x-).
Matrix2r jump_factor(const PointMass& pm, JumpDirection dir,
                     const Tolerances& tol = {});

// g(D) = sum_{n>=1} D^{n-1} / n!  for D with D^2 = t^2 I, i.e.
//   g(D) = sinh(t)/t * I + (cosh(t) - 1)/t^2 * D
// with limit values 1 and 1/2 at t = 0.
Matrix2r g_of(const Matrix2r& D, const Tolerances& tol = {});

// sinh(t)/t and (cosh(t)-1)/t^2 with four-term Taylor fallbacks below `cut`;
// the direct expressions lose precision near t = 0.
double sinhc(double t, double cut = 1e-4);
double coshm1_over_t2(double t, double cut = 1e-4);

} // namespace dirac

#endif
