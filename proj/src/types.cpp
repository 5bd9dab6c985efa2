#include "dirac/types.hpp"

#include <cmath>

namespace dirac {

double sinhc(double t, double cut) {
    const double a = std::abs(t);
    if (a < cut) {
        const double t2 = t * t;
        return 1.0 + t2 / 6.0 + t2 * t2 / 120.0 + t2 * t2 * t2 / 5040.0;
    }
    return std::sinh(t) / t;
}

double coshm1_over_t2(double t, double cut) {
    const double a = std::abs(t);
    if (a < cut) {
        const double t2 = t * t;
        return 0.5 + t2 / 24.0 + t2 * t2 / 720.0 + t2 * t2 * t2 / 40320.0;
    }
    // cosh(t) - 1 = 2 sinh^2(t/2) sidesteps the cancellation above the cut
    const double s = std::sinh(0.5 * t) / t;
    return 2.0 * s * s;
}

Matrix2r jump_factor(const PointMass& pm, JumpDirection dir, const Tolerances& tol) {
    const double t = pm.weight();
    if (!(t > 0.0))
        throw std::invalid_argument("jump_factor: degenerate point mass (t = 0)");
    const Matrix2r Jmu = symplectic_j() * pm.matrix();
    const double sign = (dir == JumpDirection::left_to_right) ? -1.0 : 1.0;
    return std::cosh(t) * Matrix2r::Identity() +
           sign * sinhc(t, tol.hyperbolic_taylor_cut) * Jmu;
}

Matrix2r g_of(const Matrix2r& D, const Tolerances& tol) {
    // D is required to square to a multiple of the identity.
    const Matrix2r D2 = D * D;
    const double t2 = 0.5 * (D2(0, 0) + D2(1, 1));
    const double off = std::abs(D2(0, 1)) + std::abs(D2(1, 0)) +
                       std::abs(D2(0, 0) - D2(1, 1));
    if (off > 1e-12 * (1.0 + std::abs(t2)))
        throw std::invalid_argument("g_of: D^2 is not a multiple of the identity");
    const double t = std::sqrt(std::max(t2, 0.0));
    return sinhc(t, tol.hyperbolic_taylor_cut) * Matrix2r::Identity() +
           coshm1_over_t2(t, tol.hyperbolic_taylor_cut) * D;
}

DiracMeasure DiracMeasure::zero(double N, Eigen::Index samples) {
    DiracMeasure mu;
    mu.N = N;
    mu.mu1 = Eigen::VectorXd::Zero(samples);
    mu.mu2 = Eigen::VectorXd::Zero(samples);
    return mu;
}

Eigen::Vector2d DiracMeasure::density(double x) const {
    const Eigen::Index n = mu1.size();
    const double h = grid_step();
    double s = x / h;
    if (s <= 0.0) return {mu1[0], mu2[0]};
    if (s >= double(n - 1)) return {mu1[n - 1], mu2[n - 1]};
    const Eigen::Index i = Eigen::Index(s);
    const double f = s - double(i);
    return {mu1[i] + f * (mu1[i + 1] - mu1[i]), mu2[i] + f * (mu2[i + 1] - mu2[i])};
}

Matrix2r DiracMeasure::density_matrix(double x) const {
    const Eigen::Vector2d d = density(x);
    Matrix2r m;
    m << d[0], d[1], d[1], -d[0];
    return m;
}

double DiracMeasure::variation(int component, double upto) const {
    const Eigen::VectorXd& c = (component == 1) ? mu1 : mu2;
    const double h = grid_step();
    const double end = std::min(upto, N);
    // trapezoid of |density| up to `end`
    double acc = 0.0;
    const Eigen::Index n = c.size();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double x0 = double(i) * h, x1 = double(i + 1) * h;
        if (x0 >= end) break;
        const double xr = std::min(x1, end);
        const double v0 = std::abs(c[i]);
        const double frac = (xr - x0) / h;
        const double vr = std::abs(c[i] + frac * (c[i + 1] - c[i]));
        acc += 0.5 * (v0 + vr) * (xr - x0);
    }
    for (const PointMass& pm : point_masses)
        if (pm.position <= end)
            acc += std::abs(component == 1 ? pm.mu1 : pm.mu2);
    return acc;
}

void DiracMeasure::validate() const {
    if (!(N > 0.0)) throw std::invalid_argument("DiracMeasure: N must be positive");
    if (mu1.size() < 2 || mu1.size() != mu2.size())
        throw std::invalid_argument("DiracMeasure: density grids need >= 2 matching samples");
    if (!mu1.allFinite() || !mu2.allFinite())
        throw std::invalid_argument("DiracMeasure: non-finite density entries");
    double prev = 0.0;
    for (const PointMass& pm : point_masses) {
        if (!(pm.position > prev) || pm.position > N)
            throw std::invalid_argument("DiracMeasure: atom positions must be strictly increasing in (0, N]");
        if (!(pm.weight() > 0.0))
            throw std::invalid_argument("DiracMeasure: zero-weight atom must be omitted");
        if (!std::isfinite(pm.mu1) || !std::isfinite(pm.mu2))
            throw std::invalid_argument("DiracMeasure: non-finite atom");
        prev = pm.position;
    }
}

Complex GridFunction1D::value(double x) const {
    const Eigen::Index n = samples.size();
    const double h = step();
    double s = (x - lo) / h;
    if (s < -1e-9 || s > double(n - 1) + 1e-9)
        throw std::invalid_argument("GridFunction1D: evaluation outside [lo, hi]");
    if (s <= 0.0) return samples[0];
    if (s >= double(n - 1)) return samples[n - 1];
    const Eigen::Index i = Eigen::Index(s);
    const double f = s - double(i);
    return samples[i] + f * (samples[i + 1] - samples[i]);
}

void GridFunction1D::validate() const {
    if (samples.size() < 2) throw std::invalid_argument("GridFunction1D: need >= 2 samples");
    if (!(hi > lo)) throw std::invalid_argument("GridFunction1D: hi must exceed lo");
    if (!samples.allFinite()) throw std::invalid_argument("GridFunction1D: non-finite samples");
}

void SpectralMeasure::validate() const {
    if (!(N > 0.0)) throw std::invalid_argument("SpectralMeasure: N must be positive");
    if (!(beta >= 0.0 && beta < M_PI))
        throw std::invalid_argument("SpectralMeasure: beta must lie in [0, pi)");
    double prev = -std::numeric_limits<double>::infinity();
    for (const SpectralAtom& a : atoms) {
        if (!(a.weight > 0.0)) throw std::invalid_argument("SpectralMeasure: weights must be positive");
        if (!(a.lambda > prev)) throw std::invalid_argument("SpectralMeasure: eigenvalues must increase");
        prev = a.lambda;
    }
}

GLFunction::GLFunction(double N, GridFunction1D raw) : N_(N), samples_(std::move(raw)) {
    samples_.validate();
    const Eigen::Index n = samples_.count();
    if (n % 2 == 0)
        throw std::invalid_argument("GLFunction: sample count must be odd so that 0 is a node");
    if (std::abs(samples_.lo + samples_.hi) > 1e-12 * std::abs(samples_.hi) ||
        std::abs(samples_.hi - 2.0 * N) > 1e-9 * std::max(1.0, 2.0 * N))
        throw std::invalid_argument("GLFunction: grid must be [-2N, 2N]");
    samples_.lo = -samples_.hi; // make the mirror exact

    // Exact Hermitian symmetrization: phi[i] <- (phi[i] + conj phi[mirror])/2.
    // Addition is commutative per IEEE, so mirrored entries come out exactly
    // conjugate after this pass.
    const Eigen::Index mid = (n - 1) / 2;
    for (Eigen::Index m = 0; m <= mid; ++m) {
        const Complex a = samples_.samples[mid + m];
        const Complex b = samples_.samples[mid - m];
        const Complex v = 0.5 * (a + std::conj(b));
        samples_.samples[mid + m] = v;
        samples_.samples[mid - m] = std::conj(v);
    }

    // Antiderivative at non-negative nodes by cumulative trapezoid from 0.
    cum_.resize(mid + 1);
    cum_[0] = 0.0;
    const double h = samples_.step();
    for (Eigen::Index m = 0; m < mid; ++m)
        cum_[m + 1] = cum_[m] + 0.5 * h * (samples_.samples[mid + m] + samples_.samples[mid + m + 1]);
}

GLFunction GLFunction::zero(double N, Eigen::Index count) {
    GridFunction1D g;
    g.lo = -2.0 * N;
    g.hi = 2.0 * N;
    g.samples = Eigen::VectorXcd::Zero(count % 2 == 0 ? count + 1 : count);
    return GLFunction(N, std::move(g));
}

Complex GLFunction::operator()(double x) const { return samples_.value(x); }

Complex GLFunction::antiderivative(double x) const {
    // Negative arguments reflect through conj(Phi(-x)) = -Phi(x) so the
    // symmetry is exact in floating point.
    if (x < 0.0) return -std::conj(antiderivative(-x));
    const Eigen::Index mid = (samples_.count() - 1) / 2;
    const double h = samples_.step();
    double s = x / h;
    if (s >= double(mid)) return cum_[mid];
    const Eigen::Index m = Eigen::Index(s);
    const double dx = x - double(m) * h;
    const Complex pm = samples_.samples[mid + m];
    const Complex px = samples_.value(x);
    return cum_[m] + 0.5 * (pm + px) * dx;
}

double GLFunction::l1_norm() const {
    const Eigen::Index n = samples_.count();
    const double h = samples_.step();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
        acc += w * std::abs(samples_.samples[i]);
    }
    return acc;
}

CanonicalSystem CanonicalSystem::identity(double N, Eigen::Index count) {
    CanonicalSystem H;
    H.N = N;
    H.h.resize(3, count);
    H.h.row(0).setOnes();
    H.h.row(1).setZero();
    H.h.row(2).setOnes();
    return H;
}

Matrix2r CanonicalSystem::at(Eigen::Index i) const {
    Matrix2r m;
    m << h(0, i), h(1, i), h(1, i), h(2, i);
    return m;
}

Matrix2r CanonicalSystem::value(double x) const {
    const Eigen::Index n = h.cols();
    const double hh = step();
    double s = x / hh;
    if (s <= 0.0) return at(0);
    if (s >= double(n - 1)) return at(n - 1);
    const Eigen::Index i = Eigen::Index(s);
    const double f = s - double(i);
    Matrix2r m = at(i);
    return m + f * (at(i + 1) - m);
}

double CanonicalSystem::max_det_deviation() const {
    double dev = 0.0;
    for (Eigen::Index i = 0; i < h.cols(); ++i)
        dev = std::max(dev, std::abs(h(0, i) * h(2, i) - h(1, i) * h(1, i) - 1.0));
    return dev;
}

double CanonicalSystem::min_psd_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < h.cols(); ++i) {
        const double det = h(0, i) * h(2, i) - h(1, i) * h(1, i);
        m = std::min({m, h(0, i), h(2, i), det});
    }
    return m;
}

void CanonicalSystem::validate(const Tolerances& tol) const {
    if (!(N > 0.0) || h.cols() < 2)
        throw std::invalid_argument("CanonicalSystem: need N > 0 and >= 2 samples");
    if (!h.allFinite())
        throw std::invalid_argument("CanonicalSystem: non-finite samples");
    if (min_psd_margin() < -tol.psd_tol)
        throw std::invalid_argument("CanonicalSystem: sample not positive semidefinite");
}

} // namespace dirac
