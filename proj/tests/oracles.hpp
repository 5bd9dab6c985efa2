#ifndef DIRAC_TEST_ORACLES_HPP
#define DIRAC_TEST_ORACLES_HPP

// Independent reference computations for the test suite. Everything here is
// deliberately brute force and shares no code path with the library.

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "dirac/types.hpp"

namespace oracles {

using dirac::Complex;
using dirac::DiracMeasure;
using dirac::Matrix2c;
using dirac::Matrix2r;
using dirac::PointMass;

// Matrix exponential by scaling-and-squaring over a plain Taylor series.
inline Matrix2c expm(Matrix2c A) {
    int squarings = 0;
    while (A.cwiseAbs().maxCoeff() > 0.25) {
        A *= 0.5;
        ++squarings;
    }
    Matrix2c sum = Matrix2c::Identity();
    Matrix2c term = Matrix2c::Identity();
    for (int n = 1; n <= 24; ++n) {
        term = (term * A) / double(n);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

inline Matrix2r expm_real(const Matrix2r& A) {
    return expm(A.cast<Complex>()).real();
}

// Truncated series sum_{n=1..terms} D^{n-1}/n!.
inline Matrix2r g_series(const Matrix2r& D, int terms = 30) {
    Matrix2r sum = Matrix2r::Zero();
    Matrix2r pow = Matrix2r::Identity(); // D^{n-1}
    double factorial = 1.0;
    for (int n = 1; n <= terms; ++n) {
        factorial *= double(n);
        sum += pow / factorial;
        pow = pow * D;
    }
    return sum;
}

// Free-field rotation R(x, z) = cos(zx) I + sin(zx) J.
inline Matrix2c free_rotation(double x, Complex z) {
    Matrix2c R;
    const Complex c = std::cos(z * x), s = std::sin(z * x);
    R << c, -s, s, c;
    return R;
}

// Smooth random coefficient: low-order sine series vanishing at 0 and N,
// scaled so that max_i |mu_i|((0, N]) is close to `target_norm`.
inline DiracMeasure random_smooth_measure(double N, unsigned seed, double target_norm,
                                          Eigen::Index samples = 257, int modes = 5) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    DiracMeasure mu = DiracMeasure::zero(N, samples);
    for (int k = 1; k <= modes; ++k) {
        const double a1 = gauss(gen) / double(k * k);
        const double a2 = gauss(gen) / double(k * k);
        for (Eigen::Index i = 0; i < samples; ++i) {
            const double x = N * double(i) / double(samples - 1);
            mu.mu1[i] += a1 * std::sin(double(k) * M_PI * x / N);
            mu.mu2[i] += a2 * std::sin(double(k) * M_PI * x / N);
        }
    }
    const double norm = std::max(mu.variation(1, N), mu.variation(2, N));
    if (norm > 0.0) {
        mu.mu1 *= target_norm / norm;
        mu.mu2 *= target_norm / norm;
    }
    return mu;
}

// Infinitely flat bump on (0, N), peak value `amplitude` at N/2.
inline DiracMeasure bump_measure(double N, double amplitude, Eigen::Index samples = 513) {
    DiracMeasure mu = DiracMeasure::zero(N, samples);
    for (Eigen::Index i = 0; i < samples; ++i) {
        const double q = double(i) / double(samples - 1);
        if (q > 0.0 && q < 1.0)
            mu.mu2[i] = amplitude * std::exp(4.0 - 1.0 / (q * (1.0 - q)));
    }
    return mu;
}

inline std::vector<PointMass> random_atoms(double N, unsigned seed, int count,
                                           double max_weight = 0.8) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> pos(0.1 * N, N);
    std::uniform_real_distribution<double> wt(0.05, max_weight);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::vector<PointMass> atoms;
    for (int i = 0; i < count; ++i) {
        const double t = wt(gen), a = angle(gen);
        atoms.push_back(PointMass{pos(gen), t * std::cos(a), t * std::sin(a)});
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const PointMass& l, const PointMass& r) { return l.position < r.position; });
    // enforce distinct positions
    for (std::size_t i = 1; i < atoms.size(); ++i)
        if (atoms[i].position <= atoms[i - 1].position)
            atoms[i].position = atoms[i - 1].position + 1e-3 * N;
    return atoms;
}

// Quadratic form <f, f + phi*f> on [-N, N] by direct double quadrature,
// independent of the Nystrom assembly.
inline double quadratic_form(const dirac::GLFunction& phi, double N,
                             const std::function<Complex(double)>& f, int nodes = 401) {
    const double h = 2.0 * N / double(nodes - 1);
    auto weight = [&](int i) { return (i == 0 || i == nodes - 1) ? 0.5 * h : h; };
    double acc = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double t = -N + h * double(i);
        Complex conv = 0.0;
        for (int j = 0; j < nodes; ++j) {
            const double s = -N + h * double(j);
            conv += weight(j) * phi(t - s) * f(s);
        }
        acc += weight(i) * std::real(std::conj(f(t)) * (f(t) + conv));
    }
    return acc;
}

} // namespace oracles

#endif
