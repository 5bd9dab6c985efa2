#include "dirac/fourier.hpp"

#include <cmath>

#include "dirac/parallel.hpp"

namespace dirac {

Eigen::VectorXcd spectral_transform(const GridFunction1D& f,
                                    const Eigen::VectorXd& freq) {
    f.validate();
    const Eigen::Index n = f.count();
    const double h = f.step();
    Eigen::VectorXcd out(freq.size());
    parallel_for(freq.size(), [&](long j) {
        const Complex I(0.0, 1.0);
        Complex acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
            acc += w * f.samples[i] * std::exp(I * freq[j] * f.node(i));
        }
        out[j] = acc;
    });
    return out;
}

GridFunction1D inverse_spectral_transform(const GridFunction1D& ghat,
                                          double lo, double hi,
                                          Eigen::Index count) {
    ghat.validate();
    GridFunction1D out;
    out.lo = lo;
    out.hi = hi;
    out.samples.resize(count);
    const Eigen::Index n = ghat.count();
    const double h = ghat.step();
    const double inv2pi = 1.0 / (2.0 * M_PI);
    parallel_for(count, [&](long j) {
        const Complex I(0.0, 1.0);
        const double x = lo + (hi - lo) * double(j) / double(count - 1);
        Complex acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
            acc += w * ghat.samples[i] * std::exp(-I * x * ghat.node(i));
        }
        out.samples[j] = inv2pi * acc;
    });
    return out;
}

Eigen::VectorXd raised_cosine_taper(Eigen::Index count, double fraction) {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(count);
    const Eigen::Index edge = Eigen::Index(std::floor(fraction * double(count - 1)));
    for (Eigen::Index i = 0; i < edge; ++i) {
        const double u = double(i) / double(edge); // 0 at the boundary, 1 inside
        const double v = 0.5 * (1.0 - std::cos(M_PI * u));
        w[i] = v;
        w[count - 1 - i] = v;
    }
    return w;
}

} // namespace dirac
