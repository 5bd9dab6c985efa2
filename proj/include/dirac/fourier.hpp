#ifndef DIRAC_FOURIER_HPP
#define DIRAC_FOURIER_HPP

#include "dirac/types.hpp"

namespace dirac {

// Transform convention used everywhere: fhat(t) = int e^{i t x} f(x) dx, so
// the inverse is f(x) = 1/(2 pi) int e^{-i x t} fhat(t) dt. Both directions
// are direct trapezoid sums: the integrands here are smooth and decay inside
// the window, where the trapezoid rule converges geometrically.
Eigen::VectorXcd spectral_transform(const GridFunction1D& f,
                                    const Eigen::VectorXd& freq);

GridFunction1D inverse_spectral_transform(const GridFunction1D& ghat,
                                          double lo, double hi,
                                          Eigen::Index count);

// 1 on the inner (1 - 2*fraction) of [lo, hi], rolled off to 0 by a raised
// cosine over the outer `fraction` at each end.
Eigen::VectorXd raised_cosine_taper(Eigen::Index count, double fraction = 0.1);

} // namespace dirac

#endif
