#ifndef DIRAC_SERIES_HPP
#define DIRAC_SERIES_HPP

#include <utility>
#include <vector>

#include "dirac/types.hpp"

namespace dirac {

// Weight of the jump measure at a point mass: cosh(t) - 1.
double omega_weight(const PointMass& pm);

// The scalar normalizer k(x) = prod_{atoms p <= x} 1/cosh(t(p)); identically 1
// for a purely absolutely continuous coefficient. Right continuous, values in
// (0, 1], non-increasing.
double k_function(const DiracMeasure& mu, double x);

// The complex coupling measure dP driving the off-diagonal iteration:
// density (mu2 - i mu1), atoms with weight tanh(t)/t * (mu2{p} - i mu1{p}).
struct CouplingMeasure {
    double length = 1.0;          // the density lives on [0, length]
    Eigen::VectorXcd density;     // uniform samples, both endpoints
    std::vector<std::pair<double, Complex>> atoms;

    double grid_step() const { return length / double(density.size() - 1); }
    Complex density_at(double x) const;
    double total_variation(double upto) const; // |P|((0, upto])
};

CouplingMeasure coupling_measure(const DiracMeasure& mu);

// n-fold iterated integral over the ordered simplex 0 < t_n <= ... <= t_1 <= delta:
//   v_{n,2}(delta, z) = 1/2 int dPbar(t1) dP(t2) dPbar(t3) ...
//                           e^{2iz(t1 - t2 + t3 - ... +- t_n)}
// (measures alternate starting with dPbar; the sign of t_n is (-1)^{n+1}).
// Evaluated by n cumulative trapezoid passes on a uniform grid; coincident
// nodes carry the half weight the trapezoid rule already assigns. Atoms are
// supported for n = 1 only.
Complex iterated_v(const CouplingMeasure& P, int n, double delta, Complex z,
                   int quad_nodes = 512);

// Closed-form bound: |v_{n,2}| <= e^{2 max(0,-Im z) delta} (|P|(0,delta])^n / (2 n!).
double iterated_v_bound(double p_mass, int n, double delta, Complex z);

struct SeriesExpansion {
    double delta = 1.0;
    std::vector<Complex> terms; // v_{n,2} for n = 1..truncation_order
    int truncation_order = 0;
    double tail_bound = 0.0;    // bound on 2 sum_{n > order} |v_{n,2}|

    Complex rho_hat() const; // 2 * sum of the retained terms
};

SeriesExpansion series_expansion(const DiracMeasure& mu, Complex z, int order,
                                 int quad_nodes = 512);

// E_delta(z) = k(delta) e^{-iz delta} (1 + rho_hat(z)) truncated at `order`;
// requires max_i |mu_i|((0, delta]) < 1/8 with delta = mu.N. On return
// *tail_bound (if given) bounds |E_exact - E_series| / |k e^{-iz delta}|.
Complex E_via_series(const DiracMeasure& mu, Complex z, int order,
                     double* tail_bound = nullptr, int quad_nodes = 512);

} // namespace dirac

#endif
