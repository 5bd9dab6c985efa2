#include "dirac/series.hpp"

#include <cmath>

namespace dirac {

double omega_weight(const PointMass& pm) {
    const double t = pm.weight();
    if (!(t > 0.0)) throw std::invalid_argument("omega_weight: degenerate point mass");
    return std::cosh(t) - 1.0;
}

double k_function(const DiracMeasure& mu, double x) {
    // k solves k(x) = 1 - int_0^x k domega, so across an atom
    // k(p) = k(p-) / (1 + omega{p}) = k(p-) / cosh(t(p)).
    double k = 1.0;
    for (const PointMass& pm : mu.point_masses) {
        if (pm.position > x) break;
        k /= std::cosh(pm.weight());
    }
    return k;
}

Complex CouplingMeasure::density_at(double x) const {
    const Eigen::Index n = density.size();
    const double h = grid_step();
    double s = x / h;
    if (s <= 0.0) return density[0];
    if (s >= double(n - 1)) return density[n - 1];
    const Eigen::Index i = Eigen::Index(s);
    const double f = s - double(i);
    return density[i] + f * (density[i + 1] - density[i]);
}

double CouplingMeasure::total_variation(double upto) const {
    const double h = grid_step();
    const double end = std::min(upto, length);
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < density.size(); ++i) {
        const double x0 = double(i) * h;
        if (x0 >= end) break;
        const double x1 = std::min(double(i + 1) * h, end);
        acc += 0.5 * (std::abs(density[i]) + std::abs(density_at(x1))) * (x1 - x0);
    }
    for (const auto& [pos, wt] : atoms)
        if (pos <= end) acc += std::abs(wt);
    return acc;
}

CouplingMeasure coupling_measure(const DiracMeasure& mu) {
    mu.validate();
    CouplingMeasure P;
    P.length = mu.N;
    P.density.resize(mu.sample_count());
    for (Eigen::Index i = 0; i < mu.sample_count(); ++i)
        P.density[i] = Complex(mu.mu2[i], -mu.mu1[i]);
    for (const PointMass& pm : mu.point_masses) {
        const double t = pm.weight();
        const double coeff = (t < 1e-8) ? 1.0 : std::tanh(t) / t;
        P.atoms.emplace_back(pm.position, coeff * Complex(pm.mu2, -pm.mu1));
    }
    return P;
}

Complex iterated_v(const CouplingMeasure& P, int n, double delta, Complex z,
                   int quad_nodes) {
    if (n < 1 || n > 4)
        throw std::invalid_argument("iterated_v: order must be in 1..4");
    if (n > 1 && !P.atoms.empty())
        throw std::invalid_argument("iterated_v: atoms are supported for n = 1 only");

    const Complex I(0.0, 1.0);
    if (n == 1) {
        // direct: 1/2 ( int_0^delta conj(p)(t) e^{2izt} dt + sum over atoms )
        const long m = std::max(quad_nodes, 16);
        const double h = delta / double(m);
        Complex acc = 0.0;
        for (long i = 0; i <= m; ++i) {
            const double t = h * double(i);
            const double w = (i == 0 || i == m) ? 0.5 * h : h;
            acc += w * std::conj(P.density_at(t)) * std::exp(2.0 * I * z * t);
        }
        for (const auto& [pos, wt] : P.atoms)
            if (pos <= delta) acc += std::conj(wt) * std::exp(2.0 * I * z * pos);
        return 0.5 * acc;
    }

    // Innermost-out cumulative trapezoid: level i of n carries
    //   dPbar e^{+2izt} for odd i, dP e^{-2izt} for even i.
    const long m = std::max(quad_nodes, 16);
    const double h = delta / double(m);
    Eigen::VectorXcd level = Eigen::VectorXcd::Ones(m + 1);
    for (int depth = n; depth >= 1; --depth) {
        Eigen::VectorXcd q(m + 1);
        for (long i = 0; i <= m; ++i) {
            const double t = h * double(i);
            const Complex p = P.density_at(t);
            q[i] = (depth % 2 == 1) ? std::conj(p) * std::exp(2.0 * I * z * t)
                                    : p * std::exp(-2.0 * I * z * t);
        }
        Eigen::VectorXcd cum(m + 1);
        cum[0] = 0.0;
        for (long i = 0; i < m; ++i)
            cum[i + 1] = cum[i] + 0.5 * h * (q[i] * level[i] + q[i + 1] * level[i + 1]);
        level = std::move(cum);
    }
    return 0.5 * level[m];
}

double iterated_v_bound(double p_mass, int n, double delta, Complex z) {
    const double growth = std::exp(2.0 * std::max(0.0, -z.imag()) * delta);
    double nf = 1.0;
    for (int i = 2; i <= n; ++i) nf *= double(i);
    return growth * std::pow(p_mass, double(n)) / (2.0 * nf);
}

SeriesExpansion series_expansion(const DiracMeasure& mu, Complex z, int order,
                                 int quad_nodes) {
    if (order < 1 || order > 4)
        throw std::invalid_argument("series_expansion: order must be in 1..4");
    const double delta = mu.N;
    const double norm = std::max(mu.variation(1, delta), mu.variation(2, delta));
    if (!(norm < 0.125))
        throw std::invalid_argument("series_expansion: coefficient mass must be < 1/8 on (0, delta]");

    const CouplingMeasure P = coupling_measure(mu);
    SeriesExpansion s;
    s.delta = delta;
    s.truncation_order = order;
    for (int n = 1; n <= order; ++n)
        s.terms.push_back(iterated_v(P, n, delta, z, quad_nodes));

    // 2 sum_{n > order} bound_n = growth * (e^p - sum_{n<=order} p^n/n!)
    const double p = P.total_variation(delta);
    const double growth = std::exp(2.0 * std::max(0.0, -z.imag()) * delta);
    double partial = 1.0, term = 1.0;
    for (int i = 1; i <= order; ++i) {
        term *= p / double(i);
        partial += term;
    }
    s.tail_bound = growth * (std::exp(p) - partial);
    return s;
}

Complex SeriesExpansion::rho_hat() const {
    Complex acc = 0.0;
    for (const Complex& v : terms) acc += v;
    return 2.0 * acc;
}

Complex E_via_series(const DiracMeasure& mu, Complex z, int order,
                     double* tail_bound, int quad_nodes) {
    const SeriesExpansion s = series_expansion(mu, z, order, quad_nodes);
    if (tail_bound) *tail_bound = s.tail_bound;
    const Complex I(0.0, 1.0);
    const double k = k_function(mu, mu.N);
    return k * std::exp(-I * z * mu.N) * (1.0 + s.rho_hat());
}

} // namespace dirac
