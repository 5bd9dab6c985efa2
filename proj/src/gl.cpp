#include "dirac/gl.hpp"

#include <cmath>

#include "dirac/forward.hpp"
#include "dirac/fourier.hpp"
#include "dirac/parallel.hpp"

namespace dirac {

namespace {

GridFunction1D symmetric_out_grid(double N, Eigen::Index out_samples) {
    GridFunction1D g;
    g.lo = -2.0 * N;
    g.hi = 2.0 * N;
    g.samples.resize(out_samples % 2 == 0 ? out_samples + 1 : out_samples);
    return g;
}

} // namespace

double window_tail_mean(const GridFunction1D& E_grid) {
    const Eigen::Index n = E_grid.count();
    const Eigen::Index edge = std::max<Eigen::Index>(Eigen::Index(0.1 * double(n)), 4);
    double acc = 0.0;
    Eigen::Index cnt = 0;
    for (Eigen::Index i = 0; i < edge; ++i) {
        for (Eigen::Index j : {i, n - 1 - i}) {
            const double mod2 = std::norm(E_grid.samples[j]);
            acc += std::abs(1.0 / mod2 - 1.0);
            ++cnt;
        }
    }
    return acc / double(cnt);
}

GLFunction phi_from_E(const GridFunction1D& E_grid, double N,
                      Eigen::Index out_samples, const Tolerances& tol) {
    E_grid.validate();
    if (E_grid.step() > M_PI / (8.0 * N) * (1.0 + 1e-9))
        throw std::invalid_argument("phi_from_E: grid step must be <= pi/(8N)");
    if (std::abs(E_grid.lo + E_grid.hi) > 1e-9 * std::max(1.0, E_grid.hi))
        throw std::invalid_argument("phi_from_E: window must be symmetric about 0");

    const Eigen::Index n = E_grid.count();
    GridFunction1D g;
    g.lo = E_grid.lo;
    g.hi = E_grid.hi;
    g.samples.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mod = std::abs(E_grid.samples[i]);
        if (mod < tol.min_E_modulus)
            throw NumericalGuardError("phi_from_E: |E(t)| below guard at t = " +
                                      std::to_string(g.node(i)));
        g.samples[i] = 1.0 / (mod * mod) - 1.0;
    }

    const double tail = window_tail_mean(E_grid);
    if (tail > tol.window_tail)
        throw NumericalGuardError("phi_from_E: window tail mean " + std::to_string(tail) +
                                  " above tolerance; enlarge the window");

    const Eigen::VectorXd w = raised_cosine_taper(n, 0.1);
    g.samples.array() *= w.array().cast<Complex>();

    const GridFunction1D raw = inverse_spectral_transform(
        g, -2.0 * N, 2.0 * N, out_samples % 2 == 0 ? out_samples + 1 : out_samples);
    return GLFunction(N, raw);
}

GLFunction phi_from_series(const std::function<Complex(double)>& rho_hat,
                           double N, double omega, Eigen::Index grid_count,
                           Eigen::Index out_samples, const Tolerances& tol) {
    if (grid_count < 16 || !(omega > 0.0))
        throw std::invalid_argument("phi_from_series: bad grid parameters");
    GridFunction1D phat;
    phat.lo = -omega;
    phat.hi = omega;
    phat.samples.resize(grid_count % 2 == 0 ? grid_count + 1 : grid_count);
    const Eigen::Index n = phat.count();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex r = rho_hat(phat.node(i));
        const Complex ghat = r + std::conj(r) + r * std::conj(r); // real by construction
        const Complex denom = 1.0 + ghat;
        if (std::abs(denom) < tol.wiener_min)
            throw NumericalGuardError("phi_from_series: |1 + g_hat| below guard at t = " +
                                      std::to_string(phat.node(i)));
        phat.samples[i] = -ghat / denom;
    }
    const Eigen::VectorXd w = raised_cosine_taper(n, 0.1);
    phat.samples.array() *= w.array().cast<Complex>();

    const GridFunction1D raw = inverse_spectral_transform(
        phat, -2.0 * N, 2.0 * N, out_samples % 2 == 0 ? out_samples + 1 : out_samples);
    return GLFunction(N, raw);
}

PositivityReport check_phi(const GLFunction& phi, double N, int dim) {
    if (dim < 16) throw std::invalid_argument("check_phi: dim >= 16 required");
    if (!(N > 0.0) || N > phi.interval_length() * (1.0 + 1e-12))
        throw std::invalid_argument("check_phi: N outside the support of phi");

    const double h = 2.0 * N / double(dim - 1);
    Eigen::VectorXd sqw(dim);
    for (int i = 0; i < dim; ++i)
        sqw[i] = std::sqrt((i == 0 || i == dim - 1) ? 0.5 * h : h);

    Eigen::MatrixXcd A(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double ti = -N + h * double(i);
        for (int j = 0; j < dim; ++j) {
            const double tj = -N + h * double(j);
            A(i, j) = sqw[i] * sqw[j] * phi(ti - tj);
        }
        A(i, i) += 1.0;
    }
    // kill asymmetric quadrature noise before the eigensolve
    const Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    PositivityReport rep;
    rep.matrix_dim = dim;
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.passed = rep.min_eigenvalue > 0.0;
    return rep;
}

MollifiedGL phi_from_spectral_measure(const SpectralMeasure& rho,
                                      double mollifier_width,
                                      Eigen::Index out_samples,
                                      const Tolerances& tol) {
    (void)tol;
    rho.validate();
    if (!(mollifier_width > 0.0))
        throw std::invalid_argument("phi_from_spectral_measure: width must be positive");
    if (rho.atoms.empty())
        throw std::invalid_argument("phi_from_spectral_measure: empty measure");

    const double W = mollifier_width;
    double lambda_max = 0.0;
    for (const SpectralAtom& a : rho.atoms)
        lambda_max = std::max(lambda_max, std::abs(a.lambda));
    if (lambda_max < 5.0 * W)
        throw NumericalGuardError("phi_from_spectral_measure: window too small relative to the mollifier "
                                  "(need atoms out to 5x its width)");

    const double N = rho.N;
    GridFunction1D out = symmetric_out_grid(N, out_samples);
    const Eigen::Index n = out.count();
    parallel_for(n, [&](long i) {
        const Complex I(0.0, 1.0);
        const double t = out.node(i);
        Complex sum = 0.0;
        for (const SpectralAtom& a : rho.atoms) {
            const double cutoff = std::exp(-a.lambda * a.lambda / (2.0 * W * W));
            sum += a.weight * std::exp(-I * t * a.lambda) * cutoff;
        }
        const double F = std::sqrt(2.0 * M_PI) * W / M_PI * std::exp(-0.5 * W * W * t * t);
        out.samples[i] = 0.5 * (sum - F);
    });

    return MollifiedGL{GLFunction(N, std::move(out)), 8.0 / W};
}

PhiFromDiracResult phi_from_dirac(const DiracMeasure& mu, double N,
                                  const PhiFromDiracOptions& opt) {
    double omega = opt.initial_window;
    for (int attempt = 0; attempt <= opt.max_doublings; ++attempt) {
        double detdev = 0.0;
        GridFunction1D E = sample_db_function(mu, N, omega, opt.oversample,
                                              opt.min_ode_steps, opt.step_tol, &detdev);
        const double tail = window_tail_mean(E);
        if (tail <= opt.tol.window_tail) {
            PhiFromDiracResult res{phi_from_E(E, N, opt.out_samples, opt.tol),
                                   std::move(E), omega, tail, detdev};
            return res;
        }
        omega *= 2.0;
    }
    throw NumericalGuardError("phi_from_dirac: window tail not met after max doublings");
}

} // namespace dirac
