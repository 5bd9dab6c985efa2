#include "dirac/forward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dirac/parallel.hpp"

namespace dirac {

namespace {

// Coefficient of the first-order system: A(x) = -J (mu(x) - z I).
// Written out for mu(x) = [[m1, m2], [m2, -m1]]:
//   A = [[m2, -m1 - z], [z - m1, -m2]]
template <typename Scalar>
Eigen::Matrix2<Scalar> system_matrix(const Eigen::Vector2d& m, Scalar z) {
    Eigen::Matrix2<Scalar> a;
    a(0, 0) = Scalar(m[1]);
    a(0, 1) = Scalar(-m[0]) - z;
    a(1, 0) = z - Scalar(m[0]);
    a(1, 1) = Scalar(-m[1]);
    return a;
}

template <typename Scalar>
using Recorder = std::function<void(double, const Eigen::Matrix2<Scalar>&)>;

template <typename Scalar>
void rk4_segment(const DiracMeasure& mu, double a, double b, Scalar z, int n,
                 Eigen::Matrix2<Scalar>& T, const Recorder<Scalar>& record) {
    using M2 = Eigen::Matrix2<Scalar>;
    const double h = (b - a) / double(n);
    for (int i = 0; i < n; ++i) {
        const double x0 = a + h * double(i);
        const M2 A0 = system_matrix<Scalar>(mu.density(x0), z);
        const M2 Am = system_matrix<Scalar>(mu.density(x0 + 0.5 * h), z);
        const M2 A1 = system_matrix<Scalar>(mu.density(x0 + h), z);
        const M2 k1 = A0 * T;
        const M2 k2 = Am * (T + (0.5 * h) * k1);
        const M2 k3 = Am * (T + (0.5 * h) * k2);
        const M2 k4 = A1 * (T + h * k3);
        T += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (record) record(x0 + h, T);
    }
}

template <typename Scalar>
Eigen::Matrix2<Scalar> propagate(const DiracMeasure& mu, double x0, double x1,
                                 Scalar z, int steps, const Tolerances& tol,
                                 const Recorder<Scalar>& record = {}) {
    using M2 = Eigen::Matrix2<Scalar>;
    if (!(x1 >= x0) || x0 < 0.0 || x1 > mu.N * (1.0 + 1e-12) + 1e-300)
        throw std::invalid_argument("propagate: interval outside [0, N]");
    M2 T = M2::Identity();
    if (record) record(x0, T);
    if (x1 == x0) return T;

    // Breakpoints: atom positions inside (x0, x1] plus the right endpoint.
    // An atom sitting on a breakpoint is applied after the ODE step that ends
    // there (right-continuity convention).
    struct Cut { double pos; const PointMass* atom; };
    std::vector<Cut> cuts;
    for (const PointMass& pm : mu.point_masses)
        if (pm.position > x0 && pm.position <= x1)
            cuts.push_back({pm.position, &pm});
    if (cuts.empty() || cuts.back().pos != x1) cuts.push_back({x1, nullptr});

    const double total = x1 - x0;
    double a = x0;
    for (const Cut& cut : cuts) {
        if (cut.pos > a) {
            const int n = std::max(2, int(std::lround(double(steps) * (cut.pos - a) / total)));
            rk4_segment<Scalar>(mu, a, cut.pos, z, n, T, record);
        }
        if (cut.atom) {
            const Matrix2r F = jump_factor(*cut.atom, JumpDirection::left_to_right, tol);
            T = F.template cast<Scalar>() * T;
            if (record) record(cut.pos, T);
        }
        a = cut.pos;
    }

    // |det T - 1| carries a roundoff floor of order ||T||^2 * eps, so entries
    // grown by e^{Im z * x} need the scaled form of the guard.
    const double det_dev = std::abs(T.determinant() - Scalar(1.0));
    const double scale = std::max(1.0, std::pow(T.cwiseAbs().maxCoeff(), 2.0));
    if (det_dev > tol.det_tol * scale) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "propagate: |det T - 1| = %.3e exceeds tolerance; increase the step count",
                      det_dev);
        throw NumericalGuardError(msg);
    }
    return T;
}

} // namespace

int suggested_steps(double length, Complex z, double tol) {
    const double zz = std::abs(z) + 1.0;
    const double s = 1.5 * std::pow(std::max(length, 1e-12) * zz, 1.25) /
                     std::pow(120.0 * tol, 0.25);
    return int(std::clamp(s, 64.0, 4.0e6));
}

Matrix2c transfer_matrix(const DiracMeasure& mu, double x, Complex z, int steps,
                         const Tolerances& tol) {
    if (x < 0.0 || x > mu.N)
        throw std::invalid_argument("transfer_matrix: x outside [0, N]");
    mu.validate();
    return propagate<Complex>(mu, 0.0, x, z, steps, tol);
}

Matrix2c transfer_matrix_between(const DiracMeasure& mu, double x0, double x1,
                                 Complex z, int steps, const Tolerances& tol) {
    return propagate<Complex>(mu, x0, x1, z, steps, tol);
}

Matrix2r transfer_matrix_real(const DiracMeasure& mu, double x, double lambda,
                              int steps, const Tolerances& tol) {
    return propagate<double>(mu, 0.0, x, lambda, steps, tol);
}

std::vector<TransferState> transfer_trajectory(const DiracMeasure& mu, double x,
                                               Complex z, int steps,
                                               const Tolerances& tol) {
    std::vector<TransferState> path;
    Recorder<Complex> rec = [&](double s, const Matrix2c& T) {
        if (!path.empty() && path.back().x == s) {
            path.back().T = T;
            return;
        }
        path.push_back(TransferState{s, T, z});
    };
    propagate<Complex>(mu, 0.0, x, z, steps, tol, rec);
    return path;
}

void transfer_trajectory_real(const DiracMeasure& mu, double x, double lambda,
                              int steps, Eigen::VectorXd& xs,
                              std::vector<Matrix2r>& Ts, const Tolerances& tol) {
    Ts.clear();
    std::vector<double> pos;
    Recorder<double> rec = [&](double s, const Matrix2r& T) {
        // an atom re-records its abscissa; keep the right-continuous value
        if (!pos.empty() && pos.back() == s) {
            Ts.back() = T;
            return;
        }
        pos.push_back(s);
        Ts.push_back(T);
    };
    propagate<double>(mu, 0.0, x, lambda, steps, tol, rec);
    xs = Eigen::Map<Eigen::VectorXd>(pos.data(), long(pos.size()));
}

Complex db_function(const DiracMeasure& mu, double N, Complex z, int steps,
                    const Tolerances& tol) {
    const Matrix2c T = transfer_matrix(mu, N, z, steps, tol);
    return T(0, 0) - Complex(0.0, 1.0) * T(1, 0);
}

GridFunction1D sample_db_function(const DiracMeasure& mu, double N, double omega,
                                  int oversample, int min_steps, double step_tol,
                                  double* max_det_deviation) {
    mu.validate();
    const double dt = M_PI / (double(oversample) * N);
    const Eigen::Index half = Eigen::Index(std::ceil(omega / dt));
    const Eigen::Index count = 2 * half + 1;
    GridFunction1D E;
    E.lo = -double(half) * dt;
    E.hi = double(half) * dt;
    E.samples.resize(count);
    Eigen::VectorXd detdev = Eigen::VectorXd::Zero(count);
    const Tolerances tol;
    parallel_for(count, [&](long i) {
        const double t = E.lo + double(i) * dt;
        const int steps = std::max(min_steps, suggested_steps(N, t, step_tol));
        const Matrix2r T = transfer_matrix_real(mu, N, t, steps, tol);
        E.samples[i] = Complex(T(0, 0), -T(1, 0));
        detdev[i] = std::abs(T.determinant() - 1.0);
    });
    if (max_det_deviation) *max_det_deviation = detdev.maxCoeff();
    return E;
}

Complex weyl_function(const DiracMeasure& mu, double N, double beta, Complex z,
                      int steps, const Tolerances& tol) {
    if (!(z.imag() > 0.0))
        throw std::invalid_argument("weyl_function: requires Im z > 0");
    if (!(beta >= 0.0 && beta < M_PI))
        throw std::invalid_argument("weyl_function: beta must lie in [0, pi)");
    const Matrix2c T = transfer_matrix(mu, N, z, steps, tol);
    const Vector2c e_beta(Complex(std::cos(beta), 0.0), Complex(std::sin(beta), 0.0));
    const Vector2c w = T.partialPivLu().solve(e_beta);
    if (std::abs(w[1]) < 1e-300)
        throw NumericalGuardError("weyl_function: Moebius denominator vanished");
    const Complex m = w[0] / w[1];
    if (!(m.imag() > 0.0))
        throw NumericalGuardError("weyl_function: lost the Herglotz property (increase steps?)");
    return m;
}

namespace {

double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double fa, double tol) {
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0.0) != (fm < 0.0)) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

std::vector<double> eigenvalues(const DiracMeasure& mu, double N, double beta,
                                double lo, double hi, const EigenvalueOptions& opt) {
    mu.validate();
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("eigenvalues: window must be finite and nonempty");

    Tolerances relaxed = opt.tol;
    relaxed.det_tol = 1.0; // accuracy is budgeted through the step count instead
    auto w = [&](double lambda) {
        const int steps = std::max(opt.steps, suggested_steps(N, lambda, opt.eval_tol));
        const Matrix2r T = transfer_matrix_real(mu, N, lambda, steps, relaxed);
        return std::sin(beta) * T(0, 0) - std::cos(beta) * T(1, 0);
    };

    auto scan = [&](double a, double b, double step, std::vector<double>& roots) {
        const long cells = std::max<long>(2, long(std::ceil((b - a) / step)));
        Eigen::VectorXd vals(cells + 1);
        parallel_for(cells + 1, [&](long i) {
            vals[i] = w(a + (b - a) * double(i) / double(cells));
        });
        std::vector<long> hits;
        for (long i = 0; i < cells; ++i) {
            if (vals[i] == 0.0) {
                roots.push_back(a + (b - a) * double(i) / double(cells));
                continue;
            }
            if ((vals[i] < 0.0) != (vals[i + 1] < 0.0)) hits.push_back(i);
        }
        std::vector<double> found(hits.size());
        parallel_for(long(hits.size()), [&](long k) {
            const long i = hits[std::size_t(k)];
            const double xa = a + (b - a) * double(i) / double(cells);
            const double xb = a + (b - a) * double(i + 1) / double(cells);
            found[std::size_t(k)] = bisect_root(w, xa, xb, vals[i], opt.tol.bisect_tol);
        });
        roots.insert(roots.end(), found.begin(), found.end());
    };

    const double base_step = M_PI / (opt.scan_step_factor * N);
    std::vector<double> roots;
    scan(lo, hi, base_step, roots);
    std::sort(roots.begin(), roots.end());

    // Eigenvalues of the separated problem are simple, so a sign scan finds
    // them all once the grid resolves their spacing. Gaps much wider than the
    // median are rescanned finer in case a close pair straddled one cell.
    for (int round = 0; round < opt.max_refine && roots.size() >= 3; ++round) {
        std::vector<double> gaps;
        for (std::size_t i = 0; i + 1 < roots.size(); ++i)
            gaps.push_back(roots[i + 1] - roots[i]);
        std::vector<double> sorted = gaps;
        std::nth_element(sorted.begin(), sorted.begin() + long(sorted.size() / 2), sorted.end());
        const double median = sorted[sorted.size() / 2];
        std::vector<double> extra;
        const double fine = base_step / std::pow(4.0, double(round + 1));
        for (std::size_t i = 0; i + 1 < roots.size(); ++i)
            if (gaps[i] > 1.8 * median)
                scan(roots[i] + 0.25 * fine, roots[i + 1] - 0.25 * fine, fine, extra);
        if (extra.empty()) break;
        if (round + 1 == opt.max_refine)
            throw NumericalGuardError("eigenvalues: scan kept finding roots under refinement; grid too coarse");
        roots.insert(roots.end(), extra.begin(), extra.end());
        std::sort(roots.begin(), roots.end());
    }

    // merge duplicates picked up by adjacent cells
    std::vector<double> out;
    for (double r : roots)
        if (out.empty() || r - out.back() > 4.0 * opt.tol.bisect_tol) out.push_back(r);
    return out;
}

double eigenfunction_norm_sq(const DiracMeasure& mu, double N, double lambda,
                             int quad_steps) {
    Tolerances relaxed;
    relaxed.det_tol = 1.0;
    Eigen::VectorXd xs;
    std::vector<Matrix2r> Ts;
    transfer_trajectory_real(mu, N, lambda,
                             std::max(quad_steps, suggested_steps(N, lambda, 1e-8)),
                             xs, Ts, relaxed);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < Ts.size(); ++i) {
        const double f0 = Ts[i].col(0).squaredNorm();
        const double f1 = Ts[i + 1].col(0).squaredNorm();
        acc += 0.5 * (f0 + f1) * (xs[long(i) + 1] - xs[long(i)]);
    }
    return acc;
}

double eigenfunction_pairing(const DiracMeasure& mu, double N, double lambda,
                             const std::function<Eigen::Vector2d(double)>& f,
                             int quad_steps) {
    Tolerances relaxed;
    relaxed.det_tol = 1.0;
    Eigen::VectorXd xs;
    std::vector<Matrix2r> Ts;
    transfer_trajectory_real(mu, N, lambda,
                             std::max(quad_steps, suggested_steps(N, lambda, 1e-8)),
                             xs, Ts, relaxed);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < Ts.size(); ++i) {
        const double f0 = Ts[i].col(0).dot(f(xs[long(i)]));
        const double f1 = Ts[i + 1].col(0).dot(f(xs[long(i) + 1]));
        acc += 0.5 * (f0 + f1) * (xs[long(i) + 1] - xs[long(i)]);
    }
    return acc;
}

SpectralMeasure spectral_measure(const DiracMeasure& mu, double N, double beta,
                                 double lo, double hi, int quad_steps,
                                 const EigenvalueOptions& opt) {
    const std::vector<double> lambdas = eigenvalues(mu, N, beta, lo, hi, opt);
    SpectralMeasure rho;
    rho.N = N;
    rho.beta = beta;
    rho.atoms.resize(lambdas.size());
    parallel_for(long(lambdas.size()), [&](long i) {
        const double nrm = eigenfunction_norm_sq(mu, N, lambdas[std::size_t(i)], quad_steps);
        rho.atoms[std::size_t(i)] = SpectralAtom{lambdas[std::size_t(i)], 1.0 / nrm};
    });
    rho.validate();
    return rho;
}

double exponential_type(const CanonicalSystem& H) {
    const Eigen::Index n = H.count();
    const double h = H.step();
    double acc = 0.0;
    double prev = std::sqrt(std::max(H.h(0, 0) * H.h(2, 0) - H.h(1, 0) * H.h(1, 0), 0.0));
    for (Eigen::Index i = 1; i < n; ++i) {
        const double det = H.h(0, i) * H.h(2, i) - H.h(1, i) * H.h(1, i);
        const double cur = std::sqrt(std::max(det, 0.0));
        acc += 0.5 * (prev + cur) * h;
        prev = cur;
    }
    return acc;
}

Matrix2c canonical_transfer(const CanonicalSystem& H, Complex z, int steps) {
    if (steps < 2) throw std::invalid_argument("canonical_transfer: steps >= 2 required");
    const double h = H.N / double(steps);
    const Matrix2r& J = symplectic_j();
    Matrix2c U = Matrix2c::Identity();
    auto A = [&](double x) -> Matrix2c { return z * (J * H.value(x)).cast<Complex>(); };
    for (int i = 0; i < steps; ++i) {
        const double x0 = h * double(i);
        const Matrix2c A0 = A(x0);
        const Matrix2c Am = A(x0 + 0.5 * h);
        const Matrix2c A1 = A(x0 + h);
        const Matrix2c k1 = A0 * U;
        const Matrix2c k2 = Am * (U + (0.5 * h) * k1);
        const Matrix2c k3 = Am * (U + (0.5 * h) * k2);
        const Matrix2c k4 = A1 * (U + h * k3);
        U += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return U;
}

Complex weyl_function_canonical(const CanonicalSystem& H, const Vector2c& boundary,
                                Complex z, int steps) {
    const Matrix2c U = canonical_transfer(H, z, steps);
    const Vector2c w = U.partialPivLu().solve(boundary);
    if (std::abs(w[1]) < 1e-300)
        throw NumericalGuardError("weyl_function_canonical: Moebius denominator vanished");
    return w[0] / w[1];
}

} // namespace dirac
