#include "dirac/inverse.hpp"

#include <algorithm>
#include <cmath>

#include "dirac/forward.hpp"
#include "dirac/parallel.hpp"

namespace dirac {

namespace {

struct NystromSystem {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    Eigen::MatrixXcd M;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
};

NystromSystem build_nystrom(const GLFunction& phi, double x, int dim) {
    if (dim < 3 || dim % 2 == 0)
        throw std::invalid_argument("fredholm_solve: dim must be odd and >= 3 so 0 is a node");
    if (!(x > 0.0) || x > phi.interval_length() * (1.0 + 1e-12))
        throw std::invalid_argument("fredholm_solve: x outside (0, N]");

    NystromSystem sys;
    sys.nodes.resize(dim);
    sys.weights.resize(dim);
    const double h = 2.0 * x / double(dim - 1);
    const Eigen::Index mid = (dim - 1) / 2;
    for (Eigen::Index i = 0; i < dim; ++i) {
        // build symmetric nodes from the midpoint out so t and -t mirror exactly
        sys.nodes[i] = double(i - mid) * h;
        sys.weights[i] = (i == 0 || i == dim - 1) ? 0.5 * h : h;
    }
    sys.M.resize(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            sys.M(i, j) = sys.weights[j] * phi(sys.nodes[i] - sys.nodes[j]) +
                          (i == j ? 1.0 : 0.0);
    sys.lu.compute(sys.M);
    return sys;
}

// Hager-style 1-norm estimate of ||M^{-1}||; a handful of solves.
double inverse_norm1_estimate(const NystromSystem& sys) {
    const Eigen::Index n = sys.M.rows();
    Eigen::VectorXcd v = Eigen::VectorXcd::Constant(n, Complex(1.0 / double(n), 0.0));
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        const Eigen::VectorXcd y = sys.lu.solve(v);
        const double norm1 = y.cwiseAbs().sum();
        Eigen::VectorXcd xi(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = std::abs(y[i]);
            xi[i] = a > 0.0 ? y[i] / a : Complex(1.0, 0.0);
        }
        const Eigen::VectorXcd z = sys.lu.adjoint().solve(xi);
        Eigen::Index jmax;
        const double zmax = z.cwiseAbs().maxCoeff(&jmax);
        if (norm1 <= est) break;
        est = norm1;
        if (zmax <= std::abs(z.dot(v))) break;
        v.setZero();
        v[jmax] = 1.0;
    }
    return est;
}

// Right-hand side of the continuous-part equation, i Phi(t - x) - i/2, with
// Phi(t_i - x) = -int_{t_i}^{x} phi(t_i - s) ds realized by the same trapezoid
// rule the operator matrix uses. Sharing the quadrature makes the discrete
// system commute exactly with reflection + conjugation, so the kernel
// symmetries hold at the roundoff level instead of O(h^2).
Eigen::VectorXcd kc_rhs(const NystromSystem& sys, const GLFunction& phi) {
    const Eigen::Index n = sys.nodes.size();
    const double h = sys.nodes[1] - sys.nodes[0];
    const Complex I(0.0, 1.0);
    Eigen::VectorXcd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Complex acc = 0.0;
        if (i < n - 1) {
            for (Eigen::Index j = i; j < n; ++j) {
                const double w = (j == i || j == n - 1) ? 0.5 * h : h;
                acc += w * phi(sys.nodes[i] - sys.nodes[j]);
            }
        }
        r[i] = -I * acc - 0.5 * I;
    }
    return r;
}

Eigen::VectorXcd guarded_solve(const NystromSystem& sys, const Eigen::VectorXcd& rhs,
                               const Tolerances& tol, double* cond_out) {
    const double cond = sys.M.cwiseAbs().rowwise().sum().maxCoeff() *
                        inverse_norm1_estimate(sys);
    if (cond_out) *cond_out = cond;
    if (cond > tol.condition_limit)
        throw NumericalGuardError("fredholm_solve: condition estimate " +
                                  std::to_string(cond) + " beyond limit");
    const Eigen::VectorXcd p = sys.lu.solve(rhs);
    const double resid = (sys.M * p - rhs).cwiseAbs().maxCoeff();
    if (resid > tol.fredholm_residual * std::max(1.0, rhs.cwiseAbs().maxCoeff()))
        throw NumericalGuardError("fredholm_solve: residual " + std::to_string(resid) +
                                  " above tolerance");
    return p;
}

} // namespace

double KernelSolution::symmetry_defect() const {
    const Eigen::Index n = nodes.size();
    const Eigen::Index mid = (n - 1) / 2;
    double defect = 0.0;
    for (Eigen::Index m = 1; m <= mid; ++m) {
        defect = std::max(defect, std::abs(j[mid - m] - std::conj(j[mid + m])));
        defect = std::max(defect, std::abs(k(mid - m) - std::conj(k(mid + m))));
    }
    defect = std::max(defect, std::abs(j[mid].imag()));
    defect = std::max(defect, std::abs(k_c[mid].imag() + 0.5));
    return defect;
}

ReconstructionIntermediates corner_intermediates(const KernelSolution& ks) {
    ReconstructionIntermediates r;
    r.x = ks.x;
    const Complex jp = ks.j_plus(), jm = ks.j_minus();
    const Complex kp = ks.k_plus(), km = ks.k_minus();
    r.A = 2.0 * jp * jm;
    r.B = jm * kp + jp * km;
    r.C = 2.0 * kp * km;
    r.D = jm * kp - jp * km;
    return r;
}

Eigen::VectorXcd fredholm_solve(const GLFunction& phi, double x,
                                const std::function<Complex(double)>& rhs,
                                int dim, const Tolerances& tol, double* cond_estimate) {
    const NystromSystem sys = build_nystrom(phi, x, dim);
    Eigen::VectorXcd g(dim);
    for (Eigen::Index i = 0; i < dim; ++i) g[i] = rhs(sys.nodes[i]);
    return guarded_solve(sys, g, tol, cond_estimate);
}

KernelSolution kernel_pair(const GLFunction& phi, double x, int dim,
                           const Tolerances& tol) {
    const NystromSystem sys = build_nystrom(phi, x, dim);
    const Eigen::VectorXcd rj = Eigen::VectorXcd::Constant(dim, Complex(0.5, 0.0));
    const Eigen::VectorXcd rk = kc_rhs(sys, phi);
    KernelSolution ks;
    ks.x = x;
    ks.nodes = sys.nodes;
    ks.j = guarded_solve(sys, rj, tol, nullptr);
    ks.k_c = guarded_solve(sys, rk, tol, nullptr);

    const double defect = ks.symmetry_defect();
    if (defect > tol.kernel_symmetry)
        throw NumericalGuardError("kernel_pair: mirrored-node symmetry defect " +
                                  std::to_string(defect));
    return ks;
}

namespace {

int scaled_dim(int dim, double x, double N) {
    int d = int(std::lround(double(dim) * x / N));
    d = std::max(d, 17);
    d = std::min(d, std::max(dim, 17));
    if (d % 2 == 0) ++d;
    return d;
}

Matrix2c hamiltonian_sample(const ReconstructionIntermediates& r, const Tolerances& tol) {
    const Complex I(0.0, 1.0);
    if (std::abs(r.D) < tol.min_abs_D)
        throw NumericalGuardError("reconstruct_H: |D| below guard at x = " +
                                  std::to_string(r.x));
    Matrix2c H;
    H << I * r.A / r.D, I * r.B / r.D, I * r.B / r.D, I * r.C / r.D;
    return H;
}

} // namespace

CanonicalSystem reconstruct_H(const GLFunction& phi, int x_count, int dim,
                              const Tolerances& tol) {
    if (x_count < 2) throw std::invalid_argument("reconstruct_H: x_count >= 2 required");
    const double N = phi.interval_length();
    CanonicalSystem H;
    H.N = N;
    H.h.resize(3, x_count + 1);
    H.h.col(0) << 1.0, 0.0, 1.0; // H(0) = I by the D -> i/2 limit

    std::vector<std::string> failure(static_cast<std::size_t>(x_count));
    parallel_for(x_count, [&](long idx) {
        const double x = N * double(idx + 1) / double(x_count);
        try {
            const KernelSolution ks = kernel_pair(phi, x, scaled_dim(dim, x, N), tol);
            const Matrix2c Hx = hamiltonian_sample(corner_intermediates(ks), tol);
            const double imag_res = Hx.imag().cwiseAbs().maxCoeff();
            if (imag_res > tol.imag_residue)
                throw NumericalGuardError("reconstruct_H: imaginary residue " +
                                          std::to_string(imag_res) + " at x = " +
                                          std::to_string(x));
            H.h.col(idx + 1) << Hx(0, 0).real(), Hx(0, 1).real(), Hx(1, 1).real();
        } catch (const std::exception& e) {
            failure[std::size_t(idx)] = e.what();
        }
    });
    for (const std::string& f : failure)
        if (!f.empty()) throw NumericalGuardError(f);

    H.validate(tol);
    return H;
}

Eigen::Matrix2d reconstruct_H_derivative_form(const GLFunction& phi, double x,
                                              int dim, const Tolerances& tol) {
    const NystromSystem sys = build_nystrom(phi, x, dim);
    const Complex I(0.0, 1.0);
    const Eigen::Index n = sys.nodes.size();

    const Eigen::VectorXcd rj = Eigen::VectorXcd::Constant(n, Complex(0.5, 0.0));
    const Eigen::VectorXcd rk = kc_rhs(sys, phi);
    KernelSolution ks;
    ks.x = x;
    ks.nodes = sys.nodes;
    ks.j = guarded_solve(sys, rj, tol, nullptr);
    ks.k_c = guarded_solve(sys, rk, tol, nullptr);

    const Complex jp = ks.j_plus(), jm = ks.j_minus();
    const Complex kp = ks.k_plus(), km = ks.k_minus();

    Eigen::VectorXcd rjx(n), rkx(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex a = phi(sys.nodes[i] - x);
        const Complex b = phi(sys.nodes[i] + x);
        rjx[i] = -a * jp - b * jm;
        rkx[i] = -a * kp - b * km;
    }
    const Eigen::VectorXcd jx = guarded_solve(sys, rjx, tol, nullptr);
    const Eigen::VectorXcd kx = guarded_solve(sys, rkx, tol, nullptr);

    // psi(s) = i (2 Phi(s) + sgn(s)) with sgn(0) = 1; quadrature against psi
    // takes the jump midpoint at the s = 0 node, which keeps the trapezoid
    // rule second order across the discontinuity.
    auto psi_quad = [&](Eigen::Index i) -> Complex {
        const double s = sys.nodes[i];
        const double sgn = (s > 0.0) ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
        return I * (2.0 * phi.antiderivative(s) + sgn);
    };

    Complex int_jx = 0.0, int_kx = 0.0, int_psi_kx = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        int_jx += sys.weights[i] * jx[i];
        int_kx += sys.weights[i] * kx[i];
        int_psi_kx += sys.weights[i] * std::conj(psi_quad(i)) * kx[i];
    }

    const double sgn_x = 1.0; // x > 0
    const Complex psi_px = I * (2.0 * phi.antiderivative(x) + sgn_x);
    const Complex psi_mx = I * (2.0 * phi.antiderivative(-x) - sgn_x);

    const Complex H11 = jp + jm + int_jx;
    const Complex H12 = kp + km + int_kx;
    const Complex H22 = std::conj(psi_px) * kp + std::conj(psi_mx) * km + int_psi_kx;

    const double imag_res = std::max({std::abs(H11.imag()), std::abs(H12.imag()),
                                      std::abs(H22.imag())});
    if (imag_res > 1e-6)
        throw NumericalGuardError("reconstruct_H_derivative_form: imaginary residue " +
                                  std::to_string(imag_res));
    Eigen::Matrix2d H;
    H << H11.real(), H12.real(), H12.real(), H22.real();
    return H;
}

CanonicalSystem dirac_to_h(const DiracMeasure& mu, Eigen::Index samples, int ode_steps) {
    mu.validate();
    if (samples < 2) throw std::invalid_argument("dirac_to_h: samples >= 2 required");
    CanonicalSystem H;
    H.N = mu.N;
    H.h.resize(3, samples);

    const double h = mu.N / double(samples - 1);
    const int per_cell = std::max(2, int(std::lround(double(ode_steps) / double(samples - 1))));
    Matrix2r T = Matrix2r::Identity();
    H.h.col(0) << 1.0, 0.0, 1.0;
    Tolerances tol;
    for (Eigen::Index i = 1; i < samples; ++i) {
        const Matrix2r step = transfer_matrix_between(mu, double(i - 1) * h, double(i) * h,
                                                      Complex(0.0, 0.0), per_cell, tol)
                                  .real();
        T = step * T;
        const Matrix2r Hx = T.transpose() * T;
        H.h.col(i) << Hx(0, 0), Hx(0, 1), Hx(1, 1);
    }
    return H;
}

DiracMeasure h_to_dirac(const CanonicalSystem& H, const Tolerances& tol) {
    H.validate(tol);
    const Eigen::Index n = H.count();
    if (n < 5) throw std::invalid_argument("h_to_dirac: need >= 5 samples");
    if ((H.at(0) - Matrix2r::Identity()).cwiseAbs().maxCoeff() > tol.unimodular_tol)
        throw std::invalid_argument("h_to_dirac: H(0) must be the identity");
    if (H.max_det_deviation() > tol.unimodular_tol)
        throw NumericalGuardError("h_to_dirac: det H deviates from 1 beyond tolerance");

    const double h = H.step();
    const Matrix2r& J = symplectic_j();

    // H' table: centered differences inside, second-order one-sided at ends.
    Eigen::Matrix<double, 3, Eigen::Dynamic> hd(3, n);
    for (int r = 0; r < 3; ++r) {
        hd(r, 0) = (-3.0 * H.h(r, 0) + 4.0 * H.h(r, 1) - H.h(r, 2)) / (2.0 * h);
        for (Eigen::Index i = 1; i + 1 < n; ++i)
            hd(r, i) = (H.h(r, i + 1) - H.h(r, i - 1)) / (2.0 * h);
        hd(r, n - 1) = (3.0 * H.h(r, n - 1) - 4.0 * H.h(r, n - 2) + H.h(r, n - 3)) / (2.0 * h);
    }
    // Derivative scale for the structural guard, trimmed to the 90th
    // percentile: a jump in H pollutes only a couple of difference slots and
    // must not be allowed to raise its own guard.
    std::vector<double> mags(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        mags[std::size_t(i)] = hd.col(i).cwiseAbs().maxCoeff();
    std::nth_element(mags.begin(), mags.begin() + long(0.9 * double(n - 1)), mags.end());
    const double hd_scale = 1.0 + mags[std::size_t(0.9 * double(n - 1))];

    auto hprime = [&](double x) -> Matrix2r {
        double s = x / h;
        Eigen::Index i = Eigen::Index(std::clamp(s, 0.0, double(n - 2)));
        const double f = std::clamp(s - double(i), 0.0, 1.0);
        const double a = hd(0, i) + f * (hd(0, i + 1) - hd(0, i));
        const double b = hd(1, i) + f * (hd(1, i + 1) - hd(1, i));
        const double c = hd(2, i) + f * (hd(2, i + 1) - hd(2, i));
        Matrix2r m;
        m << a, b, b, c;
        return m;
    };

    // mu(x) from the current propagator: mu = -1/2 T^{-T} H'(x) T^{-1} J.
    auto mu_at = [&](double x, const Matrix2r& T) -> Matrix2r {
        const Matrix2r Tinv = T.inverse();
        return -0.5 * Tinv.transpose() * hprime(x) * Tinv * J;
    };

    // The structural defect tr(H' H^{-1}) is the discrete derivative of
    // log det H; centered differences leave an O(h^2) floor there even for an
    // exactly unimodular input, so the guard scales with that floor.
    const double guard = std::max(tol.mu_structure, 40.0 * h * h * hd_scale * hd_scale);

    DiracMeasure mu;
    mu.N = H.N;
    mu.mu1.resize(n);
    mu.mu2.resize(n);

    Matrix2r T = Matrix2r::Identity();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = double(i) * h;
        const Matrix2r m = mu_at(x, T);
        const double defect = std::max(std::abs(m(0, 0) + m(1, 1)),
                                       std::abs(m(0, 1) - m(1, 0)));
        if (defect > guard)
            throw NumericalGuardError("h_to_dirac: coefficient defect " + std::to_string(defect) +
                                      " from the symmetric traceless form at x = " +
                                      std::to_string(x) + " (det H != 1 or H not AC?)");
        mu.mu1[i] = 0.5 * (m(0, 0) - m(1, 1));
        mu.mu2[i] = 0.5 * (m(0, 1) + m(1, 0));

        if (i + 1 < n) {
            // RK4 on T' = -J mu(x, T) T, mu evaluated per stage
            auto rhs = [&](double xs, const Matrix2r& Ts) -> Matrix2r {
                return -J * mu_at(xs, Ts) * Ts;
            };
            const Matrix2r k1 = rhs(x, T);
            const Matrix2r k2 = rhs(x + 0.5 * h, T + 0.5 * h * k1);
            const Matrix2r k3 = rhs(x + 0.5 * h, T + 0.5 * h * k2);
            const Matrix2r k4 = rhs(x + h, T + h * k3);
            T += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return mu;
}

} // namespace dirac
