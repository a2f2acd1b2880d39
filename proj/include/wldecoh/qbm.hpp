#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "wldecoh/error.hpp"

namespace wldecoh {

/// Uniform grid on [-x_max, x_max] for the position-basis density matrix.
struct Grid1D {
    int n_points;
    double x_max;

    Grid1D(int n, double xmax) : n_points(n), x_max(xmax) {
        if (n_points < 64 || n_points % 2 != 0)
            throw Error(ErrorCode::invalid_argument,
                        "grid needs an even point count >= 64");
        if (!(x_max > 0.0))
            throw Error(ErrorCode::non_positive_parameter,
                        "x_max must be > 0");
    }

    double dx() const { return 2.0 * x_max / (n_points - 1); }
    double x(int i) const { return -x_max + i * dx(); }
};

/// rho[a*n + b] ~ rho(x_a, x_b), continuum-normalized: trace() = 1.
struct GridState {
    Grid1D grid;
    std::vector<std::complex<double>> rho;
    double time = 0.0;
};

/// Master-equation coefficients for one axis (internal units, hbar = 1).
/// `a` is the proper acceleration entering the M a X potential term that is
/// enabled together with the kinetic term.
struct QbmCoefficients {
    double lambda = 0.0; // decoherence, 1/(length^2 time)
    double gamma = 0.0;  // dissipation, 1/time
    double c1 = 0.0;     // linear Hamiltonian shift (force)
    double c2 = 0.0;     // quadratic Hamiltonian shift
    double M = 1.0;
    double a = 0.0;
    bool include_kinetic = false;

    void validate() const {
        if (lambda < 0.0)
            throw Error(ErrorCode::non_positive_parameter,
                        "lambda must be >= 0");
        if (!(M > 0.0))
            throw Error(ErrorCode::non_positive_parameter, "M must be > 0");
    }
};

inline double trace(const GridState& st) {
    const int n = st.grid.n_points;
    double tr = 0.0;
    for (int a = 0; a < n; ++a) tr += st.rho[a * n + a].real();
    return tr * st.grid.dx();
}

inline double purity(const GridState& st) {
    double s = 0.0;
    for (const auto& z : st.rho) s += std::norm(z);
    return s * st.grid.dx() * st.grid.dx();
}

inline double hermiticity_defect(const GridState& st) {
    const int n = st.grid.n_points;
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            const double d =
                std::abs(st.rho[a * n + b] - std::conj(st.rho[b * n + a]));
            if (d > worst) worst = d;
        }
    return worst;
}

/// Far-off-diagonal mass: sum over |x - x'| > separation/2 of |rho| dx^2.
inline double coherence_norm(const GridState& st, double separation) {
    const int n = st.grid.n_points;
    const double dx = st.grid.dx();
    const double cut = 0.5 * separation;
    double s = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (std::abs(st.grid.x(a) - st.grid.x(b)) > cut)
                s += std::abs(st.rho[a * n + b]);
    return s * dx * dx;
}

/// Equal-weight superposition of two Gaussians (position spread sigma)
/// centered at x0 +- separation/2, assembled as psi psi+ and normalized to
/// unit trace. Requires 4 sigma of margin inside the grid.
inline GridState build_superposition(double x0, double separation,
                                     double sigma, const Grid1D& grid) {
    if (!(sigma > 0.0))
        throw Error(ErrorCode::non_positive_parameter, "sigma must be > 0");
    if (separation < 0.0)
        throw Error(ErrorCode::non_positive_parameter,
                    "separation must be >= 0");
    const double lo = x0 - 0.5 * separation - 4.0 * sigma;
    const double hi = x0 + 0.5 * separation + 4.0 * sigma;
    if (lo < -grid.x_max || hi > grid.x_max)
        throw Error(ErrorCode::grid_too_small,
                    "superposition does not fit inside the grid");
    const int n = grid.n_points;
    const double c1 = x0 - 0.5 * separation;
    const double c2 = x0 + 0.5 * separation;
    std::vector<double> psi(n);
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const double u1 = (x - c1) / (2.0 * sigma);
        const double u2 = (x - c2) / (2.0 * sigma);
        psi[i] = std::exp(-u1 * u1) + std::exp(-u2 * u2);
        norm2 += psi[i] * psi[i];
    }
    norm2 *= grid.dx();
    const double scale = 1.0 / std::sqrt(norm2);
    GridState st{grid, std::vector<std::complex<double>>(
                           static_cast<std::size_t>(n) * n),
                 0.0};
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            st.rho[a * n + b] = psi[a] * scale * (psi[b] * scale);
    return st;
}

struct EvolveSeriesPoint {
    double t;
    double trace;
    double coherence;
};

struct EvolveResult {
    GridState state;
    std::vector<EvolveSeriesPoint> series;
};

namespace detail {

// Right-hand side of the master equation in the position representation:
//   Lambda: -L (x-x')^2 rho                   C1: +i C1 (x-x') rho
//   C2:     -i C2 (x^2-x'^2) rho              Gamma: -G (x-x')(d_x-d_x')rho
//   kinetic: +(i/2M)(d_x^2-d_x'^2)rho - i M a (x-x') rho
// Dirichlet boundaries (rho = 0 outside the grid). All stencils map
// Hermitian input to Hermitian output bit-exactly.
class QbmRhs {
public:
    QbmRhs(const Grid1D& grid, const QbmCoefficients& k)
        : n_(grid.n_points), dx_(grid.dx()), k_(k),
          factor_(static_cast<std::size_t>(n_) * n_) {
        std::vector<double> x(n_), h(n_);
        for (int i = 0; i < n_; ++i) {
            x[i] = grid.x(i);
            h[i] = x[i] * x[i];
        }
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b) {
                const double d = x[a] - x[b];
                double im = k_.c1 * d - k_.c2 * (h[a] - h[b]);
                if (k_.include_kinetic) im -= k_.M * k_.a * d;
                factor_[a * n_ + b] =
                    std::complex<double>(-k_.lambda * d * d, im);
            }
        x_ = std::move(x);
    }

    void operator()(const std::vector<std::complex<double>>& in,
                    std::vector<std::complex<double>>& out) const {
        using cd = std::complex<double>;
        const double inv2dx = 1.0 / (2.0 * dx_);
        const double invdx2 = 1.0 / (dx_ * dx_);
        const cd ikin(0.0, 1.0 / (2.0 * k_.M));
        auto at = [&](int a, int b) -> cd {
            if (a < 0 || a >= n_ || b < 0 || b >= n_) return cd(0.0, 0.0);
            return in[a * n_ + b];
        };
        for (int a = 0; a < n_; ++a) {
            for (int b = 0; b < n_; ++b) {
                const std::size_t idx = static_cast<std::size_t>(a) * n_ + b;
                cd acc = factor_[idx] * in[idx];
                if (k_.gamma != 0.0) {
                    const cd d_left = (at(a + 1, b) - at(a - 1, b)) * inv2dx;
                    const cd d_right = (at(a, b + 1) - at(a, b - 1)) * inv2dx;
                    acc -= k_.gamma * (x_[a] - x_[b]) * (d_left - d_right);
                }
                if (k_.include_kinetic) {
                    const cd lap_left =
                        (at(a - 1, b) - 2.0 * in[idx] + at(a + 1, b)) * invdx2;
                    const cd lap_right =
                        (at(a, b - 1) - 2.0 * in[idx] + at(a, b + 1)) * invdx2;
                    acc += ikin * (lap_left - lap_right);
                }
                out[idx] = acc;
            }
        }
    }

private:
    int n_;
    double dx_;
    QbmCoefficients k_;
    std::vector<std::complex<double>> factor_;
    std::vector<double> x_;
};

} // namespace detail

/// Fixed-step RK4 evolution of the four-term master equation. Snapshots of
/// (t, trace, coherence_norm) are recorded at step 0 and every
/// `snapshot_every` steps (plus the final step) when snapshot_every > 0.
inline EvolveResult evolve(GridState state, const QbmCoefficients& k,
                           double dt, long steps, long snapshot_every = 0,
                           double coherence_separation = 0.0) {
    k.validate();
    if (!(dt > 0.0))
        throw Error(ErrorCode::non_positive_parameter, "dt must be > 0");
    if (steps < 0)
        throw Error(ErrorCode::invalid_argument, "steps must be >= 0");
    const double span = 2.0 * state.grid.x_max;
    double stiffness = k.lambda * span * span;
    if (k.include_kinetic)
        stiffness = std::max(stiffness,
                             1.0 / (k.M * state.grid.dx() * state.grid.dx()));
    if (!(dt * stiffness < 0.1))
        throw Error(ErrorCode::stability_violation,
                    "dt too large for the stiffest active term: dt*stiffness"
                    " = " + std::to_string(dt * stiffness) + " >= 0.1");

    const detail::QbmRhs rhs(state.grid, k);
    const std::size_t sz = state.rho.size();
    std::vector<std::complex<double>> k1(sz), k2(sz), k3(sz), k4(sz), tmp(sz);

    EvolveResult out{std::move(state), {}};
    auto record = [&]() {
        out.series.push_back(
            {out.state.time, trace(out.state),
             coherence_norm(out.state, coherence_separation)});
    };
    auto check_finite = [&]() {
        for (const auto& z : out.state.rho)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw Error(ErrorCode::non_finite_state,
                            "density matrix left the finite range at t = " +
                                std::to_string(out.state.time));
    };
    if (snapshot_every > 0) record();
    for (long step = 0; step < steps; ++step) {
        auto& rho = out.state.rho;
        rhs(rho, k1);
        for (std::size_t i = 0; i < sz; ++i)
            tmp[i] = rho[i] + 0.5 * dt * k1[i];
        rhs(tmp, k2);
        for (std::size_t i = 0; i < sz; ++i)
            tmp[i] = rho[i] + 0.5 * dt * k2[i];
        rhs(tmp, k3);
        for (std::size_t i = 0; i < sz; ++i) tmp[i] = rho[i] + dt * k3[i];
        rhs(tmp, k4);
        const double w = dt / 6.0;
        for (std::size_t i = 0; i < sz; ++i)
            rho[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        out.state.time += dt;
        if (snapshot_every > 0 && ((step + 1) % snapshot_every == 0 ||
                                   step + 1 == steps)) {
            check_finite();
            record();
        }
    }
    check_finite();
    return out;
}

} // namespace wldecoh
