#include "qkan/qsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qkan/errors.hpp"
#include "qkan/rng.hpp"

namespace qkan {

namespace {

constexpr double kBoundaryBand = 1e-9;  // |a| >= 1 - band: Q by interpolation

void check_signal(double a) {
    if (!(std::abs(a) <= 1.0)) throw DomainError("signal value outside [-1, 1]");
}

void check_phases(const PhaseSequence& phi) {
    if (phi.phases.empty()) throw InvalidInput("phase sequence must have length >= 1");
}

// Chebyshev T_k(x) values at x via the recurrence, k = 0..count-1.
std::vector<double> chebyshev_values(double x, int count) {
    std::vector<double> t(count);
    if (count > 0) t[0] = 1.0;
    if (count > 1) t[1] = x;
    for (int k = 2; k < count; ++k) t[k] = 2.0 * x * t[k - 1] - t[k - 2];
    return t;
}

// Chebyshev-basis coefficients of a degree < m polynomial from its values at
// chebyshev_nodes(m); exact by discrete orthogonality.
std::vector<Amplitude> chebyshev_coefficients(const std::vector<Amplitude>& values) {
    const int m = static_cast<int>(values.size());
    std::vector<Amplitude> coeff(m, Amplitude(0, 0));
    for (int k = 0; k < m; ++k) {
        Amplitude acc(0, 0);
        for (int j = 0; j < m; ++j) {
            const double theta = (2.0 * j + 1.0) * std::numbers::pi / (2.0 * m);
            acc += values[j] * std::cos(k * theta);
        }
        coeff[k] = acc * ((k == 0 ? 1.0 : 2.0) / m);
    }
    return coeff;
}

Amplitude clenshaw(const std::vector<Amplitude>& cheb_coeff, double x) {
    Amplitude b1(0, 0), b2(0, 0);
    for (int k = static_cast<int>(cheb_coeff.size()) - 1; k >= 1; --k) {
        const Amplitude b0 = cheb_coeff[k] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return cheb_coeff.empty() ? Amplitude(0, 0) : cheb_coeff[0] + x * b1 - b2;
}

}  // namespace

Gate2 signal_operator(double a) {
    check_signal(a);
    const double s = std::sqrt(std::max(0.0, 1.0 - a * a));
    return Gate2{{Amplitude(a, 0), Amplitude(0, s), Amplitude(0, s), Amplitude(a, 0)}};
}

Gate2 phase_gate(double phi) {
    return Gate2{{std::polar(1.0, phi), {}, {}, std::polar(1.0, -phi)}};
}

Gate2 qsp_unitary(const PhaseSequence& phi, double a) {
    check_phases(phi);
    check_signal(a);
    const Gate2 w = signal_operator(a);
    Gate2 u = phase_gate(phi.phases[0]);
    for (std::size_t k = 1; k < phi.phases.size(); ++k) {
        u = matmul(u, matmul(w, phase_gate(phi.phases[k])));
    }
    return u;
}

QspResponse response(const PhaseSequence& phi, double a) {
    check_phases(phi);
    check_signal(a);
    const int d = phi.degree();
    QspResponse r;
    r.a = a;
    const Gate2 u = qsp_unitary(phi, a);
    r.p_value = u.m[0];

    if (d == 0) {
        r.q_value = Amplitude(0, 0);  // Q is the zero polynomial
        return r;
    }
    if (std::abs(a) < 1.0 - kBoundaryBand) {
        const double s = std::sqrt(1.0 - a * a);
        r.q_value = u.m[1] / Amplitude(0, s);
        return r;
    }
    // Q has degree <= d-1: sample it at d interior Chebyshev nodes and
    //evaluate the exact interpolant at a.
    const std::vector<double> nodes = chebyshev_nodes(d);
    std::vector<Amplitude> qvals(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double aj = nodes[j];
        const double sj = std::sqrt(1.0 - aj * aj);
        qvals[j] = qsp_unitary(phi, aj).m[1] / Amplitude(0, sj);
    }
    r.q_value = clenshaw(chebyshev_coefficients(qvals), a);
    return r;
}

double real_response(const PhaseSequence& phi, double a) {
    check_phases(phi);
    check_signal(a);
    return qsp_unitary(phi, a).m[0].real();
}

double prob_response(const PhaseSequence& phi, double a) {
    check_phases(phi);
    check_signal(a);
    return std::norm(qsp_unitary(phi, a).m[0]);
}

std::vector<double> chebyshev_nodes(int count) {
    std::vector<double> nodes(count);
    for (int j = 0; j < count; ++j) {
        nodes[j] = std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * count));
    }
    return nodes;
}

std::vector<std::complex<double>> interpolate_p(const PhaseSequence& phi) {
    return interpolate_p(phi, phi.degree());
}

std::vector<std::complex<double>> interpolate_p(const PhaseSequence& phi, int fit_degree) {
    check_phases(phi);
    if (fit_degree < 0) throw InvalidInput("interpolate_p: fit_degree must be >= 0");
    const int m = fit_degree + 1;
    const std::vector<double> nodes = chebyshev_nodes(m);
    std::vector<Amplitude> pvals(m);
    for (int j = 0; j < m; ++j) pvals[j] = qsp_unitary(phi, nodes[j]).m[0];
    const std::vector<Amplitude> cheb = chebyshev_coefficients(pvals);

    // Chebyshev basis -> monomial basis. T_{k+1} = 2 x T_k - T_{k-1}.
    std::vector<std::complex<double>> mono(m, Amplitude(0, 0));
    std::vector<double> t_prev{1.0};
    std::vector<double> t_cur{0.0, 1.0};
    for (int k = 0; k < m; ++k) {
        const std::vector<double>& tk = (k == 0) ? t_prev : t_cur;
        for (std::size_t i = 0; i < tk.size(); ++i) mono[i] += cheb[k] * tk[i];
        if (k >= 1) {
            std::vector<double> t_next(k + 2, 0.0);
            for (std::size_t i = 0; i < t_cur.size(); ++i) t_next[i + 1] = 2.0 * t_cur[i];
            for (std::size_t i = 0; i < t_prev.size(); ++i) t_next[i] -= t_prev[i];
            t_prev = std::move(t_cur);
            t_cur = std::move(t_next);
        }
    }
    return mono;
}

namespace {

struct GridFit {
    std::vector<double> nodes;
    std::vector<double> target;  // parity-projected values at the nodes
};

// Re P over the grid for the given phases.
std::vector<double> grid_response(const PhaseSequence& phi, const std::vector<double>& nodes) {
    std::vector<double> out(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) out[j] = qsp_unitary(phi, nodes[j]).m[0].real();
    return out;
}

double sum_sq_residual(const std::vector<double>& resp, const std::vector<double>& target) {
    double acc = 0.0;
    for (std::size_t j = 0; j < resp.size(); ++j) {
        const double r = resp[j] - target[j];
        acc += r * r;
    }
    return acc;
}

double max_abs_residual(const std::vector<double>& resp, const std::vector<double>& target) {
    double mx = 0.0;
    for (std::size_t j = 0; j < resp.size(); ++j) mx = std::max(mx, std::abs(resp[j] - target[j]));
    return mx;
}

// d(sum of squares)/d(phi_k) via the two-point trigonometric shift: P is a
// degree-1 trigonometric polynomial in each phase, so dP/dphi_k =
// (P(phi_k + pi/2) - P(phi_k - pi/2)) / 2 exactly.
std::vector<double> loss_gradient(const PhaseSequence& phi, const GridFit& fit,
                                  const std::vector<double>& resp) {
    std::vector<double> grad(phi.phases.size(), 0.0);
    PhaseSequence shifted = phi;
    for (std::size_t k = 0; k < phi.phases.size(); ++k) {
        shifted.phases[k] = phi.phases[k] + std::numbers::pi / 2.0;
        const std::vector<double> plus = grid_response(shifted, fit.nodes);
        shifted.phases[k] = phi.phases[k] - std::numbers::pi / 2.0;
        const std::vector<double> minus = grid_response(shifted, fit.nodes);
        shifted.phases[k] = phi.phases[k];
        double acc = 0.0;
        for (std::size_t j = 0; j < fit.nodes.size(); ++j) {
            acc += 2.0 * (resp[j] - fit.target[j]) * 0.5 * (plus[j] - minus[j]);
        }
        grad[k] = acc;
    }
    return grad;
}

struct DescentResult {
    PhaseSequence phases;
    double loss = 0.0;
    int iterations = 0;
};

DescentResult descend(PhaseSequence phi, const GridFit& fit, const SolverOptions& opt) {
    std::vector<double> resp = grid_response(phi, fit.nodes);
    double loss = sum_sq_residual(resp, fit.target);
    double step = 1.0;
    int iter = 0;
    for (; iter < opt.max_iters; ++iter) {
        const std::vector<double> grad = loss_gradient(phi, fit, resp);
        double ginf = 0.0, gnorm2 = 0.0;
        for (double g : grad) {
            ginf = std::max(ginf, std::abs(g));
            gnorm2 += g * g;
        }
        if (ginf < opt.grad_tol || loss < 1e-26) break;

        // Backtracking line search along -grad (Armijo condition).
        bool accepted = false;
        PhaseSequence cand = phi;
        for (int trial = 0; trial < 60; ++trial) {
            for (std::size_t k = 0; k < phi.phases.size(); ++k)
                cand.phases[k] = phi.phases[k] - step * grad[k];
            const std::vector<double> cand_resp = grid_response(cand, fit.nodes);
            const double cand_loss = sum_sq_residual(cand_resp, fit.target);
            if (cand_loss <= loss - 1e-4 * step * gnorm2) {
                phi = cand;
                resp = cand_resp;
                loss = cand_loss;
                step = std::min(step * 1.5, 1e3);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // stalled at line-search resolution
    }
    return DescentResult{std::move(phi), loss, iter};
}

}  // namespace

std::pair<PhaseSequence, FitReport> solve_phases(const std::function<double(double)>& target,
                                                 int degree, int grid_size,
                                                 const SolverOptions& options) {
    if (degree < 1) throw InvalidInput("solve_phases: degree must be >= 1");
    if (grid_size <= 0) grid_size = 4 * degree;

    GridFit fit;
    fit.nodes = chebyshev_nodes(grid_size);
    fit.target.resize(grid_size);
    const double parity_sign = (degree % 2 == 0) ? 1.0 : -1.0;
    double discarded_sup = 0.0;
    for (int j = 0; j < grid_size; ++j) {
        const double tp = target(fit.nodes[j]);
        const double tm = target(-fit.nodes[j]);
        fit.target[j] = 0.5 * (tp + parity_sign * tm);
        discarded_sup = std::max(discarded_sup, std::abs(tp - fit.target[j]));
    }
    if (discarded_sup > options.parity_tol) {
        throw ParityError("solve_phases: target parity incompatible with degree " +
                              std::to_string(degree) + " (discarded sup norm " +
                              std::to_string(discarded_sup) + ")",
                          discarded_sup);
    }
    for (double t : fit.target) {
        if (std::abs(t) > 1.0 - options.cap_margin)
            throw CapError("solve_phases: |target| reaches 1 within cap_margin");
    }

    const SplitMix64 root(options.seed);
    DescentResult best;
    double best_residual_max = 0.0;
    bool have_best = false;
    const int restarts = std::max(1, options.restarts);
    for (int r = 0; r < restarts; ++r) {
        SplitMix64 stream = root.split(static_cast<std::uint64_t>(r));
        PhaseSequence init;
        init.phases.resize(degree + 1);
        for (double& p : init.phases) p = options.restart_sigma * stream.normal();
        DescentResult res = descend(std::move(init), fit, options);
        const double rmax = max_abs_residual(grid_response(res.phases, fit.nodes), fit.target);
        if (!have_best || rmax < best_residual_max) {
            best = std::move(res);
            best_residual_max = rmax;
            have_best = true;
        }
    }

    FitReport report;
    report.residual_max = best_residual_max;
    report.residual_l2 = std::sqrt(best.loss);
    report.grid = fit.nodes;
    report.iterations = best.iterations;
    report.converged = best_residual_max <= options.tol;
    report.discarded_parity_sup = discarded_sup;
    return {best.phases, report};
}

}  // namespace qkan
