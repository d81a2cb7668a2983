#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "qkan/simcore.hpp"

namespace qkan {

// Phases phi_0..phi_d of one signal-processing circuit; degree d = size - 1.
struct PhaseSequence {
    std::vector<double> phases;

    int degree() const { return static_cast<int>(phases.size()) - 1; }
};

// The (0,0) entry P(a) and the reduced off-diagonal polynomial Q(a) of the
// circuit unitary at signal value a. |p|^2 + (1-a^2)|q|^2 = 1.
struct QspResponse {
    Amplitude p_value;
    Amplitude q_value;
    double a = 0.0;
};

struct SolverOptions {
    double tol = 1e-3;         // residual_max threshold for the converged flag
    double cap_margin = 1e-3;  // reject targets reaching 1 - cap_margin in magnitude
    double parity_tol = 1e-6;  // allowed sup norm of the projected-out parity part
    int restarts = 8;          // random restarts around zero phases
    double restart_sigma = 0.1;
    std::uint64_t seed = 0;
    int max_iters = 20000;     // gradient-descent iterations per restart
    double grad_tol = 1e-13;   // stop when the gradient inf-norm falls below this
};

struct FitReport {
    double residual_max = 0.0;
    double residual_l2 = 0.0;
    std::vector<double> grid;           // fitting nodes
    int iterations = 0;                 // iterations used by the winning restart
    bool converged = false;             // residual_max <= options.tol
    double discarded_parity_sup = 0.0;  // sup norm of the parity component projected out
};

// Signal operator [[a, i*sqrt(1-a^2)], [i*sqrt(1-a^2), a]].
Gate2 signal_operator(double a);

// diag(e^{i phi}, e^{-i phi}).
Gate2 phase_gate(double phi);

// e^{i phi_0 Z} * prod_{k=1..d} [W(a) e^{i phi_k Z}], increasing k on the right.
Gate2 qsp_unitary(const PhaseSequence& phi, double a);

// P and Q at a. Q comes from the off-diagonal entry divided by i*sqrt(1-a^2);
// within 1e-9 of |a| = 1 that division is singular and Q is instead evaluated
// by degree-(d-1) interpolation from interior Chebyshev nodes.
QspResponse response(const PhaseSequence& phi, double a);

// Re P(a).
double real_response(const PhaseSequence& phi, double a);

// |P(a)|^2.
double prob_response(const PhaseSequence& phi, double a);

// Monomial coefficients of P (length fit_degree + 1), recovered by exact
// interpolation at Chebyshev nodes. Default fit_degree is the sequence degree;
// a larger value lets callers confirm the trailing coefficients vanish.
std::vector<std::complex<double>> interpolate_p(const PhaseSequence& phi);
std::vector<std::complex<double>> interpolate_p(const PhaseSequence& phi, int fit_degree);

// Chebyshev nodes cos((2j+1) pi / (2 count)), j = 0..count-1.
std::vector<double> chebyshev_nodes(int count);

// Least-squares fit of Re P to `target` over chebyshev_nodes(grid_size)
// (grid_size <= 0 picks 4 * degree). The target is first projected onto the
// parity class of `degree`; see ParityError / CapError for the rejection
// rules. Minimization is gradient descent with backtracking line search and
// analytic gradients from the two-point trigonometric shift rule, restarted
// `options.restarts` times from Gaussian perturbations of zero phases.
// Deterministic for a fixed options.seed. Never throws on poor convergence:
// the best phases found are returned with converged = false.
std::pair<PhaseSequence, FitReport> solve_phases(const std::function<double(double)>& target,
                                                 int degree, int grid_size,
                                                 const SolverOptions& options = {});

}  // namespace qkan
