#include "qkan/kan_stack.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qkan/errors.hpp"
#include "qkan/kan_layer.hpp"

namespace qkan {

namespace {

void check_unit(const QubitizedUnit& unit) {
    if (unit.phases.empty()) throw InvalidInput("qubitized unit needs at least one phase");
}

void check_signal(double x) {
    if (!(std::abs(x) <= 1.0)) throw DomainError("signal value outside [-1, 1]");
}

// e^{i phi} x + i e^{-i phi} sqrt(1-x^2), the per-qubit factor of the
// Hadamard readout.
Amplitude unit_factor(double phi, double x, double s) {
    return std::polar(1.0, phi) * x + Amplitude(0, 1) * std::polar(1.0, -phi) * s;
}

}  // namespace

int StackLayerSpec::degree() const { return units.empty() ? 0 : units.front().degree(); }

int StackLayerSpec::padded_width() const {
    return static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::max(1, width()))));
}

StateVector encode_signal(double x) {
    check_signal(x);
    StateVector s;
    s.num_qubits = 1;
    s.amps = {Amplitude(x, 0), Amplitude(0, std::sqrt(std::max(0.0, 1.0 - x * x)))};
    return s;
}

StateVector qubitize(double x, int d) {
    if (d < 1) throw InvalidInput("qubitize: d must be >= 1");
    StateVector s = encode_signal(x);
    const StateVector one = s;
    for (int k = 1; k < d; ++k) s = tensor(s, one);
    return s;
}

StateVector apply_phase_layer(const StateVector& state, const QubitizedUnit& unit) {
    check_unit(unit);
    if (state.num_qubits != unit.degree())
        throw InvalidInput("apply_phase_layer: qubit count does not match unit");
    StateVector s = state;
    for (int k = 0; k < unit.degree(); ++k) {
        s = apply_gate(s, phase_gate(unit.phases[k]), k);
    }
    return s;
}

Amplitude unit_forward(double x, const QubitizedUnit& unit) {
    check_unit(unit);
    StateVector s = apply_phase_layer(qubitize(x, unit.degree()), unit);
    std::vector<int> all(unit.degree());
    for (int q = 0; q < unit.degree(); ++q) all[q] = q;
    s = apply_hadamard_layer(s, all);
    return s.amps[0];
}

Amplitude unit_forward_dx(double x, const QubitizedUnit& unit) {
    check_unit(unit);
    check_signal(x);
    const int d = unit.degree();
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    const double s_safe = std::max(s, 1e-12);  // the true slope diverges at |x| = 1

    std::vector<Amplitude> f(d), df(d);
    for (int k = 0; k < d; ++k) {
        f[k] = unit_factor(unit.phases[k], x, s);
        df[k] = std::polar(1.0, unit.phases[k]) -
                Amplitude(0, 1) * std::polar(1.0, -unit.phases[k]) * (x / s_safe);
    }
    // prefix/suffix products avoid dividing by possibly-zero factors
    std::vector<Amplitude> prefix(d + 1, Amplitude(1, 0)), suffix(d + 1, Amplitude(1, 0));
    for (int k = 0; k < d; ++k) prefix[k + 1] = prefix[k] * f[k];
    for (int k = d - 1; k >= 0; --k) suffix[k] = suffix[k + 1] * f[k];
    Amplitude acc(0, 0);
    for (int k = 0; k < d; ++k) acc += prefix[k] * df[k] * suffix[k + 1];
    return acc * std::pow(2.0, -0.5 * d);
}

StackLayerEval stack_layer_eval(const std::vector<double>& inputs, const StackLayerSpec& layer) {
    if (layer.units.empty()) throw InvalidInput("stack layer needs at least one unit");
    if (static_cast<int>(inputs.size()) != layer.width())
        throw InvalidInput("stack layer: input count mismatch");
    const int d = layer.degree();
    for (const QubitizedUnit& u : layer.units) {
        if (u.degree() != d) throw InvalidInput("stack layer: units must share one degree");
    }

    const int padded = layer.padded_width();
    StackLayerEval eval;
    eval.unit_values.resize(padded);
    for (int w = 0; w < layer.width(); ++w) {
        eval.unit_values[w] = unit_forward(inputs[w], layer.units[w]);
    }
    if (padded > layer.width()) {
        // padding slots: zero-phase unit evaluated at x = 1, a data-independent
        // constant 2^{-d/2}
        const QubitizedUnit pad{std::vector<double>(d, 0.0)};
        const Amplitude pad_value = unit_forward(1.0, pad);
        for (int w = layer.width(); w < padded; ++w) eval.unit_values[w] = pad_value;
    }

    const std::vector<std::vector<int>> alpha = mixing_coefficients(padded);
    eval.mixed.resize(padded);
    for (int j = 0; j < padded; ++j) {
        Amplitude acc(0, 0);
        for (int w = 0; w < padded; ++w) {
            acc += (alpha[j][w] > 0 ? eval.unit_values[w] : -eval.unit_values[w]);
        }
        eval.mixed[j] = acc / static_cast<double>(padded);
    }

    eval.outputs.resize(padded);
    eval.clamped.assign(padded, false);
    for (int j = 0; j < padded; ++j) {
        const double raw = (layer.readout == ReadoutPolicy::real_part) ? eval.mixed[j].real()
                                                                       : std::abs(eval.mixed[j]);
        eval.outputs[j] = std::clamp(raw, -1.0, 1.0);
        eval.clamped[j] = raw < -1.0 || raw > 1.0;
    }
    return eval;
}

std::vector<double> stack_layer_forward(const std::vector<double>& inputs,
                                        const StackLayerSpec& layer) {
    return stack_layer_eval(inputs, layer).outputs;
}

void validate_stack(const StackSpec& spec) {
    if (spec.input_dim < 1) throw InvalidInput("stack: input_dim must be >= 1");
    int width = spec.input_dim;
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        if (spec.layers[l].width() != width)
            throw InvalidInput("stack: layer " + std::to_string(l) + " width does not chain");
        width = spec.layers[l].padded_width();
    }
}

int stack_output_width(const StackSpec& spec) {
    return spec.layers.empty() ? spec.input_dim : spec.layers.back().padded_width();
}

std::vector<double> stack_forward(const std::vector<double>& x, const StackSpec& spec) {
    validate_stack(spec);
    if (static_cast<int>(x.size()) != spec.input_dim)
        throw InvalidInput("stack_forward: input size mismatch");
    std::vector<double> cur = x;
    for (const StackLayerSpec& layer : spec.layers) {
        cur = stack_layer_forward(cur, layer);
    }
    return cur;
}

}  // namespace qkan
