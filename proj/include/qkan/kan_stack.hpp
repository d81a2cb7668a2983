#pragma once

#include <vector>

#include "qkan/simcore.hpp"

namespace qkan {

// Per-qubit z-phases of one qubitized unit: phases[k] acts on qubit k of the
// d-qubit product state, d = phases.size() >= 1.
struct QubitizedUnit {
    std::vector<double> phases;

    int degree() const { return static_cast<int>(phases.size()); }
};

// How a mixed complex amplitude becomes the next layer's real input.
enum class ReadoutPolicy { real_part, magnitude };

struct StackLayerSpec {
    std::vector<QubitizedUnit> units;
    ReadoutPolicy readout = ReadoutPolicy::real_part;

    int width() const { return static_cast<int>(units.size()); }
    int degree() const;
    int padded_width() const;  // width rounded up to a power of two
};

struct StackSpec {
    std::vector<StackLayerSpec> layers;
    int input_dim = 0;
};

// One-qubit signal state (x, i*sqrt(1-x^2)).
StateVector encode_signal(double x);

// d-fold tensor power of encode_signal(x).
StateVector qubitize(double x, int d);

// phase_gate(phases[k]) on qubit k for every k.
StateVector apply_phase_layer(const StateVector& state, const QubitizedUnit& unit);

// Amplitude of |0...0> after Hadamards on every qubit of
// apply_phase_layer(qubitize(x, d), unit). Equals
// 2^{-d/2} * prod_k (e^{i phi_k} x + i e^{-i phi_k} sqrt(1-x^2)).
Amplitude unit_forward(double x, const QubitizedUnit& unit);

// d/dx of unit_forward, from the factored form (used by backpropagation).
Amplitude unit_forward_dx(double x, const QubitizedUnit& unit);

// Everything one layer evaluation produces; training needs the complex
// intermediates, the CLI only the outputs.
struct StackLayerEval {
    std::vector<Amplitude> unit_values;  // padded_width entries (padding at x = 1)
    std::vector<Amplitude> mixed;        // Walsh-mixed, 1/padded_width normalization included
    std::vector<double> outputs;         // readout applied, clamped to [-1, 1]
    std::vector<bool> clamped;           // true where the clamp actually bit
};

StackLayerEval stack_layer_eval(const std::vector<double>& inputs, const StackLayerSpec& layer);
std::vector<double> stack_layer_forward(const std::vector<double>& inputs,
                                        const StackLayerSpec& layer);

// Sequential composition; layer 0 consumes the raw features, each later layer
// the previous layer's real outputs. An empty layer list is the identity.
std::vector<double> stack_forward(const std::vector<double>& x, const StackSpec& spec);

// Output width of the composed stack (input_dim when there are no layers).
int stack_output_width(const StackSpec& spec);

// Throws InvalidInput unless layer widths chain: layer 0 matches input_dim,
// layer l matches layer l-1's padded width.
void validate_stack(const StackSpec& spec);

}  // namespace qkan
