#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace qkan {

using Amplitude = std::complex<double>;

// Dense complex statevector over num_qubits qubits.
//
// Conventions (used everywhere, pinned by tests):
//   - qubit 0 is the least significant bit of the basis index;
//   - tensor(a, b) places a's qubits above b's (a more significant).
struct StateVector {
    int num_qubits = 0;
    std::vector<Amplitude> amps;  // length 2^num_qubits

    std::size_t dim() const { return amps.size(); }
};

// 2x2 gate, row-major: [[m[0], m[1]], [m[2], m[3]]].
// All named constructors produce matrices unitary to within 1e-12.
struct Gate2 {
    std::array<Amplitude, 4> m{};

    static Gate2 identity();
    static Gate2 pauli_x();
    static Gate2 hadamard();
};

Gate2 matmul(const Gate2& a, const Gate2& b);
bool is_unitary(const Gate2& g, double tol = 1e-12);

double norm_squared(const StateVector& s);

// Basis state |basis_index> on num_qubits qubits.
StateVector make_state(int num_qubits, std::uint64_t basis_index);

// Kronecker product; a's qubits end up more significant.
StateVector tensor(const StateVector& a, const StateVector& b);

StateVector apply_gate(const StateVector& state, const Gate2& g, int qubit);

// Hadamard on each listed qubit (order irrelevant, qubits must be distinct).
StateVector apply_hadamard_layer(const StateVector& state, const std::vector<int>& qubits);

struct Postselected {
    StateVector state;   // renormalized, one fewer qubit
    double probability;  // weight of the selected outcome before renormalization
};

// Project qubit `qubit` onto |outcome> and drop it. Throws ZeroProbability
// when the outcome weight is below 1e-14.
Postselected postselect(const StateVector& state, int qubit, int outcome);

// <a|b> (a conjugated).
Amplitude overlap(const StateVector& a, const StateVector& b);

// Measurement statistics in the computational basis: `shots` draws from
// |amp|^2 using SplitMix64 (see rng.hpp). Identical seed => identical counts.
std::map<std::uint64_t, std::uint64_t> sample(const StateVector& state, std::uint64_t shots,
                                              std::uint64_t seed);

}  // namespace qkan
