#pragma once

#include <vector>

#include "qkan/qsp.hpp"
#include "qkan/simcore.hpp"

namespace qkan {

// One phase sequence per input feature, all of the same degree. A feature
// count that is not a power of two is padded with identity blocks (P = 1).
struct LayerParams {
    std::vector<PhaseSequence> feature_phases;

    int num_features() const { return static_cast<int>(feature_phases.size()); }
    int degree() const;
    int padded_size() const;  // num_features rounded up to a power of two
};

// The Eq.-style layer output: padded_size mixed amplitudes, including the
// 1/padded_size normalization, plus the probability of the signal qubit
// reading 0.
struct LayerOutput {
    std::vector<Amplitude> values;
    double postselect_prob = 0.0;
};

// Walsh sign pattern alpha_{ji} = (-1)^popcount(j & i); row 0 is all ones.
// n must be a power of two.
std::vector<std::vector<int>> mixing_coefficients(int n);

// Dense square complex matrix, row-major.
struct ComplexMatrix {
    std::size_t dim = 0;
    std::vector<Amplitude> data;

    explicit ComplexMatrix(std::size_t n) : dim(n), data(n * n, Amplitude(0, 0)) {}
    Amplitude& at(std::size_t r, std::size_t c) { return data[r * dim + c]; }
    const Amplitude& at(std::size_t r, std::size_t c) const { return data[r * dim + c]; }
};

double max_unitarity_defect(const ComplexMatrix& m);

// Direct sum of the per-feature circuit unitaries at the given feature
// values; padding blocks are the identity. Size 2 * padded_size. Basis
// convention: index = 2 * block + signal_bit (signal qubit least significant).
ComplexMatrix build_block_diagonal(const LayerParams& params, const std::vector<double>& x);

// Full statevector pipeline: uniform superposition over the block index with
// the signal qubit at |0>, the block-diagonal operator, Hadamards on the
// index qubits, then the amplitudes at (index = j, signal = 0).
LayerOutput layer_forward(const LayerParams& params, const std::vector<double>& x);

}  // namespace qkan
