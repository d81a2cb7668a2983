#include "qkan/kan_layer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qkan/errors.hpp"

namespace qkan {

namespace {

void check_layer(const LayerParams& params) {
    if (params.feature_phases.empty()) throw InvalidInput("layer: needs at least one feature");
    const std::size_t len = params.feature_phases.front().phases.size();
    if (len == 0) throw InvalidInput("layer: empty phase sequence");
    for (const PhaseSequence& ps : params.feature_phases) {
        if (ps.phases.size() != len) throw InvalidInput("layer: phase sequences must share one degree");
    }
}

void check_features(const LayerParams& params, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != params.num_features())
        throw InvalidInput("layer: feature count mismatch");
    for (double xi : x) {
        if (!(std::abs(xi) <= 1.0)) throw DomainError("layer: feature outside [-1, 1]");
    }
}

}  // namespace

int LayerParams::degree() const {
    return feature_phases.empty() ? -1 : feature_phases.front().degree();
}

int LayerParams::padded_size() const {
    return static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::max(1, num_features()))));
}

std::vector<std::vector<int>> mixing_coefficients(int n) {
    if (n < 1 || !std::has_single_bit(static_cast<unsigned>(n)))
        throw InvalidInput("mixing_coefficients: size must be a power of two");
    std::vector<std::vector<int>> alpha(n, std::vector<int>(n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            alpha[j][i] = (std::popcount(static_cast<unsigned>(j & i)) % 2 == 0) ? 1 : -1;
        }
    }
    return alpha;
}

double max_unitarity_defect(const ComplexMatrix& m) {
    double mx = 0.0;
    for (std::size_t r = 0; r < m.dim; ++r) {
        for (std::size_t c = 0; c < m.dim; ++c) {
            Amplitude acc(0, 0);
            for (std::size_t k = 0; k < m.dim; ++k) acc += std::conj(m.at(k, r)) * m.at(k, c);
            if (r == c) acc -= 1.0;
            mx = std::max(mx, std::abs(acc));
        }
    }
    return mx;
}

ComplexMatrix build_block_diagonal(const LayerParams& params, const std::vector<double>& x) {
    check_layer(params);
    check_features(params, x);
    const int padded = params.padded_size();
    ComplexMatrix m(2 * static_cast<std::size_t>(padded));
    for (int i = 0; i < padded; ++i) {
        const std::size_t base = 2 * static_cast<std::size_t>(i);
        if (i < params.num_features()) {
            const Gate2 g = qsp_unitary(params.feature_phases[i], x[i]);
            m.at(base, base) = g.m[0];
            m.at(base, base + 1) = g.m[1];
            m.at(base + 1, base) = g.m[2];
            m.at(base + 1, base + 1) = g.m[3];
        } else {
            m.at(base, base) = Amplitude(1, 0);
            m.at(base + 1, base + 1) = Amplitude(1, 0);
        }
    }
    return m;
}

LayerOutput layer_forward(const LayerParams& params, const std::vector<double>& x) {
    const ComplexMatrix op = build_block_diagonal(params, x);
    const int padded = params.padded_size();
    const int index_qubits = std::countr_zero(static_cast<unsigned>(padded));

    std::vector<int> index_list(index_qubits);
    for (int q = 0; q < index_qubits; ++q) index_list[q] = q + 1;  // signal qubit is 0

    StateVector state = make_state(index_qubits + 1, 0);
    state = apply_hadamard_layer(state, index_list);

    // apply the block-diagonal operator
    std::vector<Amplitude> out(state.dim(), Amplitude(0, 0));
    for (std::size_t r = 0; r < op.dim; ++r) {
        Amplitude acc(0, 0);
        for (std::size_t c = 0; c < op.dim; ++c) acc += op.at(r, c) * state.amps[c];
        out[r] = acc;
    }
    state.amps = std::move(out);

    state = apply_hadamard_layer(state, index_list);

    LayerOutput result;
    result.values.resize(padded);
    double prob = 0.0;
    for (int j = 0; j < padded; ++j) {
        result.values[j] = state.amps[2 * static_cast<std::size_t>(j)];
        prob += std::norm(result.values[j]);
    }
    result.postselect_prob = prob;
    return result;
}

}  // namespace qkan
