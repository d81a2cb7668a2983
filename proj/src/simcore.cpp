#include "qkan/simcore.hpp"

#include <algorithm>
#include <cmath>

#include "qkan/errors.hpp"
#include "qkan/rng.hpp"

namespace qkan {

Gate2 Gate2::identity() { return Gate2{{Amplitude(1, 0), {}, {}, Amplitude(1, 0)}}; }

Gate2 Gate2::pauli_x() { return Gate2{{{}, Amplitude(1, 0), Amplitude(1, 0), {}}}; }

Gate2 Gate2::hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    return Gate2{{Amplitude(s, 0), Amplitude(s, 0), Amplitude(s, 0), Amplitude(-s, 0)}};
}

Gate2 matmul(const Gate2& a, const Gate2& b) {
    Gate2 r;
    r.m[0] = a.m[0] * b.m[0] + a.m[1] * b.m[2];
    r.m[1] = a.m[0] * b.m[1] + a.m[1] * b.m[3];
    r.m[2] = a.m[2] * b.m[0] + a.m[3] * b.m[2];
    r.m[3] = a.m[2] * b.m[1] + a.m[3] * b.m[3];
    return r;
}

bool is_unitary(const Gate2& g, double tol) {
    // G^dag G - I, max-entry norm
    Amplitude d00 = std::conj(g.m[0]) * g.m[0] + std::conj(g.m[2]) * g.m[2] - 1.0;
    Amplitude d01 = std::conj(g.m[0]) * g.m[1] + std::conj(g.m[2]) * g.m[3];
    Amplitude d10 = std::conj(g.m[1]) * g.m[0] + std::conj(g.m[3]) * g.m[2];
    Amplitude d11 = std::conj(g.m[1]) * g.m[1] + std::conj(g.m[3]) * g.m[3] - 1.0;
    double mx = std::max({std::abs(d00), std::abs(d01), std::abs(d10), std::abs(d11)});
    return mx <= tol;
}

double norm_squared(const StateVector& s) {
    double acc = 0.0;
    for (const Amplitude& a : s.amps) acc += std::norm(a);
    return acc;
}

StateVector make_state(int num_qubits, std::uint64_t basis_index) {
    if (num_qubits < 0) throw InvalidInput("make_state: negative qubit count");
    const std::uint64_t dim = std::uint64_t(1) << num_qubits;
    if (basis_index >= dim) throw InvalidInput("make_state: basis_index out of range");
    StateVector s;
    s.num_qubits = num_qubits;
    s.amps.assign(dim, Amplitude(0, 0));
    s.amps[basis_index] = Amplitude(1, 0);
    return s;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    StateVector r;
    r.num_qubits = a.num_qubits + b.num_qubits;
    r.amps.resize(a.dim() * b.dim());
    for (std::size_t ia = 0; ia < a.dim(); ++ia) {
        const std::size_t base = ia << b.num_qubits;
        for (std::size_t ib = 0; ib < b.dim(); ++ib) {
            r.amps[base | ib] = a.amps[ia] * b.amps[ib];
        }
    }
    return r;
}

StateVector apply_gate(const StateVector& state, const Gate2& g, int qubit) {
    if (qubit < 0 || qubit >= state.num_qubits) throw InvalidInput("apply_gate: qubit out of range");
    StateVector r = state;
    const std::size_t mask = std::size_t(1) << qubit;
    for (std::size_t i = 0; i < r.dim(); ++i) {
        if ((i & mask) == 0) {
            const std::size_t i1 = i | mask;
            const Amplitude a0 = r.amps[i];
            const Amplitude a1 = r.amps[i1];
            r.amps[i] = g.m[0] * a0 + g.m[1] * a1;
            r.amps[i1] = g.m[2] * a0 + g.m[3] * a1;
        }
    }
    return r;
}

StateVector apply_hadamard_layer(const StateVector& state, const std::vector<int>& qubits) {
    std::vector<int> sorted = qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidInput("apply_hadamard_layer: duplicate qubit");
    StateVector r = state;
    const Gate2 h = Gate2::hadamard();
    for (int q : qubits) r = apply_gate(r, h, q);
    return r;
}

Postselected postselect(const StateVector& state, int qubit, int outcome) {
    if (qubit < 0 || qubit >= state.num_qubits) throw InvalidInput("postselect: qubit out of range");
    if (outcome != 0 && outcome != 1) throw InvalidInput("postselect: outcome must be 0 or 1");
    const std::size_t mask = std::size_t(1) << qubit;
    double prob = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if (((i & mask) != 0) == (outcome == 1)) prob += std::norm(state.amps[i]);
    }
    if (prob < 1e-14) throw ZeroProbability("postselect: outcome probability below 1e-14");

    Postselected out;
    out.probability = prob;
    out.state.num_qubits = state.num_qubits - 1;
    out.state.amps.resize(state.dim() / 2);
    const double scale = 1.0 / std::sqrt(prob);
    const std::size_t low = mask - 1;  // bits below `qubit`
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if (((i & mask) != 0) == (outcome == 1)) {
            const std::size_t j = (i & low) | ((i >> 1) & ~low);
            out.state.amps[j] = state.amps[i] * scale;
        }
    }
    return out;
}

Amplitude overlap(const StateVector& a, const StateVector& b) {
    if (a.num_qubits != b.num_qubits) throw InvalidInput("overlap: qubit count mismatch");
    Amplitude acc(0, 0);
    for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a.amps[i]) * b.amps[i];
    return acc;
}

std::map<std::uint64_t, std::uint64_t> sample(const StateVector& state, std::uint64_t shots,
                                              std::uint64_t seed) {
    // Cumulative weights once, then one binary search per shot.
    std::vector<double> cdf(state.dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        acc += std::norm(state.amps[i]);
        cdf[i] = acc;
    }

    SplitMix64 rng(seed);
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.next_double() * acc;  // u < acc = cdf.back()
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::uint64_t idx = static_cast<std::uint64_t>(it - cdf.begin());
        ++counts[std::min<std::uint64_t>(idx, state.dim() - 1)];
    }
    return counts;
}

}  // namespace qkan
