#include "qkan/training.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "qkan/errors.hpp"
#include "qkan/rng.hpp"

namespace qkan {

namespace {

constexpr double kShift4Outer = std::numbers::pi / 2.0;
constexpr double kShift4Inner = std::numbers::pi / 4.0;

// f'(phi) = [f(phi+pi/4) - f(phi-pi/4)] + (1-sqrt(2))/2 * [f(phi+pi/2) - f(phi-pi/2)],
// exact for trigonometric polynomials of degree <= 2.
template <typename T>
T four_point_rule(const T& inner_plus, const T& inner_minus, const T& outer_plus,
                  const T& outer_minus) {
    const double c2 = (1.0 - std::sqrt(2.0)) / 2.0;
    return (inner_plus - inner_minus) + c2 * (outer_plus - outer_minus);
}

}  // namespace

int Dataset::feature_width() const {
    return samples.empty() ? 0 : static_cast<int>(samples.front().first.size());
}

int Dataset::target_width() const {
    return samples.empty() ? 0 : static_cast<int>(samples.front().second.size());
}

std::vector<double> model_forward(const Model& model, const std::vector<double>& x) {
    if (const auto* layer = std::get_if<LayerParams>(&model)) {
        const LayerOutput out = layer_forward(*layer, x);
        std::vector<double> y(out.values.size());
        for (std::size_t j = 0; j < out.values.size(); ++j) y[j] = out.values[j].real();
        return y;
    }
    return stack_forward(x, std::get<StackSpec>(model));
}

int model_output_width(const Model& model) {
    if (const auto* layer = std::get_if<LayerParams>(&model)) return layer->padded_size();
    return stack_output_width(std::get<StackSpec>(model));
}

int model_input_width(const Model& model) {
    if (const auto* layer = std::get_if<LayerParams>(&model)) return layer->num_features();
    return std::get<StackSpec>(model).input_dim;
}

std::vector<double> flatten_params(const Model& model) {
    std::vector<double> flat;
    if (const auto* layer = std::get_if<LayerParams>(&model)) {
        for (const PhaseSequence& ps : layer->feature_phases)
            flat.insert(flat.end(), ps.phases.begin(), ps.phases.end());
        return flat;
    }
    const StackSpec& spec = std::get<StackSpec>(model);
    for (const StackLayerSpec& l : spec.layers)
        for (const QubitizedUnit& u : l.units)
            flat.insert(flat.end(), u.phases.begin(), u.phases.end());
    return flat;
}

Model with_params(const Model& model, const std::vector<double>& params) {
    Model out = model;
    std::size_t pos = 0;
    auto take = [&](std::vector<double>& dst) {
        if (pos + dst.size() > params.size()) throw InvalidInput("with_params: too few parameters");
        std::copy(params.begin() + pos, params.begin() + pos + dst.size(), dst.begin());
        pos += dst.size();
    };
    if (auto* layer = std::get_if<LayerParams>(&out)) {
        for (PhaseSequence& ps : layer->feature_phases) take(ps.phases);
    } else {
        StackSpec& spec = std::get<StackSpec>(out);
        for (StackLayerSpec& l : spec.layers)
            for (QubitizedUnit& u : l.units) take(u.phases);
    }
    if (pos != params.size()) throw InvalidInput("with_params: too many parameters");
    return out;
}

double mse_loss(const Model& model, const Dataset& data) {
    if (data.samples.empty()) throw InvalidInput("mse_loss: empty dataset");
    const int target_width = data.target_width();
    if (model_output_width(model) < target_width)
        throw InvalidInput("mse_loss: model output width below target width");
    double total = 0.0;
    for (const auto& [x, tgt] : data.samples) {
        const std::vector<double> y = model_forward(model, x);
        double acc = 0.0;
        for (int t = 0; t < target_width; ++t) {
            const double r = y[t] - tgt[t];
            acc += r * r;
        }
        total += acc / target_width;
    }
    return total / static_cast<double>(data.samples.size());
}

namespace {

std::vector<double> central_difference_gradient(const Model& model, const Dataset& data,
                                                double h) {
    const std::vector<double> params = flatten_params(model);
    std::vector<double> grad(params.size());
    std::vector<double> shifted = params;
    for (std::size_t k = 0; k < params.size(); ++k) {
        shifted[k] = params[k] + h;
        const double lp = mse_loss(with_params(model, shifted), data);
        shifted[k] = params[k] - h;
        const double lm = mse_loss(with_params(model, shifted), data);
        shifted[k] = params[k];
        grad[k] = (lp - lm) / (2.0 * h);
    }
    return grad;
}

// Single-layer models: the loss itself is a degree-2 trigonometric polynomial
// in each phase, so the four-point rule applied to the loss is exact.
std::vector<double> trig_shift_gradient_layer(const Model& model, const Dataset& data) {
    const std::vector<double> params = flatten_params(model);
    std::vector<double> grad(params.size());
    std::vector<double> shifted = params;
    auto loss_at = [&](std::size_t k, double delta) {
        shifted[k] = params[k] + delta;
        const double l = mse_loss(with_params(model, shifted), data);
        shifted[k] = params[k];
        return l;
    };
    for (std::size_t k = 0; k < params.size(); ++k) {
        grad[k] = four_point_rule(loss_at(k, kShift4Inner), loss_at(k, -kShift4Inner),
                                  loss_at(k, kShift4Outer), loss_at(k, -kShift4Outer));
    }
    return grad;
}

// d(output j)/d(mixed j) folded with an upstream cotangent on the mixed
// amplitude: returns delta_j * d(readout(mixed_j))/d(direction), where the
// mixed amplitude moves along complex `dm`.
double readout_chain(ReadoutPolicy readout, const Amplitude& mixed, bool clamped,
                     const Amplitude& dm) {
    if (clamped) return 0.0;
    if (readout == ReadoutPolicy::real_part) return dm.real();
    const double mag = std::abs(mixed);
    if (mag == 0.0) return 0.0;  // genuine kink; subgradient 0
    return (mixed.real() * dm.real() + mixed.imag() * dm.imag()) / mag;
}

// Stacks: layer-by-layer backpropagation. Per-phase derivatives of the unit
// amplitudes come from the four-point rule (exact: each amplitude is a
// degree-1 trigonometric polynomial in each of its own phases); the
// input-to-output Jacobian uses the factored d/dx form.
std::vector<double> trig_shift_gradient_stack(const StackSpec& spec, const Dataset& data) {
    validate_stack(spec);
    const int target_width = data.target_width();
    const std::size_t num_layers = spec.layers.size();

    std::size_t num_params = 0;
    for (const StackLayerSpec& l : spec.layers) num_params += l.units.size() * l.degree();
    std::vector<double> grad(num_params, 0.0);

    const double sample_scale = 1.0 / static_cast<double>(data.samples.size());
    for (const auto& [x, tgt] : data.samples) {
        // forward, caching every layer evaluation
        std::vector<std::vector<double>> z(num_layers + 1);
        std::vector<StackLayerEval> evals(num_layers);
        z[0] = x;
        for (std::size_t l = 0; l < num_layers; ++l) {
            evals[l] = stack_layer_eval(z[l], spec.layers[l]);
            z[l + 1] = evals[l].outputs;
        }

        // dL/d(output of last layer)
        std::vector<double> delta(z[num_layers].size(), 0.0);
        for (int t = 0; t < target_width; ++t) {
            delta[t] = 2.0 * (z[num_layers][t] - tgt[t]) / target_width * sample_scale;
        }

        std::size_t layer_param_end = num_params;
        for (std::size_t li = num_layers; li-- > 0;) {
            const StackLayerSpec& layer = spec.layers[li];
            const StackLayerEval& eval = evals[li];
            const int width = layer.width();
            const int padded = layer.padded_width();
            const int d = layer.degree();
            const std::vector<std::vector<int>> alpha = mixing_coefficients(padded);
            layer_param_end -= static_cast<std::size_t>(width) * d;

            // phase gradients of this layer
            for (int w = 0; w < width; ++w) {
                QubitizedUnit unit = layer.units[w];
                for (int k = 0; k < d; ++k) {
                    const double phi = unit.phases[k];
                    auto eval_at = [&](double delta_phi) {
                        unit.phases[k] = phi + delta_phi;
                        const Amplitude u = unit_forward(z[li][w], unit);
                        unit.phases[k] = phi;
                        return u;
                    };
                    const Amplitude du = four_point_rule(
                        eval_at(kShift4Inner), eval_at(-kShift4Inner), eval_at(kShift4Outer),
                        eval_at(-kShift4Outer));
                    double acc = 0.0;
                    for (int j = 0; j < padded; ++j) {
                        if (delta[j] == 0.0) continue;
                        const Amplitude dm =
                            (alpha[j][w] > 0 ? du : -du) / static_cast<double>(padded);
                        acc += delta[j] *
                               readout_chain(layer.readout, eval.mixed[j], eval.clamped[j], dm);
                    }
                    grad[layer_param_end + static_cast<std::size_t>(w) * d + k] += acc;
                }
            }

            // cotangent for the previous layer's outputs
            if (li > 0) {
                std::vector<double> prev_delta(width, 0.0);
                for (int w = 0; w < width; ++w) {
                    const Amplitude dudx = unit_forward_dx(z[li][w], layer.units[w]);
                    double acc = 0.0;
                    for (int j = 0; j < padded; ++j) {
                        if (delta[j] == 0.0) continue;
                        const Amplitude dm =
                            (alpha[j][w] > 0 ? dudx : -dudx) / static_cast<double>(padded);
                        acc += delta[j] *
                               readout_chain(layer.readout, eval.mixed[j], eval.clamped[j], dm);
                    }
                    prev_delta[w] = acc;
                }
                delta = std::move(prev_delta);
            }
        }
    }
    return grad;
}

}  // namespace

std::vector<double> gradient(const Model& model, const Dataset& data, const OptimizerConfig& cfg) {
    if (cfg.gradient_method == GradientMethod::central_difference) {
        return central_difference_gradient(model, data, cfg.fd_step);
    }
    if (std::holds_alternative<LayerParams>(model)) {
        return trig_shift_gradient_layer(model, data);
    }
    return trig_shift_gradient_stack(std::get<StackSpec>(model), data);
}

std::pair<Model, std::vector<TrainRecord>> train(const Model& model, const Dataset& data,
                                                 const OptimizerConfig& cfg) {
    std::vector<double> params = flatten_params(model);
    const std::size_t n = params.size();
    const double eval_cost = static_cast<double>(data.samples.size());
    const double grad_cost =
        eval_cost * static_cast<double>(
                        (cfg.gradient_method == GradientMethod::central_difference ? 2 : 4) * n);

    double work = 0.0;
    auto loss_of = [&](const std::vector<double>& p) {
        work += eval_cost;
        return mse_loss(with_params(model, p), data);
    };
    auto grad_of = [&](const std::vector<double>& p) {
        work += grad_cost;
        return gradient(with_params(model, p), data, cfg);
    };
    auto l2 = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x * x;
        return std::sqrt(acc);
    };

    std::vector<TrainRecord> records;
    double loss = loss_of(params);
    std::vector<double> g = grad_of(params);
    records.push_back({0, loss, l2(g), work});

    std::vector<double> best_params = params;
    double best_loss = loss;
    std::vector<double> best_history{best_loss};

    std::vector<double> m(n, 0.0), v(n, 0.0);
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        if (best_loss < cfg.tol) break;  // remaining improvement is below tol

        if (cfg.plain_gd) {
            for (std::size_t k = 0; k < n; ++k) params[k] -= cfg.learning_rate * g[k];
        } else {
            const double b1t = 1.0 - std::pow(cfg.adam_beta1, iter);
            const double b2t = 1.0 - std::pow(cfg.adam_beta2, iter);
            for (std::size_t k = 0; k < n; ++k) {
                m[k] = cfg.adam_beta1 * m[k] + (1.0 - cfg.adam_beta1) * g[k];
                v[k] = cfg.adam_beta2 * v[k] + (1.0 - cfg.adam_beta2) * g[k] * g[k];
                const double mhat = m[k] / b1t;
                const double vhat = v[k] / b2t;
                params[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
            }
        }

        loss = loss_of(params);
        g = grad_of(params);
        records.push_back({iter, loss, l2(g), work});

        if (loss < best_loss) {
            best_loss = loss;
            best_params = params;
        }
        best_history.push_back(best_loss);

        if (iter >= 20 && best_history[iter - 20] - best_history[iter] < cfg.tol) break;
    }
    return {with_params(model, best_params), records};
}

namespace {

// probability that the most significant (ancilla) qubit reads 0
double ancilla_zero_probability(const StateVector& s) {
    const std::size_t mask = std::size_t(1) << (s.num_qubits - 1);
    double prob = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        if ((i & mask) == 0) prob += std::norm(s.amps[i]);
    }
    return prob;
}

double ancilla_zero_frequency(const StateVector& s, std::uint64_t shots, std::uint64_t seed) {
    const std::size_t mask = std::size_t(1) << (s.num_qubits - 1);
    const auto counts = sample(s, shots, seed);
    std::uint64_t zeros = 0;
    for (const auto& [idx, count] : counts) {
        if ((idx & mask) == 0) zeros += count;
    }
    return shots == 0 ? 0.0 : static_cast<double>(zeros) / static_cast<double>(shots);
}

// ancilla (qubit 2n) |0>, register A (qubits n..2n-1) = a, register B = b;
// H on ancilla, controlled swap of A and B, H again.
StateVector swap_test_state(const StateVector& a, const StateVector& b) {
    if (a.num_qubits != b.num_qubits) throw InvalidInput("swap_test: qubit count mismatch");
    const int n = a.num_qubits;
    StateVector joint = tensor(make_state(1, 0), tensor(a, b));
    const int anc = 2 * n;
    joint = apply_gate(joint, Gate2::hadamard(), anc);

    const std::size_t anc_mask = std::size_t(1) << anc;
    const std::size_t reg_mask = (std::size_t(1) << n) - 1;
    for (std::size_t i = 0; i < joint.dim(); ++i) {
        if ((i & anc_mask) == 0) continue;
        const std::size_t ia = (i >> n) & reg_mask;
        const std::size_t ib = i & reg_mask;
        if (ia < ib) {  // visit each pair once
            const std::size_t j = anc_mask | (ib << n) | ia;
            std::swap(joint.amps[i], joint.amps[j]);
        }
    }
    return apply_gate(joint, Gate2::hadamard(), anc);
}

// ancilla (qubit 1) + signal (qubit 0): H, controlled-U, optional S^dag on the
// ancilla, H.
StateVector hadamard_test_state(const PhaseSequence& phi, double a, HadamardPart part) {
    const Gate2 u = qsp_unitary(phi, a);
    StateVector s = make_state(2, 0);
    s = apply_gate(s, Gate2::hadamard(), 1);
    const Amplitude c0 = s.amps[2], c1 = s.amps[3];
    s.amps[2] = u.m[0] * c0 + u.m[1] * c1;
    s.amps[3] = u.m[2] * c0 + u.m[3] * c1;
    if (part == HadamardPart::im) {
        const Amplitude minus_i(0, -1);  // S^dag = diag(1, -i)
        s.amps[2] *= minus_i;
        s.amps[3] *= minus_i;
    }
    return apply_gate(s, Gate2::hadamard(), 1);
}

}  // namespace

double swap_test(const StateVector& a, const StateVector& b) {
    return ancilla_zero_probability(swap_test_state(a, b));
}

double swap_test_sampled(const StateVector& a, const StateVector& b, std::uint64_t shots,
                         std::uint64_t seed) {
    return ancilla_zero_frequency(swap_test_state(a, b), shots, seed);
}

double hadamard_test(const PhaseSequence& phi, double a, HadamardPart part) {
    return ancilla_zero_probability(hadamard_test_state(phi, a, part));
}

double hadamard_test_sampled(const PhaseSequence& phi, double a, HadamardPart part,
                             std::uint64_t shots, std::uint64_t seed) {
    return ancilla_zero_frequency(hadamard_test_state(phi, a, part), shots, seed);
}

namespace {

Dataset generated_dataset(const std::string& name, int num_samples, int num_features,
                          std::uint64_t seed,
                          const std::function<std::vector<double>(const std::vector<double>&)>& f) {
    if (num_samples < 1) throw InvalidInput("dataset generator: num_samples must be >= 1");
    if (num_features < 1) throw InvalidInput("dataset generator: num_features must be >= 1");
    SplitMix64 rng(seed);
    Dataset data;
    data.name = name;
    data.samples.reserve(num_samples);
    for (int s = 0; s < num_samples; ++s) {
        std::vector<double> x(num_features);
        for (double& xi : x) xi = rng.uniform(-1.0, 1.0);
        std::vector<double> y = f(x);
        data.samples.emplace_back(std::move(x), std::move(y));
    }
    return data;
}

}  // namespace

Dataset make_product_of_sines(int num_samples, int num_features, std::uint64_t seed) {
    return generated_dataset("product-of-sines", num_samples, num_features, seed,
                             [](const std::vector<double>& x) {
                                 double p = 1.0;
                                 for (double xi : x) p *= std::sin(std::numbers::pi * xi);
                                 return std::vector<double>{p};
                             });
}

Dataset make_sum_of_squares(int num_samples, int num_features, std::uint64_t seed) {
    return generated_dataset("sum-of-squares", num_samples, num_features, seed,
                             [](const std::vector<double>& x) {
                                 double acc = 0.0;
                                 for (double xi : x) acc += xi * xi;
                                 return std::vector<double>{acc / static_cast<double>(x.size())};
                             });
}

RealizableDataset make_realizable(int num_samples, int num_features, int degree, int target_width,
                                  std::uint64_t seed) {
    if (degree < 0) throw InvalidInput("make_realizable: degree must be >= 0");
    SplitMix64 rng(seed);
    LayerParams truth;
    truth.feature_phases.resize(num_features);
    for (PhaseSequence& ps : truth.feature_phases) {
        ps.phases.resize(degree + 1);
        for (double& p : ps.phases) p = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
    if (target_width < 1 || target_width > truth.padded_size())
        throw InvalidInput("make_realizable: target_width out of range");

    Dataset data = generated_dataset(
        "realizable-by-known-phases", num_samples, num_features, rng.next(),
        [&](const std::vector<double>& x) {
            const std::vector<double> y = model_forward(Model(truth), x);
            return std::vector<double>(y.begin(), y.begin() + target_width);
        });
    return RealizableDataset{std::move(data), std::move(truth)};
}

}  // namespace qkan
