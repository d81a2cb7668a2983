#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qkan/kan_layer.hpp"
#include "qkan/kan_stack.hpp"

namespace qkan {

// Regression samples: (features in [-1,1]^F, real targets).
struct Dataset {
    std::vector<std::pair<std::vector<double>, std::vector<double>>> samples;
    std::string name;

    int feature_width() const;
    int target_width() const;
};

enum class GradientMethod { central_difference, trig_shift };

struct OptimizerConfig {
    double learning_rate = 0.01;
    int max_iters = 1000;
    std::uint64_t seed = 0;
    GradientMethod gradient_method = GradientMethod::central_difference;
    double fd_step = 1e-5;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double tol = 1e-10;    // stop when loss < tol or the 20-iteration improvement < tol
    bool plain_gd = false; // plain gradient descent instead of Adam
};

// One optimization step. `elapsed` is a deterministic work counter (cumulative
// nominal model-forward evaluations), not wall-clock time: records and the
// CSVs built from them must reproduce byte-for-byte under a fixed seed.
struct TrainRecord {
    int iteration = 0;
    double loss = 0.0;
    double grad_norm = 0.0;
    double elapsed = 0.0;
};

// A trainable model: a single mixed layer or a qubitized stack.
using Model = std::variant<LayerParams, StackSpec>;

// Real model outputs: the layer readout takes the real part of each mixed
// amplitude; stacks are real already.
std::vector<double> model_forward(const Model& model, const std::vector<double>& x);
int model_output_width(const Model& model);
int model_input_width(const Model& model);

// Canonical flattening: layer-major, unit-major, phase-index-minor. The same
// order is used by gradient(), train() and the checkpoint format.
std::vector<double> flatten_params(const Model& model);
Model with_params(const Model& model, const std::vector<double>& params);

// Mean over samples of the mean squared error on the first target-width
// outputs.
double mse_loss(const Model& model, const Dataset& data);

// Gradient of mse_loss in canonical order.
//   central_difference: (L(p+h) - L(p-h)) / 2h per coordinate, h = fd_step.
//   trig_shift:         exact, from the degree-<=2 trigonometric structure of
//                       the loss in each phase. Every derivative is rebuilt
//                       from samples at phi +- pi/4 and phi +- pi/2 via
//                         f'(phi) = [f(phi+pi/4) - f(phi-pi/4)]
//                                   + (1-sqrt(2))/2 * [f(phi+pi/2) - f(phi-pi/2)],
//                       applied to the loss itself for single-layer models and
//                       to the per-unit amplitudes inside layer-by-layer
//                       backpropagation for stacks.
std::vector<double> gradient(const Model& model, const Dataset& data, const OptimizerConfig& cfg);

// Full-batch Adam (or plain GD) on the flattened parameters. Returns the best
// parameters seen and the per-iteration records; deterministic for a fixed
// config.
std::pair<Model, std::vector<TrainRecord>> train(const Model& model, const Dataset& data,
                                                 const OptimizerConfig& cfg);

// Probability of the ancilla reading 0 in a swap test between a and b,
// simulated on 2n+1 qubits: (1 + |<a|b>|^2) / 2.
double swap_test(const StateVector& a, const StateVector& b);
double swap_test_sampled(const StateVector& a, const StateVector& b, std::uint64_t shots,
                         std::uint64_t seed);

enum class HadamardPart { re, im };

// Probability of the ancilla reading 0 in a Hadamard test of the circuit
// unitary at signal a: (1 + Re<0|U|0>) / 2, or with an S^dag on the ancilla,
// (1 + Im<0|U|0>) / 2.
double hadamard_test(const PhaseSequence& phi, double a, HadamardPart part);
double hadamard_test_sampled(const PhaseSequence& phi, double a, HadamardPart part,
                             std::uint64_t shots, std::uint64_t seed);

// Dataset generators (the CLI built-ins). Features are uniform in [-1, 1]
// from SplitMix64 streams, sample-major then feature-minor.
Dataset make_product_of_sines(int num_samples, int num_features, std::uint64_t seed);
Dataset make_sum_of_squares(int num_samples, int num_features, std::uint64_t seed);

// Targets produced by a layer whose phases are drawn uniformly from
// [-pi, pi); the generating layer is returned alongside the data.
struct RealizableDataset {
    Dataset data;
    LayerParams truth;
};
RealizableDataset make_realizable(int num_samples, int num_features, int degree, int target_width,
                                  std::uint64_t seed);

}  // namespace qkan
