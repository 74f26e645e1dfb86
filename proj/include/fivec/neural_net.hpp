#pragma once

#include "fivec/encoding.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <vector>

namespace fivec {

// One-hidden-layer binary classifier: ReLU hidden units, sigmoid output,
// cross-entropy loss, plain mini-batch SGD. Parameters live in one flat
// vector (W1 | b1 | w2 | b2) so loss_and_gradient can be checked against
// finite differences slot by slot.
struct NeuralNetConfig {
    size_t hidden_units = 16;
    size_t epochs = 50;
    size_t batch_size = 32;
    double learning_rate = 0.01;
    double positive_weight = 1.0;
};

class NeuralNet {
public:
    NeuralNet() = default;
    NeuralNet(size_t inputs, size_t hidden_units);

    size_t inputs() const { return inputs_; }
    size_t hidden_units() const { return hidden_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    void init_weights(uint64_t seed);

    double predict_row(const double* row) const;

    // Mean weighted cross-entropy over `rows` plus d(loss)/d(param) for
    // every parameter. Returns the loss.
    double loss_and_gradient(const EncodedMatrix& X, const std::vector<uint32_t>& rows,
                             double positive_weight, std::vector<double>& grad) const;

    nlohmann::json to_json() const;
    static NeuralNet from_json(const nlohmann::json& doc);

private:
    size_t inputs_ = 0;
    size_t hidden_ = 0;
    std::vector<double> params_;

    // Flat layout offsets.
    size_t w1_at(size_t unit, size_t input) const { return unit * inputs_ + input; }
    size_t b1_at(size_t unit) const { return hidden_ * inputs_ + unit; }
    size_t w2_at(size_t unit) const { return hidden_ * inputs_ + hidden_ + unit; }
    size_t b2_at() const { return hidden_ * inputs_ + 2 * hidden_; }
};

NeuralNet fit_neural_net(const EncodedMatrix& X, const NeuralNetConfig& config, uint64_t seed);

} // namespace fivec
