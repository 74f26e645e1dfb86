#include "fivec/neural_net.hpp"

#include "fivec/boosting.hpp" // sigmoid
#include "fivec/errors.hpp"
#include "fivec/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace fivec {

namespace {

// log(1 + e^z) without overflow; cross-entropy = softplus(z) - y*z.
double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

} // namespace

NeuralNet::NeuralNet(size_t inputs, size_t hidden_units) : inputs_(inputs), hidden_(hidden_units) {
    if (inputs_ == 0 || hidden_ == 0) {
        throw ArgumentError("neural net needs at least one input and one hidden unit");
    }
    params_.assign(hidden_ * inputs_ + 2 * hidden_ + 1, 0.0);
}

void NeuralNet::init_weights(uint64_t seed) {
    Rng rng(seed);
    const double limit1 = std::sqrt(6.0 / static_cast<double>(inputs_ + hidden_));
    for (size_t u = 0; u < hidden_; ++u) {
        for (size_t i = 0; i < inputs_; ++i) {
            params_[w1_at(u, i)] = (2.0 * rng.next_double() - 1.0) * limit1;
        }
    }
    const double limit2 = std::sqrt(6.0 / static_cast<double>(hidden_ + 1));
    for (size_t u = 0; u < hidden_; ++u) {
        params_[b1_at(u)] = 0.0;
        params_[w2_at(u)] = (2.0 * rng.next_double() - 1.0) * limit2;
    }
    params_[b2_at()] = 0.0;
}

double NeuralNet::predict_row(const double* row) const {
    if (params_.empty()) throw ContractError("predict on an untrained neural net");
    double z = params_[b2_at()];
    for (size_t u = 0; u < hidden_; ++u) {
        double a = params_[b1_at(u)];
        for (size_t i = 0; i < inputs_; ++i) a += params_[w1_at(u, i)] * row[i];
        if (a > 0.0) z += params_[w2_at(u)] * a;
    }
    return sigmoid(z);
}

double NeuralNet::loss_and_gradient(const EncodedMatrix& X, const std::vector<uint32_t>& rows,
                                    double positive_weight, std::vector<double>& grad) const {
    if (X.cols != inputs_) throw ContractError("matrix width does not match the network");
    if (rows.empty()) throw ArgumentError("gradient needs at least one row");
    grad.assign(params_.size(), 0.0);

    double loss = 0.0;
    double weight_sum = 0.0;
    std::vector<double> act(hidden_);
    for (const uint32_t r : rows) {
        const double* x = X.row(r);
        const double y = static_cast<double>(X.labels[r]);
        const double w = X.labels[r] ? positive_weight : 1.0;

        double z = params_[b2_at()];
        for (size_t u = 0; u < hidden_; ++u) {
            double a = params_[b1_at(u)];
            for (size_t i = 0; i < inputs_; ++i) a += params_[w1_at(u, i)] * x[i];
            act[u] = a > 0.0 ? a : 0.0;
            z += params_[w2_at(u)] * act[u];
        }

        loss += w * (softplus(z) - y * z);
        weight_sum += w;

        const double dz = w * (sigmoid(z) - y);
        grad[b2_at()] += dz;
        for (size_t u = 0; u < hidden_; ++u) {
            grad[w2_at(u)] += dz * act[u];
            if (act[u] > 0.0) {
                const double da = dz * params_[w2_at(u)];
                grad[b1_at(u)] += da;
                for (size_t i = 0; i < inputs_; ++i) grad[w1_at(u, i)] += da * x[i];
            }
        }
    }

    for (auto& g : grad) g /= weight_sum;
    return loss / weight_sum;
}

NeuralNet fit_neural_net(const EncodedMatrix& X, const NeuralNetConfig& config, uint64_t seed) {
    if (X.rows == 0) throw ArgumentError("cannot fit a neural net on an empty matrix");
    if (config.batch_size == 0) throw ArgumentError("batch size must be positive");
    if (!(config.learning_rate > 0.0 && config.learning_rate <= 1.0)) {
        throw ArgumentError("neural net learning rate must lie in (0, 1]");
    }

    NeuralNet net(X.cols, config.hidden_units);
    net.init_weights(mix_seed(seed, 0));

    Rng order_rng(mix_seed(seed, 1));
    std::vector<uint32_t> order(X.rows);
    for (size_t i = 0; i < X.rows; ++i) order[i] = static_cast<uint32_t>(i);

    std::vector<double> grad;
    std::vector<uint32_t> batch;
    for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
        order_rng.shuffle(order);
        for (size_t start = 0; start < order.size(); start += config.batch_size) {
            const size_t stop = std::min(order.size(), start + config.batch_size);
            batch.assign(order.begin() + static_cast<long>(start),
                         order.begin() + static_cast<long>(stop));
            net.loss_and_gradient(X, batch, config.positive_weight, grad);
            auto& params = net.params();
            for (size_t p = 0; p < params.size(); ++p) {
                params[p] -= config.learning_rate * grad[p];
            }
        }
    }
    return net;
}

nlohmann::json NeuralNet::to_json() const {
    return nlohmann::json{
        {"inputs", inputs_}, {"hidden_units", hidden_}, {"params", params_}};
}

NeuralNet NeuralNet::from_json(const nlohmann::json& doc) {
    try {
        NeuralNet net(doc.at("inputs").get<size_t>(), doc.at("hidden_units").get<size_t>());
        auto params = doc.at("params").get<std::vector<double>>();
        if (params.size() != net.params().size()) {
            throw ParseError("neural net payload: parameter count mismatch");
        }
        net.params() = std::move(params);
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("neural net payload: ") + e.what());
    }
}

} // namespace fivec
