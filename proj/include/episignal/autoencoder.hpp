#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "episignal/rng.hpp"

namespace episignal::topics {

struct AutoencoderConfig {
    std::size_t latent_dim = 32;
    std::size_t hidden_dim = 0;  // 0 resolves to (input + latent) / 2
    int epochs = 200;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
};

// Symmetric feedforward autoencoder: input -> hidden (ReLU) -> latent ->
// hidden (ReLU) -> input, trained full-batch with Adam on mean squared error.
// Parameters live in one flat vector so gradients can be checked externally.
class Autoencoder {
public:
    static Autoencoder fit(const std::vector<std::vector<double>>& data,
                           const AutoencoderConfig& config) {
        Autoencoder ae = init(data, config);
        const std::size_t p = ae.params_.size();
        std::vector<double> m(p, 0.0), v(p, 0.0), grad(p);
        const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        ae.loss_trace_.push_back(ae.loss(data));
        for (int epoch = 1; epoch <= config.epochs; ++epoch) {
            ae.gradient(data, grad);
            const double b1t = 1.0 - std::pow(b1, epoch);
            const double b2t = 1.0 - std::pow(b2, epoch);
            for (std::size_t i = 0; i < p; ++i) {
                m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
                v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
                ae.params_[i] -=
                    config.learning_rate * (m[i] / b1t) / (std::sqrt(v[i] / b2t) + eps);
            }
            ae.loss_trace_.push_back(ae.loss(data));
        }
        return ae;
    }

    // Network shape without training; used by gradient-check oracles.
    static Autoencoder init(const std::vector<std::vector<double>>& data,
                            const AutoencoderConfig& config) {
        if (data.size() < 2) throw std::invalid_argument("autoencoder: need at least 2 vectors");
        Autoencoder ae;
        ae.in_ = data.front().size();
        for (const auto& row : data) {
            if (row.size() != ae.in_) throw std::invalid_argument("autoencoder: ragged input");
        }
        ae.latent_ = config.latent_dim;
        if (ae.in_ <= ae.latent_) {
            throw std::invalid_argument("autoencoder: input dim must exceed latent dim");
        }
        ae.hidden_ = config.hidden_dim > 0 ? config.hidden_dim : (ae.in_ + ae.latent_) / 2;
        ae.params_.assign(2 * (ae.in_ * ae.hidden_ + ae.hidden_) +
                              2 * (ae.hidden_ * ae.latent_) + ae.latent_ + ae.in_,
                          0.0);
        Rng rng(config.seed);
        auto glorot = [&](std::size_t offset, std::size_t rows, std::size_t cols) {
            const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
            for (std::size_t i = 0; i < rows * cols; ++i) {
                ae.params_[offset + i] = rng.uniform(-limit, limit);
            }
        };
        glorot(ae.w1(), ae.in_, ae.hidden_);
        glorot(ae.w2(), ae.hidden_, ae.latent_);
        glorot(ae.w3(), ae.latent_, ae.hidden_);
        glorot(ae.w4(), ae.hidden_, ae.in_);
        return ae;
    }

    std::vector<double> encode(const std::vector<double>& x) const {
        std::vector<double> h1(hidden_), z(latent_);
        forward_encoder(x, h1, z);
        return z;
    }

    std::vector<double> reconstruct(const std::vector<double>& x) const {
        std::vector<double> h1(hidden_), z(latent_), h2(hidden_), out(in_);
        forward_encoder(x, h1, z);
        forward_decoder(z, h2, out);
        return out;
    }

    // Mean over samples and dimensions of the squared reconstruction error.
    double loss(const std::vector<std::vector<double>>& data) const {
        double total = 0.0;
        for (const auto& x : data) {
            auto out = reconstruct(x);
            for (std::size_t i = 0; i < in_; ++i) {
                const double d = out[i] - x[i];
                total += d * d;
            }
        }
        return total / (static_cast<double>(data.size()) * static_cast<double>(in_));
    }

    // Analytic full-batch gradient of loss() with respect to the flat
    // parameter vector.
    void gradient(const std::vector<std::vector<double>>& data, std::vector<double>& grad) const {
        grad.assign(params_.size(), 0.0);
        const double scale = 2.0 / (static_cast<double>(data.size()) * static_cast<double>(in_));
        std::vector<double> h1(hidden_), z(latent_), h2(hidden_), out(in_);
        std::vector<double> d_out(in_), d_h2(hidden_), d_z(latent_), d_h1(hidden_);
        for (const auto& x : data) {
            forward_encoder(x, h1, z);
            forward_decoder(z, h2, out);
            for (std::size_t i = 0; i < in_; ++i) d_out[i] = scale * (out[i] - x[i]);
            // output layer: out = W4^T h2 + b4
            for (std::size_t j = 0; j < hidden_; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < in_; ++i) {
                    grad[w4() + j * in_ + i] += h2[j] * d_out[i];
                    acc += params_[w4() + j * in_ + i] * d_out[i];
                }
                d_h2[j] = h2[j] > 0.0 ? acc : 0.0;  // ReLU mask
            }
            for (std::size_t i = 0; i < in_; ++i) grad[b4() + i] += d_out[i];
            // decoder hidden: h2 = relu(W3^T z + b3)
            for (std::size_t j = 0; j < latent_; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < hidden_; ++i) {
                    grad[w3() + j * hidden_ + i] += z[j] * d_h2[i];
                    acc += params_[w3() + j * hidden_ + i] * d_h2[i];
                }
                d_z[j] = acc;
            }
            for (std::size_t i = 0; i < hidden_; ++i) grad[b3() + i] += d_h2[i];
            // latent: z = W2^T h1 + b2
            for (std::size_t j = 0; j < hidden_; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < latent_; ++i) {
                    grad[w2() + j * latent_ + i] += h1[j] * d_z[i];
                    acc += params_[w2() + j * latent_ + i] * d_z[i];
                }
                d_h1[j] = h1[j] > 0.0 ? acc : 0.0;
            }
            for (std::size_t i = 0; i < latent_; ++i) grad[b2() + i] += d_z[i];
            // encoder hidden: h1 = relu(W1^T x + b1)
            for (std::size_t j = 0; j < in_; ++j) {
                for (std::size_t i = 0; i < hidden_; ++i) {
                    grad[w1() + j * hidden_ + i] += x[j] * d_h1[i];
                }
            }
            for (std::size_t i = 0; i < hidden_; ++i) grad[b1() + i] += d_h1[i];
        }
    }

    std::vector<double>& parameters() { return params_; }
    const std::vector<double>& parameters() const { return params_; }
    const std::vector<double>& loss_trace() const { return loss_trace_; }
    std::size_t input_dim() const { return in_; }
    std::size_t hidden_dim() const { return hidden_; }
    std::size_t latent_dim() const { return latent_; }

private:
    // flat parameter layout
    std::size_t w1() const { return 0; }
    std::size_t b1() const { return in_ * hidden_; }
    std::size_t w2() const { return b1() + hidden_; }
    std::size_t b2() const { return w2() + hidden_ * latent_; }
    std::size_t w3() const { return b2() + latent_; }
    std::size_t b3() const { return w3() + latent_ * hidden_; }
    std::size_t w4() const { return b3() + hidden_; }
    std::size_t b4() const { return w4() + hidden_ * in_; }

    void forward_encoder(const std::vector<double>& x, std::vector<double>& h1,
                         std::vector<double>& z) const {
        for (std::size_t i = 0; i < hidden_; ++i) {
            double acc = params_[b1() + i];
            for (std::size_t j = 0; j < in_; ++j) acc += params_[w1() + j * hidden_ + i] * x[j];
            h1[i] = acc > 0.0 ? acc : 0.0;
        }
        for (std::size_t i = 0; i < latent_; ++i) {
            double acc = params_[b2() + i];
            for (std::size_t j = 0; j < hidden_; ++j) {
                acc += params_[w2() + j * latent_ + i] * h1[j];
            }
            z[i] = acc;
        }
    }

    void forward_decoder(const std::vector<double>& z, std::vector<double>& h2,
                         std::vector<double>& out) const {
        for (std::size_t i = 0; i < hidden_; ++i) {
            double acc = params_[b3() + i];
            for (std::size_t j = 0; j < latent_; ++j) {
                acc += params_[w3() + j * hidden_ + i] * z[j];
            }
            h2[i] = acc > 0.0 ? acc : 0.0;
        }
        for (std::size_t i = 0; i < in_; ++i) {
            double acc = params_[b4() + i];
            for (std::size_t j = 0; j < hidden_; ++j) {
                acc += params_[w4() + j * in_ + i] * h2[j];
            }
            out[i] = acc;
        }
    }

    std::size_t in_ = 0, hidden_ = 0, latent_ = 0;
    std::vector<double> params_;
    std::vector<double> loss_trace_;
};

}  // namespace episignal::topics
