#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpncast/common.hpp"
#include "gpncast/rng.hpp"

namespace gpncast {

struct MlpConfig {
    std::vector<int> hidden = {100, 75, 50, 25};
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int epochs = 100;
    int batch_size = 25;
    std::uint64_t seed = 0;
};

/// Fully connected feedforward regressor: relu hidden layers, linear scalar
/// output, mean-squared-error loss, trained with the Nadam update rule
/// (Adam with Nesterov momentum). All parameters live in one flat vector so
/// gradients can be checked against finite differences.
class Mlp {
public:
    MlpConfig config;
    std::vector<int> widths;  // input, hidden..., 1
    std::vector<Eigen::MatrixXd> weights;  // layer l: out x in
    std::vector<Eigen::VectorXd> biases;
    std::vector<double> loss_curve;  // per-epoch training MSE

    static Mlp init(int n_inputs, const MlpConfig& cfg) {
        if (n_inputs <= 0) throw ValidationError("mlp: need at least one input");
        for (int w : cfg.hidden)
            if (w <= 0) throw ValidationError("mlp: layer widths must be positive");
        if (cfg.epochs <= 0 || cfg.batch_size <= 0)
            throw ValidationError("mlp: epochs and batch size must be positive");
        Mlp net;
        net.config = cfg;
        net.widths.push_back(n_inputs);
        for (int w : cfg.hidden) net.widths.push_back(w);
        net.widths.push_back(1);

        Rng rng(cfg.seed);
        for (std::size_t l = 0; l + 1 < net.widths.size(); ++l) {
            const auto fan_in = static_cast<Eigen::Index>(net.widths[l]);
            const auto fan_out = static_cast<Eigen::Index>(net.widths[l + 1]);
            const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
            Eigen::MatrixXd w(fan_out, fan_in);
            for (Eigen::Index r = 0; r < fan_out; ++r)
                for (Eigen::Index c = 0; c < fan_in; ++c)
                    w(r, c) = rng.uniform(-limit, limit);
            net.weights.push_back(std::move(w));
            net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
        }
        return net;
    }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l)
            n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
        return n;
    }

    /// Flatten parameters layer by layer: weight rows first, then biases.
    std::vector<double> get_params() const {
        std::vector<double> out;
        out.reserve(param_count());
        for (std::size_t l = 0; l < weights.size(); ++l) {
            const auto& w = weights[l];
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                for (Eigen::Index c = 0; c < w.cols(); ++c) out.push_back(w(r, c));
            for (Eigen::Index r = 0; r < biases[l].size(); ++r)
                out.push_back(biases[l][r]);
        }
        return out;
    }

    void set_params(const std::vector<double>& params) {
        if (params.size() != param_count())
            throw ValidationError("mlp: parameter vector size mismatch");
        std::size_t i = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) {
            auto& w = weights[l];
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = params[i++];
            for (Eigen::Index r = 0; r < biases[l].size(); ++r)
                biases[l][r] = params[i++];
        }
    }

    double predict_row(const std::vector<double>& row) const {
        Eigen::VectorXd a(static_cast<Eigen::Index>(row.size()));
        for (std::size_t i = 0; i < row.size(); ++i)
            a[static_cast<Eigen::Index>(i)] = row[i];
        for (std::size_t l = 0; l < weights.size(); ++l) {
            Eigen::VectorXd z = weights[l] * a + biases[l];
            if (l + 1 < weights.size()) z = z.cwiseMax(0.0);  // relu hidden
            a = std::move(z);
        }
        return a[0];
    }

    std::vector<double> predict(const std::vector<std::vector<double>>& rows) const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(predict_row(r));
        return out;
    }

    /// MSE loss and its gradient w.r.t. the flat parameter vector, averaged
    /// over the given batch.
    double loss_and_grad(const std::vector<std::vector<double>>& rows,
                         const std::vector<double>& targets,
                         const std::vector<std::size_t>& batch,
                         std::vector<double>& grad) const {
        const auto b = static_cast<Eigen::Index>(batch.size());
        const auto in = static_cast<Eigen::Index>(widths.front());
        Eigen::MatrixXd a(in, b);
        Eigen::VectorXd y(b);
        for (Eigen::Index k = 0; k < b; ++k) {
            const auto& row = rows[batch[static_cast<std::size_t>(k)]];
            for (Eigen::Index i = 0; i < in; ++i)
                a(i, k) = row[static_cast<std::size_t>(i)];
            y[k] = targets[batch[static_cast<std::size_t>(k)]];
        }

        // forward, keeping activations for the backward pass
        std::vector<Eigen::MatrixXd> acts;  // acts[l]: input to layer l
        acts.push_back(a);
        for (std::size_t l = 0; l < weights.size(); ++l) {
            Eigen::MatrixXd z =
                (weights[l] * acts.back()).colwise() + biases[l];
            if (l + 1 < weights.size()) z = z.cwiseMax(0.0);
            acts.push_back(std::move(z));
        }
        const Eigen::VectorXd pred = acts.back().row(0).transpose();
        const Eigen::VectorXd err = pred - y;
        const double loss = err.squaredNorm() / static_cast<double>(b);

        // backward
        std::vector<Eigen::MatrixXd> w_grad(weights.size());
        std::vector<Eigen::VectorXd> b_grad(weights.size());
        Eigen::MatrixXd delta =
            (2.0 / static_cast<double>(b)) * err.transpose();  // 1 x b
        for (std::size_t l = weights.size(); l-- > 0;) {
            w_grad[l] = delta * acts[l].transpose();
            b_grad[l] = delta.rowwise().sum();
            if (l > 0) {
                Eigen::MatrixXd back = weights[l].transpose() * delta;
                // relu derivative: pass gradient only where the activation fired
                delta = back.cwiseProduct(
                    (acts[l].array() > 0.0).cast<double>().matrix());
            }
        }

        grad.clear();
        grad.reserve(param_count());
        for (std::size_t l = 0; l < weights.size(); ++l) {
            const auto& wg = w_grad[l];
            for (Eigen::Index r = 0; r < wg.rows(); ++r)
                for (Eigen::Index c = 0; c < wg.cols(); ++c)
                    grad.push_back(wg(r, c));
            for (Eigen::Index r = 0; r < b_grad[l].size(); ++r)
                grad.push_back(b_grad[l][r]);
        }
        return loss;
    }

    /// One Nadam update on the flat parameter vector. Step count t is 1-based.
    static void nadam_step(std::vector<double>& params,
                           const std::vector<double>& grad,
                           std::vector<double>& m, std::vector<double>& v,
                           std::size_t t, const MlpConfig& cfg) {
        const double b1 = cfg.beta1, b2 = cfg.beta2;
        const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t));
        const double bc1_next = 1.0 - std::pow(b1, static_cast<double>(t + 1));
        const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
            v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
            const double m_hat = m[i] / bc1_next;
            const double v_hat = v[i] / bc2;
            const double nesterov = b1 * m_hat + (1.0 - b1) * grad[i] / bc1;
            params[i] -= cfg.learning_rate * nesterov /
                         (std::sqrt(v_hat) + cfg.eps);
        }
    }

    static Mlp fit(const std::vector<std::vector<double>>& rows,
                   const std::vector<double>& targets, const MlpConfig& cfg) {
        if (rows.empty()) throw ValidationError("mlp: empty training set");
        if (rows.size() != targets.size())
            throw ValidationError("mlp: row/target length mismatch");
        Mlp net = init(static_cast<int>(rows[0].size()), cfg);
        Rng rng(Rng::derive(cfg.seed, 1));  // batch order; init used the raw seed

        std::vector<double> params = net.get_params();
        std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
        std::vector<double> grad;
        std::vector<std::size_t> order(rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

        std::size_t step = 0;
        for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
            rng.shuffle(order);
            double sq_err_sum = 0.0;
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(cfg.batch_size)) {
                const std::size_t end = std::min(
                    order.size(), start + static_cast<std::size_t>(cfg.batch_size));
                const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                                     order.begin() + static_cast<std::ptrdiff_t>(end));
                net.set_params(params);
                const double loss = net.loss_and_grad(rows, targets, batch, grad);
                if (!std::isfinite(loss))
                    throw TrainingError("mlp: non-finite loss at epoch " +
                                        std::to_string(epoch));
                sq_err_sum += loss * static_cast<double>(batch.size());
                nadam_step(params, grad, m, v, ++step, cfg);
            }
            net.loss_curve.push_back(sq_err_sum / static_cast<double>(rows.size()));
        }
        net.set_params(params);
        return net;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["widths"] = widths;
        j["learning_rate"] = config.learning_rate;
        j["beta1"] = config.beta1;
        j["beta2"] = config.beta2;
        j["eps"] = config.eps;
        j["epochs"] = config.epochs;
        j["batch_size"] = config.batch_size;
        j["seed"] = config.seed;
        j["loss_curve"] = loss_curve;
        nlohmann::ordered_json layers = nlohmann::ordered_json::array();
        for (std::size_t l = 0; l < weights.size(); ++l) {
            nlohmann::ordered_json lj;
            std::vector<double> w;
            const auto& wm = weights[l];
            for (Eigen::Index r = 0; r < wm.rows(); ++r)
                for (Eigen::Index c = 0; c < wm.cols(); ++c) w.push_back(wm(r, c));
            lj["weights"] = std::move(w);
            std::vector<double> b(biases[l].data(),
                                  biases[l].data() + biases[l].size());
            lj["biases"] = std::move(b);
            layers.push_back(std::move(lj));
        }
        j["layers"] = std::move(layers);
        return j;
    }

    static Mlp from_json(const nlohmann::json& j) {
        Mlp net;
        net.widths = j.at("widths").get<std::vector<int>>();
        net.config.learning_rate = j.at("learning_rate").get<double>();
        net.config.beta1 = j.at("beta1").get<double>();
        net.config.beta2 = j.at("beta2").get<double>();
        net.config.eps = j.at("eps").get<double>();
        net.config.epochs = j.at("epochs").get<int>();
        net.config.batch_size = j.at("batch_size").get<int>();
        net.config.seed = j.at("seed").get<std::uint64_t>();
        net.loss_curve = j.at("loss_curve").get<std::vector<double>>();
        net.config.hidden.assign(net.widths.begin() + 1, net.widths.end() - 1);
        const auto& layers = j.at("layers");
        for (std::size_t l = 0; l + 1 < net.widths.size(); ++l) {
            const auto out = static_cast<Eigen::Index>(net.widths[l + 1]);
            const auto in = static_cast<Eigen::Index>(net.widths[l]);
            const auto w = layers.at(l).at("weights").get<std::vector<double>>();
            const auto b = layers.at(l).at("biases").get<std::vector<double>>();
            Eigen::MatrixXd wm(out, in);
            std::size_t i = 0;
            for (Eigen::Index r = 0; r < out; ++r)
                for (Eigen::Index c = 0; c < in; ++c) wm(r, c) = w.at(i++);
            Eigen::VectorXd bv(out);
            for (Eigen::Index r = 0; r < out; ++r)
                bv[r] = b.at(static_cast<std::size_t>(r));
            net.weights.push_back(std::move(wm));
            net.biases.push_back(std::move(bv));
        }
        return net;
    }
};

}  // namespace gpncast
