#include "sdal/mlp.hpp"

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>

#include "sdal/errors.hpp"

namespace sdal {

namespace {

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("truncated MLP section");
    return v;
}

} // namespace

Mlp Mlp::train(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
               const Config& config) {
    if (inputs.rows() < 2) throw InsufficientDataError("MLP training needs at least 2 samples");
    if (inputs.rows() != targets.rows()) {
        throw DimensionError("MLP sample count mismatch between inputs and targets");
    }
    if (config.epochs < 1 || config.halve_every < 1 || !(config.lr0 > 0.0)) {
        throw RangeError("invalid MLP training schedule");
    }

    Mlp net;
    net.input_dim_ = inputs.cols();
    net.output_dim_ = targets.cols();

    std::vector<Eigen::Index> sizes;
    sizes.push_back(net.input_dim_);
    for (int h : config.hidden) {
        if (h < 1) throw RangeError("hidden layer width must be positive");
        sizes.push_back(h);
    }
    sizes.push_back(net.output_dim_);

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t n_layers = sizes.size() - 1;
    net.weights_.resize(n_layers);
    net.biases_.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const double scale = std::sqrt(2.0 / static_cast<double>(sizes[l] + sizes[l + 1]));
        net.weights_[l].resize(sizes[l + 1], sizes[l]);
        for (Eigen::Index i = 0; i < net.weights_[l].size(); ++i) {
            net.weights_[l].data()[i] = scale * gauss(rng);
        }
        net.biases_[l] = Eigen::VectorXd::Zero(sizes[l + 1]);
    }

    // Adam state, one slot per weight matrix and bias vector.
    std::vector<Eigen::MatrixXd> mw(n_layers), vw(n_layers);
    std::vector<Eigen::VectorXd> mb(n_layers), vb(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        mw[l] = Eigen::MatrixXd::Zero(net.weights_[l].rows(), net.weights_[l].cols());
        vw[l] = mw[l];
        mb[l] = Eigen::VectorXd::Zero(net.biases_[l].size());
        vb[l] = mb[l];
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    const double inv_samples = 1.0 / static_cast<double>(inputs.rows());

    std::vector<Eigen::MatrixXd> act(n_layers + 1);
    act[0] = inputs.transpose(); // columns = samples
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        // Forward pass.
        for (std::size_t l = 0; l < n_layers; ++l) {
            Eigen::MatrixXd z =
                (net.weights_[l] * act[l]).colwise() + net.biases_[l];
            act[l + 1] = (l + 1 == n_layers) ? z : z.array().tanh().matrix();
        }
        // Backward pass (mean squared error).
        Eigen::MatrixXd delta = 2.0 * inv_samples * (act[n_layers] - targets.transpose());
        const double lr = config.lr0 * std::pow(0.5, (epoch - 1) / config.halve_every);
        for (std::size_t li = n_layers; li-- > 0;) {
            const Eigen::MatrixXd grad_w = delta * act[li].transpose();
            const Eigen::VectorXd grad_b = delta.rowwise().sum();
            if (li > 0) {
                delta = (net.weights_[li].transpose() * delta).array() *
                        (1.0 - act[li].array().square());
            }
            const double corr1 = 1.0 - std::pow(beta1, epoch);
            const double corr2 = 1.0 - std::pow(beta2, epoch);
            mw[li] = beta1 * mw[li] + (1.0 - beta1) * grad_w;
            vw[li] = beta2 * vw[li].array().matrix() + (1.0 - beta2) * grad_w.cwiseProduct(grad_w);
            net.weights_[li].array() -=
                lr * (mw[li].array() / corr1) / ((vw[li].array() / corr2).sqrt() + eps);
            mb[li] = beta1 * mb[li] + (1.0 - beta1) * grad_b;
            vb[li] = beta2 * vb[li] + (1.0 - beta2) * grad_b.cwiseProduct(grad_b);
            net.biases_[li].array() -=
                lr * (mb[li].array() / corr1) / ((vb[li].array() / corr2).sqrt() + eps);
        }
    }
    return net;
}

Eigen::VectorXd Mlp::evaluate(const Eigen::VectorXd& x) const {
    if (x.size() != input_dim_) {
        throw DimensionError("MLP input dimension mismatch");
    }
    Eigen::VectorXd a = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        Eigen::VectorXd z = weights_[l] * a + biases_[l];
        a = (l + 1 == weights_.size()) ? z : z.array().tanh().matrix();
    }
    return a;
}

void Mlp::save(std::ostream& os) const {
    put<std::uint64_t>(os, static_cast<std::uint64_t>(weights_.size()));
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        put<std::uint64_t>(os, static_cast<std::uint64_t>(weights_[l].rows()));
        put<std::uint64_t>(os, static_cast<std::uint64_t>(weights_[l].cols()));
        os.write(reinterpret_cast<const char*>(weights_[l].data()),
                 static_cast<std::streamsize>(sizeof(double)) * weights_[l].size());
        os.write(reinterpret_cast<const char*>(biases_[l].data()),
                 static_cast<std::streamsize>(sizeof(double)) * biases_[l].size());
    }
    if (!os) throw IoError("failed to write MLP section");
}

Mlp Mlp::load(std::istream& is) {
    Mlp net;
    const auto n_layers = get<std::uint64_t>(is);
    net.weights_.resize(n_layers);
    net.biases_.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const auto rows = static_cast<Eigen::Index>(get<std::uint64_t>(is));
        const auto cols = static_cast<Eigen::Index>(get<std::uint64_t>(is));
        net.weights_[l].resize(rows, cols);
        is.read(reinterpret_cast<char*>(net.weights_[l].data()),
                static_cast<std::streamsize>(sizeof(double)) * rows * cols);
        net.biases_[l].resize(rows);
        is.read(reinterpret_cast<char*>(net.biases_[l].data()),
                static_cast<std::streamsize>(sizeof(double)) * rows);
    }
    if (!is || n_layers == 0) throw IoError("truncated MLP section");
    net.input_dim_ = net.weights_.front().cols();
    net.output_dim_ = net.weights_.back().rows();
    return net;
}

} // namespace sdal
