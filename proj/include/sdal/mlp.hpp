#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace sdal {

/// Small fully-connected network with tanh hidden layers and a linear
/// output, trained full-batch with Adam. The step size starts at `lr0` and
/// is halved every `halve_every` epochs. Deterministic for a fixed seed.
class Mlp {
public:
    struct Config {
        std::vector<int> hidden{64, 64};
        int epochs = 2000;
        double lr0 = 0.01;
        int halve_every = 1000;
        std::uint64_t seed = 0;
    };

    static Mlp train(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                     const Config& config);

    Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;

    Eigen::Index input_dim() const { return input_dim_; }
    Eigen::Index output_dim() const { return output_dim_; }

    void save(std::ostream& os) const;
    static Mlp load(std::istream& is);

private:
    Mlp() = default;

    std::vector<Eigen::MatrixXd> weights_;
    std::vector<Eigen::VectorXd> biases_;
    Eigen::Index input_dim_ = 0;
    Eigen::Index output_dim_ = 0;
};

} // namespace sdal
