#pragma once

#include "sdal/fom.hpp"
#include "sdal/pod.hpp"

namespace sdal {

/// Desk-scale parametric full-order model: 1-D viscous Burgers on a
/// periodic domain, viscosity as the free parameter. Conservative
/// local Lax-Friedrichs flux for the advection term, central second
/// differences for diffusion, explicit time stepping with an internal
/// CFL-bounded step; outputs are snapped onto the uniform request grid.
struct BurgersConfig {
    int nx = 256;
    double x_lo = 0.0;
    double x_hi = 1.0;
    double final_time = 1.0;
    int nt = 100; // output steps; the snapshot has nt+1 columns

    enum class InitialCondition {
        SineMean,  // u0 = 0.5 + sin(2*pi*x_normalized)
        Constant,  // u0 = 0.5
    };
    InitialCondition ic = InitialCondition::SineMean;

    void validate() const;
};

/// Solves for viscosity nu > 0 and returns the shared snapshot layout
/// (parameter set to [nu]). Deterministic for a fixed config.
SnapshotMatrix solve_burgers(const BurgersConfig& config, double nu);

/// FomOracle adapter. With log10_param the query coordinate is log10(nu),
/// matching log-spaced parameter designs; the stored snapshot parameter is
/// the raw query coordinate either way.
class BurgersFom final : public FomOracle {
public:
    explicit BurgersFom(BurgersConfig config, bool log10_param = false)
        : config_(config), log10_param_(log10_param) {
        config_.validate();
    }

    SnapshotMatrix query(const ParameterPoint& mu) override;

    const BurgersConfig& config() const { return config_; }

private:
    BurgersConfig config_;
    bool log10_param_;
};

} // namespace sdal
