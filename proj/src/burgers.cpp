#include "sdal/burgers.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sdal/errors.hpp"

namespace sdal {

void BurgersConfig::validate() const {
    if (nx < 16) throw RangeError("Burgers grid needs at least 16 points");
    if (!(x_hi > x_lo)) throw RangeError("Burgers domain is empty");
    if (!(final_time > 0.0)) throw RangeError("final time must be positive");
    if (nt < 1) throw RangeError("output step count must be positive");
}

namespace {

Eigen::VectorXd initial_state(const BurgersConfig& cfg) {
    Eigen::VectorXd u(cfg.nx);
    for (int i = 0; i < cfg.nx; ++i) {
        const double x_hat = static_cast<double>(i) / cfg.nx; // periodic, no repeated endpoint
        switch (cfg.ic) {
        case BurgersConfig::InitialCondition::SineMean:
            u[i] = 0.5 + std::sin(2.0 * std::numbers::pi * x_hat);
            break;
        case BurgersConfig::InitialCondition::Constant:
            u[i] = 0.5;
            break;
        }
    }
    return u;
}

// Conservative update: u_i -= dt/dx (F_{i+1/2} - F_{i-1/2}) with the local
// Lax-Friedrichs flux for f(u) = u^2/2, plus central diffusion. Interface
// fluxes telescope over the periodic ring, so mass is conserved to
// round-off.
void step(Eigen::VectorXd& u, double dt, double dx, double nu, Eigen::VectorXd& flux,
          Eigen::VectorXd& next) {
    const int n = static_cast<int>(u.size());
    for (int i = 0; i < n; ++i) {
        const int ip = (i + 1) % n;
        const double fl = 0.5 * u[i] * u[i];
        const double fr = 0.5 * u[ip] * u[ip];
        const double a = std::max(std::abs(u[i]), std::abs(u[ip]));
        flux[i] = 0.5 * (fl + fr) - 0.5 * a * (u[ip] - u[i]);
    }
    const double inv_dx = 1.0 / dx;
    const double diff = nu / (dx * dx);
    for (int i = 0; i < n; ++i) {
        const int im = (i - 1 + n) % n;
        const int ip = (i + 1) % n;
        next[i] = u[i] - dt * inv_dx * (flux[i] - flux[im]) +
                  dt * diff * (u[ip] - 2.0 * u[i] + u[im]);
    }
    u.swap(next);
}

} // namespace

SnapshotMatrix solve_burgers(const BurgersConfig& cfg, double nu) {
    cfg.validate();
    if (!(nu > 0.0)) {
        throw ParameterError("viscosity must be positive, got " + std::to_string(nu));
    }

    const double dx = (cfg.x_hi - cfg.x_lo) / cfg.nx;
    const double out_dt = cfg.final_time / cfg.nt;

    SnapshotMatrix snap;
    snap.parameter = Eigen::VectorXd::Constant(1, nu);
    snap.time_grid.resize(cfg.nt + 1);
    for (int j = 0; j <= cfg.nt; ++j) snap.time_grid[j] = j * out_dt;
    snap.values.resize(cfg.nx, cfg.nt + 1);

    Eigen::VectorXd u = initial_state(cfg);
    Eigen::VectorXd flux(cfg.nx), next(cfg.nx);
    snap.values.col(0) = u;

    double t = 0.0;
    double t_prev = 0.0;
    Eigen::VectorXd u_prev = u;
    int out_idx = 1;

    while (out_idx <= cfg.nt) {
        const double umax = u.cwiseAbs().maxCoeff();
        const double dt_adv = umax > 0.0 ? dx / umax : std::numeric_limits<double>::infinity();
        const double dt_diff = dx * dx / (2.0 * nu);
        const double dt = 0.4 * std::min(dt_adv, dt_diff);

        t_prev = t;
        u_prev = u;
        step(u, dt, dx, nu, flux, next);
        t += dt;

        // Nearest-internal-step snapping onto the output grid.
        while (out_idx <= cfg.nt && snap.time_grid[out_idx] <= t) {
            const double target = snap.time_grid[out_idx];
            snap.values.col(out_idx) = (target - t_prev <= t - target) ? u_prev : u;
            ++out_idx;
        }
    }
    return snap;
}

SnapshotMatrix BurgersFom::query(const ParameterPoint& mu) {
    if (mu.size() != 1) {
        throw ParameterError("Burgers FOM expects a 1-D parameter, got dimension " +
                             std::to_string(mu.size()));
    }
    const double nu = log10_param_ ? std::pow(10.0, mu[0]) : mu[0];
    SnapshotMatrix snap = solve_burgers(config_, nu);
    snap.parameter = mu; // keep the query coordinate, not the transformed value
    return snap;
}

} // namespace sdal
