#include "kgc/sim_config.hpp"

namespace kgc {

SimConfig& SimConfig::validate() {
    constants.validate();
    if (lattice.dim() < 1)
        throw ConfigError("simulation lattice is not initialized");
    if (signature.dim() != lattice.dim())
        throw ConfigError("metric signature dimension does not match the lattice");
    if (!(cfl > 0.0) || cfl > 0.5)
        throw ConfigError("cfl factor must lie in (0, 0.5], got " + std::to_string(cfl));
    if (!(dt > 0.0))
        throw ConfigError("time step dt must be positive");
    if (dt > cfl_bound())
        throw CFLViolation(dt, cfl_bound());
    if (snapshot_every < 1)
        throw ConfigError("snapshot cadence must be >= 1");
    if (!(rho_floor > 0.0) || rho_floor >= 1.0)
        throw ConfigError("rho_floor must lie in (0, 1)");
    if (!(jacobian_floor > 0.0))
        throw ConfigError("jacobian_floor must be positive");
    if (!(velocity_floor > 0.0) || velocity_floor >= 1.0)
        throw ConfigError("velocity_floor must lie in (0, 1)");
    if (!(tau_max_alphas > 0.0))
        throw ConfigError("tau_max_alphas must be positive");
    if (!(window > 0.0))
        throw ConfigError("window factor must be positive");
    return *this;
}

} // namespace kgc
