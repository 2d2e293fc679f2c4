#include "nmfwsd/nmf.hpp"

#include <cmath>

namespace nmfwsd {

std::string to_string(Objective objective) {
  return objective == Objective::KL ? "kl" : "frobenius";
}

Objective parse_objective(const std::string& name) {
  if (name == "kl" || name == "KL") return Objective::KL;
  if (name == "frobenius" || name == "Frobenius") return Objective::Frobenius;
  throw ConfigError("unknown objective '" + name + "' (expected kl|frobenius)");
}

void NmfConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(tol >= 0)) throw ConfigError("tol must be >= 0");
  if (!(epsilon > 0) || !std::isfinite(epsilon))
    throw ConfigError("epsilon must be a positive finite number");
}

}  // namespace nmfwsd
