#include "nmfwsd/interleaved.hpp"

namespace nmfwsd {

void InterleavedConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (outer_iters < 1) throw ConfigError("outer_iters must be >= 1");
  block_config().validate();
}

}  // namespace nmfwsd
