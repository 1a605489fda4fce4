#pragma once

#include <string>

#include "oplab/grid.hpp"

namespace oplab {

/// CSV layout: header line "nx,ny,hx,hy,ox,oy", one line with those six
/// numbers, then ny rows of nx comma-separated values (row-major).
std::string grid_to_csv(const GridFunction& u);
GridFunction grid_from_csv(const std::string& text);

/// JSON envelope {"domain":{"origin":[..],"extent":[..],"n":[..]},"values":[..]}
/// with every number printed to 17 significant digits; round-trip is bit-exact.
std::string grid_to_json(const GridFunction& u);
GridFunction grid_from_json(const std::string& text);

} // namespace oplab
