#pragma once

// Built-in periodic reference cells, addressed on the command line as
// `builtin:<name>`.

#include "homog/lattice.hpp"

#include <string>
#include <vector>

namespace homog {

// 4x4 two-phase torus: w(x, x+e_i) = 100 when x_1 + x_2 is even, 1 otherwise,
// for both axes. A_hom = 10601/404 * Id.
Environment checkerboard4();

std::vector<std::string> builtin_names();

// `name` without the "builtin:" prefix; throws std::invalid_argument if unknown.
Environment builtin_environment(const std::string& name);

// Resolves "builtin:<name>" or a path to an environment file.
Environment resolve_environment(const std::string& source);

}  // namespace homog
