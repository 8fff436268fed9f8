#include "homog/cells.hpp"

#include <stdexcept>

namespace homog {

Environment checkerboard4() {
    return Environment::from_edge_function(Geometry({4, 4}, Topology::Torus), {1.0, 100.0},
                                           [](std::span<const int> c, int) {
                                               const int parity = ((c[0] + c[1]) % 2 + 2) % 2;
                                               return parity == 0 ? 100.0 : 1.0;
                                           });
}

std::vector<std::string> builtin_names() { return {"checkerboard4"}; }

Environment builtin_environment(const std::string& name) {
    if (name == "checkerboard4") return checkerboard4();
    throw std::invalid_argument("unknown built-in environment '" + name + "'");
}

Environment resolve_environment(const std::string& source) {
    const std::string prefix = "builtin:";
    if (source.rfind(prefix, 0) == 0) return builtin_environment(source.substr(prefix.size()));
    return load_environment(source);
}

}  // namespace homog
