#include "homog/lattice.hpp"

#include "homog/numerics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace homog {

std::string to_string(Topology t) { return t == Topology::Torus ? "torus" : "box"; }

Topology parse_topology(const std::string& s) {
    if (s == "torus") return Topology::Torus;
    if (s == "box") return Topology::Box;
    throw std::invalid_argument("unknown topology '" + s + "' (expected torus or box)");
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

Geometry::Geometry(std::vector<int> extents, Topology topology)
    : extents_(std::move(extents)), topology_(topology) {
    if (extents_.empty()) throw GeometryError("geometry needs at least one dimension");
    strides_.assign(extents_.size(), 1);
    for (int axis = dim() - 1; axis >= 0; --axis) {
        if (extents_[axis] <= 0) throw GeometryError("geometry extents must be positive");
        strides_[axis] = size_;
        size_ *= static_cast<std::size_t>(extents_[axis]);
    }
}

Geometry Geometry::centered_box(int dim, int side) {
    if (dim < 1 || side < 1) throw GeometryError("centered_box: dim and side must be positive");
    const int r = side / 2;
    return Geometry(std::vector<int>(static_cast<std::size_t>(dim), 2 * r + 1), Topology::Box);
}

std::vector<int> Geometry::coordinates(std::size_t site) const {
    std::vector<int> c(extents_.size());
    for (int axis = 0; axis < dim(); ++axis) c[axis] = coordinate(site, axis);
    return c;
}

std::size_t Geometry::site_of(std::span<const int> coords) const {
    if (static_cast<int>(coords.size()) != dim()) throw GeometryError("site_of: wrong dimension");
    std::size_t site = 0;
    for (int axis = 0; axis < dim(); ++axis) {
        int c = coords[axis];
        if (topology_ == Topology::Torus) {
            c %= extents_[axis];
            if (c < 0) c += extents_[axis];
        } else if (c < 0 || c >= extents_[axis]) {
            return npos;
        }
        site += static_cast<std::size_t>(c) * strides_[axis];
    }
    return site;
}

std::size_t Geometry::forward(std::size_t site, int axis) const {
    const int c = coordinate(site, axis);
    if (c + 1 < extents_[axis]) return site + strides_[axis];
    if (topology_ == Topology::Box) return npos;
    return site - static_cast<std::size_t>(c) * strides_[axis];
}

std::size_t Geometry::backward(std::size_t site, int axis) const {
    const int c = coordinate(site, axis);
    if (c > 0) return site - strides_[axis];
    if (topology_ == Topology::Box) return npos;
    return site + static_cast<std::size_t>(extents_[axis] - 1) * strides_[axis];
}

void require_same_geometry(const Geometry& a, const Geometry& b, const char* what) {
    if (!(a == b)) throw GeometryError(std::string(what) + ": geometry mismatch");
}

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------

LatticeField::LatticeField(Geometry geometry, double value)
    : geometry_(std::move(geometry)), values_(geometry_.size(), value) {}

LatticeField::LatticeField(Geometry geometry, std::vector<double> values)
    : geometry_(std::move(geometry)), values_(std::move(values)) {
    if (values_.size() != geometry_.size())
        throw GeometryError("LatticeField: value count does not match geometry");
}

bool LatticeField::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

VectorField::VectorField(Geometry geometry, double value)
    : geometry_(std::move(geometry)),
      values_(geometry_.size() * static_cast<std::size_t>(geometry_.dim()), value) {}

Direction Direction::unit(int dim, int axis) {
    if (axis < 0 || axis >= dim) throw std::invalid_argument("Direction::unit: axis out of range");
    Direction d{std::vector<double>(static_cast<std::size_t>(dim), 0.0)};
    d.xi[axis] = 1.0;
    return d;
}

double Direction::norm() const {
    double s = 0;
    for (double v : xi) s += v * v;
    return std::sqrt(s);
}

Direction Direction::negated() const {
    Direction d = *this;
    for (double& v : d.xi) v = -v;
    return d;
}

std::string Direction::to_string() const {
    std::string out;
    char buf[40];
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (i) out += ';';
        out.append(buf, std::to_chars(buf, buf + sizeof buf, xi[i]).ptr);
    }
    return out;
}

void require_unit_direction(const Direction& xi, int dim) {
    if (xi.dim() != dim) throw std::invalid_argument("direction dimension does not match geometry");
    if (std::abs(xi.norm() - 1.0) > 1e-12) throw std::invalid_argument("direction must have |xi| = 1");
}

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

Environment::Environment(Geometry geometry, std::vector<double> forward, ConductanceBounds bounds,
                         std::vector<double> inflow)
    : geometry_(std::move(geometry)), forward_(std::move(forward)), bounds_(bounds) {
    const std::size_t n = geometry_.size() * static_cast<std::size_t>(geometry_.dim());
    if (forward_.size() != n) throw GeometryError("Environment: conductance count does not match geometry");
    if (geometry_.topology() == Topology::Box && inflow.size() != n)
        throw GeometryError("Environment: a box needs inflow conductances for its lower faces");
    build_backward(inflow);
    validate();
}

void Environment::build_backward(std::span<const double> inflow) {
    const int d = dim();
    backward_.assign(forward_.size(), 0.0);
    for (std::size_t site = 0; site < geometry_.size(); ++site) {
        for (int axis = 0; axis < d; ++axis) {
            const std::size_t nb = geometry_.backward(site, axis);
            const std::size_t idx = site * static_cast<std::size_t>(d) + axis;
            backward_[idx] = nb == Geometry::npos ? inflow[idx] : forward(nb, axis);
        }
    }
}

void Environment::validate() const {
    if (!(bounds_.alpha > 0.0) || !(bounds_.alpha <= bounds_.beta) || !std::isfinite(bounds_.beta))
        throw std::invalid_argument("Environment: bounds must satisfy 0 < alpha <= beta");
    auto check = [&](double w) {
        if (!(w >= bounds_.alpha && w <= bounds_.beta))
            throw std::invalid_argument("Environment: conductance outside [alpha, beta]");
    };
    for (double w : forward_) check(w);
    for (double w : backward_) check(w);
}

Environment Environment::from_edge_function(Geometry geometry, ConductanceBounds bounds,
                                            const EdgeFunction& edge) {
    const int d = geometry.dim();
    const std::size_t n = geometry.size() * static_cast<std::size_t>(d);
    std::vector<double> fwd(n), inflow;
    const bool box = geometry.topology() == Topology::Box;
    if (box) inflow.assign(n, 0.0);
    std::vector<int> c(static_cast<std::size_t>(d));
    for (std::size_t site = 0; site < geometry.size(); ++site) {
        for (int axis = 0; axis < d; ++axis) c[axis] = geometry.centered_coordinate(site, axis);
        for (int axis = 0; axis < d; ++axis) {
            fwd[site * d + axis] = edge(c, axis);
            if (box && geometry.coordinate(site, axis) == 0) {
                --c[axis];
                inflow[site * d + axis] = edge(c, axis);
                ++c[axis];
            }
        }
    }
    return Environment(std::move(geometry), std::move(fwd), bounds, std::move(inflow));
}

Environment Environment::homogeneous(Geometry geometry, double conductance) {
    return from_edge_function(std::move(geometry), {conductance, conductance},
                              [conductance](std::span<const int>, int) { return conductance; });
}

Environment Environment::restrict_to_box(int side) const {
    if (geometry_.topology() != Topology::Torus)
        throw std::invalid_argument("restrict_to_box: source environment must be a torus");
    const Geometry box = Geometry::centered_box(dim(), side);
    std::vector<int> cell(static_cast<std::size_t>(dim()));
    return from_edge_function(box, bounds_, [&](std::span<const int> c, int axis) {
        for (int a = 0; a < dim(); ++a) cell[a] = c[a] + geometry_.extent(a) / 2;
        return forward(geometry_.site_of(cell), axis);
    });
}

Environment Environment::tile_to_torus(int side) const {
    if (geometry_.topology() != Topology::Torus)
        throw std::invalid_argument("tile_to_torus: source environment must be a torus");
    for (int a = 0; a < dim(); ++a)
        if (side < 1 || side % geometry_.extent(a) != 0)
            throw std::invalid_argument("tile_to_torus: side must be a multiple of the cell extents");
    const Geometry big(std::vector<int>(static_cast<std::size_t>(dim()), side), Topology::Torus);
    std::vector<int> cell(static_cast<std::size_t>(dim()));
    return from_edge_function(big, bounds_, [&](std::span<const int> c, int axis) {
        for (int a = 0; a < dim(); ++a) cell[a] = c[a] + geometry_.extent(a) / 2;
        return forward(geometry_.site_of(cell), axis);
    });
}

// ---------------------------------------------------------------------------
// Discrete calculus
// ---------------------------------------------------------------------------

VectorField gradient(const LatticeField& u) {
    const Geometry& g = u.geometry();
    VectorField grad(g);
    for (std::size_t site = 0; site < g.size(); ++site) {
        for (int axis = 0; axis < g.dim(); ++axis) {
            const std::size_t nb = g.forward(site, axis);
            grad(site, axis) = (nb == Geometry::npos ? 0.0 : u[nb]) - u[site];
        }
    }
    return grad;
}

LatticeField divergence_star(const VectorField& v) {
    const Geometry& g = v.geometry();
    LatticeField out(g);
    for (std::size_t site = 0; site < g.size(); ++site) {
        double s = 0.0;
        for (int axis = 0; axis < g.dim(); ++axis) {
            const std::size_t nb = g.backward(site, axis);
            s += v(site, axis) - (nb == Geometry::npos ? 0.0 : v(nb, axis));
        }
        out[site] = s;
    }
    return out;
}

LatticeField apply_operator(const Environment& env, double mu, const LatticeField& u) {
    if (mu < 0.0) throw std::invalid_argument("apply_operator: mu must be nonnegative");
    require_same_geometry(env.geometry(), u.geometry(), "apply_operator");
    const Geometry& g = env.geometry();
    LatticeField out(g);
    for (std::size_t site = 0; site < g.size(); ++site) {
        const double ux = u[site];
        double s = mu * ux;
        for (int axis = 0; axis < g.dim(); ++axis) {
            const std::size_t f = g.forward(site, axis);
            const std::size_t b = g.backward(site, axis);
            s += env.forward(site, axis) * (ux - (f == Geometry::npos ? 0.0 : u[f]));
            s += env.backward(site, axis) * (ux - (b == Geometry::npos ? 0.0 : u[b]));
        }
        out[site] = s;
    }
    return out;
}

LatticeField local_drift(const Environment& env, const Direction& xi) {
    if (xi.dim() != env.dim()) throw std::invalid_argument("local_drift: direction dimension mismatch");
    const Geometry& g = env.geometry();
    LatticeField out(g);
    for (std::size_t site = 0; site < g.size(); ++site) {
        double s = 0.0;
        for (int axis = 0; axis < g.dim(); ++axis)
            s += xi.xi[axis] * (env.forward(site, axis) - env.backward(site, axis));
        out[site] = s;
    }
    return out;
}

VectorField flux(const Environment& env, const Direction& xi) {
    if (xi.dim() != env.dim()) throw std::invalid_argument("flux: direction dimension mismatch");
    VectorField v(env.geometry());
    for (std::size_t site = 0; site < env.size(); ++site)
        for (int axis = 0; axis < env.dim(); ++axis) v(site, axis) = env.forward(site, axis) * xi.xi[axis];
    return v;
}

void require_normalized_mask(const LatticeField& mask) {
    CompensatedSum s;
    for (double m : mask.values()) {
        if (!(m >= 0.0)) throw std::invalid_argument("mask must be nonnegative");
        s += m;
    }
    if (std::abs(s.value() - 1.0) > 1e-12) throw std::invalid_argument("mask is not normalized (sum != 1)");
}

double energy_average(const Environment& env, const Direction& xi, const LatticeField& a,
                      const LatticeField& b, const LatticeField& mask) {
    require_same_geometry(env.geometry(), a.geometry(), "energy_average");
    require_same_geometry(env.geometry(), b.geometry(), "energy_average");
    require_same_geometry(env.geometry(), mask.geometry(), "energy_average");
    if (xi.dim() != env.dim()) throw std::invalid_argument("energy_average: direction dimension mismatch");
    require_normalized_mask(mask);
    const Geometry& g = env.geometry();
    CompensatedSum total;
    for (std::size_t site = 0; site < g.size(); ++site) {
        const double m = mask[site];
        if (m == 0.0) continue;
        double s = 0.0;
        for (int axis = 0; axis < g.dim(); ++axis) {
            const std::size_t f = g.forward(site, axis);
            const double ga = (f == Geometry::npos ? 0.0 : a[f]) - a[site];
            const double gb = (f == Geometry::npos ? 0.0 : b[f]) - b[site];
            s += env.forward(site, axis) * (xi.xi[axis] + ga) * (xi.xi[axis] + gb);
        }
        total += m * s;
    }
    return total.value();
}

double product_average(const LatticeField& a, const LatticeField& b, const LatticeField& mask) {
    require_same_geometry(a.geometry(), b.geometry(), "product_average");
    require_same_geometry(a.geometry(), mask.geometry(), "product_average");
    require_normalized_mask(mask);
    CompensatedSum total;
    for (std::size_t site = 0; site < a.size(); ++site)
        if (mask[site] != 0.0) total += mask[site] * a[site] * b[site];
    return total.value();
}

double dot(const LatticeField& a, const LatticeField& b) {
    require_same_geometry(a.geometry(), b.geometry(), "dot");
    CompensatedSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s.value();
}

double norm2(const LatticeField& a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// Text I/O
// ---------------------------------------------------------------------------

namespace {

void put_double(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

}  // namespace

void write_environment(std::ostream& out, const Environment& env) {
    const Geometry& g = env.geometry();
    out << g.dim();
    for (int n : g.extents()) out << ' ' << n;
    out << ' ' << to_string(g.topology()) << ' ';
    put_double(out, env.bounds().alpha);
    out << ' ';
    put_double(out, env.bounds().beta);
    out << '\n';
    const bool box = g.topology() == Topology::Box;
    for (std::size_t site = 0; site < g.size(); ++site) {
        for (int axis = 0; axis < g.dim(); ++axis) {
            if (axis) out << ' ';
            put_double(out, env.forward(site, axis));
        }
        if (box)
            for (int axis = 0; axis < g.dim(); ++axis) {
                out << ' ';
                put_double(out, env.backward(site, axis));
            }
        out << '\n';
    }
}

Environment read_environment(std::istream& in) {
    int d = 0;
    if (!(in >> d) || d < 1) throw std::runtime_error("environment file: bad dimension");
    std::vector<int> extents(static_cast<std::size_t>(d));
    for (int& n : extents)
        if (!(in >> n)) throw std::runtime_error("environment file: bad extents");
    std::string topo;
    ConductanceBounds bounds;
    if (!(in >> topo >> bounds.alpha >> bounds.beta)) throw std::runtime_error("environment file: bad header");
    Geometry g(extents, parse_topology(topo));
    const bool box = g.topology() == Topology::Box;
    const std::size_t n = g.size() * static_cast<std::size_t>(d);
    std::vector<double> fwd(n), inflow(box ? n : 0);
    for (std::size_t site = 0; site < g.size(); ++site) {
        for (int axis = 0; axis < d; ++axis)
            if (!(in >> fwd[site * d + axis])) throw std::runtime_error("environment file: truncated data");
        if (box)
            for (int axis = 0; axis < d; ++axis)
                if (!(in >> inflow[site * d + axis])) throw std::runtime_error("environment file: truncated data");
    }
    if (in >> std::ws; !in.eof()) throw std::runtime_error("environment file: trailing data");
    Environment env(std::move(g), std::move(fwd), bounds, inflow);
    if (box) {
        // Interior backward entries are redundant; they must agree with the forward ones.
        for (std::size_t i = 0; i < n; ++i)
            if (env.backward_data()[i] != inflow[i])
                throw std::runtime_error("environment file: inconsistent backward conductances");
    }
    return env;
}

void save_environment(const std::string& path, const Environment& env) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_environment(out, env);
}

Environment load_environment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_environment(in);
}

}  // namespace homog
