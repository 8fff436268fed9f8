#pragma once

// Lattice geometry, conductance environments, scalar/vector fields and the
// discrete calculus of the operator -div* A grad on Z^d boxes and tori.
//
// Sites are ordered row-major with the last coordinate fastest. Every site x
// carries d forward conductances w(x, x+e_i). Coordinates are also exposed in
// "centered" form, c_i = x_i - floor(N_i/2), so that a box of odd side
// 2*r+1 is the lattice cube {-r,...,r}^d.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace homog {

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Topology { Torus, Box };

std::string to_string(Topology t);
Topology parse_topology(const std::string& s);

class Geometry {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    Geometry(std::vector<int> extents, Topology topology);

    // Side-R cube centered at the origin: {-floor(R/2),...,floor(R/2)}^d.
    static Geometry centered_box(int dim, int side);

    int dim() const noexcept { return static_cast<int>(extents_.size()); }
    std::span<const int> extents() const noexcept { return extents_; }
    int extent(int axis) const { return extents_.at(axis); }
    Topology topology() const noexcept { return topology_; }
    std::size_t size() const noexcept { return size_; }
    std::size_t stride(int axis) const { return strides_.at(axis); }

    int coordinate(std::size_t site, int axis) const {
        return static_cast<int>((site / strides_[axis]) % static_cast<std::size_t>(extents_[axis]));
    }
    int centered_coordinate(std::size_t site, int axis) const {
        return coordinate(site, axis) - extents_[axis] / 2;
    }
    std::vector<int> coordinates(std::size_t site) const;
    std::size_t site_of(std::span<const int> coords) const;

    // Neighbor x+e_axis / x-e_axis; npos when it leaves a box.
    std::size_t forward(std::size_t site, int axis) const;
    std::size_t backward(std::size_t site, int axis) const;

    bool operator==(const Geometry& other) const = default;

private:
    std::vector<int> extents_;
    std::vector<std::size_t> strides_;
    Topology topology_;
    std::size_t size_ = 1;
};

void require_same_geometry(const Geometry& a, const Geometry& b, const char* what);

class LatticeField {
public:
    explicit LatticeField(Geometry geometry, double value = 0.0);
    LatticeField(Geometry geometry, std::vector<double> values);

    const Geometry& geometry() const noexcept { return geometry_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t site) const { return values_[site]; }
    double& operator[](std::size_t site) { return values_[site]; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool all_finite() const;

private:
    Geometry geometry_;
    std::vector<double> values_;
};

// d components per site, component i of site x at index x*d + i.
class VectorField {
public:
    explicit VectorField(Geometry geometry, double value = 0.0);

    const Geometry& geometry() const noexcept { return geometry_; }
    double operator()(std::size_t site, int axis) const {
        return values_[site * static_cast<std::size_t>(geometry_.dim()) + axis];
    }
    double& operator()(std::size_t site, int axis) {
        return values_[site * static_cast<std::size_t>(geometry_.dim()) + axis];
    }
    std::span<const double> values() const noexcept { return values_; }

private:
    Geometry geometry_;
    std::vector<double> values_;
};

struct Direction {
    std::vector<double> xi;

    static Direction unit(int dim, int axis);
    int dim() const noexcept { return static_cast<int>(xi.size()); }
    double norm() const;
    Direction negated() const;
    std::string to_string() const;  // components joined by ';'
};

// Throws std::invalid_argument unless |xi| = 1 and dim matches.
void require_unit_direction(const Direction& xi, int dim);

struct ConductanceBounds {
    double alpha = 1.0;
    double beta = 1.0;
};

class Environment {
public:
    // Conductance of the edge starting at centered coordinates `coords` in
    // direction `axis`. Box environments also query the edges entering the
    // box through its lower faces (coords_i = -floor(N_i/2) - 1).
    using EdgeFunction = std::function<double(std::span<const int> coords, int axis)>;

    // `forward` holds d values per site. For a Box, `inflow` (same layout)
    // supplies w(x-e_i, x) at sites on the lower face x_i = 0; other entries
    // are ignored and rebuilt from `forward`.
    Environment(Geometry geometry, std::vector<double> forward, ConductanceBounds bounds,
                std::vector<double> inflow = {});

    static Environment from_edge_function(Geometry geometry, ConductanceBounds bounds,
                                          const EdgeFunction& edge);
    static Environment homogeneous(Geometry geometry, double conductance);

    const Geometry& geometry() const noexcept { return geometry_; }
    int dim() const noexcept { return geometry_.dim(); }
    std::size_t size() const noexcept { return geometry_.size(); }
    ConductanceBounds bounds() const noexcept { return bounds_; }

    // w(x, x+e_i)
    double forward(std::size_t site, int axis) const {
        return forward_[site * static_cast<std::size_t>(dim()) + axis];
    }
    // w(x-e_i, x); for a Box at the lower face this is the stored inflow edge.
    double backward(std::size_t site, int axis) const {
        return backward_[site * static_cast<std::size_t>(dim()) + axis];
    }
    std::span<const double> forward_data() const noexcept { return forward_; }
    std::span<const double> backward_data() const noexcept { return backward_; }

    // Periodic extension of a torus cell restricted to a centered box.
    Environment restrict_to_box(int side) const;
    // Periodic tiling of a torus cell onto a larger torus; `side` must be a
    // multiple of every cell extent.
    Environment tile_to_torus(int side) const;

private:
    void build_backward(std::span<const double> inflow);
    void validate() const;

    Geometry geometry_;
    std::vector<double> forward_;
    std::vector<double> backward_;
    ConductanceBounds bounds_;
};

// grad u(x)_i = u(x+e_i) - u(x); u = 0 outside a box.
VectorField gradient(const LatticeField& u);

// div* v(x) = sum_i v_i(x) - v_i(x-e_i); v = 0 outside a box.
LatticeField divergence_star(const VectorField& v);

// mu*u - div*(A grad u), with u pinned to 0 outside a box.
LatticeField apply_operator(const Environment& env, double mu, const LatticeField& u);

// div*(A xi) using the true conductances of every edge touching a site.
LatticeField local_drift(const Environment& env, const Direction& xi);

// The vector field A(x) xi.
VectorField flux(const Environment& env, const Direction& xi);

// sum_x mask(x) (xi + grad a)(x) . A(x) (xi + grad b)(x)
double energy_average(const Environment& env, const Direction& xi, const LatticeField& a,
                      const LatticeField& b, const LatticeField& mask);

// sum_x mask(x) a(x) b(x)
double product_average(const LatticeField& a, const LatticeField& b, const LatticeField& mask);

// Throws unless the mask is nonnegative and sums to 1 within 1e-12.
void require_normalized_mask(const LatticeField& mask);

// Euclidean inner product and norm over sites.
double dot(const LatticeField& a, const LatticeField& b);
double norm2(const LatticeField& a);

// Text format: header `d N_1 ... N_d topology alpha beta`, then one line per
// site holding the d forward conductances (Box: d forward then d backward).
void write_environment(std::ostream& out, const Environment& env);
Environment read_environment(std::istream& in);
void save_environment(const std::string& path, const Environment& env);
Environment load_environment(const std::string& path);

}  // namespace homog
