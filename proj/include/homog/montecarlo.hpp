#pragma once

// I.i.d. random conductance environments and Monte Carlo studies of the
// fluctuations of A_{mu,k,L} on periodized boxes.

#include "homog/lattice.hpp"
#include "homog/numerics.hpp"
#include "homog/scheme.hpp"
#include "homog/solver.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace homog {

// Philox4x32-10 block cipher (counter -> 4 random words).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

// Uniform double in [0, 1) drawn for edge `edge_id` of stream `stream` under `seed`.
double edge_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t edge_id);

struct EnvironmentLaw {
    enum class Kind { TwoPoint, Uniform };

    Kind kind = Kind::TwoPoint;
    double a = 1.0;       // TwoPoint: value with probability prob_a; Uniform: alpha
    double b = 1.0;       // TwoPoint: other value; Uniform: beta
    double prob_a = 0.5;
    int dim = 2;
    std::uint64_t seed = 0;

    static EnvironmentLaw two_point(double a, double b, double prob_a, int dim, std::uint64_t seed);
    static EnvironmentLaw uniform(double alpha, double beta, int dim, std::uint64_t seed);
    // "twopoint:a,b,p" or "uniform:alpha,beta"
    static EnvironmentLaw parse(const std::string& text, int dim, std::uint64_t seed);

    void validate() const;
    ConductanceBounds bounds() const;
    double draw(double u) const;  // inverse transform of a uniform in [0, 1)
    std::string to_string() const;
};

// Every edge (x, x+e_i) receives draw(edge_uniform(seed, stream, id(x, i))),
// where the id depends only on the centered coordinates of x, the axis and the extents.
Environment sample_environment(const EnvironmentLaw& law, const std::vector<int>& extents, Topology topology,
                               std::uint64_t stream_index);

struct StudyConfig {
    PowerLaw mu_rule{1.0, -2.0, 'L'};
    int k = 1;
    std::vector<int> sizes{16, 32, 64};  // mask half-widths L; tori of side 2L
    int samples_per_size = 100;
    Filter filter = Filter::smooth_bump();
    Direction xi = Direction::unit(2, 0);
    SolveConfig solve;
    int threads = 1;

    void validate() const;
};

struct SampleRecord {
    int size = 0;
    int sample_index = 0;
    std::uint64_t stream_index = 0;
    bool failed = false;
    double estimate = 0.0;
    double residual = 0.0;  // max relative solver residual
};

struct SizeSummary {
    int size = 0;
    std::size_t n = 0;       // successful samples
    std::size_t failed = 0;
    double mean = 0.0;
    double variance = 0.0;
    double stderr_mean = 0.0;
};

struct StudyResult {
    std::vector<SampleRecord> samples;  // ordered by size, then sample index
    std::vector<SizeSummary> sizes;
    bool slope_defined = false;
    LinearFit variance_fit;  // log Var vs log L
    std::size_t failed = 0;
    int workers = 1;
};

std::uint64_t stream_index(int size, int sample);

StudyResult variance_study(const EnvironmentLaw& law, const StudyConfig& config);

void write_samples_csv(std::ostream& out, const StudyResult& result, const EnvironmentLaw& law,
                       const StudyConfig& config);
void write_summary_csv(std::ostream& out, const StudyResult& result, const EnvironmentLaw& law,
                       const StudyConfig& config);

}  // namespace homog
