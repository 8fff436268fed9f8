#include "homog/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace homog {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kMul0, ctr[0], lo0, hi0);
        mulhilo(kMul1, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

double edge_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t edge_id) {
    const PhiloxCounter ctr{static_cast<std::uint32_t>(edge_id), static_cast<std::uint32_t>(edge_id >> 32),
                            static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const PhiloxCounter out = philox4x32(ctr, key);
    const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Laws
// ---------------------------------------------------------------------------

EnvironmentLaw EnvironmentLaw::two_point(double a, double b, double prob_a, int dim, std::uint64_t seed) {
    EnvironmentLaw law;
    law.kind = Kind::TwoPoint;
    law.a = a;
    law.b = b;
    law.prob_a = prob_a;
    law.dim = dim;
    law.seed = seed;
    law.validate();
    return law;
}

EnvironmentLaw EnvironmentLaw::uniform(double alpha, double beta, int dim, std::uint64_t seed) {
    EnvironmentLaw law;
    law.kind = Kind::Uniform;
    law.a = alpha;
    law.b = beta;
    law.prob_a = 0.0;
    law.dim = dim;
    law.seed = seed;
    law.validate();
    return law;
}

EnvironmentLaw EnvironmentLaw::parse(const std::string& text, int dim, std::uint64_t seed) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("law must look like twopoint:a,b,p or uniform:alpha,beta");
    const std::string name = text.substr(0, colon);
    std::vector<double> args;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw std::invalid_argument("bad number '" + item + "' in law '" + text + "'");
        args.push_back(v);
    }
    if (name == "twopoint" && args.size() == 3) return two_point(args[0], args[1], args[2], dim, seed);
    if (name == "uniform" && args.size() == 2) return uniform(args[0], args[1], dim, seed);
    throw std::invalid_argument("unknown law '" + text + "' (expected twopoint:a,b,p or uniform:alpha,beta)");
}

void EnvironmentLaw::validate() const {
    if (dim < 1) throw std::invalid_argument("law dimension must be >= 1");
    if (!(a > 0.0 && a <= b && std::isfinite(b)))
        throw std::invalid_argument(kind == Kind::TwoPoint ? "two-point law needs 0 < a <= b"
                                                           : "uniform law needs 0 < alpha <= beta");
    if (kind == Kind::TwoPoint && !(prob_a >= 0.0 && prob_a <= 1.0))
        throw std::invalid_argument("two-point probability must lie in [0, 1]");
}

ConductanceBounds EnvironmentLaw::bounds() const { return {a, b}; }

double EnvironmentLaw::draw(double u) const {
    if (kind == Kind::TwoPoint) return u < prob_a ? a : b;
    return a + (b - a) * u;
}

std::string EnvironmentLaw::to_string() const {
    if (kind == Kind::TwoPoint)
        return "twopoint:" + format_double(a) + "," + format_double(b) + "," + format_double(prob_a);
    return "uniform:" + format_double(a) + "," + format_double(b);
}

Environment sample_environment(const EnvironmentLaw& law, const std::vector<int>& extents, Topology topology,
                               std::uint64_t stream) {
    law.validate();
    if (static_cast<int>(extents.size()) != law.dim) throw std::invalid_argument("sample_environment: extents do not match the law dimension");
    Geometry geometry(extents, topology);
    const int d = law.dim;
    // Edge ids enumerate positions p_i = c_i + floor(N_i/2) + 1 in [0, N_i], which
    // also covers the inflow edges below a box.
    return Environment::from_edge_function(geometry, law.bounds(), [&](std::span<const int> c, int axis) {
        std::uint64_t id = 0;
        for (int i = 0; i < d; ++i) {
            const auto p = static_cast<std::uint64_t>(c[i] + extents[i] / 2 + 1);
            id = id * static_cast<std::uint64_t>(extents[i] + 1) + p;
        }
        id = id * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(axis);
        return law.draw(edge_uniform(law.seed, stream, id));
    });
}

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

void StudyConfig::validate() const {
    if (k < 1 || k > kMaxSchemeOrder) throw std::invalid_argument("study: k out of range");
    if (sizes.empty()) throw std::invalid_argument("study: no sizes given");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 1) throw std::invalid_argument("study: sizes must be positive");
        if (i > 0 && sizes[i] <= sizes[i - 1]) throw std::invalid_argument("study: sizes must be ascending");
    }
    if (samples_per_size < 2) throw std::invalid_argument("study: need at least two samples per size");
    solve.validate();
}

std::uint64_t stream_index(int size, int sample) {
    return (static_cast<std::uint64_t>(size) << 32) | static_cast<std::uint32_t>(sample);
}

StudyResult variance_study(const EnvironmentLaw& law, const StudyConfig& config) {
    law.validate();
    config.validate();
    require_unit_direction(config.xi, law.dim);

    const std::size_t per = static_cast<std::size_t>(config.samples_per_size);
    StudyResult result;
    result.samples.resize(config.sizes.size() * per);
    result.workers = std::max(1, config.threads);
    const SchemeCoefficients coeffs = coefficients(config.k);

    std::vector<LatticeField> masks;
    for (int L : config.sizes) {
        Geometry g(std::vector<int>(static_cast<std::size_t>(law.dim), 2 * L), Topology::Torus);
        masks.push_back(build_mask(config.filter, L, g));
    }

    parallel_for(result.samples.size(), config.threads, [&](std::size_t job) {
        const std::size_t size_idx = job / per;
        const int L = config.sizes[size_idx];
        SampleRecord& rec = result.samples[job];
        rec.size = L;
        rec.sample_index = static_cast<int>(job % per);
        rec.stream_index = stream_index(L, rec.sample_index);
        const Environment env = sample_environment(law, std::vector<int>(static_cast<std::size_t>(law.dim), 2 * L),
                                                   Topology::Torus, rec.stream_index);
        try {
            const CorrectorSet set = solve_corrector_set(env, config.mu_rule(L), config.k, config.xi, config.solve);
            const EstimateReport rep = assemble_estimate(env, set, coeffs, masks[size_idx]);
            rec.estimate = rep.estimate;
            rec.residual = rep.max_residual;
        } catch (const SolverError& e) {
            rec.failed = true;
            rec.residual = e.stats().rhs_norm > 0.0 ? e.stats().residual / e.stats().rhs_norm : 0.0;
        }
    });

    std::vector<double> xs, vs;
    bool all_positive = true;
    for (std::size_t s = 0; s < config.sizes.size(); ++s) {
        SizeSummary row;
        row.size = config.sizes[s];
        std::vector<double> values;
        for (std::size_t i = 0; i < per; ++i) {
            const SampleRecord& rec = result.samples[s * per + i];
            if (rec.failed)
                ++row.failed;
            else
                values.push_back(rec.estimate);
        }
        const SampleStats st = sample_stats(values);
        row.n = st.n;
        row.mean = st.mean;
        row.variance = st.variance;
        row.stderr_mean = st.stderr_mean;
        result.failed += row.failed;
        if (!(row.variance > 0.0) || row.n < 2) all_positive = false;
        xs.push_back(row.size);
        vs.push_back(row.variance);
        result.sizes.push_back(row);
    }
    if (all_positive && xs.size() >= 2) {
        result.variance_fit = fit_loglog(xs, vs);
        result.slope_defined = true;
    }
    return result;
}

namespace {

void write_echo(std::ostream& out, const EnvironmentLaw& law, const StudyConfig& config) {
    std::string sizes;
    for (std::size_t i = 0; i < config.sizes.size(); ++i) sizes += (i ? "," : "") + std::to_string(config.sizes[i]);
    out << "# subcommand=variance\n"
        << "# law=" << law.to_string() << '\n'
        << "# dim=" << law.dim << '\n'
        << "# seed=" << law.seed << '\n'
        << "# k=" << config.k << '\n'
        << "# sizes=" << sizes << '\n'
        << "# samples=" << config.samples_per_size << '\n'
        << "# mu=" << config.mu_rule.to_string() << '\n'
        << "# filter=" << config.filter.name() << '\n'
        << "# xi=" << config.xi.to_string() << '\n'
        << "# tol=" << format_double(config.solve.rel_tolerance) << '\n';
}

}  // namespace

void write_samples_csv(std::ostream& out, const StudyResult& result, const EnvironmentLaw& law,
                       const StudyConfig& config) {
    write_echo(out, law, config);
    out << "size,sample_index,stream_index,estimate,residual\n";
    for (const auto& r : result.samples) {
        out << r.size << ',' << r.sample_index << ',' << r.stream_index << ','
            << (r.failed ? std::string("nan") : format_double(r.estimate)) << ',' << format_double(r.residual) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const StudyResult& result, const EnvironmentLaw& law,
                       const StudyConfig& config) {
    write_echo(out, law, config);
    out << "size,n,mean,variance,stderr\n";
    for (const auto& s : result.sizes) {
        out << s.size << ',' << s.n << ',' << format_double(s.mean) << ',' << format_double(s.variance) << ','
            << format_double(s.stderr_mean) << '\n';
    }
}

}  // namespace homog
