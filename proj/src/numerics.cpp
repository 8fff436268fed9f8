#include "homog/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cctype>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace homog {

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

SampleStats sample_stats(std::span<const double> xs) {
    SampleStats s;
    s.n = xs.size();
    if (s.n == 0) return s;
    s.mean = pairwise_sum(xs) / static_cast<double>(s.n);
    if (s.n < 2) return s;
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - s.mean;
        sq[i] = d * d;
    }
    s.variance = pairwise_sum(sq) / static_cast<double>(s.n - 1);
    s.stderr_mean = std::sqrt(s.variance / static_cast<double>(s.n));
    return s;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
    LinearFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double ssr = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            ssr += r * r;
        }
        fit.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    }
    return fit;
}

LinearFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) throw std::invalid_argument("fit_loglog: nonpositive abscissa");
        lx[i] = std::log(x[i]);
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0)) throw std::invalid_argument("fit_loglog: nonpositive ordinate");
        ly[i] = std::log(y[i]);
    }
    return fit_line(lx, ly);
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

}  // namespace homog

namespace homog {

PowerLaw PowerLaw::parse(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    auto fail = [&]() -> PowerLaw {
        throw std::invalid_argument("cannot parse rule '" + text + "' (expected c*L^e or c*R^e)");
    };
    if (s.empty()) return fail();

    PowerLaw rule;
    const std::size_t var = s.find_first_of("LR");
    auto number = [&](const std::string& t) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            fail();
        }
        if (used != t.size() || !std::isfinite(v)) fail();
        return v;
    };
    if (var == std::string::npos) {
        rule.coefficient = number(s);
        return rule;
    }
    rule.variable = s[var];
    std::string head = s.substr(0, var);
    if (!head.empty()) {
        if (head.back() != '*') return fail();
        head.pop_back();
        rule.coefficient = number(head);
    }
    const std::string tail = s.substr(var + 1);
    if (tail.empty()) {
        rule.exponent = 1.0;
    } else {
        if (tail.front() != '^') return fail();
        rule.exponent = number(tail.substr(1));
    }
    return rule;
}

std::string PowerLaw::to_string() const {
    char buf[96];
    char* p = std::to_chars(buf, buf + 40, coefficient).ptr;
    *p++ = '*';
    *p++ = variable;
    *p++ = '^';
    p = std::to_chars(p, buf + sizeof buf, exponent).ptr;
    return std::string(buf, p);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace homog
