#include "homog/cells.hpp"
#include "homog/convergence.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace homog;

TEST_CASE("slope fit uses the leading run above the floor") {
    const std::vector<int> R{10, 20, 40, 80};
    const std::vector<double> clean{1e-2, 1.25e-3, 1.5625e-4, 1.953125e-5};
    const auto s = fit_convergence(1, R, clean, 1e-11);
    CHECK(s.defined);
    CHECK(s.points == 4);
    CHECK(s.slope == doctest::Approx(-3.0).epsilon(1e-12));

    const std::vector<double> floored{1e-2, 1.25e-3, 1e-13, 1e-3};
    const auto t = fit_convergence(2, R, floored, 1e-11);
    CHECK(t.points == 2);
    CHECK(t.slope == doctest::Approx(-3.0).epsilon(1e-12));

    const auto u = fit_convergence(1, R, {1e-12, 1e-13, 1e-14, 1e-15}, 1e-11);
    CHECK_FALSE(u.defined);
    CHECK(u.points == 0);
}

TEST_CASE("convergence config validation") {
    ConvergenceConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.sizes = {4, 4};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.sizes = {4};
    cfg.ks = {0};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.ks = {1};
    cfg.L_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK(parse_size_unit("sites") == SizeUnit::Sites);
    CHECK(to_string(SizeUnit::Cells) == "cells");
    CHECK_THROWS_AS(parse_size_unit("meters"), std::invalid_argument);

    ConvergenceConfig ok;
    ok.sizes = {2};
    CHECK_THROWS_AS(convergence_study(Environment::homogeneous(Geometry({4, 2}, Topology::Torus), 1.0), ok),
                    std::invalid_argument);
}

TEST_CASE("homogeneous cell converges immediately") {
    ConvergenceConfig cfg;
    cfg.sizes = {3, 5, 7};
    const auto res = convergence_study(Environment::homogeneous(Geometry({2, 2}, Topology::Torus), 2.0), cfg);
    CHECK(res.ahom == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(res.rows.size() == 6);
    for (const auto& row : res.rows) CHECK(row.error < 1e-12);
    CHECK_FALSE(res.slope_for(1).defined);
    CHECK_FALSE(res.slope_for(2).defined);
    CHECK_THROWS_AS(res.slope_for(3), std::out_of_range);
}

TEST_CASE("checkerboard rows follow the configured rules") {
    ConvergenceConfig cfg;
    cfg.sizes = {6, 9};
    const Environment cb = checkerboard4();
    const auto res = convergence_study(cb, cfg);
    CHECK(res.ahom == doctest::Approx(10601.0 / 404.0).epsilon(1e-12));
    REQUIRE(res.rows.size() == 4);
    for (const auto& row : res.rows) {
        CHECK(row.side == 4 * row.R + 1);  // centered cube {-2R, ..., 2R}^2
        CHECK(row.mu == doctest::Approx(250.0 * std::pow(row.R, -1.5)).epsilon(1e-15));
        CHECK(row.L == doctest::Approx(4.0 * row.R / 3.0).epsilon(1e-15));
        CHECK(row.error == std::abs(row.estimate - res.ahom));
        CHECK(row.max_residual <= 1e-12);
    }
    // Per size, the second order is closer.
    CHECK(res.rows[1].error < res.rows[0].error);
    CHECK(res.rows[3].error < res.rows[2].error);
    CHECK(res.rows[2].error < res.rows[0].error);

    cfg.unit = SizeUnit::Sites;
    cfg.sizes = {24};
    cfg.ks = {1};
    const auto sites = convergence_study(cb, cfg);
    CHECK(sites.rows.front().side == 25);
    CHECK(sites.rows.front().L == doctest::Approx(8.0));

    cfg.threads = 2;
    cfg.sizes = {16, 24};
    const auto a = convergence_study(cb, cfg);
    cfg.threads = 1;
    const auto b = convergence_study(cb, cfg);
    std::ostringstream oa, ob;
    write_convergence_csv(oa, a, cfg, "builtin:checkerboard4");
    write_convergence_csv(ob, b, cfg, "builtin:checkerboard4");
    CHECK(oa.str() == ob.str());
    CHECK(oa.str().rfind("# subcommand=convergence\n", 0) == 0);
    CHECK(oa.str().find("\nk,R,side,mu,L,estimate,ahom,error,max_residual\n") != std::string::npos);
}
