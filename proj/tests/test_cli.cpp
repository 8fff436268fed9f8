#include "homog/cells.hpp"
#include "homog/lattice.hpp"

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
    int status = -1;
    std::string out;
};

// Runs the CLI through the shell; stderr is discarded unless merged by the caller.
Run run(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string(HOMOG_CLI) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int st = pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string value_of(const std::string& text, const std::string& key) {
    const auto pos = text.find(key + "=");
    if (pos == std::string::npos) return {};
    const auto start = pos + key.size() + 1;
    return text.substr(start, text.find('\n', start) - start);
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / ("homog_cli_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("coeffs") {
    const Run r = run("coeffs --k 2");
    CHECK(r.status == 0);
    CHECK(r.out == "k = 2\nc[1] = 1\nc[2] = 1/3\na[0] = 1\na[1] = -1\neta[0] = -3\neta[1] = -2\nnu[0][1] = 5\n");
    const Run k3 = run("coeffs --k 3");
    CHECK(k3.out.find("eta[0] = -55/9\n") != std::string::npos);
    CHECK(k3.out.find("nu[0][2] = -22/9\n") != std::string::npos);
    CHECK(run("coeffs --k 3 --format decimal").out.find("nu[1][2] = 3.3333333333333335\n") != std::string::npos);

    const Run bad = run("coeffs --k 0", true);
    CHECK(bad.status == 2);
    CHECK(bad.out.find("k must satisfy 1 <= k <= 12") != std::string::npos);
    CHECK(run("coeffs --k 13").status == 2);
    CHECK(run("coeffs").status == 2);
    CHECK(run("frobnicate").status == 2);
}

TEST_CASE("exact and spectrum") {
    const Run ex = run("exact --env builtin:checkerboard4");
    CHECK(ex.status == 0);
    CHECK(std::stod(value_of(ex.out, "ahom")) == doctest::Approx(10601.0 / 404.0).epsilon(1e-12));

    const Run sp = run("spectrum --env builtin:checkerboard4 --mu 0.01 --k 2");
    CHECK(sp.status == 0);
    CHECK(std::stod(value_of(sp.out, "ahom_spectral")) ==
          doctest::Approx(std::stod(value_of(sp.out, "ahom_corrector"))).epsilon(1e-12));
    CHECK(std::stod(value_of(sp.out, "gap")) == doctest::Approx(4.0).epsilon(1e-12));
    const double err = std::stod(value_of(sp.out, "systematic_error"));
    CHECK(err > 0.0);
    CHECK(err <= std::stod(value_of(sp.out, "systematic_error_bound")));

    TempDir tmp;
    const auto file = tmp.path / "h.txt";
    homog::save_environment(file.string(),
                            homog::Environment::homogeneous(homog::Geometry({3, 3}, homog::Topology::Torus), 7.0));
    const Run h = run("exact --env " + file.string() + " --xi 0.6,0.8");
    CHECK(h.status == 0);
    CHECK(std::stod(value_of(h.out, "ahom")) == doctest::Approx(7.0).epsilon(1e-14));

    CHECK(run("exact --env " + (tmp.path / "missing.txt").string()).status != 0);
    CHECK(run("exact --env builtin:nope").status == 2);
}

TEST_CASE("estimate") {
    const Run ok = run("estimate --env builtin:checkerboard4 --R 41 --L 12 --mu 0.05 --k 2");
    CHECK(ok.status == 0);
    CHECK(value_of(ok.out, "k") == "2");
    CHECK(value_of(ok.out, "R") == "41");
    const double est = std::stod(value_of(ok.out, "estimate"));
    CHECK(est == doctest::Approx(10601.0 / 404.0).epsilon(1e-2));

    CHECK(run("estimate --env builtin:checkerboard4 --R 21 --L 30 --mu 0.05").status == 2);
    CHECK(run("estimate --env builtin:checkerboard4 --R 21 --L 5 --mu -1").status == 2);
    CHECK(run("estimate --law twopoint:1,4,0.5 --dim 2 --seed 3 --R 21 --L 8 --mu 0.05").status == 0);

    const Run capped =
        run("estimate --law uniform:1,100 --dim 2 --seed 3 --R 61 --L 20 --mu 1e-5 --max-iter 2", true);
    CHECK(capped.status == 1);

    const Run csv = run("estimate --env builtin:checkerboard4 --R 41 --L 12 --mu 0.05 --k 2 --format csv");
    CHECK(csv.out.rfind("mu,k,R,L,filter,xi,estimate", 0) == 0);
}

TEST_CASE("config files and replay") {
    TempDir tmp;
    const auto cfg = tmp.path / "run.cfg";
    {
        std::ofstream out(cfg);
        out << "k = 3\nformat = decimal\n";
    }
    const Run a = run("coeffs --config " + cfg.string());
    CHECK(a.status == 0);
    CHECK(a.out.rfind("k = 3\n", 0) == 0);
    CHECK(a.out.find("eta[1] = -8\n") != std::string::npos);
    const Run b = run("coeffs --config " + cfg.string() + " --k 2");
    CHECK(b.out.rfind("k = 2\n", 0) == 0);

    const auto first = tmp.path / "c1.csv";
    const auto second = tmp.path / "c2.csv";
    REQUIRE(run("convergence --env builtin:checkerboard4 --k 1,2 --R 6,9 --out " + first.string()).status == 0);
    REQUIRE(run("--config " + first.string() + " --out " + second.string()).status == 0);
    CHECK(slurp(first) == slurp(second));
    CHECK(slurp(first).find("# R=6,9\n") != std::string::npos);

    const auto v1 = tmp.path / "v1.csv";
    const auto v2 = tmp.path / "v2.csv";
    REQUIRE(run("variance --law twopoint:1,4,0.5 --sizes 4,8 --samples 3 --out " + v1.string()).status == 0);
    REQUIRE(run("--config " + v1.string() + " --out " + v2.string()).status == 0);
    CHECK(slurp(v1) == slurp(v2));

    const auto broken = tmp.path / "broken.cfg";
    {
        std::ofstream out(broken);
        out << "this line has no equals sign\n";
    }
    CHECK(run("coeffs --config " + broken.string()).status == 2);
}
