#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dirac/io.hpp"
#include "oracles.hpp"

// End-to-end runs of the installed binary; DIRAC_SPECTRAL_BIN comes from the
// build system.

using namespace dirac;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() /
              ("dirac_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    void write_json(const std::string& name, const json& j) const {
        std::ofstream out(path(name));
        out << j.dump(2) << '\n';
    }

    int run(const std::string& command, const std::string& config) const {
        const std::string cmd = std::string(DIRAC_SPECTRAL_BIN) + " " + command +
                                " --config " + path(config) + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

json make_bump_measure(double amplitude = 0.5, int n = 257) {
    json grid = json::array();
    for (int i = 0; i < n; ++i) {
        const double q = double(i) / double(n - 1);
        const double v = (q > 0.0 && q < 1.0)
                             ? amplitude * std::exp(4.0 - 1.0 / (q * (1.0 - q)))
                             : 0.0;
        grid.push_back({0.0, v});
    }
    return json{{"N", 1.0}, {"grid", grid}, {"point_masses", json::array()}};
}

} // namespace

TEST_CASE("forward on the free field reports unit modulus") {
    Sandbox sb;
    json mu{{"N", 1.0}, {"grid", {{0.0, 0.0}, {0.0, 0.0}}}, {"point_masses", json::array()}};
    sb.write_json("mu.json", mu);
    sb.write_json("cfg.json", json{{"input_path", sb.path("mu.json")},
                                   {"output_path", sb.path("out")},
                                   {"fourier_window", 8.0},
                                   {"weyl_samples", 5}});
    CHECK(sb.run("forward", "cfg.json") == 0);

    const json summary = json::parse(slurp(sb.path("out/summary.json")));
    CHECK(summary["metrics"]["max_E_modulus_deviation"].get<double>() < 1e-8);
    CHECK(summary["metrics"]["max_det_deviation"].get<double>() < 1e-10);
    CHECK(fs::exists(sb.path("out/db_function.csv")));
    CHECK(fs::exists(sb.path("out/weyl_function.csv")));
}

TEST_CASE("forward with an atom keeps det within guard") {
    Sandbox sb;
    json mu = make_bump_measure(0.3, 65);
    mu["point_masses"] = json::array({json{{"x", 0.6}, {"mu1", 0.1}, {"mu2", -0.2}}});
    sb.write_json("mu.json", mu);
    sb.write_json("cfg.json", json{{"input_path", sb.path("mu.json")},
                                   {"output_path", sb.path("out")},
                                   {"fourier_window", 8.0},
                                   {"weyl_samples", 3}});
    CHECK(sb.run("forward", "cfg.json") == 0);
    const json summary = json::parse(slurp(sb.path("out/summary.json")));
    CHECK(summary["metrics"]["max_det_deviation"].get<double>() < 1e-10);
}

TEST_CASE("missing input exits 2, bad config exits 2") {
    Sandbox sb;
    sb.write_json("cfg.json", json{{"input_path", sb.path("absent.json")},
                                   {"output_path", sb.path("out")}});
    CHECK(sb.run("forward", "cfg.json") == 2);

    sb.write_json("bad.json", json{{"input_path", sb.path("absent.json")},
                                   {"output_path", sb.path("out")},
                                   {"nystrom_dim", 10}});
    CHECK(sb.run("inverse", "bad.json") == 2);

    sb.write_json("mismatch.json", json{{"command", "gl"}});
    CHECK(sb.run("forward", "mismatch.json") == 2);
}

TEST_CASE("gl then inverse then convert recovers a small coefficient") {
    Sandbox sb;
    sb.write_json("mu.json", make_bump_measure(0.4));
    sb.write_json("gl.json", json{{"input_path", sb.path("mu.json")},
                                  {"output_path", sb.path("gl")},
                                  {"out_samples", 1025}});
    REQUIRE(sb.run("gl", "gl.json") == 0);
    REQUIRE(fs::exists(sb.path("gl/phi.json")));

    const json glsum = json::parse(slurp(sb.path("gl/summary.json")));
    CHECK(glsum["metrics"]["min_eigenvalue"].get<double>() > 0.0);

    sb.write_json("inv.json", json{{"input_path", sb.path("gl/phi.json")},
                                   {"output_path", sb.path("inv")},
                                   {"x_count", 32},
                                   {"nystrom_dim", 65},
                                   {"debug_kernels", true}});
    REQUIRE(sb.run("inverse", "inv.json") == 0);
    REQUIRE(fs::exists(sb.path("inv/hamiltonian.csv")));
    CHECK(fs::exists(sb.path("inv/kernels.csv")));

    const json invsum = json::parse(slurp(sb.path("inv/summary.json")));
    CHECK(invsum["metrics"]["max_det_deviation"].get<double>() < 1e-6);

    sb.write_json("conv.json", json{{"input_path", sb.path("inv/hamiltonian.csv")},
                                    {"output_path", sb.path("conv")},
                                    {"direction", "h-to-mu"}});
    REQUIRE(sb.run("convert", "conv.json") == 0);
    const DiracMeasure rec = read_dirac_measure(sb.path("conv/recovered_mu.json"));
    const DiracMeasure truth = read_dirac_measure(sb.path("mu.json"));
    double sup = 0.0;
    for (Eigen::Index i = 0; i < rec.sample_count(); ++i) {
        const double x = rec.N * double(i) / double(rec.sample_count() - 1);
        sup = std::max(sup, std::abs(rec.mu2[i] - truth.density(x)[1]));
    }
    CHECK(sup < 0.05);
}

TEST_CASE("identical config gives bit-identical data products") {
    Sandbox sb;
    sb.write_json("mu.json", make_bump_measure(0.4, 129));
    for (const char* out : {"run1", "run2"}) {
        sb.write_json("cfg.json", json{{"input_path", sb.path("mu.json")},
                                       {"output_path", sb.path(out)},
                                       {"out_samples", 513},
                                       {"seed", 7}});
        REQUIRE(sb.run("gl", "cfg.json") == 0);
    }
    CHECK(slurp(sb.path("run1/phi.csv")) == slurp(sb.path("run2/phi.csv")));
    CHECK(slurp(sb.path("run1/db_function.csv")) == slurp(sb.path("run2/db_function.csv")));
}

TEST_CASE("roundtrip command writes the ladder report") {
    Sandbox sb;
    sb.write_json("mu.json", make_bump_measure(0.5));
    sb.write_json("rt.json", json{{"input_path", sb.path("mu.json")},
                                  {"output_path", sb.path("rt")},
                                  {"ode_steps", 256},
                                  {"nystrom_dim", 65},
                                  {"x_count", 32},
                                  {"ladder_rungs", 2}});
    REQUIRE(sb.run("roundtrip", "rt.json") == 0);
    const json report = json::parse(slurp(sb.path("rt/roundtrip_report.json")));
    REQUIRE(report["rungs"].size() == 2);
    const double e0 = report["rungs"][0]["sup_error"].get<double>();
    const double e1 = report["rungs"][1]["sup_error"].get<double>();
    CHECK(e0 < 0.05);
    CHECK(e1 < e0);
    CHECK(fs::exists(sb.path("rt/recovered_mu_rung1.csv")));

    SUBCASE("atoms are rejected for the round trip") {
        json mu = make_bump_measure(0.3, 65);
        mu["point_masses"] = json::array({json{{"x", 0.5}, {"mu1", 0.1}, {"mu2", 0.0}}});
        sb.write_json("mu_atom.json", mu);
        sb.write_json("rt2.json", json{{"input_path", sb.path("mu_atom.json")},
                                       {"output_path", sb.path("rt2")}});
        CHECK(sb.run("roundtrip", "rt2.json") == 2);
    }
}

TEST_CASE("corrupted phi aborts the inverse with exit 3") {
    Sandbox sb;
    // deep triangle well: Hermitian but not admissible
    GridFunction1D g;
    g.lo = -2.0;
    g.hi = 2.0;
    g.samples.resize(401);
    for (Eigen::Index i = 0; i < 401; ++i) {
        const double x = g.lo + 4.0 * double(i) / 400.0;
        g.samples[i] = Complex(-4.0 * std::max(0.0, 1.0 - std::abs(x) / 0.5), 0.0);
    }
    const GLFunction bad(1.0, g);
    write_gl_function(bad, sb.path("phi.json"));

    sb.write_json("inv.json", json{{"input_path", sb.path("phi.json")},
                                   {"output_path", sb.path("out")},
                                   {"x_count", 16},
                                   {"nystrom_dim", 33}});
    CHECK(sb.run("inverse", "inv.json") == 3);
}

TEST_CASE("spectrum and series-check commands") {
    Sandbox sb;
    sb.write_json("mu.json", make_bump_measure(0.4, 129));
    sb.write_json("sp.json", json{{"input_path", sb.path("mu.json")},
                                  {"output_path", sb.path("sp")},
                                  {"window", {-12.0, 12.0}}});
    REQUIRE(sb.run("spectrum", "sp.json") == 0);
    const SpectralMeasure rho = read_spectral_measure(sb.path("sp/spectrum.json"));
    CHECK(rho.atoms.size() >= 6);

    // coefficient mass close to (but under) the 1/8 hypothesis, so the
    // factorial tail bound stays well above the oracle's quadrature error
    sb.write_json("small.json", make_bump_measure(0.28, 257));
    sb.write_json("sc.json", json{{"input_path", sb.path("small.json")},
                                  {"output_path", sb.path("sc")},
                                  {"seed", 3}});
    REQUIRE(sb.run("series-check", "sc.json") == 0);
    const json report = json::parse(slurp(sb.path("sc/series_report.json")));
    CHECK(report["worst_ratio"].get<double>() <= 1.0);
    CHECK(fs::exists(sb.path("sc/series_orders.csv")));

    SUBCASE("series hypothesis violation is an input error") {
        sb.write_json("big.json", make_bump_measure(2.0, 65));
        sb.write_json("sc2.json", json{{"input_path", sb.path("big.json")},
                                       {"output_path", sb.path("sc2")}});
        CHECK(sb.run("series-check", "sc2.json") == 2);
    }
}
