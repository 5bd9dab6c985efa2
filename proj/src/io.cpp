#include "dirac/io.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dirac {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed JSON in '" + path + "': " + e.what());
    }
    return j;
}

void dump_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

DiracMeasure read_dirac_measure(const std::string& path) {
    const json j = load_json(path);
    DiracMeasure mu;
    try {
        mu.N = j.at("N").get<double>();
        const auto& grid = j.at("grid");
        mu.mu1.resize(long(grid.size()));
        mu.mu2.resize(long(grid.size()));
        long i = 0;
        for (const auto& row : grid) {
            mu.mu1[i] = row.at(0).get<double>();
            mu.mu2[i] = row.at(1).get<double>();
            ++i;
        }
        if (j.contains("point_masses"))
            for (const auto& a : j.at("point_masses"))
                mu.point_masses.push_back(PointMass{a.at("x").get<double>(),
                                                    a.at("mu1").get<double>(),
                                                    a.at("mu2").get<double>()});
    } catch (const json::exception& e) {
        throw std::invalid_argument("bad measure schema in '" + path + "': " + e.what());
    }
    mu.validate();
    return mu;
}

void write_dirac_measure(const DiracMeasure& mu, const std::string& path) {
    json grid = json::array();
    for (Eigen::Index i = 0; i < mu.sample_count(); ++i)
        grid.push_back({mu.mu1[i], mu.mu2[i]});
    json atoms = json::array();
    for (const PointMass& pm : mu.point_masses)
        atoms.push_back({{"x", pm.position}, {"mu1", pm.mu1}, {"mu2", pm.mu2}});
    dump_json({{"N", mu.N}, {"grid", grid}, {"point_masses", atoms}}, path);
}

SpectralMeasure read_spectral_measure(const std::string& path) {
    const json j = load_json(path);
    SpectralMeasure rho;
    try {
        rho.N = j.at("N").get<double>();
        rho.beta = j.value("beta", 0.0);
        for (const auto& a : j.at("atoms"))
            rho.atoms.push_back(SpectralAtom{a.at("lambda").get<double>(),
                                             a.at("weight").get<double>()});
    } catch (const json::exception& e) {
        throw std::invalid_argument("bad spectral-measure schema in '" + path + "': " + e.what());
    }
    rho.validate();
    return rho;
}

void write_spectral_measure(const SpectralMeasure& rho, const std::string& path) {
    json atoms = json::array();
    for (const SpectralAtom& a : rho.atoms)
        atoms.push_back({{"lambda", a.lambda}, {"weight", a.weight}});
    dump_json({{"N", rho.N}, {"beta", rho.beta}, {"atoms", atoms}}, path);
}

void write_grid_csv(const GridFunction1D& g, const std::string& path,
                    const std::string& xname) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << xname << ",re,im\n";
    for (Eigen::Index i = 0; i < g.count(); ++i)
        out << format_double(g.node(i)) << ',' << format_double(g.samples[i].real())
            << ',' << format_double(g.samples[i].imag()) << '\n';
}

GridFunction1D read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV '" + path + "'");
    std::vector<double> xs;
    std::vector<Complex> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < 3) throw std::invalid_argument("short CSV row in '" + path + "'");
        xs.push_back(std::stod(cells[0]));
        vals.push_back(Complex(std::stod(cells[1]), std::stod(cells[2])));
    }
    if (xs.size() < 2) throw std::invalid_argument("CSV '" + path + "' needs >= 2 rows");
    GridFunction1D g;
    g.lo = xs.front();
    g.hi = xs.back();
    g.samples.resize(long(vals.size()));
    for (long i = 0; i < long(vals.size()); ++i) g.samples[i] = vals[std::size_t(i)];
    g.validate();
    return g;
}

void write_gl_function(const GLFunction& phi, const std::string& header_path) {
    namespace fs = std::filesystem;
    const fs::path hp(header_path);
    fs::path csv = hp;
    csv.replace_extension(".csv");
    write_grid_csv(phi.grid(), csv.string(), "x");
    dump_json({{"N", phi.interval_length()},
               {"samples", phi.grid().count()},
               {"csv", csv.filename().string()}},
              header_path);
}

GLFunction read_gl_function(const std::string& header_path) {
    namespace fs = std::filesystem;
    const json j = load_json(header_path);
    double N;
    std::string csv;
    try {
        N = j.at("N").get<double>();
        csv = j.at("csv").get<std::string>();
    } catch (const json::exception& e) {
        throw std::invalid_argument("bad phi header '" + header_path + "': " + e.what());
    }
    const fs::path dir = fs::path(header_path).parent_path();
    return GLFunction(N, read_grid_csv((dir / csv).string()));
}

void write_canonical_system(const CanonicalSystem& H, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << "x,h11,h12,h22\n";
    for (Eigen::Index i = 0; i < H.count(); ++i)
        out << format_double(H.node(i)) << ',' << format_double(H.h(0, i)) << ','
            << format_double(H.h(1, i)) << ',' << format_double(H.h(2, i)) << '\n';
}

CanonicalSystem read_canonical_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV '" + path + "'");
    std::vector<std::array<double, 4>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < 4) throw std::invalid_argument("short CSV row in '" + path + "'");
        rows.push_back({std::stod(cells[0]), std::stod(cells[1]), std::stod(cells[2]),
                        std::stod(cells[3])});
    }
    if (rows.size() < 2) throw std::invalid_argument("CSV '" + path + "' needs >= 2 rows");
    CanonicalSystem H;
    H.N = rows.back()[0];
    H.h.resize(3, long(rows.size()));
    for (long i = 0; i < long(rows.size()); ++i)
        H.h.col(i) << rows[std::size_t(i)][1], rows[std::size_t(i)][2], rows[std::size_t(i)][3];
    return H;
}

void write_positivity_report(const PositivityReport& rep, const std::string& path) {
    dump_json({{"min_eigenvalue", rep.min_eigenvalue},
               {"matrix_dim", rep.matrix_dim},
               {"passed", rep.passed}},
              path);
}

void write_kernel_solution_csv(const KernelSolution& ks, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << "t,re_j,im_j,re_k,im_k\n";
    for (Eigen::Index i = 0; i < ks.nodes.size(); ++i) {
        const Complex k = ks.k(i);
        out << format_double(ks.nodes[i]) << ',' << format_double(ks.j[i].real()) << ','
            << format_double(ks.j[i].imag()) << ',' << format_double(k.real()) << ','
            << format_double(k.imag()) << '\n';
    }
}

} // namespace dirac
