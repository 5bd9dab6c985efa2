#ifndef DIRAC_IO_HPP
#define DIRAC_IO_HPP

#include <string>

#include "dirac/gl.hpp"
#include "dirac/inverse.hpp"
#include "dirac/types.hpp"

namespace dirac {

// Coefficient measure as JSON:
//   { "N": number, "grid": [[mu1, mu2], ...],
//     "point_masses": [{"x": number, "mu1": number, "mu2": number}, ...] }
DiracMeasure read_dirac_measure(const std::string& path);
void write_dirac_measure(const DiracMeasure& mu, const std::string& path);

// Spectral measure as JSON: { "N":..., "beta":...,
//   "atoms": [{"lambda":..., "weight":...}, ...] }
SpectralMeasure read_spectral_measure(const std::string& path);
void write_spectral_measure(const SpectralMeasure& rho, const std::string& path);

// Sampled complex functions as CSV with columns <xname>,re,im and one header
// line. Values print with %.17g so rewrites are byte-identical.
void write_grid_csv(const GridFunction1D& g, const std::string& path,
                    const std::string& xname = "t");
GridFunction1D read_grid_csv(const std::string& path);

// phi is a CSV (x, re, im) next to a JSON header {"N":..., "samples":...,
// "csv": relative name}; the header path is authoritative.
void write_gl_function(const GLFunction& phi, const std::string& header_path);
GLFunction read_gl_function(const std::string& header_path);

// Hamiltonian samples as CSV (x, h11, h12, h22).
void write_canonical_system(const CanonicalSystem& H, const std::string& path);
CanonicalSystem read_canonical_system(const std::string& path);

void write_positivity_report(const PositivityReport& rep, const std::string& path);

// Debug dump of a kernel solve: columns t, re_j, im_j, re_k, im_k.
void write_kernel_solution_csv(const KernelSolution& ks, const std::string& path);

std::string format_double(double v); // %.17g

} // namespace dirac

#endif
