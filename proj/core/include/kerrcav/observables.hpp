#pragma once

#include <cstddef>
#include <vector>

#include "kerrcav/fock.hpp"

namespace kerrcav {

// Tr rho^2, reported as computed (no clamping).
double purity(const DensityMatrix& rho);

// <psi|rho|psi> for a pure reference; Thermal specs throw std::invalid_argument.
double fidelity_pure(const DensityMatrix& rho, const StateSpec& psi);

// (1/2) sum |eig(rho - sigma)|. Throws DimensionError on mismatched truncations.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

// Re Tr(n rho)
double mean_photon_number(const DensityMatrix& rho);

// Real parts of the diagonal.
std::vector<double> photon_distribution(const DensityMatrix& rho);

double min_eigenvalue(const DensityMatrix& rho);

struct ObservableRecord {
    double t = 0.0;
    double trace_re = 0.0;
    double trace_im = 0.0;
    double purity = 0.0;
    double mean_n = 0.0;
    double fidelity_vs_ref = 0.0;
    double min_eig = 0.0;
    std::vector<double> photon_dist;
};

ObservableRecord observe(double t, const DensityMatrix& rho, const StateSpec& reference);

struct QGridBounds {
    double re_min = -4.0;
    double re_max = 4.0;
    double im_min = -4.0;
    double im_max = 4.0;
    std::size_t resolution = 64;  // points per axis, endpoints included
};

struct QGrid {
    QGridBounds bounds;
    // values[i_im * resolution + i_re]; i_re walks re_min..re_max.
    std::vector<double> values;

    double re_at(std::size_t i_re) const;
    double im_at(std::size_t i_im) const;
    double at(std::size_t i_re, std::size_t i_im) const { return values[i_im * bounds.resolution + i_re]; }
};

// Q(alpha) = <alpha|rho|alpha> / pi with truncated, unrenormalized coherent
// vectors. Throws std::invalid_argument for resolution < 2 or empty bounds.
QGrid husimi_q(const DensityMatrix& rho, const QGridBounds& bounds);

} // namespace kerrcav
