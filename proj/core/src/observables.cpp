#include "kerrcav/observables.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kerrcav/errors.hpp"

namespace kerrcav {

double purity(const DensityMatrix& rho)
{
    // Tr(rho^2) = sum_{mn} rho_mn rho_nm
    return (rho.matrix().cwiseProduct(rho.matrix().transpose())).sum().real();
}

double fidelity_pure(const DensityMatrix& rho, const StateSpec& psi)
{
    if (!is_pure(psi)) {
        throw std::invalid_argument("fidelity_pure: reference " + describe(psi) + " is not a pure state");
    }
    const ComplexVector v = state_vector(psi, rho.truncation());
    return v.dot(rho.matrix() * v).real();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma)
{
    if (!(rho.truncation() == sigma.truncation())) {
        throw DimensionError("trace_distance: truncation mismatch");
    }
    double sum = 0.0;
    for (double value : hermitian_eigenvalues(rho.matrix() - sigma.matrix())) {
        sum += std::abs(value);
    }
    return 0.5 * sum;
}

double mean_photon_number(const DensityMatrix& rho)
{
    double mean = 0.0;
    for (Eigen::Index k = 0; k < rho.truncation().rows(); ++k) {
        mean += static_cast<double>(k) * rho(k, k).real();
    }
    return mean;
}

std::vector<double> photon_distribution(const DensityMatrix& rho)
{
    std::vector<double> dist;
    dist.reserve(rho.dim());
    for (Eigen::Index k = 0; k < rho.truncation().rows(); ++k) {
        dist.push_back(rho(k, k).real());
    }
    return dist;
}

double min_eigenvalue(const DensityMatrix& rho)
{
    return hermitian_eigenvalues(rho.matrix()).front();
}

ObservableRecord observe(double t, const DensityMatrix& rho, const StateSpec& reference)
{
    ObservableRecord rec;
    rec.t = t;
    const Complex tr = rho.trace();
    rec.trace_re = tr.real();
    rec.trace_im = tr.imag();
    rec.purity = purity(rho);
    rec.mean_n = mean_photon_number(rho);
    rec.fidelity_vs_ref = fidelity_pure(rho, reference);
    rec.min_eig = min_eigenvalue(rho);
    rec.photon_dist = photon_distribution(rho);
    return rec;
}

double QGrid::re_at(std::size_t i_re) const
{
    const double step = (bounds.re_max - bounds.re_min) / static_cast<double>(bounds.resolution - 1);
    return bounds.re_min + step * static_cast<double>(i_re);
}

double QGrid::im_at(std::size_t i_im) const
{
    const double step = (bounds.im_max - bounds.im_min) / static_cast<double>(bounds.resolution - 1);
    return bounds.im_min + step * static_cast<double>(i_im);
}

QGrid husimi_q(const DensityMatrix& rho, const QGridBounds& bounds)
{
    if (bounds.resolution < 2) {
        throw std::invalid_argument("husimi_q: resolution must be >= 2");
    }
    if (!(bounds.re_max > bounds.re_min) || !(bounds.im_max > bounds.im_min)) {
        throw std::invalid_argument("husimi_q: grid bounds must satisfy min < max on both axes");
    }
    QGrid grid{bounds, std::vector<double>(bounds.resolution * bounds.resolution)};
    for (std::size_t i_im = 0; i_im < bounds.resolution; ++i_im) {
        for (std::size_t i_re = 0; i_re < bounds.resolution; ++i_re) {
            const ComplexVector c = coherent_amplitudes({grid.re_at(i_re), grid.im_at(i_im)}, rho.truncation());
            grid.values[i_im * bounds.resolution + i_re] = c.dot(rho.matrix() * c).real() / std::numbers::pi;
        }
    }
    return grid;
}

} // namespace kerrcav
