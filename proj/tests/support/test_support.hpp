#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "kerrcav/fock.hpp"

namespace kerrcav::testing {

inline ComplexMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = Complex{normal(rng), normal(rng)};
        }
    }
    return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng)
{
    ComplexMatrix g = random_complex_matrix(dim, dim, rng);
    return 0.5 * (g + g.adjoint());
}

// G G^dagger / Tr: full rank, support on every level.
inline DensityMatrix random_density(Truncation trunc, std::mt19937_64& rng)
{
    ComplexMatrix g = random_complex_matrix(trunc.rows(), trunc.rows(), rng);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = (0.5 * (rho + rho.adjoint())).eval();
    return DensityMatrix::validated(std::move(rho));
}

// Convex mixture of 1-3 Fock, coherent and thermal states with random weights.
inline DensityMatrix random_physical_mixture(Truncation trunc, std::mt19937_64& rng, double max_alpha = 1.5)
{
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_int_distribution<std::size_t> level(0, trunc.dim() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int parts = count(rng);
    ComplexMatrix rho = ComplexMatrix::Zero(trunc.rows(), trunc.rows());
    double total = 0.0;
    for (int i = 0; i < parts; ++i) {
        StateSpec spec;
        switch (kind(rng)) {
        case 0:
            spec = FockState{level(rng)};
            break;
        case 1:
            spec = CoherentState{std::polar(max_alpha * unit(rng), 2.0 * M_PI * unit(rng))};
            break;
        default:
            spec = ThermalState{0.8 * unit(rng)};
            break;
        }
        const double w = 0.1 + unit(rng);
        rho += w * make_state(spec, trunc).rho.matrix();
        total += w;
    }
    rho /= total;
    return DensityMatrix::validated(std::move(rho));
}

inline double max_abs(const ComplexMatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace kerrcav::testing
