#pragma once

// Closed-form evolution of a damped cavity with a Kerr medium,
//
//   d rho/dt = -i chi [(a^dagger a)^2, rho] + gamma (2 a rho a^dagger - a^dagger a rho - rho a^dagger a),
//
// written as the operator sum
//
//   rho(t)_{mn} = sum_l sqrt((m+l)!(n+l)!/(m!n!)) Lambda_{mn}^l / l!
//                 * exp(-i chi t (m^2 - n^2) - gamma t (m + n)) * rho0_{m+l,n+l}
//
// with Lambda_{mn} = gamma (1 - exp(-2 t z)) / z and z = gamma + i chi (m - n).

#include <cstddef>
#include <vector>

#include "kerrcav/fock.hpp"

namespace kerrcav {

struct ChannelParams {
    double chi = 0.0;    // Kerr coupling, radians per unit time
    double gamma = 0.0;  // cavity decay rate
    double t = 0.0;      // elapsed time

    // Throws std::invalid_argument unless gamma >= 0, t >= 0 and all finite.
    void validate() const;
};

// |z| t below this switches Lambda to its Taylor series around z = 0.
inline constexpr double kLambdaSeriesThreshold = 1e-6;

Complex lambda_coefficient(std::size_t m, std::size_t n, const ChannelParams& params);

// The two evaluation routes behind lambda_coefficient, for z = gamma + i chi (m - n).
// The direct route divides by z and is undefined at z = 0.
Complex lambda_direct(Complex z, double gamma, double t);
Complex lambda_series(Complex z, double gamma, double t);

struct LambdaTable {
    Truncation trunc;
    ComplexMatrix values;  // (m, n) -> Lambda_{mn}
    ChannelParams params;
};

LambdaTable lambda_table(Truncation trunc, const ChannelParams& params);

// Scalar multiplying rho0_{m+l,n+l} in the operator-sum solution.
Complex weight_coefficient(std::size_t m, std::size_t n, std::size_t l, const ChannelParams& params);

DensityMatrix evolve_kraus(const DensityMatrix& rho0, const ChannelParams& params);
// Throws DimensionError if the table was built for a different truncation.
DensityMatrix evolve_kraus(const DensityMatrix& rho0, const LambdaTable& table);

// One generalized Kraus pair. `left` is M_{m,n,l} and `right_adjoint` is the
// operator placed to the right of rho0. They are not adjoints of each other
// in general; conjugacy_defect() measures by how much.
struct GeneralizedKrausTerm {
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t l = 0;
    ComplexMatrix left;
    ComplexMatrix right_adjoint;

    double conjugacy_defect() const;
};

// Individual terms fix the principal branch of sqrt(Lambda^l / l!); the
// product left * rho0 * right_adjoint is branch independent.
// Throws std::out_of_range unless m, n < N and l <= N - 1 - max(m, n).
GeneralizedKrausTerm build_kraus_term(std::size_t m, std::size_t n, std::size_t l,
                                      const ChannelParams& params, Truncation trunc);

// Every term with nonzero support under the truncation, in (m, n, l) order.
std::vector<GeneralizedKrausTerm> build_kraus_family(const ChannelParams& params, Truncation trunc);

// sum_terms left * rho0 * right_adjoint, with dense products.
ComplexMatrix apply_kraus_family(const std::vector<GeneralizedKrausTerm>& family,
                                 const DensityMatrix& rho0);

struct CompletenessReport {
    ComplexMatrix sum;             // sum_{m,n,l} right_adjoint * left
    double diagonal_residual = 0;  // max_k |S_kk - 1|
    double off_diagonal_max = 0;   // max_{k != j} |S_kj|
    double residual() const { return diagonal_residual > off_diagonal_max ? diagonal_residual : off_diagonal_max; }
};

// Uses the m = n collapse: only diagonal pairs survive and each Fock level k
// receives sum_{l <= k} C(k, l) (1 - q)^l q^(k - l) with q = exp(-2 gamma t).
CompletenessReport completeness_report(Truncation trunc, const ChannelParams& params);
double completeness_residual(Truncation trunc, const ChannelParams& params);

// chi = 0 limit:
//   sum_l (1 - e^{-2 gamma t})^l / l! * e^{-gamma t n} a^l rho0 a^dagger^l e^{-gamma t n}
DensityMatrix evolve_amplitude_damping(const DensityMatrix& rho0, double gamma, double t);

// gamma = 0 limit: rho_{mn} * exp(-i chi t (m^2 - n^2)).
DensityMatrix evolve_kerr_unitary(const DensityMatrix& rho0, double chi, double t);

} // namespace kerrcav
