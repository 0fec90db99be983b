#include "kerrcav/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kerrcav/errors.hpp"

namespace kerrcav {

namespace {

// |c_n|^2 for a coherent state, in log space.
double log_poisson_weight(double mean, std::size_t n)
{
    if (mean == 0.0) {
        return n == 0 ? 0.0 : -INFINITY;
    }
    return -mean + static_cast<double>(n) * std::log(mean) - log_factorial(n);
}

// Sum_{n >= first} term(n) where |term(n)| <= 4 * Poisson(mean, n); summation
// stops once the Poisson envelope past the mode is negligible.
template <typename Term>
double poisson_tail(double mean, std::size_t first, Term term)
{
    double total = 0.0;
    for (std::size_t n = first; n < first + 100000; ++n) {
        total += term(n);
        const double envelope = 4.0 * std::exp(log_poisson_weight(mean, n));
        if (static_cast<double>(n) > mean && (envelope <= 1e-18 * total || envelope < 1e-300)) {
            break;
        }
    }
    return total;
}

} // namespace

Truncation::Truncation(std::size_t dim) : dim_(dim)
{
    if (dim < 2) {
        throw std::invalid_argument("truncation dimension must be >= 2, got " + std::to_string(dim));
    }
}

ComplexMatrix annihilation_matrix(Truncation trunc)
{
    ComplexMatrix a = ComplexMatrix::Zero(trunc.rows(), trunc.rows());
    for (Eigen::Index n = 1; n < trunc.rows(); ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

ComplexMatrix creation_matrix(Truncation trunc)
{
    return annihilation_matrix(trunc).adjoint();
}

ComplexMatrix number_operator(Truncation trunc)
{
    ComplexMatrix n = ComplexMatrix::Zero(trunc.rows(), trunc.rows());
    for (Eigen::Index k = 0; k < trunc.rows(); ++k) {
        n(k, k) = static_cast<double>(k);
    }
    return n;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b)
{
    return a * b - b * a;
}

double hermiticity_defect(const ComplexMatrix& m)
{
    if (m.rows() != m.cols()) {
        throw DimensionError("hermiticity_defect needs a square matrix");
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs_difference(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("max_abs_difference: shape mismatch");
    }
    if (a.size() == 0) {
        return 0.0;
    }
    return (a - b).cwiseAbs().maxCoeff();
}

double log_factorial(std::size_t n)
{
    return std::lgamma(static_cast<double>(n) + 1.0);
}

Complex integer_power(Complex z, std::size_t k)
{
    Complex result{1.0, 0.0};
    while (k > 0) {
        if (k & 1U) {
            result *= z;
        }
        z *= z;
        k >>= 1U;
    }
    return result;
}

double integer_power(double x, std::size_t k)
{
    double result = 1.0;
    while (k > 0) {
        if (k & 1U) {
            result *= x;
        }
        x *= x;
        k >>= 1U;
    }
    return result;
}

DensityMatrix DensityMatrix::validated(ComplexMatrix elements, Tolerances tol)
{
    if (elements.rows() != elements.cols()) {
        throw DimensionError("density matrix must be square");
    }
    Truncation trunc(static_cast<std::size_t>(elements.rows()));

    const double herm = hermiticity_defect(elements);
    if (herm > tol.hermiticity) {
        std::ostringstream msg;
        msg << "density matrix is not Hermitian (defect " << herm << ")";
        throw ContractViolation(msg.str());
    }
    const Complex tr = elements.trace();
    if (std::abs(tr - 1.0) > tol.trace) {
        std::ostringstream msg;
        msg << "density matrix trace " << tr << " differs from 1";
        throw ContractViolation(msg.str());
    }
    const double min_eig = hermitian_eigenvalues(elements).front();
    if (min_eig < tol.min_eigenvalue) {
        std::ostringstream msg;
        msg << "density matrix has negative eigenvalue " << min_eig;
        throw ContractViolation(msg.str());
    }
    return DensityMatrix(trunc, std::move(elements));
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix elements)
{
    if (elements.rows() != elements.cols()) {
        throw DimensionError("density matrix must be square");
    }
    Truncation trunc(static_cast<std::size_t>(elements.rows()));
    return DensityMatrix(trunc, std::move(elements));
}

bool is_pure(const StateSpec& spec)
{
    return !std::holds_alternative<ThermalState>(spec);
}

std::string describe(const StateSpec& spec)
{
    std::ostringstream out;
    std::visit(
        [&out](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FockState>) {
                out << "fock(n=" << s.n << ")";
            } else if constexpr (std::is_same_v<T, CoherentState>) {
                out << "coherent(alpha=" << s.alpha.real() << (s.alpha.imag() < 0 ? "" : "+")
                    << s.alpha.imag() << "i)";
            } else if constexpr (std::is_same_v<T, ThermalState>) {
                out << "thermal(nbar=" << s.mean_occupation << ")";
            } else {
                out << "cat(alpha=" << s.alpha.real() << (s.alpha.imag() < 0 ? "" : "+")
                    << s.alpha.imag() << "i, phase=" << s.phase << ")";
            }
        },
        spec);
    return out.str();
}

ComplexVector coherent_amplitudes(Complex alpha, Truncation trunc)
{
    ComplexVector c = ComplexVector::Zero(trunc.rows());
    const double mean = std::norm(alpha);
    if (mean == 0.0) {
        c(0) = 1.0;
        return c;
    }
    const Complex unit_phase = alpha / std::abs(alpha);
    for (std::size_t n = 0; n < trunc.dim(); ++n) {
        const double magnitude = std::exp(0.5 * log_poisson_weight(mean, n));
        c(static_cast<Eigen::Index>(n)) = magnitude * integer_power(unit_phase, n);
    }
    return c;
}

namespace {

struct PureVector {
    ComplexVector psi;  // unit norm after truncation
    double tail_mass = 0.0;
};

PureVector cat_vector(const CatState& cat, Truncation trunc)
{
    const double mean = std::norm(cat.alpha);
    const Complex relative = std::polar(1.0, cat.phase);
    // <psi|psi> of the untruncated superposition.
    const double full_norm = 2.0 + 2.0 * std::cos(cat.phase) * std::exp(-2.0 * mean);
    if (full_norm < 1e-14) {
        throw std::invalid_argument("cat state " + describe(StateSpec{cat}) + " has zero norm");
    }
    ComplexVector plus = coherent_amplitudes(cat.alpha, trunc);
    ComplexVector minus = coherent_amplitudes(-cat.alpha, trunc);
    ComplexVector psi = plus + relative * minus;

    const double tail = poisson_tail(mean, trunc.dim(), [&](std::size_t n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        return std::exp(log_poisson_weight(mean, n)) * std::norm(1.0 + sign * relative);
    });
    const double norm = psi.norm();
    if (norm == 0.0) {
        throw std::invalid_argument("cat state has no support inside the truncation");
    }
    return {psi / norm, tail / full_norm};
}

PureVector pure_vector(const StateSpec& spec, Truncation trunc)
{
    if (const auto* fock = std::get_if<FockState>(&spec)) {
        if (fock->n >= trunc.dim()) {
            throw std::out_of_range("Fock level " + std::to_string(fock->n) +
                                    " outside truncation of dimension " + std::to_string(trunc.dim()));
        }
        ComplexVector psi = ComplexVector::Zero(trunc.rows());
        psi(static_cast<Eigen::Index>(fock->n)) = 1.0;
        return {psi, 0.0};
    }
    if (const auto* coh = std::get_if<CoherentState>(&spec)) {
        const double mean = std::norm(coh->alpha);
        ComplexVector psi = coherent_amplitudes(coh->alpha, trunc);
        const double tail = poisson_tail(mean, trunc.dim(), [&](std::size_t n) {
            return std::exp(log_poisson_weight(mean, n));
        });
        return {psi / psi.norm(), tail};
    }
    if (const auto* cat = std::get_if<CatState>(&spec)) {
        return cat_vector(*cat, trunc);
    }
    throw std::invalid_argument("state " + describe(spec) + " is mixed; no state vector exists");
}

} // namespace

ComplexVector state_vector(const StateSpec& spec, Truncation trunc)
{
    return pure_vector(spec, trunc).psi;
}

PreparedState make_state(const StateSpec& spec, Truncation trunc)
{
    if (const auto* thermal = std::get_if<ThermalState>(&spec)) {
        const double nbar = thermal->mean_occupation;
        if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
            throw std::invalid_argument("thermal mean occupation must be finite and >= 0");
        }
        const double ratio = nbar / (1.0 + nbar);
        ComplexMatrix rho = ComplexMatrix::Zero(trunc.rows(), trunc.rows());
        double total = 0.0;
        for (Eigen::Index n = 0; n < trunc.rows(); ++n) {
            const double p = integer_power(ratio, static_cast<std::size_t>(n));
            rho(n, n) = p;
            total += p;
        }
        rho /= total;
        const double tail = integer_power(ratio, trunc.dim());
        return {DensityMatrix::validated(std::move(rho)), tail, tail > kTailMassWarning};
    }

    PureVector pure = pure_vector(spec, trunc);
    ComplexMatrix rho = pure.psi * pure.psi.adjoint();
    // Outer products are Hermitian only up to rounding in the diagonal's
    // imaginary part; pin it.
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return {DensityMatrix::validated(std::move(rho)), pure.tail_mass, pure.tail_mass > kTailMassWarning};
}

} // namespace kerrcav
