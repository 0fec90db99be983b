#pragma once

// Truncated Fock-space primitives: ladder operators, standard initial states,
// matrix helpers and a Hermitian eigensolver.

#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace kerrcav {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Fock levels 0..dim-1. Every operator built under a truncation is dim x dim.
class Truncation {
public:
    explicit Truncation(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    Eigen::Index rows() const noexcept { return static_cast<Eigen::Index>(dim_); }

    friend bool operator==(const Truncation&, const Truncation&) = default;

private:
    std::size_t dim_;
};

// a|n> = sqrt(n)|n-1>. The top row of a^dagger (|N-1> -> |N>) is dropped, so
// adjoint(a) * a reproduces diag(0..N-1) exactly.
ComplexMatrix annihilation_matrix(Truncation trunc);
ComplexMatrix creation_matrix(Truncation trunc);
ComplexMatrix number_operator(Truncation trunc);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

// max_{ij} |m_ij - conj(m_ji)|
double hermiticity_defect(const ComplexMatrix& m);
double max_abs_difference(const ComplexMatrix& a, const ComplexMatrix& b);

// ln(n!) via lgamma; exact enough for every ratio used at N <= 64.
double log_factorial(std::size_t n);

// z^k by repeated squaring. Never routes through a complex logarithm, so the
// result carries no branch choice.
Complex integer_power(Complex z, std::size_t k);
double integer_power(double x, std::size_t k);

struct DensityTolerances {
    double hermiticity = 1e-12;
    double trace = 1e-12;
    double min_eigenvalue = -1e-10;
};

class DensityMatrix {
public:
    using Tolerances = DensityTolerances;

    // Checks Hermiticity, unit trace and positivity; throws ContractViolation.
    static DensityMatrix validated(ComplexMatrix elements, Tolerances tol = {});

    // Adopts a solver output as-is. Each solver documents its own tolerance.
    static DensityMatrix unchecked(ComplexMatrix elements);

    const Truncation& truncation() const noexcept { return trunc_; }
    std::size_t dim() const noexcept { return trunc_.dim(); }
    const ComplexMatrix& matrix() const noexcept { return elements_; }
    Complex operator()(Eigen::Index row, Eigen::Index col) const { return elements_(row, col); }
    Complex trace() const { return elements_.trace(); }

private:
    DensityMatrix(Truncation trunc, ComplexMatrix elements)
        : trunc_(trunc), elements_(std::move(elements)) {}

    Truncation trunc_;
    ComplexMatrix elements_;
};

struct FockState {
    std::size_t n = 0;
};

// c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)
struct CoherentState {
    Complex alpha{0.0, 0.0};
};

// p_n proportional to (nbar/(1+nbar))^n
struct ThermalState {
    double mean_occupation = 0.0;
};

// proportional to |alpha> + exp(i phase) |-alpha>
struct CatState {
    Complex alpha{0.0, 0.0};
    double phase = 0.0;
};

using StateSpec = std::variant<FockState, CoherentState, ThermalState, CatState>;

bool is_pure(const StateSpec& spec);
std::string describe(const StateSpec& spec);

inline constexpr double kTailMassWarning = 1e-6;

struct PreparedState {
    DensityMatrix rho;
    // Probability weight the untruncated state carries on levels >= N.
    double tail_mass = 0.0;
    bool tail_warning = false;
};

// Throws std::out_of_range for a Fock level >= N and std::invalid_argument
// for parameters that do not define a state (negative occupation, zero-norm cat).
PreparedState make_state(const StateSpec& spec, Truncation trunc);

// Unit-norm truncated state vector for a pure variant. Thermal specs throw
// std::invalid_argument.
ComplexVector state_vector(const StateSpec& spec, Truncation trunc);

// Truncated coherent amplitudes without renormalization.
ComplexVector coherent_amplitudes(Complex alpha, Truncation trunc);

struct HermitianEigensystem {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // column k pairs with values[k]
};

// Cyclic complex Jacobi rotations. Input must be Hermitian to 1e-10 (relative
// to its largest entry) or ContractViolation is thrown.
HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& m);
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

} // namespace kerrcav
