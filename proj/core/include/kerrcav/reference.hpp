#pragma once

// Independent solvers for the same master equation, used as oracles for the
// closed-form channel: a fixed-step RK4 integrator and a dense vectorized
// Liouvillian propagated with a matrix exponential.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kerrcav/fock.hpp"
#include "kerrcav/kraus.hpp"

namespace kerrcav {

// -i chi [n^2, rho] + gamma (2 a rho a^dagger - n rho - rho n), evaluated
// elementwise in the Fock basis. The argument need not be a density matrix.
ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const ChannelParams& params);
ComplexMatrix lindblad_rhs(const DensityMatrix& rho, const ChannelParams& params);

struct IntegratorConfig {
    std::size_t steps = 1;
};

// h * (2 gamma N + |chi| N^2) must stay below this.
inline constexpr double kRk4StabilityLimit = 0.1;
inline constexpr double kRk4TraceDriftGate = 1e-12;

// Smallest step count that passes the stability guard for this run.
std::size_t rk4_required_steps(Truncation trunc, const ChannelParams& params);

struct Rk4Result {
    DensityMatrix rho;
    double trace_drift = 0.0;  // |Tr rho - 1| before any renormalization
    bool renormalized = false;
};

// Classical RK4. The result is re-Hermitized; the trace is rescaled only when
// drift exceeds kRk4TraceDriftGate. Throws StabilityError if cfg.steps is too
// small, std::invalid_argument if cfg.steps == 0.
Rk4Result rk4_evolve(const DensityMatrix& rho0, const ChannelParams& params, IntegratorConfig cfg);

// Row-major vectorization: rho_{mn} sits at index m * N + n. Under this
// convention A rho B maps to kron(A, transpose(B)).
ComplexVector vectorize(const ComplexMatrix& rho);
ComplexMatrix unvectorize(const ComplexVector& v, Truncation trunc);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct Liouvillian {
    Truncation trunc;
    ComplexMatrix matrix;  // N^2 x N^2
    ChannelParams params;  // t is ignored

    ComplexVector apply(const ComplexVector& v) const { return matrix * v; }
};

// L = -i chi (n^2 (x) I - I (x) n^2) + gamma (2 a (x) conj(a) - n (x) I - I (x) n)
Liouvillian build_liouvillian(Truncation trunc, const ChannelParams& params);

// Scaling and squaring around a truncated Taylor series.
ComplexMatrix matrix_exponential(const ComplexMatrix& m);

inline constexpr std::size_t kDefaultLiouvillianMaxDim = 32;

// Throws MemoryGuardError when N exceeds max_dim.
DensityMatrix evolve_liouvillian(const DensityMatrix& rho0, const ChannelParams& params,
                                 std::size_t max_dim = kDefaultLiouvillianMaxDim);

enum class Solver { Kraus, Rk4, Liouville };

std::string_view solver_name(Solver solver);
std::optional<Solver> parse_solver(std::string_view name);
std::vector<Solver> all_solvers();

class SolverError : public std::runtime_error {
public:
    SolverError(Solver solver, const std::string& what)
        : std::runtime_error(std::string(solver_name(solver)) + ": " + what), solver_(solver) {}

    Solver solver() const noexcept { return solver_; }

private:
    Solver solver_;
};

struct SolverRun {
    Solver solver;
    DensityMatrix rho;
    double trace_drift = 0.0;
    double wall_seconds = 0.0;
};

// Runs one solver; any failure is rethrown as SolverError.
SolverRun run_solver(Solver solver, const DensityMatrix& rho0, const ChannelParams& params,
                     IntegratorConfig cfg, std::size_t liouville_max_dim = kDefaultLiouvillianMaxDim);

struct PairDeviation {
    Solver first;
    Solver second;
    double max_deviation = 0.0;  // max elementwise |rho_a - rho_b|
};

struct CompareReport {
    std::vector<SolverRun> runs;
    std::vector<PairDeviation> pairs;

    double max_deviation() const;
};

CompareReport solver_compare(const DensityMatrix& rho0, const ChannelParams& params, IntegratorConfig cfg,
                             const std::vector<Solver>& solvers = all_solvers());

} // namespace kerrcav
