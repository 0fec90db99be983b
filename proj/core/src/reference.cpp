#include "kerrcav/reference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "kerrcav/errors.hpp"

namespace kerrcav {

namespace {

void axpy_rhs(ComplexMatrix& out, const ComplexMatrix& rho, const ChannelParams& p)
{
    const Eigen::Index dim = rho.rows();
    const Complex minus_i_chi{0.0, -p.chi};
    for (Eigen::Index n = 0; n < dim; ++n) {
        const double nd = static_cast<double>(n);
        for (Eigen::Index m = 0; m < dim; ++m) {
            const double md = static_cast<double>(m);
            Complex value = minus_i_chi * (md * md - nd * nd) * rho(m, n);
            value -= p.gamma * (md + nd) * rho(m, n);
            if (m + 1 < dim && n + 1 < dim) {
                // (a rho a^dagger)_{mn} = sqrt((m+1)(n+1)) rho_{m+1,n+1}
                value += 2.0 * p.gamma * std::sqrt((md + 1.0) * (nd + 1.0)) * rho(m + 1, n + 1);
            }
            out(m, n) = value;
        }
    }
}

} // namespace

ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const ChannelParams& params)
{
    if (rho.rows() != rho.cols()) {
        throw DimensionError("lindblad_rhs needs a square matrix");
    }
    ComplexMatrix out(rho.rows(), rho.cols());
    axpy_rhs(out, rho, params);
    return out;
}

ComplexMatrix lindblad_rhs(const DensityMatrix& rho, const ChannelParams& params)
{
    return lindblad_rhs(rho.matrix(), params);
}

std::size_t rk4_required_steps(Truncation trunc, const ChannelParams& params)
{
    const double dim = static_cast<double>(trunc.dim());
    const double rate = 2.0 * params.gamma * dim + std::abs(params.chi) * dim * dim;
    return static_cast<std::size_t>(std::floor(params.t * rate / kRk4StabilityLimit)) + 1;
}

Rk4Result rk4_evolve(const DensityMatrix& rho0, const ChannelParams& params, IntegratorConfig cfg)
{
    params.validate();
    if (cfg.steps == 0) {
        throw std::invalid_argument("rk4_evolve: steps must be >= 1");
    }
    const Truncation trunc = rho0.truncation();
    const double h = params.t / static_cast<double>(cfg.steps);
    const double dim = static_cast<double>(trunc.dim());
    const double stiffness = h * (2.0 * params.gamma * dim + std::abs(params.chi) * dim * dim);
    if (!(stiffness < kRk4StabilityLimit)) {
        const std::size_t required = rk4_required_steps(trunc, params);
        std::ostringstream msg;
        msg << "RK4 step too large (h*(2*gamma*N + |chi|*N^2) = " << stiffness << " >= " << kRk4StabilityLimit
            << "); need at least " << required << " steps";
        throw StabilityError(msg.str(), required);
    }

    ComplexMatrix rho = rho0.matrix();
    if (params.t > 0.0) {
        const Eigen::Index rows = trunc.rows();
        ComplexMatrix k1(rows, rows), k2(rows, rows), k3(rows, rows), k4(rows, rows), stage(rows, rows);
        for (std::size_t step = 0; step < cfg.steps; ++step) {
            axpy_rhs(k1, rho, params);
            stage = rho + (0.5 * h) * k1;
            axpy_rhs(k2, stage, params);
            stage = rho + (0.5 * h) * k2;
            axpy_rhs(k3, stage, params);
            stage = rho + h * k3;
            axpy_rhs(k4, stage, params);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }

    ComplexMatrix hermitian = 0.5 * (rho + rho.adjoint());
    const Complex trace = hermitian.trace();
    const double drift = std::abs(trace - 1.0);
    const bool renormalize = drift > kRk4TraceDriftGate;
    if (renormalize) {
        hermitian /= trace.real();
    }
    return {DensityMatrix::unchecked(std::move(hermitian)), drift, renormalize};
}

ComplexVector vectorize(const ComplexMatrix& rho)
{
    const Eigen::Index dim = rho.rows();
    ComplexVector v(dim * rho.cols());
    for (Eigen::Index m = 0; m < dim; ++m) {
        for (Eigen::Index n = 0; n < rho.cols(); ++n) {
            v(m * rho.cols() + n) = rho(m, n);
        }
    }
    return v;
}

ComplexMatrix unvectorize(const ComplexVector& v, Truncation trunc)
{
    const Eigen::Index dim = trunc.rows();
    if (v.size() != dim * dim) {
        throw DimensionError("unvectorize: vector length " + std::to_string(v.size()) + " is not N^2");
    }
    ComplexMatrix rho(dim, dim);
    for (Eigen::Index m = 0; m < dim; ++m) {
        for (Eigen::Index n = 0; n < dim; ++n) {
            rho(m, n) = v(m * dim + n);
        }
    }
    return rho;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
        }
    }
    return out;
}

Liouvillian build_liouvillian(Truncation trunc, const ChannelParams& params)
{
    params.validate();
    const ComplexMatrix a = annihilation_matrix(trunc);
    const ComplexMatrix number = number_operator(trunc);
    const ComplexMatrix number_sq = number * number;
    const ComplexMatrix id = ComplexMatrix::Identity(trunc.rows(), trunc.rows());

    // Left action A rho -> kron(A, I); right action rho B -> kron(I, B^T).
    // a rho a^dagger -> kron(a, (a^dagger)^T) = kron(a, conj(a)).
    ComplexMatrix generator = Complex{0.0, -params.chi} * (kron(number_sq, id) - kron(id, number_sq.transpose()));
    generator += params.gamma * (2.0 * kron(a, a.conjugate()) - kron(number, id) - kron(id, number.transpose()));
    return {trunc, std::move(generator), params};
}

DensityMatrix evolve_liouvillian(const DensityMatrix& rho0, const ChannelParams& params, std::size_t max_dim)
{
    params.validate();
    const Truncation trunc = rho0.truncation();
    if (trunc.dim() > max_dim) {
        std::ostringstream msg;
        msg << "Liouvillian for N=" << trunc.dim() << " needs an " << trunc.dim() * trunc.dim() << "^2 dense matrix"
            << " (limit N=" << max_dim << "); use the rk4 solver instead";
        throw MemoryGuardError(msg.str());
    }
    if (params.t == 0.0) {
        return DensityMatrix::unchecked(rho0.matrix());
    }
    const Liouvillian generator = build_liouvillian(trunc, params);
    const ComplexMatrix propagator = matrix_exponential(generator.matrix * params.t);
    return DensityMatrix::unchecked(unvectorize(propagator * vectorize(rho0.matrix()), trunc));
}

std::string_view solver_name(Solver solver)
{
    switch (solver) {
    case Solver::Kraus:
        return "kraus";
    case Solver::Rk4:
        return "rk4";
    case Solver::Liouville:
        return "liouville";
    }
    return "unknown";
}

std::optional<Solver> parse_solver(std::string_view name)
{
    for (Solver s : all_solvers()) {
        if (solver_name(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

std::vector<Solver> all_solvers()
{
    return {Solver::Kraus, Solver::Rk4, Solver::Liouville};
}

SolverRun run_solver(Solver solver, const DensityMatrix& rho0, const ChannelParams& params, IntegratorConfig cfg,
                     std::size_t liouville_max_dim)
{
    const auto start = std::chrono::steady_clock::now();
    try {
        std::optional<DensityMatrix> rho;
        double drift = 0.0;
        switch (solver) {
        case Solver::Kraus:
            rho = evolve_kraus(rho0, params);
            drift = std::abs(rho->trace() - 1.0);
            break;
        case Solver::Rk4: {
            Rk4Result r = rk4_evolve(rho0, params, cfg);
            drift = r.trace_drift;
            rho = std::move(r.rho);
            break;
        }
        case Solver::Liouville:
            rho = evolve_liouvillian(rho0, params, liouville_max_dim);
            drift = std::abs(rho->trace() - 1.0);
            break;
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        return {solver, std::move(*rho), drift, elapsed.count()};
    } catch (const SolverError&) {
        throw;
    } catch (const std::exception& e) {
        throw SolverError(solver, e.what());
    }
}

double CompareReport::max_deviation() const
{
    double worst = 0.0;
    for (const auto& p : pairs) {
        worst = std::max(worst, p.max_deviation);
    }
    return worst;
}

CompareReport solver_compare(const DensityMatrix& rho0, const ChannelParams& params, IntegratorConfig cfg,
                             const std::vector<Solver>& solvers)
{
    CompareReport report;
    for (Solver s : solvers) {
        report.runs.push_back(run_solver(s, rho0, params, cfg));
    }
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        for (std::size_t j = i + 1; j < report.runs.size(); ++j) {
            report.pairs.push_back({report.runs[i].solver, report.runs[j].solver,
                                    max_abs_difference(report.runs[i].rho.matrix(), report.runs[j].rho.matrix())});
        }
    }
    return report;
}

} // namespace kerrcav
