#include "kerrcav/kraus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kerrcav/errors.hpp"

namespace kerrcav {

namespace {

// exp(w) - 1 without cancellation for small |w|.
Complex complex_expm1(Complex w)
{
    const double x = w.real();
    const double y = w.imag();
    const double half_sin = std::sin(0.5 * y);
    const double re = std::expm1(x) * std::cos(y) - 2.0 * half_sin * half_sin;
    const double im = std::exp(x) * std::sin(y);
    return {re, im};
}

// exp(-i chi t k^2 - gamma t k)
Complex level_factor(std::size_t k, const ChannelParams& p)
{
    const double kd = static_cast<double>(k);
    return std::polar(std::exp(-p.gamma * p.t * kd), -p.chi * p.t * kd * kd);
}

// exp(-i chi t (m^2 - n^2) - gamma t (m + n))
Complex pair_factor(std::size_t m, std::size_t n, const ChannelParams& p)
{
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    // m^2 - n^2 is an integer; form it exactly before scaling by chi t.
    const double square_gap = md * md - nd * nd;
    return std::polar(std::exp(-p.gamma * p.t * (md + nd)), -p.chi * p.t * square_gap);
}

// ln sqrt((m+l)!(n+l)!/(m!n!)) - ln l!
double log_ladder_ratio(std::size_t m, std::size_t n, std::size_t l)
{
    // Pair each difference so that l = 0 cancels exactly.
    return 0.5 * ((log_factorial(m + l) - log_factorial(m)) + (log_factorial(n + l) - log_factorial(n))) -
           log_factorial(l);
}

void require_same_truncation(const Truncation& a, const Truncation& b, const char* what)
{
    if (!(a == b)) {
        throw DimensionError(std::string(what) + ": truncation mismatch (" + std::to_string(a.dim()) +
                             " vs " + std::to_string(b.dim()) + ")");
    }
}

} // namespace

void ChannelParams::validate() const
{
    if (!std::isfinite(chi)) {
        throw std::invalid_argument("chi must be finite");
    }
    if (!std::isfinite(gamma) || gamma < 0.0) {
        throw std::invalid_argument("gamma must be finite and >= 0");
    }
    if (!std::isfinite(t) || t < 0.0) {
        throw std::invalid_argument("t must be finite and >= 0");
    }
}

Complex lambda_direct(Complex z, double gamma, double t)
{
    if (gamma == 0.0) {
        return {0.0, 0.0};
    }
    return gamma * (-complex_expm1(-2.0 * t * z)) / z;
}

Complex lambda_series(Complex z, double gamma, double t)
{
    if (gamma == 0.0 || t == 0.0) {
        return {0.0, 0.0};
    }
    // (1 - e^{-w}) / z = 2t * sum_j (-w)^j / (j+1)!,  w = 2 t z
    const Complex w = 2.0 * t * z;
    Complex sum{1.0, 0.0};
    Complex term{1.0, 0.0};
    for (int j = 1; j < 64; ++j) {
        term *= -w / static_cast<double>(j + 1);
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) {
            break;
        }
    }
    return gamma * 2.0 * t * sum;
}

Complex lambda_coefficient(std::size_t m, std::size_t n, const ChannelParams& params)
{
    const double gap = static_cast<double>(m) - static_cast<double>(n);
    const Complex z{params.gamma, params.chi * gap};
    if (std::abs(z) * params.t < kLambdaSeriesThreshold) {
        return lambda_series(z, params.gamma, params.t);
    }
    return lambda_direct(z, params.gamma, params.t);
}

LambdaTable lambda_table(Truncation trunc, const ChannelParams& params)
{
    params.validate();
    ComplexMatrix values(trunc.rows(), trunc.rows());
    for (Eigen::Index n = 0; n < trunc.rows(); ++n) {
        for (Eigen::Index m = 0; m < trunc.rows(); ++m) {
            values(m, n) = lambda_coefficient(static_cast<std::size_t>(m), static_cast<std::size_t>(n), params);
        }
    }
    return {trunc, std::move(values), params};
}

Complex weight_coefficient(std::size_t m, std::size_t n, std::size_t l, const ChannelParams& params)
{
    const Complex lambda = lambda_coefficient(m, n, params);
    const double magnitude = std::exp(log_ladder_ratio(m, n, l));
    return magnitude * integer_power(lambda, l) * pair_factor(m, n, params);
}

DensityMatrix evolve_kraus(const DensityMatrix& rho0, const ChannelParams& params)
{
    return evolve_kraus(rho0, lambda_table(rho0.truncation(), params));
}

DensityMatrix evolve_kraus(const DensityMatrix& rho0, const LambdaTable& table)
{
    require_same_truncation(rho0.truncation(), table.trunc, "evolve_kraus");
    const std::size_t dim = rho0.dim();
    const ComplexMatrix& in = rho0.matrix();
    ComplexMatrix out = ComplexMatrix::Zero(in.rows(), in.cols());

    for (std::size_t n = 0; n < dim; ++n) {
        for (std::size_t m = 0; m < dim; ++m) {
            const auto mi = static_cast<Eigen::Index>(m);
            const auto ni = static_cast<Eigen::Index>(n);
            const Complex lambda = table.values(mi, ni);
            // rho0 vanishes beyond level N-1, so the l-sum is finite and exact.
            const std::size_t l_max = dim - 1 - std::max(m, n);
            Complex lambda_power{1.0, 0.0};
            Complex acc{0.0, 0.0};
            for (std::size_t l = 0; l <= l_max; ++l) {
                if (l > 0) {
                    lambda_power *= lambda;
                }
                const auto li = static_cast<Eigen::Index>(l);
                acc += std::exp(log_ladder_ratio(m, n, l)) * lambda_power * in(mi + li, ni + li);
            }
            out(mi, ni) = acc * pair_factor(m, n, table.params);
        }
    }
    return DensityMatrix::unchecked(std::move(out));
}

double GeneralizedKrausTerm::conjugacy_defect() const
{
    return max_abs_difference(left, right_adjoint.adjoint());
}

GeneralizedKrausTerm build_kraus_term(std::size_t m, std::size_t n, std::size_t l,
                                      const ChannelParams& params, Truncation trunc)
{
    params.validate();
    const std::size_t dim = trunc.dim();
    if (m >= dim || n >= dim) {
        throw std::out_of_range("kraus term level outside truncation");
    }
    if (l > dim - 1 - std::max(m, n)) {
        throw std::out_of_range("kraus term order l=" + std::to_string(l) + " exceeds N-1-max(m,n)");
    }
    const double inv_l_factorial = std::exp(-log_factorial(l));

    // Principal branch of sqrt(Lambda^l / l!).
    const Complex left_root = std::sqrt(integer_power(lambda_coefficient(m, n, params), l) * inv_l_factorial);
    const Complex right_root = std::sqrt(integer_power(lambda_coefficient(n, m, params), l) * inv_l_factorial);

    // <k| a^l = sqrt((k+l)!/k!) <k+l|
    const auto ladder = [l](std::size_t k) {
        return std::exp(0.5 * (log_factorial(k + l) - log_factorial(k)));
    };

    GeneralizedKrausTerm term;
    term.m = m;
    term.n = n;
    term.l = l;
    term.left = ComplexMatrix::Zero(trunc.rows(), trunc.rows());
    term.right_adjoint = ComplexMatrix::Zero(trunc.rows(), trunc.rows());

    const auto mi = static_cast<Eigen::Index>(m);
    const auto ni = static_cast<Eigen::Index>(n);
    const auto li = static_cast<Eigen::Index>(l);
    term.left(mi, mi + li) = left_root * level_factor(m, params) * ladder(m);
    term.right_adjoint(ni + li, ni) = std::conj(right_root * level_factor(n, params)) * ladder(n);
    return term;
}

std::vector<GeneralizedKrausTerm> build_kraus_family(const ChannelParams& params, Truncation trunc)
{
    std::vector<GeneralizedKrausTerm> family;
    const std::size_t dim = trunc.dim();
    for (std::size_t m = 0; m < dim; ++m) {
        for (std::size_t n = 0; n < dim; ++n) {
            for (std::size_t l = 0; l <= dim - 1 - std::max(m, n); ++l) {
                family.push_back(build_kraus_term(m, n, l, params, trunc));
            }
        }
    }
    return family;
}

ComplexMatrix apply_kraus_family(const std::vector<GeneralizedKrausTerm>& family, const DensityMatrix& rho0)
{
    ComplexMatrix out = ComplexMatrix::Zero(rho0.truncation().rows(), rho0.truncation().rows());
    for (const auto& term : family) {
        if (term.left.rows() != out.rows()) {
            throw DimensionError("apply_kraus_family: term dimension differs from rho0");
        }
        out.noalias() += term.left * rho0.matrix() * term.right_adjoint;
    }
    return out;
}

CompletenessReport completeness_report(Truncation trunc, const ChannelParams& params)
{
    params.validate();
    const std::size_t dim = trunc.dim();
    const double q = std::exp(-2.0 * params.gamma * params.t);
    const double one_minus_q = -std::expm1(-2.0 * params.gamma * params.t);

    CompletenessReport report;
    report.sum = ComplexMatrix::Zero(trunc.rows(), trunc.rows());
    // sum_{n,l} (n+l)!/n! (1-q)^l / l! q^n |n+l><n+l|
    for (std::size_t n = 0; n < dim; ++n) {
        for (std::size_t l = 0; n + l < dim; ++l) {
            const double binomial = std::exp(log_factorial(n + l) - log_factorial(n) - log_factorial(l));
            const auto k = static_cast<Eigen::Index>(n + l);
            report.sum(k, k) += binomial * integer_power(one_minus_q, l) * integer_power(q, n);
        }
    }
    for (Eigen::Index j = 0; j < trunc.rows(); ++j) {
        for (Eigen::Index k = 0; k < trunc.rows(); ++k) {
            if (j == k) {
                report.diagonal_residual = std::max(report.diagonal_residual, std::abs(report.sum(k, k) - 1.0));
            } else {
                report.off_diagonal_max = std::max(report.off_diagonal_max, std::abs(report.sum(j, k)));
            }
        }
    }
    return report;
}

double completeness_residual(Truncation trunc, const ChannelParams& params)
{
    return completeness_report(trunc, params).residual();
}

DensityMatrix evolve_amplitude_damping(const DensityMatrix& rho0, double gamma, double t)
{
    ChannelParams{0.0, gamma, t}.validate();
    const Truncation trunc = rho0.truncation();
    const ComplexMatrix a = annihilation_matrix(trunc);
    const ComplexMatrix a_dag = a.adjoint();
    const double loss = -std::expm1(-2.0 * gamma * t);

    ComplexMatrix ladder = rho0.matrix();  // a^l rho0 a^dagger^l
    ComplexMatrix sum = ladder;
    for (std::size_t l = 1; l < trunc.dim(); ++l) {
        ladder = (a * ladder * a_dag).eval();
        sum += (integer_power(loss, l) * std::exp(-log_factorial(l))) * ladder;
    }

    Eigen::VectorXcd damping(trunc.rows());
    for (Eigen::Index k = 0; k < trunc.rows(); ++k) {
        damping(k) = std::exp(-gamma * t * static_cast<double>(k));
    }
    ComplexMatrix out = damping.asDiagonal() * sum * damping.asDiagonal();
    return DensityMatrix::unchecked(std::move(out));
}

DensityMatrix evolve_kerr_unitary(const DensityMatrix& rho0, double chi, double t)
{
    ChannelParams{chi, 0.0, t}.validate();
    // U = exp(-i chi t n^2), applied as U rho0 U^dagger.
    Eigen::VectorXcd phases(rho0.truncation().rows());
    for (Eigen::Index k = 0; k < phases.size(); ++k) {
        const double kd = static_cast<double>(k);
        phases(k) = std::polar(1.0, -chi * t * kd * kd);
    }
    ComplexMatrix out = phases.asDiagonal() * rho0.matrix() * phases.conjugate().asDiagonal();
    return DensityMatrix::unchecked(std::move(out));
}

} // namespace kerrcav
