#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "kerrcav/errors.hpp"
#include "kerrcav/fock.hpp"

namespace kerrcav {

namespace {

constexpr double kHermitianTolerance = 1e-10;
constexpr double kOffDiagonalTarget = 1e-14;
constexpr int kMaxSweeps = 64;

double off_diagonal_norm(const ComplexMatrix& a)
{
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i != j) {
                sum += std::norm(a(i, j));
            }
        }
    }
    return std::sqrt(sum);
}

// Zeroes a(p,q) with the unitary G = Phase * Rotation, where Phase carries
// exp(-i arg a_pq) on index q so the pivot becomes real and a classical
// symmetric Jacobi rotation finishes the job.
void rotate(ComplexMatrix& a, ComplexMatrix& v, Eigen::Index p, Eigen::Index q)
{
    const Complex apq = a(p, q);
    const double magnitude = std::abs(apq);
    const Complex phase = std::conj(apq) / magnitude;  // exp(-i arg a_pq)
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();

    const double theta = (aqq - app) / (2.0 * magnitude);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    // Columns p,q of G: G_pp = c, G_qp = -s*phase, G_pq = s, G_qq = c*phase.
    const Complex g_pp = c;
    const Complex g_qp = -s * phase;
    const Complex g_pq = s;
    const Complex g_qq = c * phase;

    // A <- A G
    for (Eigen::Index k = 0; k < a.rows(); ++k) {
        const Complex akp = a(k, p);
        const Complex akq = a(k, q);
        a(k, p) = akp * g_pp + akq * g_qp;
        a(k, q) = akp * g_pq + akq * g_qq;
    }
    // A <- G^dagger A
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
        const Complex apk = a(p, k);
        const Complex aqk = a(q, k);
        a(p, k) = std::conj(g_pp) * apk + std::conj(g_qp) * aqk;
        a(q, k) = std::conj(g_pq) * apk + std::conj(g_qq) * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = a(p, p).real();
    a(q, q) = a(q, q).real();

    // V <- V G
    for (Eigen::Index k = 0; k < v.rows(); ++k) {
        const Complex vkp = v(k, p);
        const Complex vkq = v(k, q);
        v(k, p) = vkp * g_pp + vkq * g_qp;
        v(k, q) = vkp * g_pq + vkq * g_qq;
    }
}

} // namespace

HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& m)
{
    if (m.rows() != m.cols()) {
        throw DimensionError("hermitian_eigensystem needs a square matrix");
    }
    const Eigen::Index n = m.rows();
    if (n == 0) {
        return {};
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double defect = hermiticity_defect(m);
    if (defect > kHermitianTolerance * scale) {
        std::ostringstream msg;
        msg << "hermitian_eigensystem: input not Hermitian (defect " << defect << ")";
        throw ContractViolation(msg.str());
    }

    ComplexMatrix a = 0.5 * (m + m.adjoint());
    ComplexMatrix v = ComplexMatrix::Identity(n, n);
    const double target = kOffDiagonalTarget * std::max(1.0, a.norm());

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) < target) {
            break;
        }
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) > 1e-300) {
                    rotate(a, v, p, q);
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&a](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });

    HermitianEigensystem result;
    result.values.reserve(static_cast<std::size_t>(n));
    result.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        result.values.push_back(a(src, src).real());
        result.vectors.col(k) = v.col(src);
    }
    return result;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m)
{
    return hermitian_eigensystem(m).values;
}

} // namespace kerrcav
