#include <cmath>

#include "kerrcav/errors.hpp"
#include "kerrcav/reference.hpp"

namespace kerrcav {

namespace {

constexpr double kScaledNormTarget = 0.5;
constexpr double kTaylorRelativeCutoff = 1e-18;
constexpr int kMaxTaylorTerms = 64;

double one_norm(const ComplexMatrix& m)
{
    if (m.size() == 0) {
        return 0.0;
    }
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

} // namespace

ComplexMatrix matrix_exponential(const ComplexMatrix& m)
{
    if (m.rows() != m.cols()) {
        throw DimensionError("matrix_exponential needs a square matrix");
    }
    const Eigen::Index dim = m.rows();
    const ComplexMatrix identity = ComplexMatrix::Identity(dim, dim);
    const double norm = one_norm(m);
    if (norm == 0.0) {
        return identity;
    }

    int squarings = 0;
    double scaled_norm = norm;
    while (scaled_norm > kScaledNormTarget) {
        scaled_norm *= 0.5;
        ++squarings;
    }
    const ComplexMatrix scaled = m * std::ldexp(1.0, -squarings);

    ComplexMatrix result = identity;
    ComplexMatrix term = identity;
    for (int k = 1; k <= kMaxTaylorTerms; ++k) {
        term = (term * scaled / static_cast<double>(k)).eval();
        result += term;
        if (one_norm(term) < kTaylorRelativeCutoff * one_norm(result)) {
            break;
        }
    }
    for (int i = 0; i < squarings; ++i) {
        result = (result * result).eval();
    }
    return result;
}

} // namespace kerrcav
