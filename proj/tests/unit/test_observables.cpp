#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "kerrcav/errors.hpp"
#include "kerrcav/kraus.hpp"
#include "kerrcav/observables.hpp"
#include "test_support.hpp"

namespace kerrcav {
namespace {

DensityMatrix fock(std::size_t n, std::size_t dim)
{
    return make_state(FockState{n}, Truncation(dim)).rho;
}

TEST(Purity, PureStatesAreOne)
{
    const Truncation trunc(16);
    for (const StateSpec& spec : {StateSpec{FockState{4}}, StateSpec{CoherentState{Complex(1.0, 1.0)}},
                                  StateSpec{CatState{1.5, M_PI}}}) {
        EXPECT_NEAR(purity(make_state(spec, trunc).rho), 1.0, 1e-10) << describe(spec);
    }
}

TEST(Purity, MaximallyMixed)
{
    for (std::size_t dim : {2u, 7u, 20u}) {
        const auto rho = DensityMatrix::validated(ComplexMatrix::Identity(static_cast<Eigen::Index>(dim),
                                                                          static_cast<Eigen::Index>(dim)) /
                                                  static_cast<double>(dim));
        EXPECT_NEAR(purity(rho), 1.0 / static_cast<double>(dim), 1e-12);
    }
}

TEST(Purity, KerrEvolutionKeepsCoherentStatePure)
{
    const auto rho0 = make_state(CoherentState{2.0}, Truncation(24)).rho;
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        EXPECT_NEAR(purity(evolve_kerr_unitary(rho0, 0.3, t)), purity(rho0), 1e-10);
        EXPECT_NEAR(purity(evolve_kraus(rho0, {0.3, 0.0, t})), 1.0, 1e-10);
    }
}

TEST(Purity, NonIncreasingUnderPureDamping)
{
    const auto rho0 = make_state(CoherentState{Complex(1.2, 0.5)}, Truncation(16)).rho;
    const double p0 = purity(rho0);
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        EXPECT_LE(purity(evolve_kraus(rho0, {0.0, 0.4, t})), p0 + 1e-10);
    }
}

TEST(Fidelity, FockOverlaps)
{
    EXPECT_NEAR(fidelity_pure(fock(0, 5), FockState{0}), 1.0, 1e-15);
    EXPECT_NEAR(fidelity_pure(fock(1, 5), FockState{0}), 0.0, 1e-15);
}

TEST(Fidelity, ThermalReferenceUnsupported)
{
    EXPECT_THROW(fidelity_pure(fock(0, 5), ThermalState{0.2}), std::invalid_argument);
}

TEST(Fidelity, DampedCoherentApproachesVacuum)
{
    const auto rho0 = make_state(CoherentState{1.0}, Truncation(16)).rho;
    EXPECT_GE(fidelity_pure(evolve_kraus(rho0, {0.0, 1.0, 10.0}), FockState{0}), 1.0 - 1e-6);
}

TEST(TraceDistance, Basics)
{
    std::mt19937_64 rng(21);
    const auto rho = testing::random_density(Truncation(6), rng);
    EXPECT_NEAR(trace_distance(rho, rho), 0.0, 1e-15);
    EXPECT_NEAR(trace_distance(fock(0, 6), fock(1, 6)), 1.0, 1e-14);
    EXPECT_THROW(trace_distance(fock(0, 6), fock(0, 5)), DimensionError);
}

TEST(TraceDistance, BoundsInfidelityForPureReference)
{
    std::mt19937_64 rng(22);
    const Truncation trunc(10);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = testing::random_physical_mixture(trunc, rng);
        const StateSpec psi = CoherentState{Complex(0.1 * trial, -0.05 * trial)};
        const auto sigma = make_state(psi, trunc).rho;
        EXPECT_LE(1.0 - fidelity_pure(rho, psi), trace_distance(rho, sigma) + 1e-9);
    }
}

TEST(PhotonNumber, FockAndCoherent)
{
    for (std::size_t n = 0; n < 8; ++n) {
        EXPECT_NEAR(mean_photon_number(fock(n, 8)), static_cast<double>(n), 1e-14);
    }
    const auto prep = make_state(CoherentState{Complex(1.0, 0.5)}, Truncation(20));
    const auto dist = photon_distribution(prep.rho);
    double summed = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        summed += static_cast<double>(k) * dist[k];
    }
    EXPECT_NEAR(mean_photon_number(prep.rho), summed, 1e-13);
    EXPECT_NEAR(mean_photon_number(prep.rho), 1.25, 1e-6);
}

TEST(PhotonNumber, ExponentialDecayWithoutKerr)
{
    const auto rho0 = make_state(CoherentState{1.3}, Truncation(20)).rho;
    const double n0 = mean_photon_number(rho0);
    const double gamma = 0.25;
    for (double t : {0.2, 1.0, 3.0}) {
        EXPECT_NEAR(mean_photon_number(evolve_kraus(rho0, {0.0, gamma, t})), n0 * std::exp(-2.0 * gamma * t),
                    1e-8);
    }
}

TEST(PhotonNumber, DistributionSumsToOneAfterEvolution)
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho0 = testing::random_physical_mixture(Truncation(12), rng);
        const auto out = evolve_kraus(rho0, {0.4, 0.3, 0.5 * trial});
        const auto dist = photon_distribution(out);
        EXPECT_NEAR(std::accumulate(dist.begin(), dist.end(), 0.0), 1.0, 1e-10);
        EXPECT_GE(*std::min_element(dist.begin(), dist.end()), -1e-12);
    }
}

TEST(MinEigenvalue, KnownSpectra)
{
    EXPECT_NEAR(min_eigenvalue(fock(2, 4)), 0.0, 1e-15);
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 0) = 0.5;
    m(1, 1) = 0.3;
    m(2, 2) = 0.2;
    EXPECT_NEAR(min_eigenvalue(DensityMatrix::validated(m)), 0.2, 1e-15);
}

TEST(Observe, RecordFields)
{
    const auto rho = make_state(CoherentState{0.8}, Truncation(10)).rho;
    const auto rec = observe(1.5, rho, CoherentState{0.8});
    EXPECT_EQ(rec.t, 1.5);
    EXPECT_NEAR(rec.trace_re, 1.0, 1e-14);
    EXPECT_NEAR(rec.trace_im, 0.0, 1e-15);
    EXPECT_NEAR(rec.purity, 1.0, 1e-12);
    EXPECT_NEAR(rec.fidelity_vs_ref, 1.0, 1e-12);
    EXPECT_NEAR(rec.min_eig, 0.0, 1e-12);
    ASSERT_EQ(rec.photon_dist.size(), 10u);
    EXPECT_NEAR(rec.mean_n, mean_photon_number(rho), 1e-15);
}

TEST(Husimi, VacuumPeak)
{
    QGridBounds bounds;
    bounds.resolution = 41;  // includes alpha = 0
    const auto q = husimi_q(fock(0, 8), bounds);
    ASSERT_EQ(q.values.size(), 41u * 41u);
    EXPECT_NEAR(q.re_at(20), 0.0, 1e-15);
    EXPECT_NEAR(q.im_at(20), 0.0, 1e-15);
    EXPECT_NEAR(q.at(20, 20), 1.0 / M_PI, 1e-10);
    EXPECT_EQ(*std::max_element(q.values.begin(), q.values.end()), q.at(20, 20));
}

TEST(Husimi, NonNegativeAndBoundedMass)
{
    std::mt19937_64 rng(24);
    QGridBounds bounds{-6.0, 6.0, -6.0, 6.0, 97};
    const double cell = (12.0 / 96.0) * (12.0 / 96.0);
    for (int trial = 0; trial < 5; ++trial) {
        const auto rho = testing::random_physical_mixture(Truncation(12), rng);
        const auto q = husimi_q(rho, bounds);
        EXPECT_GE(*std::min_element(q.values.begin(), q.values.end()), -1e-12);
        const double mass = std::accumulate(q.values.begin(), q.values.end(), 0.0) * cell;
        EXPECT_LE(mass, 1.0 + 1e-3);
    }
}

TEST(Husimi, RejectsBadGrid)
{
    QGridBounds bounds;
    bounds.resolution = 1;
    EXPECT_THROW(husimi_q(fock(0, 4), bounds), std::invalid_argument);
    QGridBounds empty{1.0, 1.0, -1.0, 1.0, 8};
    EXPECT_THROW(husimi_q(fock(0, 4), empty), std::invalid_argument);
}

TEST(Husimi, KerrCatHasTwoLobesAlongImaginaryAxis)
{
    // chi t = pi/2 maps |alpha> to a two-component cat with lobes at +-alpha;
    // alpha = 2i puts them on the imaginary axis.
    const Complex alpha{0.0, 2.0};
    const auto rho0 = make_state(CoherentState{alpha}, Truncation(30)).rho;
    const auto rho = evolve_kerr_unitary(rho0, 1.0, M_PI / 2.0);
    const QGridBounds bounds{-4.0, 4.0, -4.0, 4.0, 81};
    const auto q = husimi_q(rho, bounds);
    const std::size_t res = bounds.resolution;

    std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> maxima;
    for (std::size_t j = 1; j + 1 < res; ++j) {
        for (std::size_t i = 1; i + 1 < res; ++i) {
            const double v = q.at(i, j);
            bool peak = true;
            for (int dj = -1; dj <= 1 && peak; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if ((di != 0 || dj != 0) && q.at(i + di, j + dj) >= v) {
                        peak = false;
                        break;
                    }
                }
            }
            if (peak) {
                maxima.push_back({v, {i, j}});
            }
        }
    }
    ASSERT_GE(maxima.size(), 2u);
    std::sort(maxima.begin(), maxima.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const auto [i1, j1] = maxima[0].second;
    const auto [i2, j2] = maxima[1].second;
    const double sep_re = q.re_at(i1) - q.re_at(i2);
    const double sep_im = q.im_at(j1) - q.im_at(j2);
    EXPECT_NEAR(std::hypot(sep_re, sep_im), 2.0 * std::abs(alpha), 0.2);
    EXPECT_NEAR(sep_re, 0.0, 0.15);
    EXPECT_NEAR(std::abs(q.im_at(j1)), 2.0, 0.15);
    EXPECT_NEAR(maxima[0].first, maxima[1].first, 1e-3);
}

} // namespace
} // namespace kerrcav
