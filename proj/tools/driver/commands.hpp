#pragma once

#include <iosfwd>
#include <string>

#include "driver/config.hpp"

namespace kerrcav::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // failed check, threshold or solver
inline constexpr int kExitUsage = 2;    // bad command line or config

// Writes one observable row per (time, solver) to `out` in cfg.format.
int run_evolve(const RunConfig& cfg, std::ostream& out, std::ostream& diag);

// Pairwise solver deviations and timings; needs >= 2 solvers.
int run_compare(const RunConfig& cfg, std::ostream& out, std::ostream& diag);

// Invariant suite; one PASS/FAIL line per check.
int run_validate(const RunConfig& cfg, std::ostream& out, std::ostream& diag);

// Per-term conjugacy defects and operator-sum reconstruction at the last time point.
int run_kraus_check(const RunConfig& cfg, std::ostream& out, std::ostream& diag);

// 17 significant digits, '.' decimal separator regardless of locale.
std::string format_real(double value);

// t,solver,trace_re,trace_im,purity,mean_n,fidelity_vs_ref,min_eig,p0..p{N-1}
std::string csv_header(std::size_t dimension);

} // namespace kerrcav::cli
