#pragma once

// Periodic-orbit search and classification: damped-free Newton on f^p(z) - z
// with chain-rule derivatives, minimal-period and duplicate filters, grid
// censuses, and basin fraction estimates.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "emlab/dynsys.hpp"
#include "emlab/transport.hpp"

namespace emlab {

enum class OrbitClass { Sink, Saddle, Source, ProjHypSource, NonHyperbolic };
const char* orbit_class_name(OrbitClass c);

// tol-banded moduli test; ProjHypSource is a source whose multiplier moduli
// are separated by more than the tolerance band
OrbitClass classify_multipliers(std::complex<double> m1, std::complex<double> m2, int dim,
                                double tol = 1e-6);

struct PeriodicOrbit {
    std::vector<PhasePoint> points;  // one full cycle, lexicographic min first
    int period = 1;
    std::complex<double> m1, m2;  // multipliers, |m1| >= |m2|; m2 unused in 1D
    OrbitClass cls = OrbitClass::NonHyperbolic;
    double det = 0.0;              // det Df^p along the cycle
    bool area_contracting = false; // |det| < 1 - tol

    const PhasePoint& rep() const { return points.front(); }
};

struct NewtonDiagnostics {
    long attempts = 0;
    long converged = 0;
    long singular_skips = 0;   // singular Newton matrix or singular locus hit
    long escaped = 0;          // iterate or orbit left the phase box
    long divisor_rejects = 0;  // converged onto a shorter-period orbit
    long duplicates = 0;
};

// One Newton run for an orbit of minimal period `period` from `guess`;
// nullopt when it diverges, hits a singular locus, converges to a shorter
// period, or fails the residual gate.
std::optional<PeriodicOrbit> find_periodic(const SystemSpec& sys, const ParamPoint& a,
                                           PhasePoint guess, int period,
                                           NewtonDiagnostics* diag = nullptr);

struct CensusResult {
    std::vector<PeriodicOrbit> orbits;  // every distinct periodic orbit found
    std::vector<PeriodicOrbit> sinks;   // the subset classified Sink
    NewtonDiagnostics diag;
    int max_period = 1;
    int grid = 50;
};

// Newton from every cell center of a grid x grid lattice (grid cells in 1D),
// periods 1..max_period. Orbits are deduplicated on their representatives and
// sorted by period, then representative.
CensusResult sink_census(const SystemSpec& sys, const ParamPoint& a, int max_period,
                         int grid = 50, int threads = 1);

struct BasinEstimate {
    double fraction = 0.0;        // samples whose orbit enters the 1e-6 tube
    int samples = 0;
    int n_steps = 0;
    DiscreteMeasure limit;        // uniform measure on the cycle
};

BasinEstimate basin_measure_estimate(const SystemSpec& sys, const ParamPoint& a,
                                     const PeriodicOrbit& orbit, int n_steps, int samples,
                                     std::uint64_t seed);

}  // namespace emlab
