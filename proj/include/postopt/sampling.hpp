#pragma once

#include <cstdint>
#include <vector>

#include "postopt/prior.hpp"
#include "postopt/types.hpp"

namespace postopt {

/// Inputs of the prior-discrepancy sampling procedure: S samples evaluated
/// along the segment zhat_k = z~ + (k/K)(z_r - z~), k = 0..K.
struct SamplePlan {
    int sample_count = 1;
    int segment_steps = 1;
    ControlVector z_ref;
    std::uint64_t seed = 0;
};

/// Realized prior samples. Per sample s the base and slope draws are
/// L^-1/2 omega_0 and L^-1/2 omega_1; curve k reconstructs exactly as
/// base + (k/K) zeta^-1 c slope with c = |z_r - z~| in the M_z norm.
struct PriorSampleSet {
    double c = 0.0;
    Matrix base;                 // m x S
    Matrix slope;                // m x S
    std::vector<Matrix> curves;  // per sample: m x (K+1)
};

/// Draw S prior discrepancy samples along the control segment.
///
/// Randomness is mt19937_64 driven through a Box-Muller transform (both fully
/// specified, hence portable across platforms). Sample s uses the substream
/// seeded by seed_seq{seed_lo, seed_hi, s}, so parallel generation by sample
/// index reproduces the serial output bit for bit.
PriorSampleSet sample_prior(const SamplePlan& plan, const EllipticPrior& prior, double zeta,
                            const ControlVector& z_tilde, const Matrix& M_z);

}  // namespace postopt
