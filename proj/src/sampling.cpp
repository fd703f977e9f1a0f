#include "postopt/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "postopt/rng.hpp"

namespace postopt {

PriorSampleSet sample_prior(const SamplePlan& plan, const EllipticPrior& prior, double zeta,
                            const ControlVector& z_tilde, const Matrix& M_z) {
    if (plan.sample_count < 1 || plan.segment_steps < 1) {
        throw std::invalid_argument("sample_prior: need sample_count >= 1 and segment_steps >= 1");
    }
    if (zeta <= 0.0) {
        throw std::invalid_argument("sample_prior: zeta must be positive");
    }
    if (plan.z_ref.size() != z_tilde.size()) {
        throw std::invalid_argument("sample_prior: z_ref length does not match z_tilde");
    }
    const int m = prior.dim();
    const int S = plan.sample_count;
    const int K = plan.segment_steps;

    PriorSampleSet set;
    const Vector dir = plan.z_ref - z_tilde;
    set.c = std::sqrt(dir.dot(M_z * dir));
    set.base.resize(m, S);
    set.slope.resize(m, S);
    set.curves.assign(S, Matrix(m, K + 1));

    const double zeta_inv = 1.0 / zeta;
    for (int s = 0; s < S; ++s) {
        NormalStream stream(plan.seed, static_cast<std::uint64_t>(s));
        set.base.col(s) = prior.apply_L_inv_sqrt(stream.draw(m));
        set.slope.col(s) = prior.apply_L_inv_sqrt(stream.draw(m));
        for (int k = 0; k <= K; ++k) {
            const double fraction = static_cast<double>(k) / static_cast<double>(K);
            set.curves[s].col(k) =
                set.base.col(s) + fraction * zeta_inv * set.c * set.slope.col(s);
        }
    }
    return set;
}

}  // namespace postopt
