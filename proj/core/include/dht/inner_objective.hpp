#pragma once

#include <optional>

#include "dht/extreal.hpp"
#include "dht/joint_table.hpp"
#include "dht/kernel.hpp"
#include "dht/optimizer.hpp"
#include "dht/simplex.hpp"

namespace dht {

/// The four channels X -> Y and X -> Z under each hypothesis that
/// parametrize the inner swap cost f.
struct ChannelQuad {
    Kernel p_y_given_x;
    Kernel p_z_given_x;
    Kernel q_y_given_x;
    Kernel q_z_given_x;

    ChannelQuad(Kernel py, Kernel pz, Kernel qy, Kernel qz);

    int input_size() const { return p_y_given_x.rows(); }
};

/// Optional coupling data enabling the divergence cap on f (constant-U
/// case): p_yz_given_x rows are joint rows over Y x Z (y slow, z fast),
/// q_y_given_z is the alternative-hypothesis Y|Z conditional.
struct CapContext {
    Kernel p_yz_given_x;
    Kernel q_y_given_z;
};

struct FResult {
    ExtReal value;
    SimplexVector witness_qhat;
    bool boundary_flag = false;        // witness at the eta-clamp: possible +inf
    std::optional<ExtReal> cap;        // divergence cap when a coupling was supplied
    int grid_points_skipped = 0;       // indeterminate (inf - inf) grid points
};

/// D(P_Y || Qhat_Y) - D(P_Z || Qhat_Z) at a fixed reference measure qhat_x.
/// Requires qhat_x absolutely continuous w.r.t. q_x. Throws
/// IndeterminateError when both divergences are +inf.
ExtReal f_objective(const SimplexVector& qhat_x, const SimplexVector& p_x,
                    const ChannelQuad& quad, const SimplexVector& q_x);

/// Maximize f_objective over qhat_x << q_x, clamped to the eta-interior of
/// the simplex on the support of q_x. The returned value is certified by the
/// witness (it is the objective evaluated there). Coarse-grid seeding plus
/// multi-start projected-gradient ascent; deterministic (ties break toward
/// the lowest grid index).
FResult f_max(const SimplexVector& p_x, const ChannelQuad& quad, const SimplexVector& q_x,
              const OptimizerConfig& cfg, const std::optional<CapContext>& cap = std::nullopt);

/// D(P_{YZU} || P_{UZ} Q_{Y|Z}) computed exactly from a joint with axes
/// U,X,Y,Z. Upper-bounds the U-averaged f whenever the alternative
/// hypothesis factorizes through Z.
ExtReal thm2_cap(const JointTable& p_uxyz, const Kernel& q_y_given_z);

/// For additive Gaussian noise channels: true iff the inner maximization is
/// +inf, i.e. the alternative's Y-noise is strictly smaller than its Z-noise.
bool gaussian_unbounded_check(double sigma_q_y, double sigma_q_z);

} // namespace dht
