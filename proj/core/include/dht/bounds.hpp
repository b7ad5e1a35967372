#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dht/extreal.hpp"
#include "dht/inner_objective.hpp"
#include "dht/joint_table.hpp"
#include "dht/kernel.hpp"
#include "dht/optimizer.hpp"

namespace dht {

/// A distributed testing instance: joint source laws under the two
/// hypotheses plus the communication rate in nats per symbol.
struct DiscreteScenario {
    JointTable p_xy;
    JointTable q_xy;
    double rate;

    DiscreteScenario(JointTable p, JointTable q, double rate_nats);

    int x_size() const { return p_xy.axes()[0].size; }
    int y_size() const { return p_xy.axes()[1].size; }
};

/// Candidate auxiliary receiver: channel pair from (X,Y) to Z under the two
/// hypotheses. Kernel rows enumerate (x,y) row-major, x slowest.
struct AuxiliaryReceiver {
    Kernel p_z_given_xy;
    Kernel q_z_given_xy;

    AuxiliaryReceiver(Kernel p, Kernel q);
    int z_size() const { return p_z_given_xy.cols(); }
};

enum class TerminalKind { Centralized, Zero, Value };

/// How to bound the substituted receiver's own exponent.
struct TerminalBound {
    TerminalKind kind = TerminalKind::Centralized;
    double value = 0.0;

    static TerminalBound centralized() { return {TerminalKind::Centralized, 0.0}; }
    static TerminalBound zero() { return {TerminalKind::Zero, 0.0}; }
    static TerminalBound user(double v) { return {TerminalKind::Value, v}; }
};

struct MembershipResult {
    bool member = false;
    double factorization_residual = 0.0; // ||Q_{YZ|X} - Q_{Z|X} Q_{Y|Z}||_inf
    double second_residual = 0.0;        // ||P_XZ - Q_XZ||_inf or ||P_{Y|Z} - Q_{Y|Z}||_inf
    std::vector<int> flagged_rows;       // zero-mass conditioning rows compared loosely
};

struct Diagnostics {
    std::vector<double> constraint_values; // mutual-information values at the witness
    std::vector<std::string> constraint_names;
    double rate = 0.0;
    int starts = 0;
    int best_start = -1;
    int penalty_rounds_used = 0;
    bool boundary_flag = false; // any inner witness at the clamp
    std::vector<double> part_values;     // chain links / terminal decomposition
    std::vector<Kernel> part_witnesses;  // per-link U channels for re-evaluation
    std::vector<std::string> notes;
};

struct BoundResult {
    ExtReal value;
    std::optional<Kernel> witness_u_channel; // P_{U|X}, rows over X
    std::optional<std::vector<SimplexVector>> witness_qhat_per_u;
    Diagnostics diagnostics;
};

/// Factorization + marginal-match test for the auxiliary-receiver class
/// requiring Q_{YZ|X} = Q_{Z|X} Q_{Y|Z} and P_XZ = Q_XZ.
MembershipResult membership_R_check(const DiscreteScenario& scn, const AuxiliaryReceiver& aux,
                                    double tol);

/// Variant with the marginal condition replaced by P_{Y|Z} = Q_{Y|Z};
/// conditionals are compared only on Z symbols of positive mass (flagged).
MembershipResult membership_Rtilde_check(const DiscreteScenario& scn,
                                         const AuxiliaryReceiver& aux, double tol);

/// Rate-constrained concave relaxation of f: maximize sum_u P(u) f(P_{X|U=u})
/// over P_{U|X} with |U| = |X|+2, subject to I_P(U;X|Y) <= R and
/// I_P(U;X|Z) <= R. The constant-U channel is always feasible, so the value
/// dominates f_max(P_X).
BoundResult g_bound(const DiscreteScenario& scn, const Kernel& p_z_given_x,
                    const Kernel& q_z_given_x, const OptimizerConfig& cfg);

/// Add-and-subtract upper bound: g_bound plus a terminal bound on the
/// substituted pair (X,Z). Requires finite D(P_XY||Q_XY) and D(P_XZ||Q_XZ).
BoundResult addsub_upper_bound(const DiscreteScenario& scn, const AuxiliaryReceiver& aux,
                               const TerminalBound& terminal, const OptimizerConfig& cfg);

/// D(P_YZ||Q_YZ) + max I_P(Y;U|Z) over I_P(X;U|Z) <= R. Requires
/// membership_R_check to pass at cfg.membership_tol.
BoundResult rw_bound(const DiscreteScenario& scn, const AuxiliaryReceiver& aux,
                     const OptimizerConfig& cfg);

/// Same objective with U restricted by both rate constraints
/// (I_P(U;X|Z) <= R and I_P(U;X|Y) <= R).
BoundResult corollary1_bound(const DiscreteScenario& scn, const AuxiliaryReceiver& aux,
                             const OptimizerConfig& cfg);

/// Quantization lower bound: max D(P_X||Q_X) + D(P_UY||Q_UY) over
/// I_P(U;X) <= R, with Q_UY induced by the same P_{U|X} applied to Q.
BoundResult ac_lower_bound(const DiscreteScenario& scn, const OptimizerConfig& cfg);

/// D(P_XY||Q_XY), the uncompressed-observation benchmark.
ExtReal centralized_bound(const DiscreteScenario& scn);

struct ChainLink {
    Kernel p_z_given_x;
    Kernel q_z_given_x;
};

/// Sequential auxiliary receivers: g over (X,Y)->Z_1, then each
/// (X,Z_j)->Z_{j+1}, plus a terminal bound on (X,Z_k).
BoundResult chain_bound(const DiscreteScenario& scn, const std::vector<ChainLink>& chain,
                        const TerminalBound& terminal, const OptimizerConfig& cfg);

/// Augment both receivers with a common J drawn from (X,Y,Z):
/// g over (X, (Y,J)) -> (Z,J) plus the terminal on (X,(Z,J)).
BoundResult j_augmented_bound(const DiscreteScenario& scn, const Kernel& p_j_given_xyz,
                              const Kernel& q_j_given_xyz, const AuxiliaryReceiver& base_aux,
                              const OptimizerConfig& cfg,
                              const TerminalBound& terminal = TerminalBound::centralized());

/// Inputs for the conditional-independence construction where
/// Y = (J, Z, Yhat) and the alternative makes Yhat independent of (X,J)
/// given Z while P and Q agree on (X,J,Z) and on (Yhat,Z).
struct CondIndepParams {
    JointTable w_xjz;          // shared joint over axes X,J,Z
    Kernel q_yhat_given_z;     // rows over Z
    Kernel p_yhat_given_xjz;   // rows over (x,j,z) row-major, x slowest
    double rate = 0.0;
    double tol = 1e-10;
};

struct CondIndepScenario {
    DiscreteScenario scenario; // Y axis is the composite (J,Z,Yhat), J slowest
    AuxiliaryReceiver aux;     // deterministic extraction of Z' = (Z,J), z slowest
    int j_size;
    int z_size;
    int yhat_size;
};

/// Builds and validates the construction; throws InputError naming the
/// violated constraint when the supplied channels do not satisfy it.
CondIndepScenario conditional_independence_scenario(const CondIndepParams& params);

/// Re-evaluate a g-type value from its witnesses (exact arithmetic, no
/// optimization); used for reproducibility checks.
ExtReal reevaluate_g(const DiscreteScenario& scn, const Kernel& p_z_given_x,
                     const Kernel& q_z_given_x, const Kernel& u_channel,
                     const std::vector<SimplexVector>& qhat_per_u);

/// Objective of the conditional-MI bounds at a given witness channel.
double mi_objective_at(const DiscreteScenario& scn, const AuxiliaryReceiver& aux,
                       const Kernel& u_channel);

} // namespace dht
