#pragma once

#include <string>
#include <vector>

#include "dht/extreal.hpp"
#include "dht/joint_table.hpp"
#include "dht/kernel.hpp"
#include "dht/simplex.hpp"

namespace dht {

/// D(p || q) = sum_i p_i ln(p_i / q_i) in nats, with 0 ln(0/.) = 0.
/// Returns +inf iff some i has p_i > 0 and q_i = 0.
ExtReal kl_divergence(const SimplexVector& p, const SimplexVector& q);

/// sum_u w(u) D(pk_u || qk_u); zero-weight rows are excluded, +inf propagates.
ExtReal conditional_kl(const Kernel& pk, const Kernel& qk, const SimplexVector& w);

/// I(A;B|C) >= 0 in nats from exact marginals; given = {} yields I(A;B).
double conditional_mi(const JointTable& joint, const std::string& a, const std::string& b,
                      const std::vector<std::string>& given = {});

/// Output marginal of p through k (exact matrix-vector product).
SimplexVector push_forward(const SimplexVector& p, const Kernel& k);

/// Joint over (in, out) from a marginal and a kernel.
JointTable compose_joint(const SimplexVector& p, const Kernel& k,
                         const std::string& in = "X", const std::string& out = "Y");

/// Free-function views of the JointTable members.
JointTable marginalize(const JointTable& j, const std::vector<std::string>& keep);
Kernel condition(const JointTable& j, const std::vector<std::string>& given,
                 std::vector<int>* zero_rows = nullptr);

} // namespace dht
