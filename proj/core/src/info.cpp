#include "dht/info.hpp"

#include <algorithm>
#include <cmath>

#include "dht/errors.hpp"

namespace dht {

ExtReal kl_divergence(const SimplexVector& p, const SimplexVector& q) {
    if (p.size() != q.size())
        throw InputError("kl_divergence: alphabet sizes differ (" + std::to_string(p.size()) +
                         " vs " + std::to_string(q.size()) + ")");
    double sum = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return ExtReal::infinity();
        sum += p[i] * std::log(p[i] / q[i]);
    }
    // signed-term cancellation can leave a tiny negative residue on equal inputs
    if (sum < 0.0 && sum > -1e-12) sum = 0.0;
    return ExtReal(sum);
}

ExtReal conditional_kl(const Kernel& pk, const Kernel& qk, const SimplexVector& w) {
    if (pk.rows() != qk.rows() || pk.cols() != qk.cols())
        throw InputError("conditional_kl: kernel shapes differ");
    if (w.size() != pk.rows())
        throw InputError("conditional_kl: weight length != kernel rows");
    ExtReal total(0.0);
    for (int r = 0; r < pk.rows(); ++r) {
        if (w[r] == 0.0) continue;
        total += weighted(w[r], kl_divergence(pk.row(r), qk.row(r)));
    }
    return total;
}

double conditional_mi(const JointTable& joint, const std::string& a, const std::string& b,
                      const std::vector<std::string>& given) {
    std::vector<std::string> all = {a, b};
    all.insert(all.end(), given.begin(), given.end());
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = i + 1; j < all.size(); ++j)
            if (all[i] == all[j])
                throw InputError("conditional_mi: overlapping axes '" + all[i] + "'");
    for (const auto& n : all) joint.axis_index(n); // existence

    // Work on P(A,B,C...) laid out with A slowest, then B, then the given axes.
    JointTable abc = joint.marginal(all).permute([&] {
        std::vector<std::string> order = {a, b};
        order.insert(order.end(), given.begin(), given.end());
        return order;
    }());
    const int na = abc.axes()[0].size;
    const int nb = abc.axes()[1].size;
    int nc = 1;
    for (size_t k = 2; k < abc.axes().size(); ++k) nc *= abc.axes()[k].size;
    const auto& p = abc.flat(); // p[(ia*nb + ib)*nc + ic]

    std::vector<double> pac(static_cast<size_t>(na) * nc, 0.0);
    std::vector<double> pbc(static_cast<size_t>(nb) * nc, 0.0);
    std::vector<double> pc(static_cast<size_t>(nc), 0.0);
    for (int ia = 0; ia < na; ++ia)
        for (int ib = 0; ib < nb; ++ib)
            for (int ic = 0; ic < nc; ++ic) {
                double v = p[(static_cast<size_t>(ia) * nb + ib) * nc + ic];
                pac[static_cast<size_t>(ia) * nc + ic] += v;
                pbc[static_cast<size_t>(ib) * nc + ic] += v;
                pc[static_cast<size_t>(ic)] += v;
            }

    // I(A;B|C) = sum p(a,b,c) ln( p(a,b,c) p(c) / (p(a,c) p(b,c)) )
    double sum = 0.0;
    for (int ia = 0; ia < na; ++ia)
        for (int ib = 0; ib < nb; ++ib)
            for (int ic = 0; ic < nc; ++ic) {
                double v = p[(static_cast<size_t>(ia) * nb + ib) * nc + ic];
                if (v <= 0.0) continue;
                sum += v * std::log(v * pc[static_cast<size_t>(ic)] /
                                    (pac[static_cast<size_t>(ia) * nc + ic] *
                                     pbc[static_cast<size_t>(ib) * nc + ic]));
            }
    // fp noise can leave a tiny negative residue on independent tables
    if (sum < 0.0 && sum > -1e-10) sum = 0.0;
    return sum;
}

SimplexVector push_forward(const SimplexVector& p, const Kernel& k) {
    if (p.size() != k.rows())
        throw InputError("push_forward: marginal length " + std::to_string(p.size()) +
                         " != kernel rows " + std::to_string(k.rows()));
    std::vector<double> out(static_cast<size_t>(k.cols()), 0.0);
    for (int r = 0; r < k.rows(); ++r) {
        if (p[r] == 0.0) continue;
        for (int c = 0; c < k.cols(); ++c) out[static_cast<size_t>(c)] += p[r] * k(r, c);
    }
    // guard the 1e-12 construction tolerance against accumulation order
    double sum = 0.0;
    for (double v : out) sum += v;
    if (sum > 0.0 && std::abs(sum - 1.0) > 1e-15 && std::abs(sum - 1.0) < 1e-9) {
        double inv = 1.0 / sum;
        for (double& v : out) v *= inv;
    }
    return SimplexVector(std::move(out));
}

JointTable compose_joint(const SimplexVector& p, const Kernel& k, const std::string& in,
                         const std::string& out) {
    if (p.size() != k.rows()) throw InputError("compose_joint: marginal length != kernel rows");
    std::vector<double> t(static_cast<size_t>(p.size()) * k.cols(), 0.0);
    for (int r = 0; r < k.rows(); ++r)
        for (int c = 0; c < k.cols(); ++c)
            t[static_cast<size_t>(r) * k.cols() + c] = p[r] * k(r, c);
    return JointTable({{in, p.size()}, {out, k.cols()}}, std::move(t));
}

JointTable marginalize(const JointTable& j, const std::vector<std::string>& keep) {
    return j.marginal(keep);
}

Kernel condition(const JointTable& j, const std::vector<std::string>& given,
                 std::vector<int>* zero_rows) {
    return j.condition(given, zero_rows);
}

} // namespace dht
