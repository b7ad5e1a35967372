#include "dht/inner_objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "dht/errors.hpp"
#include "dht/info.hpp"

namespace dht {

ChannelQuad::ChannelQuad(Kernel py, Kernel pz, Kernel qy, Kernel qz)
    : p_y_given_x(std::move(py)), p_z_given_x(std::move(pz)), q_y_given_x(std::move(qy)),
      q_z_given_x(std::move(qz)) {
    const int nx = p_y_given_x.rows();
    if (p_z_given_x.rows() != nx || q_y_given_x.rows() != nx || q_z_given_x.rows() != nx)
        throw InputError("ChannelQuad: input alphabets differ across the four kernels");
    if (p_y_given_x.cols() != q_y_given_x.cols())
        throw InputError("ChannelQuad: Y alphabets differ between hypotheses");
    if (p_z_given_x.cols() != q_z_given_x.cols())
        throw InputError("ChannelQuad: Z alphabets differ between hypotheses");
}

namespace {

enum class EvalState { Finite, PosInf, NegInf, Indeterminate };

struct Eval {
    EvalState state;
    double v;
};

// Objective evaluation on the support of q_x without exceptions; used by
// the grid scan and the ascent. py/pz are the pushed-forward P marginals.
struct FWorkspace {
    const ChannelQuad* quad;
    std::vector<int> support;      // indices of q_x with positive mass
    std::vector<double> p_y;       // P_Y
    std::vector<double> p_z;       // P_Z
    std::vector<double> qhat_y;    // scratch
    std::vector<double> qhat_z;    // scratch

    Eval eval(const std::vector<double>& qhat_s) {
        const Kernel& qy = quad->q_y_given_x;
        const Kernel& qz = quad->q_z_given_x;
        std::fill(qhat_y.begin(), qhat_y.end(), 0.0);
        std::fill(qhat_z.begin(), qhat_z.end(), 0.0);
        for (size_t i = 0; i < support.size(); ++i) {
            double w = qhat_s[i];
            if (w == 0.0) continue;
            int x = support[i];
            for (int y = 0; y < qy.cols(); ++y) qhat_y[static_cast<size_t>(y)] += w * qy(x, y);
            for (int z = 0; z < qz.cols(); ++z) qhat_z[static_cast<size_t>(z)] += w * qz(x, z);
        }
        bool inf_y = false, inf_z = false;
        double ty = 0.0, tz = 0.0;
        for (size_t y = 0; y < p_y.size(); ++y) {
            if (p_y[y] == 0.0) continue;
            if (qhat_y[y] <= 0.0) { inf_y = true; break; }
            ty += p_y[y] * std::log(p_y[y] / qhat_y[y]);
        }
        for (size_t z = 0; z < p_z.size(); ++z) {
            if (p_z[z] == 0.0) continue;
            if (qhat_z[z] <= 0.0) { inf_z = true; break; }
            tz += p_z[z] * std::log(p_z[z] / qhat_z[z]);
        }
        if (inf_y && inf_z) return {EvalState::Indeterminate, 0.0};
        if (inf_y) return {EvalState::PosInf, 0.0};
        if (inf_z) return {EvalState::NegInf, 0.0};
        return {EvalState::Finite, ty - tz};
    }

    // d/dqhat_s[i] of the finite objective.
    void gradient(const std::vector<double>& qhat_s, std::vector<double>& g) {
        const Kernel& qy = quad->q_y_given_x;
        const Kernel& qz = quad->q_z_given_x;
        std::fill(qhat_y.begin(), qhat_y.end(), 0.0);
        std::fill(qhat_z.begin(), qhat_z.end(), 0.0);
        for (size_t i = 0; i < support.size(); ++i) {
            double w = qhat_s[i];
            if (w == 0.0) continue;
            int x = support[i];
            for (int y = 0; y < qy.cols(); ++y) qhat_y[static_cast<size_t>(y)] += w * qy(x, y);
            for (int z = 0; z < qz.cols(); ++z) qhat_z[static_cast<size_t>(z)] += w * qz(x, z);
        }
        for (size_t i = 0; i < support.size(); ++i) {
            int x = support[i];
            double gi = 0.0;
            for (size_t y = 0; y < p_y.size(); ++y)
                if (p_y[y] > 0.0 && qhat_y[y] > 0.0) gi -= p_y[y] * qy(x, static_cast<int>(y)) / qhat_y[y];
            for (size_t z = 0; z < p_z.size(); ++z)
                if (p_z[z] > 0.0 && qhat_z[z] > 0.0) gi += p_z[z] * qz(x, static_cast<int>(z)) / qhat_z[z];
            g[i] = gi;
        }
    }
};

const std::vector<std::vector<double>>& cached_grid(int dim, double step) {
    static std::map<std::pair<int, long>, std::vector<std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_pair(dim, std::lround(1.0 / step));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, simplex_grid(dim, step)).first;
    return it->second;
}

SimplexVector embed(const std::vector<double>& sub, const std::vector<int>& support, int n) {
    std::vector<double> full(static_cast<size_t>(n), 0.0);
    for (size_t i = 0; i < sub.size(); ++i) full[static_cast<size_t>(support[i])] = sub[i];
    return SimplexVector(std::move(full));
}

ExtReal cap_value(const SimplexVector& p_x, const CapContext& ctx) {
    const Kernel& pyz = ctx.p_yz_given_x;
    const Kernel& qyz = ctx.q_y_given_z;
    const int nz = qyz.rows();
    const int ny = qyz.cols();
    if (pyz.cols() != ny * nz)
        throw InputError("cap: p_yz_given_x columns must be |Y|*|Z| (y slow, z fast)");
    if (pyz.rows() != p_x.size()) throw InputError("cap: p_yz_given_x rows != |X|");
    std::vector<double> p_yz(static_cast<size_t>(ny) * nz, 0.0);
    for (int x = 0; x < p_x.size(); ++x) {
        if (p_x[x] == 0.0) continue;
        for (int c = 0; c < ny * nz; ++c) p_yz[static_cast<size_t>(c)] += p_x[x] * pyz(x, c);
    }
    std::vector<double> p_z(static_cast<size_t>(nz), 0.0);
    for (int y = 0; y < ny; ++y)
        for (int z = 0; z < nz; ++z) p_z[static_cast<size_t>(z)] += p_yz[static_cast<size_t>(y) * nz + z];
    double sum = 0.0;
    for (int y = 0; y < ny; ++y)
        for (int z = 0; z < nz; ++z) {
            double num = p_yz[static_cast<size_t>(y) * nz + z];
            if (num == 0.0) continue;
            double den = p_z[static_cast<size_t>(z)] * qyz(z, y);
            if (den <= 0.0) return ExtReal::infinity();
            sum += num * std::log(num / den);
        }
    return ExtReal(sum);
}

} // namespace

ExtReal f_objective(const SimplexVector& qhat_x, const SimplexVector& p_x,
                    const ChannelQuad& quad, const SimplexVector& q_x) {
    if (qhat_x.size() != q_x.size() || p_x.size() != q_x.size() ||
        q_x.size() != quad.input_size())
        throw InputError("f_objective: alphabet sizes disagree");
    for (int i = 0; i < q_x.size(); ++i)
        if (q_x[i] == 0.0 && qhat_x[i] > 1e-15)
            throw InputError("f_objective: qhat_x not absolutely continuous w.r.t. q_x at symbol " +
                             std::to_string(i));
    SimplexVector p_y = push_forward(p_x, quad.p_y_given_x);
    SimplexVector p_z = push_forward(p_x, quad.p_z_given_x);
    SimplexVector qhat_y = push_forward(qhat_x, quad.q_y_given_x);
    SimplexVector qhat_z = push_forward(qhat_x, quad.q_z_given_x);
    ExtReal ty = kl_divergence(p_y, qhat_y);
    ExtReal tz = kl_divergence(p_z, qhat_z);
    if (ty.pos_inf() && tz.pos_inf())
        throw IndeterminateError("f_objective: both divergences infinite (inf - inf)");
    return ty - tz;
}

FResult f_max(const SimplexVector& p_x, const ChannelQuad& quad, const SimplexVector& q_x,
              const OptimizerConfig& cfg, const std::optional<CapContext>& cap) {
    if (p_x.size() != q_x.size() || q_x.size() != quad.input_size())
        throw InputError("f_max: alphabet sizes disagree");
    if (q_x.size() > kAxisCap) throw InputError("f_max: |X| exceeds the axis cap");

    FWorkspace ws;
    ws.quad = &quad;
    for (int i = 0; i < q_x.size(); ++i)
        if (q_x[i] > 0.0) ws.support.push_back(i);
    const int m = static_cast<int>(ws.support.size());
    ws.p_y = push_forward(p_x, quad.p_y_given_x).entries();
    ws.p_z = push_forward(p_x, quad.p_z_given_x).entries();
    ws.qhat_y.assign(static_cast<size_t>(quad.q_y_given_x.cols()), 0.0);
    ws.qhat_z.assign(static_cast<size_t>(quad.q_z_given_x.cols()), 0.0);

    const double eta = cfg.eta;
    auto clamped = [&](std::vector<double> v) {
        clamp_to_interior(v, eta);
        return v;
    };

    // seed set: interior anchors first (uniform, then the reference measure)
    // so that exact ties resolve to an interior witness, then the coarse grid
    std::vector<std::vector<double>> seeds;
    double step = cfg.f_grid_step(m);
    if (m == 1) {
        seeds.push_back({1.0});
    } else {
        seeds.push_back(std::vector<double>(static_cast<size_t>(m), 1.0 / m));
        std::vector<double> qx_s;
        for (int i : ws.support) qx_s.push_back(q_x[i]);
        double s = 0.0;
        for (double v : qx_s) s += v;
        for (double& v : qx_s) v /= s;
        seeds.push_back(clamped(std::move(qx_s)));
        if (step > 0.0) {
            const auto& grid = cached_grid(m, step);
            seeds.reserve(grid.size() + 2);
            for (const auto& g : grid) seeds.push_back(clamped(g));
        }
    }

    int skipped = 0;
    int best_idx = -1;
    Eval best{EvalState::NegInf, 0.0};
    auto better = [](const Eval& a, const Eval& b) {
        // a strictly better than b
        if (a.state == EvalState::PosInf) return b.state != EvalState::PosInf;
        if (b.state == EvalState::PosInf) return false;
        if (a.state == EvalState::Finite && b.state == EvalState::NegInf) return true;
        if (a.state == EvalState::NegInf) return false;
        if (b.state == EvalState::NegInf) return false;
        return a.v > b.v;
    };
    std::vector<Eval> evals(seeds.size());
    for (size_t i = 0; i < seeds.size(); ++i) {
        evals[i] = ws.eval(seeds[i]);
        const Eval& e = evals[i];
        if (e.state == EvalState::Indeterminate) {
            ++skipped;
            continue;
        }
        if (best_idx < 0 || better(e, best)) {
            best = e;
            best_idx = static_cast<int>(i);
        }
        if (e.state == EvalState::PosInf) break; // cannot be beaten
    }
    if (best_idx < 0)
        throw EvaluationError("f_max: all grid points indeterminate (inf - inf everywhere)");

    FResult out{ExtReal(0.0), SimplexVector::uniform(q_x.size()), false, std::nullopt, skipped};
    if (cap) out.cap = cap_value(p_x, *cap);

    if (best.state == EvalState::PosInf) {
        out.value = ExtReal::infinity();
        out.witness_qhat = embed(seeds[static_cast<size_t>(best_idx)], ws.support, q_x.size());
        return out;
    }

    // ascent starts: the best f_starts finite seeds (ties to lower index)
    std::vector<int> order;
    for (size_t i = 0; i < seeds.size(); ++i)
        if (evals[i].state == EvalState::Finite) order.push_back(static_cast<int>(i));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return better(evals[static_cast<size_t>(a)], evals[static_cast<size_t>(b)]);
    });
    int n_starts = std::min<int>(cfg.f_starts, static_cast<int>(order.size()));

    std::vector<double> best_point = seeds[static_cast<size_t>(best_idx)];
    double best_val = best.state == EvalState::Finite ? best.v
                                                      : -std::numeric_limits<double>::infinity();

    std::vector<double> grad(static_cast<size_t>(m));
    for (int s = 0; s < n_starts && m > 1; ++s) {
        int seed_idx = order[static_cast<size_t>(s)];
        std::vector<double> x = seeds[static_cast<size_t>(seed_idx)];
        double fx = evals[static_cast<size_t>(seed_idx)].v;
        double stepsize = 0.25;
        for (int it = 0; it < cfg.f_max_iters; ++it) {
            ws.gradient(x, grad);
            double mean = 0.0;
            for (double g : grad) mean += g;
            mean /= m;
            double gnorm = 0.0;
            for (double& g : grad) {
                g -= mean;
                gnorm = std::max(gnorm, std::abs(g));
            }
            if (gnorm < 1e-11) break;
            bool moved = false;
            double st = stepsize;
            for (int bt = 0; bt < 30; ++bt) {
                std::vector<double> cand(x);
                for (int i = 0; i < m; ++i) cand[static_cast<size_t>(i)] += st * grad[static_cast<size_t>(i)];
                cand = project_to_simplex(std::move(cand), eta);
                Eval ec = ws.eval(cand);
                if (ec.state == EvalState::PosInf) {
                    out.value = ExtReal::infinity();
                    out.witness_qhat = embed(cand, ws.support, q_x.size());
                    return out;
                }
                if (ec.state == EvalState::Finite && ec.v > fx + 1e-14) {
                    x = std::move(cand);
                    fx = ec.v;
                    moved = true;
                    stepsize = std::min(st * 2.0, 1.0);
                    break;
                }
                st *= 0.5;
            }
            if (!moved) break;
        }
        if (fx > best_val) {
            best_val = fx;
            best_point = x;
        }
    }

    out.value = ExtReal(best_val);
    out.witness_qhat = embed(best_point, ws.support, q_x.size());
    double lo = *std::min_element(best_point.begin(), best_point.end());
    out.boundary_flag = (m > 1) && lo <= eta * 1.5;
    return out;
}

ExtReal thm2_cap(const JointTable& p_uxyz, const Kernel& q_y_given_z) {
    for (const char* n : {"U", "X", "Y", "Z"})
        if (!p_uxyz.has_axis(n))
            throw InputError(std::string("thm2_cap: joint missing axis '") + n + "'");
    const int ny = p_uxyz.axis_size("Y");
    const int nz = p_uxyz.axis_size("Z");
    if (q_y_given_z.rows() != nz || q_y_given_z.cols() != ny)
        throw InputError("thm2_cap: q_y_given_z must map Z (rows) to Y (cols)");
    JointTable uyz = p_uxyz.marginal({"U", "Y", "Z"}).permute({"U", "Y", "Z"});
    const int nu = uyz.axes()[0].size;
    const auto& p = uyz.flat(); // p[(u*ny + y)*nz + z]
    std::vector<double> p_uz(static_cast<size_t>(nu) * nz, 0.0);
    for (int u = 0; u < nu; ++u)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z)
                p_uz[static_cast<size_t>(u) * nz + z] +=
                    p[(static_cast<size_t>(u) * ny + y) * nz + z];
    double sum = 0.0;
    for (int u = 0; u < nu; ++u)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) {
                double num = p[(static_cast<size_t>(u) * ny + y) * nz + z];
                if (num == 0.0) continue;
                double den = p_uz[static_cast<size_t>(u) * nz + z] * q_y_given_z(z, y);
                if (den <= 0.0) return ExtReal::infinity();
                sum += num * std::log(num / den);
            }
    return ExtReal(sum);
}

bool gaussian_unbounded_check(double sigma_q_y, double sigma_q_z) {
    if (!(sigma_q_y > 0.0) || !(sigma_q_z > 0.0))
        throw InputError("gaussian_unbounded_check: standard deviations must be positive");
    return sigma_q_y < sigma_q_z;
}

} // namespace dht
