#include "dht/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "dht/errors.hpp"
#include "dht/info.hpp"
#include "dht/parallel.hpp"

namespace dht {

DiscreteScenario::DiscreteScenario(JointTable p, JointTable q, double rate_nats)
    : p_xy(std::move(p)), q_xy(std::move(q)), rate(rate_nats) {
    if (p_xy.axes().size() != 2 || !p_xy.has_axis("X") || !p_xy.has_axis("Y"))
        throw InputError("DiscreteScenario: joints must have axes X,Y");
    if (!p_xy.same_shape(q_xy))
        throw InputError("DiscreteScenario: hypothesis joints have different shapes");
    if (p_xy.axes()[0].name != "X")
        throw InputError("DiscreteScenario: axis order must be X,Y");
    if (!(rate >= 0.0) || !std::isfinite(rate))
        throw InputError("DiscreteScenario: rate must be a finite non-negative real");
}

AuxiliaryReceiver::AuxiliaryReceiver(Kernel p, Kernel q)
    : p_z_given_xy(std::move(p)), q_z_given_xy(std::move(q)) {
    if (p_z_given_xy.rows() != q_z_given_xy.rows() ||
        p_z_given_xy.cols() != q_z_given_xy.cols())
        throw InputError("AuxiliaryReceiver: kernel shapes differ between hypotheses");
    if (p_z_given_xy.cols() > kAxisCap)
        throw InputError("AuxiliaryReceiver: |Z| exceeds the axis cap");
}

namespace {

constexpr double kBad = -1e100;

struct Eval {
    enum class State { Finite, PosInf, Bad } state = State::Bad;
    double v = 0.0;
    static Eval finite(double x) { return {State::Finite, x}; }
    static Eval pos_inf() { return {State::PosInf, 0.0}; }
    static Eval bad() { return {State::Bad, 0.0}; }
};

// I(U;X|W) for P(u,x,w) = w_xw[x*nw + w] * K(x,u).
double mi_ux_given_w(const std::vector<double>& w_xw, int nx, int nw, const Kernel& K) {
    const int nu = K.cols();
    std::vector<double> p_uw(static_cast<size_t>(nu) * nw, 0.0);
    std::vector<double> p_w(static_cast<size_t>(nw), 0.0);
    for (int x = 0; x < nx; ++x)
        for (int w = 0; w < nw; ++w) {
            double m = w_xw[static_cast<size_t>(x) * nw + w];
            if (m == 0.0) continue;
            p_w[static_cast<size_t>(w)] += m;
            for (int u = 0; u < nu; ++u) p_uw[static_cast<size_t>(u) * nw + w] += m * K(x, u);
        }
    double sum = 0.0;
    for (int x = 0; x < nx; ++x)
        for (int w = 0; w < nw; ++w) {
            double m = w_xw[static_cast<size_t>(x) * nw + w];
            if (m == 0.0) continue;
            for (int u = 0; u < nu; ++u) {
                double puxw = m * K(x, u);
                if (puxw <= 0.0) continue;
                sum += puxw * std::log(puxw * p_w[static_cast<size_t>(w)] /
                                       (p_uw[static_cast<size_t>(u) * nw + w] * m));
            }
        }
    return sum < 0.0 && sum > -1e-10 ? 0.0 : sum;
}

// I(Y;U|Z) for P(u,y,z) = sum_x p_xyz[(x*ny + y)*nz + z] * K(x,u).
double mi_yu_given_z(const std::vector<double>& p_xyz, int nx, int ny, int nz, const Kernel& K) {
    const int nu = K.cols();
    std::vector<double> p_uyz(static_cast<size_t>(nu) * ny * nz, 0.0);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) {
                double m = p_xyz[(static_cast<size_t>(x) * ny + y) * nz + z];
                if (m == 0.0) continue;
                for (int u = 0; u < nu; ++u)
                    p_uyz[(static_cast<size_t>(u) * ny + y) * nz + z] += m * K(x, u);
            }
    std::vector<double> p_uz(static_cast<size_t>(nu) * nz, 0.0);
    std::vector<double> p_yz(static_cast<size_t>(ny) * nz, 0.0);
    std::vector<double> p_z(static_cast<size_t>(nz), 0.0);
    for (int u = 0; u < nu; ++u)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z)
                p_uz[static_cast<size_t>(u) * nz + z] +=
                    p_uyz[(static_cast<size_t>(u) * ny + y) * nz + z];
    for (int y = 0; y < ny; ++y)
        for (int z = 0; z < nz; ++z) {
            double m = 0.0;
            for (int x = 0; x < nx; ++x) m += p_xyz[(static_cast<size_t>(x) * ny + y) * nz + z];
            p_yz[static_cast<size_t>(y) * nz + z] = m;
            p_z[static_cast<size_t>(z)] += m;
        }
    double sum = 0.0;
    for (int u = 0; u < nu; ++u)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) {
                double m = p_uyz[(static_cast<size_t>(u) * ny + y) * nz + z];
                if (m <= 0.0) continue;
                sum += m * std::log(m * p_z[static_cast<size_t>(z)] /
                                    (p_uz[static_cast<size_t>(u) * nz + z] *
                                     p_yz[static_cast<size_t>(y) * nz + z]));
            }
    return sum < 0.0 && sum > -1e-10 ? 0.0 : sum;
}

Kernel softmax_channel(const std::vector<double>& theta, int nx, int nu) {
    std::vector<double> m(static_cast<size_t>(nx) * nu, 0.0);
    for (int x = 0; x < nx; ++x) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int u = 0; u < nu; ++u) mx = std::max(mx, theta[static_cast<size_t>(x) * nu + u]);
        double sum = 0.0;
        for (int u = 0; u < nu; ++u) {
            double e = std::exp(theta[static_cast<size_t>(x) * nu + u] - mx);
            m[static_cast<size_t>(x) * nu + u] = e;
            sum += e;
        }
        for (int u = 0; u < nu; ++u) m[static_cast<size_t>(x) * nu + u] /= sum;
    }
    return Kernel(nx, nu, std::move(m));
}

struct OuterProblem {
    int nx = 0;
    int nu = 0;
    double rate = 0.0;
    // cheap evaluation used inside finite differences
    std::function<Eval(const Kernel&)> search_value;
    // full-quality evaluation used to rank candidates
    std::function<Eval(const Kernel&)> final_value;
    std::vector<std::function<double(const Kernel&)>> constraints;
    std::vector<std::string> constraint_names;
};

struct OuterOutcome {
    bool pos_inf = false;
    double value = kBad;
    Kernel witness{1, 1, {1.0}};
    std::vector<double> constraint_values;
    int best_start = -1;
    int penalty_rounds_used = 0;
};

double max_violation(const OuterProblem& prob, const Kernel& K, std::vector<double>* vals) {
    double worst = 0.0;
    if (vals) vals->clear();
    for (const auto& c : prob.constraints) {
        double v = c(K);
        if (vals) vals->push_back(v);
        worst = std::max(worst, v - prob.rate);
    }
    return worst;
}

// Mix toward the constant-row channel until every rate constraint holds.
Kernel project_feasible(const OuterProblem& prob, const SimplexVector& p_x, Kernel K,
                        double slack) {
    if (max_violation(prob, K, nullptr) <= slack) return K;
    std::vector<double> marg(static_cast<size_t>(prob.nu), 0.0);
    for (int x = 0; x < prob.nx; ++x)
        for (int u = 0; u < prob.nu; ++u) marg[static_cast<size_t>(u)] += p_x[x] * K(x, u);
    auto mix = [&](double t) {
        std::vector<double> m(static_cast<size_t>(prob.nx) * prob.nu);
        for (int x = 0; x < prob.nx; ++x)
            for (int u = 0; u < prob.nu; ++u)
                m[static_cast<size_t>(x) * prob.nu + u] =
                    (1.0 - t) * K(x, u) + t * marg[static_cast<size_t>(u)];
        return Kernel(prob.nx, prob.nu, std::move(m));
    };
    double t_hi = 1.0;
    for (int i = 1; i <= 32; ++i) {
        double t = i / 32.0;
        if (max_violation(prob, mix(t), nullptr) <= slack) {
            t_hi = t;
            break;
        }
    }
    double lo = std::max(0.0, t_hi - 1.0 / 32.0), hi = t_hi;
    for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        if (max_violation(prob, mix(mid), nullptr) <= slack)
            hi = mid;
        else
            lo = mid;
    }
    return mix(hi);
}

OuterOutcome maximize_u_channel(const OuterProblem& prob, const SimplexVector& p_x,
                                const OptimizerConfig& cfg) {
    const int dim = prob.nx * prob.nu;
    const int n_starts = std::max(1, cfg.starts);

    struct Candidate {
        Eval eval = Eval::bad();
        Kernel K{1, 1, {1.0}};
        int penalty_rounds = 0;
        bool valid = false;
    };
    std::vector<Candidate> cands(static_cast<size_t>(n_starts) + 1);

    // deterministic two-atom split seeds for binary X: K realizing
    // p_x = w (t1,1-t1) + (1-w) (t2,1-t2), the geometry envelope optima live in
    auto two_atom_theta = [&](double t1, double t2) -> std::vector<double> {
        std::vector<double> theta;
        double p0 = p_x[0];
        if (!(t1 < p0 && p0 < t2)) return theta;
        double w = (t2 - p0) / (t2 - t1);
        double atoms[2][2] = {{t1, 1.0 - t1}, {t2, 1.0 - t2}};
        double wt[2] = {w, 1.0 - w};
        theta.assign(static_cast<size_t>(dim), 0.0);
        for (int x = 0; x < 2; ++x) {
            for (int u = 0; u < prob.nu; ++u) {
                double k = u < 2 ? wt[u] * atoms[u][x] / p_x[x] : 0.0;
                theta[static_cast<size_t>(x) * prob.nu + u] =
                    std::log(std::max(k * (1.0 - 1e-3) + 1e-3 / prob.nu, 1e-12));
            }
        }
        return theta;
    };

    auto ascend_candidate = [&](std::vector<double> theta, int budget_mult) -> Candidate {
        const int ncon = static_cast<int>(prob.constraints.size());
        double lambda = cfg.penalty_init;

        // one evaluation of the raw value and every constraint
        auto probe = [&](const std::vector<double>& th, double* val,
                         std::vector<double>* cons) {
            Kernel K = softmax_channel(th, prob.nx, prob.nu);
            Eval e = prob.search_value(K);
            for (int k = 0; k < ncon; ++k)
                (*cons)[static_cast<size_t>(k)] = prob.constraints[static_cast<size_t>(k)](K);
            if (e.state == Eval::State::Bad) {
                *val = kBad;
                return;
            }
            if (e.state == Eval::State::PosInf) {
                *val = 1e100;
                return;
            }
            *val = e.v;
        };
        auto merit = [&](double val, const std::vector<double>& cons) {
            if (val <= kBad) return kBad;
            double pen = 0.0;
            for (double c : cons) pen += std::max(0.0, c - prob.rate);
            if (val >= 1e100) return pen <= 0.0 ? 1e100 : kBad;
            return val - lambda * pen;
        };

        int rounds = 0;
        int iter_budget = budget_mult * cfg.max_iters;
        std::vector<double> cons0(static_cast<size_t>(ncon));
        std::vector<double> cons_s(static_cast<size_t>(ncon));
        std::vector<double> g_val(static_cast<size_t>(dim));
        std::vector<std::vector<double>> g_con(static_cast<size_t>(ncon),
                                               std::vector<double>(static_cast<size_t>(dim)));
        for (;;) {
            double val0;
            probe(theta, &val0, &cons0);
            double fx = merit(val0, cons0);
            if (fx >= 1e100 || fx <= kBad) break;
            double stepsize = 0.5;
            bool converged = false;
            double window_base = fx;
            int window_count = 0;
            while (iter_budget > 0) {
                --iter_budget;
                // plateau detector: negligible progress over a short window
                if (++window_count >= 6) {
                    if (fx - window_base < 1e-11) {
                        converged = true;
                        break;
                    }
                    window_base = fx;
                    window_count = 0;
                }
                // one central-difference pass for the value and constraints
                std::vector<double> cp(static_cast<size_t>(ncon)), cm(static_cast<size_t>(ncon));
                double gnorm = 0.0;
                for (int i = 0; i < dim; ++i) {
                    double save = theta[static_cast<size_t>(i)];
                    double vp, vm;
                    theta[static_cast<size_t>(i)] = save + cfg.fd_step;
                    probe(theta, &vp, &cp);
                    theta[static_cast<size_t>(i)] = save - cfg.fd_step;
                    probe(theta, &vm, &cm);
                    theta[static_cast<size_t>(i)] = save;
                    g_val[static_cast<size_t>(i)] = (vp - vm) / (2.0 * cfg.fd_step);
                    for (int k = 0; k < ncon; ++k)
                        g_con[static_cast<size_t>(k)][static_cast<size_t>(i)] =
                            (cp[static_cast<size_t>(k)] - cm[static_cast<size_t>(k)]) /
                            (2.0 * cfg.fd_step);
                }
                // penalized direction
                std::vector<double> d_pen(g_val);
                for (int k = 0; k < ncon; ++k)
                    if (cons0[static_cast<size_t>(k)] > prob.rate)
                        for (int i = 0; i < dim; ++i)
                            d_pen[static_cast<size_t>(i)] -=
                                lambda * g_con[static_cast<size_t>(k)][static_cast<size_t>(i)];
                for (double g : d_pen) gnorm = std::max(gnorm, std::abs(g));

                std::vector<std::vector<double>> dirs = {d_pen};
                // active constraints: crawl along their tangent space
                const double margin = std::max(1e-4, 10.0 * cfg.constraint_slack);
                std::vector<int> active;
                for (int k = 0; k < ncon; ++k)
                    if (cons0[static_cast<size_t>(k)] > prob.rate - margin) active.push_back(k);
                if (!active.empty()) {
                    std::vector<double> d(g_val);
                    for (int k : active) {
                        const auto& n = g_con[static_cast<size_t>(k)];
                        double nn = 0.0, dn = 0.0;
                        for (int i = 0; i < dim; ++i) {
                            nn += n[static_cast<size_t>(i)] * n[static_cast<size_t>(i)];
                            dn += d[static_cast<size_t>(i)] * n[static_cast<size_t>(i)];
                        }
                        if (nn <= 1e-18) continue;
                        double coef = dn / nn;
                        double overshoot = cons0[static_cast<size_t>(k)] -
                                           (prob.rate - cfg.constraint_slack);
                        double pull = overshoot > 0.0 ? overshoot / nn : 0.0;
                        for (int i = 0; i < dim; ++i)
                            d[static_cast<size_t>(i)] -=
                                (coef + pull) * n[static_cast<size_t>(i)];
                    }
                    dirs.push_back(std::move(d));
                }

                bool moved = false;
                for (const auto& dir : dirs) {
                    double g2 = 0.0;
                    for (double g : dir) g2 += g * g;
                    if (g2 <= 1e-20) continue;
                    double st = stepsize;
                    for (int bt = 0; bt < 30; ++bt) {
                        std::vector<double> cand(theta);
                        for (int i = 0; i < dim; ++i)
                            cand[static_cast<size_t>(i)] += st * dir[static_cast<size_t>(i)];
                        double vc;
                        probe(cand, &vc, &cons_s);
                        double fc = merit(vc, cons_s);
                        if (fc > fx + 1e-6 * st * g2) {
                            theta = std::move(cand);
                            fx = fc;
                            val0 = vc;
                            cons0 = cons_s;
                            moved = true;
                            stepsize = std::min(st * 2.0, 2.0);
                            break;
                        }
                        st *= 0.5;
                    }
                    if (moved) break;
                }
                if (fx >= 1e100) break;
                if (!moved || gnorm < 1e-9) {
                    converged = true;
                    break;
                }
            }
            if (fx >= 1e100 || fx <= kBad) break;
            Kernel K = softmax_channel(theta, prob.nx, prob.nu);
            if (max_violation(prob, K, nullptr) <= cfg.constraint_slack) {
                if (converged || iter_budget <= 0) break;
            } else {
                if (rounds >= cfg.penalty_rounds || iter_budget <= 0) break;
                lambda *= cfg.penalty_growth;
                ++rounds;
            }
        }

        Kernel K = project_feasible(prob, p_x,
                                    softmax_channel(theta, prob.nx, prob.nu),
                                    cfg.constraint_slack);
        Candidate c;
        c.K = K;
        c.eval = prob.final_value(K);
        c.penalty_rounds = rounds;
        c.valid = true;
        return c;
    };

    auto run_start = [&](int s) {
        std::vector<double> theta(static_cast<size_t>(dim), 0.0);
        std::mt19937_64 rng(static_cast<uint64_t>(cfg.seed) * 0x9e3779b97f4a7c15ULL +
                            static_cast<uint64_t>(s));
        if (s == 1) {
            for (int x = 0; x < prob.nx; ++x)
                theta[static_cast<size_t>(x) * prob.nu + (x % prob.nu)] = 3.0;
        } else if (s >= 2) {
            bool seeded = false;
            if (prob.nx == 2 && s < 18) {
                // 4x4 grid of split locations
                static const double lo[4] = {0.03, 0.15, 0.30, 0.45};
                static const double hi[4] = {0.55, 0.70, 0.85, 0.97};
                int idx = s - 2;
                std::vector<double> t = two_atom_theta(lo[idx / 4], hi[idx % 4]);
                if (!t.empty()) {
                    theta = std::move(t);
                    seeded = true;
                }
            }
            if (!seeded) {
                std::normal_distribution<double> nd(0.0, s % 2 == 0 ? 1.5 : 4.0);
                for (double& t : theta) t = nd(rng);
            }
        }
        // start inside the feasible region so the hinge terms stay quiet
        // along interior ascent paths
        {
            Kernel K0 = softmax_channel(theta, prob.nx, prob.nu);
            if (max_violation(prob, K0, nullptr) > 0.0) {
                K0 = project_feasible(prob, p_x, K0, cfg.constraint_slack);
                for (int x = 0; x < prob.nx; ++x)
                    for (int u = 0; u < prob.nu; ++u)
                        theta[static_cast<size_t>(x) * prob.nu + u] =
                            std::log(std::max(K0(x, u), 1e-12));
            }
        }
        cands[static_cast<size_t>(s)] = ascend_candidate(std::move(theta), 3);
    };

    int threads = cfg.threads > 0 ? cfg.threads : default_threads();
    parallel_for(n_starts, threads, run_start);

    // constant-U channel is always feasible and anchors dominance properties
    {
        std::vector<double> m(static_cast<size_t>(prob.nx) * prob.nu, 1.0 / prob.nu);
        Kernel K(prob.nx, prob.nu, std::move(m));
        Candidate c;
        c.K = K;
        c.eval = prob.final_value(K);
        c.valid = true;
        cands.back() = std::move(c);
    }

    OuterOutcome out;
    for (size_t i = 0; i < cands.size(); ++i) {
        const Candidate& c = cands[i];
        if (!c.valid || c.eval.state == Eval::State::Bad) continue;
        bool better;
        if (c.eval.state == Eval::State::PosInf)
            better = !out.pos_inf && out.best_start < 0;
        else if (out.pos_inf)
            better = false;
        else
            better = out.best_start < 0 || c.eval.v > out.value;
        if (c.eval.state == Eval::State::PosInf && out.best_start < 0) {
            out.pos_inf = true;
            out.witness = c.K;
            out.best_start = static_cast<int>(i);
            out.penalty_rounds_used = c.penalty_rounds;
            break;
        }
        if (better) {
            out.value = c.eval.v;
            out.witness = c.K;
            out.best_start = static_cast<int>(i);
            out.penalty_rounds_used = c.penalty_rounds;
        }
    }
    if (out.best_start < 0)
        throw EvaluationError("maximize_u_channel: no start produced a usable value");
    // polish the winner with a fresh, longer ascent from its own logits
    if (!out.pos_inf) {
        std::vector<double> theta(static_cast<size_t>(dim));
        for (int x = 0; x < prob.nx; ++x)
            for (int u = 0; u < prob.nu; ++u)
                theta[static_cast<size_t>(x) * prob.nu + u] =
                    std::log(std::max(out.witness(x, u), 1e-12));
        Candidate pol = ascend_candidate(std::move(theta), 6);
        if (pol.valid && pol.eval.state == Eval::State::PosInf) {
            out.pos_inf = true;
            out.witness = pol.K;
        } else if (pol.valid && pol.eval.state == Eval::State::Finite &&
                   pol.eval.v > out.value) {
            out.value = pol.eval.v;
            out.witness = pol.K;
        }
    }
    max_violation(prob, out.witness, &out.constraint_values);
    return out;
}

SimplexVector marginal_x(const JointTable& xy) {
    return xy.marginal({"X"}).flatten();
}

// conditional rows P_{X|U=u} from p_x and the channel; empty when P_U(u) ~ 0
std::vector<std::pair<double, SimplexVector>> split_by_u(const SimplexVector& p_x,
                                                         const Kernel& K) {
    const int nx = p_x.size(), nu = K.cols();
    std::vector<std::pair<double, SimplexVector>> out;
    for (int u = 0; u < nu; ++u) {
        double pu = 0.0;
        for (int x = 0; x < nx; ++x) pu += p_x[x] * K(x, u);
        if (pu <= 1e-14) {
            out.emplace_back(0.0, SimplexVector::uniform(nx));
            continue;
        }
        std::vector<double> row(static_cast<size_t>(nx));
        double sum = 0.0;
        for (int x = 0; x < nx; ++x) sum += (row[static_cast<size_t>(x)] = p_x[x] * K(x, u) / pu);
        for (double& v : row) v /= sum;
        out.emplace_back(pu, SimplexVector(std::move(row)));
    }
    return out;
}

ExtReal terminal_value(const TerminalBound& t, const JointTable& p_xz, const JointTable& q_xz) {
    switch (t.kind) {
        case TerminalKind::Centralized:
            return kl_divergence(p_xz.flatten(), q_xz.flatten());
        case TerminalKind::Zero: {
            const auto& a = p_xz.flat();
            const auto& b = q_xz.flat();
            double res = 0.0;
            for (size_t i = 0; i < a.size(); ++i) res = std::max(res, std::abs(a[i] - b[i]));
            if (res > 1e-9)
                throw InputError("terminal zero requires P_XZ = Q_XZ; residual " +
                                 std::to_string(res));
            return ExtReal(0.0);
        }
        case TerminalKind::Value:
            return ExtReal(t.value);
    }
    throw InputError("terminal: unknown kind");
}

void require_finite(const ExtReal& v, const std::string& what) {
    if (!v.finite())
        throw InputError("finiteness precondition violated: " + what + " is infinite");
}

} // namespace

MembershipResult membership_R_check(const DiscreteScenario& scn, const AuxiliaryReceiver& aux,
                                    double tol) {
    const int nx = scn.x_size(), ny = scn.y_size(), nz = aux.z_size();
    if (aux.p_z_given_xy.rows() != nx * ny)
        throw InputError("membership check: aux kernel rows != |X||Y|");
    JointTable q_xyz = scn.q_xy.extend(aux.q_z_given_xy, {"X", "Y"}, "Z");
    JointTable p_xyz = scn.p_xy.extend(aux.p_z_given_xy, {"X", "Y"}, "Z");

    MembershipResult r;
    // factorization residual || Q_{YZ|X} - Q_{Z|X} Q_{Y|Z} ||_inf on supported x
    std::vector<int> zero_x;
    Kernel q_yz_given_x = q_xyz.condition({"X"}, &zero_x); // cols (y,z), y slow
    Kernel q_z_given_x = q_xyz.marginal({"X", "Z"}).condition({"X"});
    std::vector<int> zero_z;
    Kernel q_y_given_z = q_xyz.marginal({"Y", "Z"}).condition({"Z"}, &zero_z);
    r.flagged_rows = zero_x;
    for (int z : zero_z) r.flagged_rows.push_back(nx + z);
    for (int x = 0; x < nx; ++x) {
        if (std::find(zero_x.begin(), zero_x.end(), x) != zero_x.end()) continue;
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) {
                double lhs = q_yz_given_x(x, y * nz + z);
                double rhs = q_z_given_x(x, z) * q_y_given_z(z, y);
                r.factorization_residual = std::max(r.factorization_residual,
                                                    std::abs(lhs - rhs));
            }
    }
    // marginal residual || P_XZ - Q_XZ ||_inf
    const std::vector<double> pa = p_xyz.marginal({"X", "Z"}).flat();
    const std::vector<double> qa = q_xyz.marginal({"X", "Z"}).flat();
    for (size_t i = 0; i < pa.size(); ++i)
        r.second_residual = std::max(r.second_residual, std::abs(pa[i] - qa[i]));
    r.member = r.factorization_residual <= tol && r.second_residual <= tol;
    return r;
}

MembershipResult membership_Rtilde_check(const DiscreteScenario& scn,
                                         const AuxiliaryReceiver& aux, double tol) {
    const int nx = scn.x_size(), ny = scn.y_size(), nz = aux.z_size();
    JointTable q_xyz = scn.q_xy.extend(aux.q_z_given_xy, {"X", "Y"}, "Z");
    JointTable p_xyz = scn.p_xy.extend(aux.p_z_given_xy, {"X", "Y"}, "Z");

    MembershipResult r;
    std::vector<int> zero_x;
    Kernel q_yz_given_x = q_xyz.condition({"X"}, &zero_x);
    Kernel q_z_given_x = q_xyz.marginal({"X", "Z"}).condition({"X"});
    std::vector<int> zero_zq;
    Kernel q_y_given_z = q_xyz.marginal({"Y", "Z"}).condition({"Z"}, &zero_zq);
    for (int x = 0; x < nx; ++x) {
        if (std::find(zero_x.begin(), zero_x.end(), x) != zero_x.end()) continue;
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) {
                double lhs = q_yz_given_x(x, y * nz + z);
                double rhs = q_z_given_x(x, z) * q_y_given_z(z, y);
                r.factorization_residual = std::max(r.factorization_residual,
                                                    std::abs(lhs - rhs));
            }
    }
    // conditional residual || P_{Y|Z} - Q_{Y|Z} ||_inf on jointly supported z
    std::vector<int> zero_zp;
    Kernel p_y_given_z = p_xyz.marginal({"Y", "Z"}).condition({"Z"}, &zero_zp);
    r.flagged_rows = zero_x;
    for (int z = 0; z < nz; ++z) {
        bool p_zero = std::find(zero_zp.begin(), zero_zp.end(), z) != zero_zp.end();
        bool q_zero = std::find(zero_zq.begin(), zero_zq.end(), z) != zero_zq.end();
        if (p_zero || q_zero) {
            r.flagged_rows.push_back(nx + z);
            continue;
        }
        for (int y = 0; y < ny; ++y)
            r.second_residual = std::max(r.second_residual,
                                         std::abs(p_y_given_z(z, y) - q_y_given_z(z, y)));
    }
    r.member = r.factorization_residual <= tol && r.second_residual <= tol;
    return r;
}

BoundResult g_bound(const DiscreteScenario& scn, const Kernel& p_z_given_x,
                    const Kernel& q_z_given_x, const OptimizerConfig& cfg) {
    const int nx = scn.x_size();
    if (p_z_given_x.rows() != nx || q_z_given_x.rows() != nx)
        throw InputError("g_bound: z kernels must have |X| rows");
    if (p_z_given_x.cols() != q_z_given_x.cols())
        throw InputError("g_bound: z alphabets differ between hypotheses");

    SimplexVector p_x = marginal_x(scn.p_xy);
    SimplexVector q_x = marginal_x(scn.q_xy);
    require_finite(kl_divergence(scn.p_xy.flatten(), scn.q_xy.flatten()), "D(P_XY||Q_XY)");
    JointTable p_xz = compose_joint(p_x, p_z_given_x, "X", "Z");
    JointTable q_xz = compose_joint(q_x, q_z_given_x, "X", "Z");
    require_finite(kl_divergence(p_xz.flatten(), q_xz.flatten()), "D(P_XZ||Q_XZ)");

    std::vector<int> zero_rows;
    ChannelQuad quad(scn.p_xy.condition({"X"}, &zero_rows), p_z_given_x,
                     scn.q_xy.condition({"X"}), q_z_given_x);

    OptimizerConfig inner_search = cfg;
    inner_search.f_starts = std::min(cfg.f_starts, 2);
    inner_search.f_max_iters = std::min(cfg.f_max_iters, 60);

    auto value_with = [&, p_x, q_x](const Kernel& K, const OptimizerConfig& icfg) -> Eval {
        auto parts = split_by_u(p_x, K);
        double total = 0.0;
        for (const auto& [pu, px_u] : parts) {
            if (pu == 0.0) continue;
            FResult fr = f_max(px_u, quad, q_x, icfg);
            if (fr.value.pos_inf()) return Eval::pos_inf();
            if (fr.value.neg_inf()) return Eval::bad();
            total += pu * fr.value.value();
        }
        return Eval::finite(total);
    };

    OuterProblem prob;
    prob.nx = nx;
    prob.nu = nx + 2;
    prob.rate = scn.rate;
    prob.search_value = [&](const Kernel& K) { return value_with(K, inner_search); };
    prob.final_value = [&](const Kernel& K) { return value_with(K, cfg); };
    const auto w_xy = scn.p_xy.flat();
    const auto w_xz = p_xz.flat();
    const int ny = scn.y_size(), nz = p_z_given_x.cols();
    prob.constraints = {
        [&, w_xy, ny](const Kernel& K) { return mi_ux_given_w(w_xy, nx, ny, K); },
        [&, w_xz, nz](const Kernel& K) { return mi_ux_given_w(w_xz, nx, nz, K); }};
    prob.constraint_names = {"I(U;X|Y)", "I(U;X|Z)"};

    OuterOutcome oc = maximize_u_channel(prob, p_x, cfg);

    BoundResult res;
    res.diagnostics.constraint_names = prob.constraint_names;
    res.diagnostics.constraint_values = oc.constraint_values;
    res.diagnostics.rate = scn.rate;
    res.diagnostics.starts = cfg.starts + 1;
    res.diagnostics.best_start = oc.best_start;
    res.diagnostics.penalty_rounds_used = oc.penalty_rounds_used;
    res.witness_u_channel = oc.witness;
    if (oc.pos_inf) {
        res.value = ExtReal::infinity();
        return res;
    }
    // full-quality re-evaluation at the winner collects the inner witnesses
    auto parts = split_by_u(p_x, oc.witness);
    std::vector<SimplexVector> qhats;
    double total = 0.0;
    bool boundary = false;
    for (const auto& [pu, px_u] : parts) {
        if (pu == 0.0) {
            qhats.push_back(q_x);
            continue;
        }
        FResult fr = f_max(px_u, quad, q_x, cfg);
        if (fr.value.pos_inf()) {
            res.value = ExtReal::infinity();
            res.witness_qhat_per_u = qhats;
            return res;
        }
        total += pu * fr.value.value();
        boundary = boundary || fr.boundary_flag;
        qhats.push_back(fr.witness_qhat);
    }
    res.value = ExtReal(total);
    res.witness_qhat_per_u = std::move(qhats);
    res.diagnostics.boundary_flag = boundary;
    if (!zero_rows.empty())
        res.diagnostics.notes.push_back("zero-mass X rows conditioned uniformly");
    return res;
}

BoundResult addsub_upper_bound(const DiscreteScenario& scn, const AuxiliaryReceiver& aux,
                               const TerminalBound& terminal, const OptimizerConfig& cfg) {
    JointTable p_xyz = scn.p_xy.extend(aux.p_z_given_xy, {"X", "Y"}, "Z");
    JointTable q_xyz = scn.q_xy.extend(aux.q_z_given_xy, {"X", "Y"}, "Z");
    JointTable p_xz = p_xyz.marginal({"X", "Z"});
    JointTable q_xz = q_xyz.marginal({"X", "Z"});
    require_finite(kl_divergence(scn.p_xy.flatten(), scn.q_xy.flatten()), "D(P_XY||Q_XY)");
    require_finite(kl_divergence(p_xz.flatten(), q_xz.flatten()), "D(P_XZ||Q_XZ)");

    Kernel p_z_given_x = p_xz.condition({"X"});
    Kernel q_z_given_x = q_xz.condition({"X"});
    ExtReal term = terminal_value(terminal, p_xz, q_xz);

    BoundResult g = g_bound(scn, p_z_given_x, q_z_given_x, cfg);
    BoundResult res = g;
    res.value = g.value + term;
    res.diagnostics.part_values = {g.value.as_double(), term.as_double()};
    res.diagnostics.notes.push_back(terminal.kind == TerminalKind::Centralized
                                        ? "terminal: centralized on (X,Z)"
                                        : (terminal.kind == TerminalKind::Zero
                                               ? "terminal: zero (P_XZ = Q_XZ)"
                                               : "terminal: user-supplied"));
    return res;
}

namespace {

BoundResult mi_bound_impl(const DiscreteScenario& scn, const AuxiliaryReceiver& aux,
                          const OptimizerConfig& cfg, bool both_constraints) {
    MembershipResult mem = membership_R_check(scn, aux, cfg.membership_tol);
    if (!mem.member)
        throw InputError("bound requires aux in the admissible class; residuals: factorization " +
                         std::to_string(mem.factorization_residual) + ", marginal " +
                         std::to_string(mem.second_residual));

    const int nx = scn.x_size(), ny = scn.y_size(), nz = aux.z_size();
    JointTable p_xyz = scn.p_xy.extend(aux.p_z_given_xy, {"X", "Y"}, "Z");
    JointTable q_xyz = scn.q_xy.extend(aux.q_z_given_xy, {"X", "Y"}, "Z");
    SimplexVector p_x = marginal_x(scn.p_xy);

    ExtReal kl_yz = kl_divergence(p_xyz.marginal({"Y", "Z"}).flatten(),
                                  q_xyz.marginal({"Y", "Z"}).flatten());

    BoundResult res;
    res.diagnostics.rate = scn.rate;
    if (kl_yz.pos_inf()) {
        res.value = ExtReal::infinity();
        res.diagnostics.notes.push_back("D(P_YZ||Q_YZ) infinite; optimization skipped");
        return res;
    }

    const auto p_flat = p_xyz.flat();
    const auto w_xz = p_xyz.marginal({"X", "Z"}).flat();
    const auto w_xy = scn.p_xy.flat();

    OuterProblem prob;
    prob.nx = nx;
    prob.nu = nx + 2;
    prob.rate = scn.rate;
    auto obj = [&, p_flat](const Kernel& K) {
        return Eval::finite(mi_yu_given_z(p_flat, nx, ny, nz, K));
    };
    prob.search_value = obj;
    prob.final_value = obj;
    prob.constraints = {
        [&, w_xz](const Kernel& K) { return mi_ux_given_w(w_xz, nx, nz, K); }};
    prob.constraint_names = {"I(U;X|Z)"};
    if (both_constraints) {
        prob.constraints.push_back(
            [&, w_xy](const Kernel& K) { return mi_ux_given_w(w_xy, nx, ny, K); });
        prob.constraint_names.push_back("I(U;X|Y)");
    }

    OuterOutcome oc = maximize_u_channel(prob, p_x, cfg);
    res.value = kl_yz + ExtReal(oc.value);
    res.witness_u_channel = oc.witness;
    res.diagnostics.constraint_names = prob.constraint_names;
    res.diagnostics.constraint_values = oc.constraint_values;
    res.diagnostics.starts = cfg.starts + 1;
    res.diagnostics.best_start = oc.best_start;
    res.diagnostics.penalty_rounds_used = oc.penalty_rounds_used;
    res.diagnostics.part_values = {oc.value, kl_yz.as_double()};
    return res;
}

} // namespace

BoundResult rw_bound(const DiscreteScenario& scn, const AuxiliaryReceiver& aux,
                     const OptimizerConfig& cfg) {
    return mi_bound_impl(scn, aux, cfg, false);
}

BoundResult corollary1_bound(const DiscreteScenario& scn, const AuxiliaryReceiver& aux,
                             const OptimizerConfig& cfg) {
    return mi_bound_impl(scn, aux, cfg, true);
}

BoundResult ac_lower_bound(const DiscreteScenario& scn, const OptimizerConfig& cfg) {
    const int nx = scn.x_size(), ny = scn.y_size();
    SimplexVector p_x = marginal_x(scn.p_xy);
    SimplexVector q_x = marginal_x(scn.q_xy);
    ExtReal kl_x = kl_divergence(p_x, q_x);

    BoundResult res;
    res.diagnostics.rate = scn.rate;
    if (kl_x.pos_inf()) {
        res.value = ExtReal::infinity();
        res.diagnostics.notes.push_back("D(P_X||Q_X) infinite");
        return res;
    }
    // When P_XY is not absolutely continuous w.r.t. Q_XY and any positive
    // rate is available, an arbitrarily light U-atom isolating the escaping
    // mass drives D(P_UY||Q_UY) to infinity at vanishing I(U;X); the softmax
    // parametrization cannot reach that boundary, so report it directly.
    if (centralized_bound(scn).pos_inf()) {
        ExtReal kl_y = kl_divergence(scn.p_xy.marginal({"Y"}).flatten(),
                                     scn.q_xy.marginal({"Y"}).flatten());
        if (scn.rate > 0.0 || kl_y.pos_inf()) {
            res.value = ExtReal::infinity();
            res.diagnostics.notes.push_back(
                "P_XY escapes the support of Q_XY: divergence unbounded");
            return res;
        }
    }

    const auto& p_xy = scn.p_xy.flat();
    const auto& q_xy = scn.q_xy.flat();
    auto obj = [&](const Kernel& K) -> Eval {
        const int nu = K.cols();
        double sum = 0.0;
        for (int u = 0; u < nu; ++u)
            for (int y = 0; y < ny; ++y) {
                double pu = 0.0, qu = 0.0;
                for (int x = 0; x < nx; ++x) {
                    pu += p_xy[static_cast<size_t>(x) * ny + y] * K(x, u);
                    qu += q_xy[static_cast<size_t>(x) * ny + y] * K(x, u);
                }
                if (pu <= 0.0) continue;
                if (qu <= 0.0) return Eval::pos_inf();
                sum += pu * std::log(pu / qu);
            }
        return Eval::finite(std::max(sum, 0.0));
    };

    std::vector<double> w_x1(p_x.entries());
    OuterProblem prob;
    prob.nx = nx;
    prob.nu = nx + 2;
    prob.rate = scn.rate;
    prob.search_value = obj;
    prob.final_value = obj;
    prob.constraints = {
        [&, w_x1](const Kernel& K) { return mi_ux_given_w(w_x1, nx, 1, K); }};
    prob.constraint_names = {"I(U;X)"};

    OuterOutcome oc = maximize_u_channel(prob, p_x, cfg);
    res.witness_u_channel = oc.witness;
    res.diagnostics.constraint_names = prob.constraint_names;
    res.diagnostics.constraint_values = oc.constraint_values;
    res.diagnostics.starts = cfg.starts + 1;
    res.diagnostics.best_start = oc.best_start;
    res.diagnostics.penalty_rounds_used = oc.penalty_rounds_used;
    res.value = oc.pos_inf ? ExtReal::infinity() : kl_x + ExtReal(oc.value);
    return res;
}

ExtReal centralized_bound(const DiscreteScenario& scn) {
    return kl_divergence(scn.p_xy.flatten(), scn.q_xy.flatten());
}

BoundResult chain_bound(const DiscreteScenario& scn, const std::vector<ChainLink>& chain,
                        const TerminalBound& terminal, const OptimizerConfig& cfg) {
    if (chain.empty()) throw InputError("chain_bound: empty chain");
    SimplexVector p_x = marginal_x(scn.p_xy);
    SimplexVector q_x = marginal_x(scn.q_xy);

    BoundResult res;
    res.diagnostics.rate = scn.rate;
    ExtReal total(0.0);

    for (size_t j = 0; j < chain.size(); ++j) {
        JointTable p_xz = compose_joint(p_x, chain[j].p_z_given_x, "X", "Z");
        JointTable q_xz = compose_joint(q_x, chain[j].q_z_given_x, "X", "Z");
        ExtReal link_kl = kl_divergence(p_xz.flatten(), q_xz.flatten());
        if (!link_kl.finite())
            throw InputError("chain_bound: link " + std::to_string(j) +
                             " violates finiteness (D(P_XZ_j||Q_XZ_j) infinite)");
    }

    for (size_t j = 0; j < chain.size(); ++j) {
        try {
            DiscreteScenario stage =
                j == 0 ? scn
                       : DiscreteScenario(
                             compose_joint(p_x, chain[j - 1].p_z_given_x, "X", "Y"),
                             compose_joint(q_x, chain[j - 1].q_z_given_x, "X", "Y"), scn.rate);
            BoundResult g = g_bound(stage, chain[j].p_z_given_x, chain[j].q_z_given_x, cfg);
            total += g.value;
            res.diagnostics.part_values.push_back(g.value.as_double());
            if (g.witness_u_channel) res.diagnostics.part_witnesses.push_back(*g.witness_u_channel);
            res.diagnostics.boundary_flag =
                res.diagnostics.boundary_flag || g.diagnostics.boundary_flag;
            if (j == 0) {
                res.witness_u_channel = g.witness_u_channel;
                res.witness_qhat_per_u = g.witness_qhat_per_u;
            }
        } catch (const InputError&) {
            throw;
        } catch (const std::exception& e) {
            throw EvaluationError("chain_bound: link " + std::to_string(j) + ": " +
                                  std::string(e.what()));
        }
    }

    const ChainLink& last = chain.back();
    JointTable p_xzk = compose_joint(p_x, last.p_z_given_x, "X", "Z");
    JointTable q_xzk = compose_joint(q_x, last.q_z_given_x, "X", "Z");
    ExtReal term = terminal_value(terminal, p_xzk, q_xzk);
    total += term;
    res.diagnostics.part_values.push_back(term.as_double());
    res.value = total;
    return res;
}

BoundResult j_augmented_bound(const DiscreteScenario& scn, const Kernel& p_j_given_xyz,
                              const Kernel& q_j_given_xyz, const AuxiliaryReceiver& base_aux,
                              const OptimizerConfig& cfg, const TerminalBound& terminal) {
    const int nx = scn.x_size(), ny = scn.y_size(), nz = base_aux.z_size();
    const int nj = p_j_given_xyz.cols();
    if (p_j_given_xyz.rows() != nx * ny * nz || q_j_given_xyz.rows() != nx * ny * nz)
        throw InputError("j_augmented_bound: J kernels must have |X||Y||Z| rows");
    if (q_j_given_xyz.cols() != nj)
        throw InputError("j_augmented_bound: J alphabets differ between hypotheses");
    if (ny * nj > kAxisCap || nz * nj > kAxisCap)
        throw InputError("j_augmented_bound: augmented alphabet exceeds the axis cap (" +
                         std::to_string(kAxisCap) + ")");

    JointTable p_xyzj =
        scn.p_xy.extend(base_aux.p_z_given_xy, {"X", "Y"}, "Z").extend(p_j_given_xyz,
                                                                       {"X", "Y", "Z"}, "J");
    JointTable q_xyzj =
        scn.q_xy.extend(base_aux.q_z_given_xy, {"X", "Y"}, "Z").extend(q_j_given_xyz,
                                                                       {"X", "Y", "Z"}, "J");

    JointTable p_xyj = p_xyzj.marginal({"X", "Y", "J"});
    JointTable q_xyj = q_xyzj.marginal({"X", "Y", "J"});
    JointTable p_xzj = p_xyzj.marginal({"X", "Z", "J"});
    JointTable q_xzj = q_xyzj.marginal({"X", "Z", "J"});
    require_finite(kl_divergence(p_xyj.flatten(), q_xyj.flatten()), "D(P_XYJ||Q_XYJ)");
    require_finite(kl_divergence(p_xzj.flatten(), q_xzj.flatten()), "D(P_XZJ||Q_XZJ)");

    // flat (x,y,j) row-major is exactly (x, y') with y' = (y,j), y slow
    JointTable p_xy2({{"X", nx}, {"Y", ny * nj}}, p_xyj.flat());
    JointTable q_xy2({{"X", nx}, {"Y", ny * nj}}, q_xyj.flat());
    JointTable p_xz2({{"X", nx}, {"Z", nz * nj}}, p_xzj.flat());
    JointTable q_xz2({{"X", nx}, {"Z", nz * nj}}, q_xzj.flat());

    DiscreteScenario aug(p_xy2, q_xy2, scn.rate);
    std::vector<int> zero_rows;
    Kernel p_z2_given_x = p_xz2.condition({"X"}, &zero_rows);
    Kernel q_z2_given_x = q_xz2.condition({"X"});

    BoundResult g = g_bound(aug, p_z2_given_x, q_z2_given_x, cfg);
    ExtReal term = terminal_value(terminal, p_xz2, q_xz2);

    BoundResult res = g;
    res.value = g.value + term;
    res.diagnostics.part_values = {g.value.as_double(), term.as_double()};
    res.diagnostics.notes.push_back("augmented alphabets: |Y'|=" + std::to_string(ny * nj) +
                                    ", |Z'|=" + std::to_string(nz * nj));
    return res;
}

CondIndepScenario conditional_independence_scenario(const CondIndepParams& params) {
    for (const char* n : {"X", "J", "Z"})
        if (!params.w_xjz.has_axis(n))
            throw InputError(std::string("conditional_independence_scenario: w_xjz missing axis '") +
                             n + "'");
    JointTable w = params.w_xjz.permute({"X", "J", "Z"});
    const int nx = w.axes()[0].size, nj = w.axes()[1].size, nz = w.axes()[2].size;
    const int nyh = params.q_yhat_given_z.cols();
    if (params.q_yhat_given_z.rows() != nz)
        throw InputError("conditional_independence_scenario: q_yhat_given_z rows != |Z|");
    if (params.p_yhat_given_xjz.rows() != nx * nj * nz ||
        params.p_yhat_given_xjz.cols() != nyh)
        throw InputError("conditional_independence_scenario: p_yhat_given_xjz shape mismatch");
    if (nj * nz * nyh > kAxisCap)
        throw InputError("conditional_independence_scenario: composite Y alphabet exceeds cap");

    // alternative hypothesis: Yhat depends on Z only
    std::vector<double> q_rows;
    q_rows.reserve(static_cast<size_t>(nx) * nj * nz * nyh);
    for (int x = 0; x < nx; ++x)
        for (int j = 0; j < nj; ++j)
            for (int z = 0; z < nz; ++z)
                for (int yh = 0; yh < nyh; ++yh)
                    q_rows.push_back(params.q_yhat_given_z(z, yh));
    Kernel q_yhat_given_xjz(nx * nj * nz, nyh, std::move(q_rows));

    JointTable p_full = w.extend(params.p_yhat_given_xjz, {"X", "J", "Z"}, "Yh");
    JointTable q_full = w.extend(q_yhat_given_xjz, {"X", "J", "Z"}, "Yh");

    // constraint (a): I_Q(Yhat; X,J | Z) = 0, via the chain rule
    double i_q = conditional_mi(q_full, "Yh", "X", {"Z"}) +
                 conditional_mi(q_full, "Yh", "J", {"X", "Z"});
    if (i_q > params.tol)
        throw InputError("conditional_independence_scenario: I_Q(Yhat;XJ|Z) = " +
                         std::to_string(i_q) + " exceeds tolerance");
    // constraint (b): P_XJZ = Q_XJZ
    {
        const std::vector<double> pa = p_full.marginal({"X", "J", "Z"}).flat();
        const std::vector<double> qa = q_full.marginal({"X", "J", "Z"}).flat();
        double res = 0.0;
        for (size_t i = 0; i < pa.size(); ++i) res = std::max(res, std::abs(pa[i] - qa[i]));
        if (res > params.tol)
            throw InputError("conditional_independence_scenario: P_XJZ != Q_XJZ (residual " +
                             std::to_string(res) + ")");
    }
    // constraint (c): P_{Yhat,Z} = Q_{Yhat,Z}
    {
        const std::vector<double> pa = p_full.marginal({"Z", "Yh"}).flat();
        const std::vector<double> qa = q_full.marginal({"Z", "Yh"}).flat();
        double res = 0.0;
        for (size_t i = 0; i < pa.size(); ++i) res = std::max(res, std::abs(pa[i] - qa[i]));
        if (res > params.tol)
            throw InputError("conditional_independence_scenario: P_YhatZ != Q_YhatZ (residual " +
                             std::to_string(res) + ")");
    }

    // scenario over X and composite Y = (J,Z,Yhat): flat (x,j,z,yh) is (x,y)
    const int ny = nj * nz * nyh;
    JointTable p_xy({{"X", nx}, {"Y", ny}}, p_full.flat());
    JointTable q_xy({{"X", nx}, {"Y", ny}}, q_full.flat());

    // deterministic extraction Z' = (Z,J), z slow, from y = (j,z,yh)
    const int nz2 = nz * nj;
    std::vector<double> extract(static_cast<size_t>(nx) * ny * nz2, 0.0);
    for (int x = 0; x < nx; ++x)
        for (int j = 0; j < nj; ++j)
            for (int z = 0; z < nz; ++z)
                for (int yh = 0; yh < nyh; ++yh) {
                    int y = (j * nz + z) * nyh + yh;
                    int z2 = z * nj + j;
                    extract[(static_cast<size_t>(x) * ny + y) * nz2 + z2] = 1.0;
                }
    Kernel zp(nx * ny, nz2, std::move(extract));

    CondIndepScenario out{DiscreteScenario(p_xy, q_xy, params.rate), AuxiliaryReceiver(zp, zp),
                          nj, nz, nyh};
    return out;
}

ExtReal reevaluate_g(const DiscreteScenario& scn, const Kernel& p_z_given_x,
                     const Kernel& q_z_given_x, const Kernel& u_channel,
                     const std::vector<SimplexVector>& qhat_per_u) {
    SimplexVector p_x = marginal_x(scn.p_xy);
    SimplexVector q_x = marginal_x(scn.q_xy);
    ChannelQuad quad(scn.p_xy.condition({"X"}), p_z_given_x, scn.q_xy.condition({"X"}),
                     q_z_given_x);
    auto parts = split_by_u(p_x, u_channel);
    if (parts.size() != qhat_per_u.size())
        throw InputError("reevaluate_g: witness count mismatch");
    ExtReal total(0.0);
    for (size_t u = 0; u < parts.size(); ++u) {
        if (parts[u].first == 0.0) continue;
        total += weighted(parts[u].first,
                          f_objective(qhat_per_u[u], parts[u].second, quad, q_x));
    }
    return total;
}

double mi_objective_at(const DiscreteScenario& scn, const AuxiliaryReceiver& aux,
                       const Kernel& u_channel) {
    const int nx = scn.x_size(), ny = scn.y_size(), nz = aux.z_size();
    JointTable p_xyz = scn.p_xy.extend(aux.p_z_given_xy, {"X", "Y"}, "Z");
    JointTable q_xyz = scn.q_xy.extend(aux.q_z_given_xy, {"X", "Y"}, "Z");
    double kl = kl_divergence(p_xyz.marginal({"Y", "Z"}).flatten(),
                              q_xyz.marginal({"Y", "Z"}).flatten())
                    .value();
    return kl + mi_yu_given_z(p_xyz.flat(), nx, ny, nz, u_channel);
}

} // namespace dht
