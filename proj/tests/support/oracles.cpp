#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dht/errors.hpp"
#include "dht/info.hpp"
#include "dht/optimizer.hpp"

namespace dht::oracle {

namespace {

constexpr double kNegBig = -std::numeric_limits<double>::infinity();

// swap-cost objective with its own loops; returns -inf when the Z term
// diverges, +inf never arises on the full-support instances this oracle is
// used with (asserted by returning NaN which the callers treat as skip)
double raw_objective(const std::vector<double>& qhat, const std::vector<int>& support,
                     const std::vector<double>& p_y, const std::vector<double>& p_z,
                     const Kernel& qy, const Kernel& qz) {
    std::vector<double> hy(static_cast<size_t>(qy.cols()), 0.0);
    std::vector<double> hz(static_cast<size_t>(qz.cols()), 0.0);
    for (size_t i = 0; i < support.size(); ++i) {
        double w = qhat[i];
        if (w <= 0.0) continue;
        for (int y = 0; y < qy.cols(); ++y) hy[static_cast<size_t>(y)] += w * qy(support[i], y);
        for (int z = 0; z < qz.cols(); ++z) hz[static_cast<size_t>(z)] += w * qz(support[i], z);
    }
    double ty = 0.0, tz = 0.0;
    for (size_t y = 0; y < p_y.size(); ++y) {
        if (p_y[y] == 0.0) continue;
        if (hy[y] <= 0.0) return std::numeric_limits<double>::quiet_NaN();
        ty += p_y[y] * std::log(p_y[y] / hy[y]);
    }
    for (size_t z = 0; z < p_z.size(); ++z) {
        if (p_z[z] == 0.0) continue;
        if (hz[z] <= 0.0) return kNegBig;
        tz += p_z[z] * std::log(p_z[z] / hz[z]);
    }
    return ty - tz;
}

} // namespace

double f_grid_oracle(const SimplexVector& p_x, const ChannelQuad& quad, const SimplexVector& q_x,
                     double step) {
    std::vector<int> support;
    for (int i = 0; i < q_x.size(); ++i)
        if (q_x[i] > 0.0) support.push_back(i);
    const int m = static_cast<int>(support.size());
    if (m > 4) throw InputError("f_grid_oracle: supports |X| <= 4 only");

    std::vector<double> p_y = push_forward(p_x, quad.p_y_given_x).entries();
    std::vector<double> p_z = push_forward(p_x, quad.p_z_given_x).entries();
    auto obj = [&](const std::vector<double>& qhat) {
        return raw_objective(qhat, support, p_y, p_z, quad.q_y_given_x, quad.q_z_given_x);
    };

    if (m == 1) return obj({1.0});

    double best = kNegBig;
    std::vector<double> best_pt;
    for (const auto& g : simplex_grid(m, step)) {
        double v = obj(g);
        if (std::isnan(v)) continue;
        if (v > best) {
            best = v;
            best_pt = g;
        }
    }
    if (best_pt.empty()) throw EvaluationError("f_grid_oracle: no evaluable grid point");

    if (m == 2) {
        // golden section over the bracketing cell of t = qhat[0]
        double lo = std::max(0.0, best_pt[0] - step);
        double hi = std::min(1.0, best_pt[0] + step);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = lo, b = hi;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        auto at = [&](double t) { return obj({t, 1.0 - t}); };
        double fc = at(c), fd = at(d);
        for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
            if (std::isnan(fc) || (!std::isnan(fd) && fd > fc)) {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = at(d);
            } else {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = at(c);
            }
        }
        for (double t : {a, 0.5 * (a + b), b}) {
            double v = at(t);
            if (!std::isnan(v)) best = std::max(best, v);
        }
        return best;
    }

    // pairwise mass-transfer polish inside the best cell
    std::vector<double> x = best_pt;
    double fx = best;
    for (double delta = step; delta > 1e-11; delta *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    if (i == j || x[static_cast<size_t>(j)] < delta) continue;
                    std::vector<double> cand = x;
                    cand[static_cast<size_t>(j)] -= delta;
                    cand[static_cast<size_t>(i)] += delta;
                    double v = obj(cand);
                    if (!std::isnan(v) && v > fx + 1e-15) {
                        x = std::move(cand);
                        fx = v;
                        improved = true;
                    }
                }
        }
    }
    return fx;
}

double thm2_cap_direct(const std::vector<double>& p_uyz, int nu, int ny, int nz,
                       const Kernel& q_y_given_z) {
    std::vector<double> p_uz(static_cast<size_t>(nu) * nz, 0.0);
    for (int u = 0; u < nu; ++u)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z)
                p_uz[static_cast<size_t>(u) * nz + z] +=
                    p_uyz[(static_cast<size_t>(u) * ny + y) * nz + z];
    double sum = 0.0;
    for (int u = 0; u < nu; ++u)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) {
                double num = p_uyz[(static_cast<size_t>(u) * ny + y) * nz + z];
                if (num == 0.0) continue;
                sum += num * std::log(num / (p_uz[static_cast<size_t>(u) * nz + z] *
                                             q_y_given_z(z, y)));
            }
    return sum;
}

namespace {

// I(U;X|C) for the two-atom X decomposition representation:
// atoms (w_u, t_u) with P_{X|u} = (t_u, 1-t_u), channel X -> C given by c_x
// rows; own loops.
double mi_ux_given_c_decomp(const std::vector<double>& w, const std::vector<double>& t,
                            const Kernel& c_given_x) {
    const int nu = static_cast<int>(w.size());
    const int nc = c_given_x.cols();
    double sum = 0.0;
    std::vector<double> p_uc(static_cast<size_t>(nu) * nc, 0.0);
    std::vector<double> p_xc(2 * static_cast<size_t>(nc), 0.0);
    std::vector<double> p_c(static_cast<size_t>(nc), 0.0);
    for (int u = 0; u < nu; ++u) {
        double px_u[2] = {t[static_cast<size_t>(u)], 1.0 - t[static_cast<size_t>(u)]};
        for (int x = 0; x < 2; ++x)
            for (int c = 0; c < nc; ++c) {
                double v = w[static_cast<size_t>(u)] * px_u[x] * c_given_x(x, c);
                p_uc[static_cast<size_t>(u) * nc + c] += v;
                p_xc[static_cast<size_t>(x) * nc + c] += v;
                p_c[static_cast<size_t>(c)] += v;
            }
    }
    for (int u = 0; u < nu; ++u) {
        double px_u[2] = {t[static_cast<size_t>(u)], 1.0 - t[static_cast<size_t>(u)]};
        for (int x = 0; x < 2; ++x)
            for (int c = 0; c < nc; ++c) {
                double v = w[static_cast<size_t>(u)] * px_u[x] * c_given_x(x, c);
                if (v <= 0.0) continue;
                sum += v * std::log(v * p_c[static_cast<size_t>(c)] /
                                    (p_uc[static_cast<size_t>(u) * nc + c] *
                                     p_xc[static_cast<size_t>(x) * nc + c]));
            }
    }
    return std::max(sum, 0.0);
}

} // namespace

double g_decomposition_oracle(const DiscreteScenario& scn, const Kernel& p_z_given_x,
                              const Kernel& q_z_given_x, double t_step) {
    if (scn.x_size() != 2) throw InputError("g_decomposition_oracle: binary X only");
    SimplexVector p_x = scn.p_xy.marginal({"X"}).flatten();
    SimplexVector q_x = scn.q_xy.marginal({"X"}).flatten();
    ChannelQuad quad(scn.p_xy.condition({"X"}), p_z_given_x, scn.q_xy.condition({"X"}),
                     q_z_given_x);
    const Kernel p_y_given_x = scn.p_xy.condition({"X"});
    const double p0 = p_x[0];
    const double R = scn.rate;

    const int nt = static_cast<int>(std::lround(1.0 / t_step)) + 1;
    std::vector<double> tgrid(static_cast<size_t>(nt));
    std::vector<double> fval(static_cast<size_t>(nt));
    for (int i = 0; i < nt; ++i) {
        double t = static_cast<double>(i) * t_step;
        tgrid[static_cast<size_t>(i)] = t;
        std::vector<double> px = {t, 1.0 - t};
        double s = px[0] + px[1];
        px[0] /= s;
        px[1] /= s;
        fval[static_cast<size_t>(i)] = f_grid_oracle(SimplexVector(px), quad, q_x, 1e-3);
    }

    auto feasible_value = [&](const std::vector<double>& w, const std::vector<double>& t,
                              const std::vector<double>& f) {
        double i_y = mi_ux_given_c_decomp(w, t, p_y_given_x);
        double i_z = mi_ux_given_c_decomp(w, t, p_z_given_x);
        if (i_y > R + 1e-9 || i_z > R + 1e-9) return kNegBig;
        double v = 0.0;
        for (size_t u = 0; u < w.size(); ++u) v += w[u] * f[u];
        return v;
    };

    // |U| = 1 (constant U)
    double best = f_grid_oracle(p_x, quad, q_x, 1e-3);

    // |U| = 2 across the full t-grid
    for (int i = 0; i < nt; ++i) {
        if (tgrid[static_cast<size_t>(i)] > p0) break;
        for (int j = nt - 1; j >= 0; --j) {
            double ti = tgrid[static_cast<size_t>(i)], tj = tgrid[static_cast<size_t>(j)];
            if (tj < p0) break;
            if (tj <= ti) continue;
            double w = (tj - p0) / (tj - ti);
            if (w < 0.0 || w > 1.0) continue;
            best = std::max(best, feasible_value({w, 1.0 - w}, {ti, tj},
                                                 {fval[static_cast<size_t>(i)],
                                                  fval[static_cast<size_t>(j)]}));
        }
    }

    // |U| = 3 on the even sub-grid with a scanned weight segment
    for (int a = 0; a < nt; a += 2) {
        double ta = tgrid[static_cast<size_t>(a)];
        if (ta > p0) break;
        for (int b = a + 2; b < nt; b += 2) {
            double tb = tgrid[static_cast<size_t>(b)];
            for (int c = b + 2; c < nt; c += 2) {
                double tc = tgrid[static_cast<size_t>(c)];
                if (tc < p0) continue;
                double g_lo = 0.0, g_hi = 1.0;
                if (tc > tb && p0 > tb) g_lo = std::max(g_lo, (p0 - tb) / (tc - tb));
                if (tc > ta) g_hi = std::min(g_hi, (p0 - ta) / (tc - ta));
                if (g_lo > g_hi) continue;
                for (int s = 0; s <= 20; ++s) {
                    double gamma = g_lo + (g_hi - g_lo) * s / 20.0;
                    double rem = 1.0 - gamma;
                    if (rem <= 1e-12) continue;
                    double mean = (p0 - gamma * tc) / rem;
                    if (mean < ta - 1e-12 || mean > tb + 1e-12) continue;
                    double wa = tb > ta ? rem * (tb - mean) / (tb - ta) : rem;
                    double wb = rem - wa;
                    if (wa < -1e-12 || wb < -1e-12) continue;
                    wa = std::max(wa, 0.0);
                    wb = std::max(wb, 0.0);
                    best = std::max(best,
                                    feasible_value({wa, wb, gamma}, {ta, tb, tc},
                                                   {fval[static_cast<size_t>(a)],
                                                    fval[static_cast<size_t>(b)],
                                                    fval[static_cast<size_t>(c)]}));
                }
            }
        }
    }
    return best;
}

namespace {

// I(Yhat; (U,J) | Z) and I(U; X | (Z,J)) for the conditional-independence
// construction, from the raw joint p_xjzy and a channel K: X -> U.
struct Example1Eval {
    const std::vector<double>* p; // (x,j,z,yh) row-major
    int nx, nj, nz, nyh;

    double objective(const Kernel& K) const {
        const int nu = K.cols();
        const int nv = nu * nj;
        std::vector<double> p_vzy(static_cast<size_t>(nv) * nz * nyh, 0.0);
        for (int x = 0; x < nx; ++x)
            for (int j = 0; j < nj; ++j)
                for (int z = 0; z < nz; ++z)
                    for (int yh = 0; yh < nyh; ++yh) {
                        double m = (*p)[((static_cast<size_t>(x) * nj + j) * nz + z) * nyh + yh];
                        if (m == 0.0) continue;
                        for (int u = 0; u < nu; ++u)
                            p_vzy[((static_cast<size_t>(u) * nj + j) * nz + z) * nyh + yh] +=
                                m * K(x, u);
                    }
        std::vector<double> p_vz(static_cast<size_t>(nv) * nz, 0.0);
        std::vector<double> p_zy(static_cast<size_t>(nz) * nyh, 0.0);
        std::vector<double> p_z(static_cast<size_t>(nz), 0.0);
        for (int v = 0; v < nv; ++v)
            for (int z = 0; z < nz; ++z)
                for (int yh = 0; yh < nyh; ++yh)
                    p_vz[static_cast<size_t>(v) * nz + z] +=
                        p_vzy[(static_cast<size_t>(v) * nz + z) * nyh + yh];
        for (int z = 0; z < nz; ++z)
            for (int yh = 0; yh < nyh; ++yh) {
                double m = 0.0;
                for (int v = 0; v < nv; ++v)
                    m += p_vzy[(static_cast<size_t>(v) * nz + z) * nyh + yh];
                p_zy[static_cast<size_t>(z) * nyh + yh] = m;
                p_z[static_cast<size_t>(z)] += m;
            }
        double sum = 0.0;
        for (int v = 0; v < nv; ++v)
            for (int z = 0; z < nz; ++z)
                for (int yh = 0; yh < nyh; ++yh) {
                    double m = p_vzy[(static_cast<size_t>(v) * nz + z) * nyh + yh];
                    if (m <= 0.0) continue;
                    sum += m * std::log(m * p_z[static_cast<size_t>(z)] /
                                        (p_vz[static_cast<size_t>(v) * nz + z] *
                                         p_zy[static_cast<size_t>(z) * nyh + yh]));
                }
        return std::max(sum, 0.0);
    }

    double constraint(const Kernel& K) const {
        const int nu = K.cols();
        const int nw = nz * nj;
        std::vector<double> p_uw(static_cast<size_t>(nu) * nw, 0.0);
        std::vector<double> p_xw(static_cast<size_t>(nx) * nw, 0.0);
        std::vector<double> p_w(static_cast<size_t>(nw), 0.0);
        for (int x = 0; x < nx; ++x)
            for (int j = 0; j < nj; ++j)
                for (int z = 0; z < nz; ++z) {
                    double m = 0.0;
                    for (int yh = 0; yh < nyh; ++yh)
                        m += (*p)[((static_cast<size_t>(x) * nj + j) * nz + z) * nyh + yh];
                    int w = z * nj + j;
                    p_xw[static_cast<size_t>(x) * nw + w] += m;
                    p_w[static_cast<size_t>(w)] += m;
                    for (int u = 0; u < nu; ++u)
                        p_uw[static_cast<size_t>(u) * nw + w] += m * K(x, u);
                }
        double sum = 0.0;
        for (int x = 0; x < nx; ++x)
            for (int w = 0; w < nw; ++w) {
                double m = p_xw[static_cast<size_t>(x) * nw + w];
                if (m <= 0.0) continue;
                for (int u = 0; u < K.cols(); ++u) {
                    double v = m * K(x, u);
                    if (v <= 0.0) continue;
                    sum += v * std::log(v * p_w[static_cast<size_t>(w)] /
                                        (p_uw[static_cast<size_t>(u) * nw + w] * m));
                }
            }
        return std::max(sum, 0.0);
    }
};

Kernel softmax_rows(const std::vector<double>& theta, int nx, int nu) {
    std::vector<double> m(static_cast<size_t>(nx) * nu);
    for (int x = 0; x < nx; ++x) {
        double mx = theta[static_cast<size_t>(x) * nu];
        for (int u = 1; u < nu; ++u) mx = std::max(mx, theta[static_cast<size_t>(x) * nu + u]);
        double s = 0.0;
        for (int u = 0; u < nu; ++u)
            s += (m[static_cast<size_t>(x) * nu + u] =
                      std::exp(theta[static_cast<size_t>(x) * nu + u] - mx));
        for (int u = 0; u < nu; ++u) m[static_cast<size_t>(x) * nu + u] /= s;
    }
    return Kernel(nx, nu, std::move(m));
}

Kernel mix_to_feasible(const Example1Eval& ev, Kernel K, double rate, const SimplexVector& p_x) {
    if (ev.constraint(K) <= rate + 1e-9) return K;
    const int nx = K.rows(), nu = K.cols();
    std::vector<double> marg(static_cast<size_t>(nu), 0.0);
    for (int x = 0; x < nx; ++x)
        for (int u = 0; u < nu; ++u) marg[static_cast<size_t>(u)] += p_x[x] * K(x, u);
    auto mix = [&](double t) {
        std::vector<double> m(static_cast<size_t>(nx) * nu);
        for (int x = 0; x < nx; ++x)
            for (int u = 0; u < nu; ++u)
                m[static_cast<size_t>(x) * nu + u] =
                    (1.0 - t) * K(x, u) + t * marg[static_cast<size_t>(u)];
        return Kernel(nx, nu, std::move(m));
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 50; ++it) {
        double mid = 0.5 * (lo + hi);
        if (ev.constraint(mix(mid)) <= rate + 1e-9)
            hi = mid;
        else
            lo = mid;
    }
    return mix(hi);
}

} // namespace

double example1_direct_optimizer(const CondIndepScenario& cis, double rate, unsigned seed,
                                 int samples) {
    const DiscreteScenario& scn = cis.scenario;
    Example1Eval ev{&scn.p_xy.flat(), scn.x_size(), cis.j_size, cis.z_size, cis.yhat_size};
    SimplexVector p_x = scn.p_xy.marginal({"X"}).flatten();
    const int nx = scn.x_size();
    const int nu = nx + 2;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 2.0);

    double best = 0.0;
    std::vector<double> best_theta(static_cast<size_t>(nx) * nu, 0.0);
    for (int s = 0; s < samples; ++s) {
        std::vector<double> theta(static_cast<size_t>(nx) * nu);
        for (double& t : theta) t = nd(rng);
        Kernel K = mix_to_feasible(ev, softmax_rows(theta, nx, nu), rate, p_x);
        double v = ev.objective(K);
        if (v > best) {
            best = v;
            best_theta = theta;
        }
    }
    // coordinate polish
    for (double delta : {0.5, 0.1, 0.02}) {
        bool improved = true;
        int rounds = 0;
        while (improved && rounds++ < 40) {
            improved = false;
            for (size_t i = 0; i < best_theta.size(); ++i) {
                for (double sgn : {1.0, -1.0}) {
                    std::vector<double> cand = best_theta;
                    cand[i] += sgn * delta;
                    Kernel K = mix_to_feasible(ev, softmax_rows(cand, nx, nu), rate, p_x);
                    double v = ev.objective(K);
                    if (v > best + 1e-12) {
                        best = v;
                        best_theta = cand;
                        improved = true;
                    }
                }
            }
        }
    }
    return best;
}

std::vector<double> random_simplex(std::mt19937_64& rng, int n, double floor) {
    std::uniform_real_distribution<double> ud(1e-12, 1.0);
    std::vector<double> v(static_cast<size_t>(n));
    double sum = 0.0;
    for (double& x : v) sum += (x = -std::log(ud(rng)));
    for (double& x : v) x = (1.0 - floor * n) * (x / sum) + floor;
    double s2 = 0.0;
    for (double x : v) s2 += x;
    for (double& x : v) x /= s2;
    return v;
}

Kernel random_kernel(std::mt19937_64& rng, int rows, int cols, double floor) {
    std::vector<double> m;
    m.reserve(static_cast<size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        auto row = random_simplex(rng, cols, floor);
        m.insert(m.end(), row.begin(), row.end());
    }
    return Kernel(rows, cols, std::move(m));
}

JointTable random_joint_xy(std::mt19937_64& rng, int nx, int ny, double floor) {
    return JointTable({{"X", nx}, {"Y", ny}}, random_simplex(rng, nx * ny, floor));
}

ChannelQuad random_quad(std::mt19937_64& rng, int nx, int ny, int nz) {
    return ChannelQuad(random_kernel(rng, nx, ny), random_kernel(rng, nx, nz),
                       random_kernel(rng, nx, ny), random_kernel(rng, nx, nz));
}

RInstance sample_markov_r_instance(std::mt19937_64& rng, int nx, int ny, int nz, double rate) {
    std::vector<double> q_x = random_simplex(rng, nx, 0.05);
    Kernel W = random_kernel(rng, nx, nz, 0.05);          // Z | X, shared
    Kernel V = random_kernel(rng, nz, ny, 0.05);          // Y | Z under Q
    Kernel p_y_given_x = random_kernel(rng, nx, ny, 0.05);

    // Q_{Y|X} = W V
    std::vector<double> qy(static_cast<size_t>(nx) * ny, 0.0);
    for (int x = 0; x < nx; ++x)
        for (int z = 0; z < nz; ++z)
            for (int y = 0; y < ny; ++y)
                qy[static_cast<size_t>(x) * ny + y] += W(x, z) * V(z, y);

    std::vector<double> p_xy(static_cast<size_t>(nx) * ny);
    std::vector<double> q_xy(static_cast<size_t>(nx) * ny);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            p_xy[static_cast<size_t>(x) * ny + y] = q_x[static_cast<size_t>(x)] * p_y_given_x(x, y);
            q_xy[static_cast<size_t>(x) * ny + y] =
                q_x[static_cast<size_t>(x)] * qy[static_cast<size_t>(x) * ny + y];
        }

    // P: Z from X alone through W; Q: conditional of Z given (X,Y) under the
    // Markov joint Q_X W V
    std::vector<double> paux(static_cast<size_t>(nx) * ny * nz);
    std::vector<double> qaux(static_cast<size_t>(nx) * ny * nz);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            double den = qy[static_cast<size_t>(x) * ny + y];
            for (int z = 0; z < nz; ++z) {
                paux[(static_cast<size_t>(x) * ny + y) * nz + z] = W(x, z);
                qaux[(static_cast<size_t>(x) * ny + y) * nz + z] = W(x, z) * V(z, y) / den;
            }
        }

    DiscreteScenario scn(JointTable({{"X", nx}, {"Y", ny}}, std::move(p_xy)),
                         JointTable({{"X", nx}, {"Y", ny}}, std::move(q_xy)), rate);
    AuxiliaryReceiver aux(Kernel(nx * ny, nz, std::move(paux)),
                          Kernel(nx * ny, nz, std::move(qaux)));
    return {std::move(scn), std::move(aux)};
}

RInstance sample_testing_independence(std::mt19937_64& rng, int nx, int ny, double rate) {
    JointTable p_xy = random_joint_xy(rng, nx, ny, 0.02);
    std::vector<double> p_x = p_xy.marginal({"X"}).flat();
    std::vector<double> p_y = p_xy.marginal({"Y"}).flat();
    std::vector<double> q(static_cast<size_t>(nx) * ny);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            q[static_cast<size_t>(x) * ny + y] =
                p_x[static_cast<size_t>(x)] * p_y[static_cast<size_t>(y)];
    DiscreteScenario scn(p_xy, JointTable({{"X", nx}, {"Y", ny}}, std::move(q)), rate);
    Kernel constant(nx * ny, 1, std::vector<double>(static_cast<size_t>(nx) * ny, 1.0));
    return {std::move(scn), AuxiliaryReceiver(constant, constant)};
}

} // namespace dht::oracle
