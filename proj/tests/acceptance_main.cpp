// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Criteria run with pinned tolerances and report their runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dht/bounds.hpp"
#include "dht/gaussian.hpp"
#include "dht/info.hpp"
#include "dht/inner_objective.hpp"
#include "dht/sweep.hpp"
#include "oracles.hpp"

using namespace dht;

namespace {

struct Criterion {
    bool pass = true;
    std::string detail;
    int checks = 0;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

std::vector<double> fig_grid(double rho1, int n = 60) {
    std::vector<double> out;
    for (int k = 1; k <= n; ++k) out.push_back(rho1 + (1.0 - rho1) * k / (n + 1.0));
    return out;
}

// ---------------------------------------------------------------------------

Criterion criterion1() {
    Criterion c;
    const double rho1 = 0.7, R = 0.5, boundary = std::sqrt(0.7);
    for (double rho0 : fig_grid(rho1)) {
        GaussianScenario scn{rho0, rho1, R};
        double nv = new_gaussian(scn).value;
        double rw = rw_gaussian(scn);
        c.expect(nv <= rw + 1e-12, "new > rw at rho0=" + format_sig(rho0));
        if (rho0 >= boundary)
            c.expect(std::abs(nv - rw) <= 1e-12,
                     "no reduction to rw at rho0=" + format_sig(rho0));
    }
    return c;
}

Criterion criterion2() {
    Criterion c;
    const double R = 0.5;
    for (int i = 1; i <= 9; ++i) {
        double rho1 = i / 10.0;
        for (double rho0 : fig_grid(rho1)) {
            double nv = new_gaussian({rho0, rho1, R}).value;
            double ce = centralized_gaussian(rho0, rho1);
            c.expect(nv <= ce + 1e-12, "new > centralized at rho0=" + format_sig(rho0) +
                                           ", rho1=" + format_sig(rho1));
        }
    }
    return c;
}

Criterion criterion3() {
    Criterion c;
    GaussianScenario scn{0.75, 0.7, 0.5};
    double nv = new_gaussian(scn).value;
    double rw = rw_gaussian(scn);
    c.expect(std::abs(nv - 0.007570) <= 1e-5,
             "new = " + format_sig(nv) + " not within 1e-5 of 0.007570");
    c.expect(std::abs(rw - 0.008858) <= 1e-5,
             "rw = " + format_sig(rw) + " not within 1e-5 of 0.008858");
    c.expect(nv < rw, "no strict improvement");
    return c;
}

Criterion criterion4() {
    Criterion c;
    for (int i = 0; i < 200; ++i) {
        double rho1 = 0.995 * i / 200.0;
        for (int j = 1; j <= 200; ++j) {
            double rho0 = rho1 + (1.0 - rho1) * j / 201.0;
            for (int k = 1; k <= 20; ++k) {
                double R = 0.05 + 1.95 * (k - 1) / 19.0;
                GaussianScenario scn{rho0, rho1, R};
                double a = new_gaussian(scn).value;
                double b = exponent_from_sigma(scn, sigma_hat_sq(scn).value);
                c.expect(std::abs(a - b) <= 1e-10,
                         "form mismatch at (" + format_sig(rho0) + "," + format_sig(rho1) +
                             "," + format_sig(R) + "): " + format_sig(a - b));
                if (!c.pass) return c;
            }
        }
    }
    return c;
}

Criterion criterion5() {
    Criterion c;
    OptimizerConfig cfg;
    std::mt19937_64 rng(0);
    for (int t = 0; t < 100; ++t) {
        ChannelQuad quad = oracle::random_quad(rng, 2, 2, 2);
        SimplexVector p_x{oracle::random_simplex(rng, 2)};
        SimplexVector q_x{oracle::random_simplex(rng, 2)};
        double ours = f_max(p_x, quad, q_x, cfg).value.value();
        double ref = oracle::f_grid_oracle(p_x, quad, q_x);
        c.expect(std::abs(ours - ref) <= 1e-4,
                 "|X|=2 instance " + std::to_string(t) + ": |" + format_sig(ours) + " - " +
                     format_sig(ref) + "| > 1e-4");
    }
    for (int t = 0; t < 30; ++t) {
        ChannelQuad quad = oracle::random_quad(rng, 3, 3, 3);
        SimplexVector p_x{oracle::random_simplex(rng, 3)};
        SimplexVector q_x{oracle::random_simplex(rng, 3)};
        double ours = f_max(p_x, quad, q_x, cfg).value.value();
        double ref = oracle::f_grid_oracle(p_x, quad, q_x);
        c.expect(std::abs(ours - ref) <= 1e-4,
                 "|X|=3 instance " + std::to_string(t) + ": |" + format_sig(ours) + " - " +
                     format_sig(ref) + "| > 1e-4");
    }
    return c;
}

Criterion criterion6() {
    Criterion c;
    OptimizerConfig cfg;
    std::mt19937_64 rng(0);
    for (int t = 0; t < 50; ++t) {
        SimplexVector q_x{oracle::random_simplex(rng, 2, 0.05)};
        Kernel W = oracle::random_kernel(rng, 2, 2, 0.05);
        Kernel V = oracle::random_kernel(rng, 2, 2, 0.05);
        std::vector<double> qy(4, 0.0);
        for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z)
                for (int y = 0; y < 2; ++y)
                    qy[static_cast<size_t>(x) * 2 + y] += W(x, z) * V(z, y);
        JointTable p({{"X", 2}, {"Y", 2}, {"Z", 2}}, oracle::random_simplex(rng, 8, 0.01));
        ChannelQuad quad(p.marginal({"X", "Y"}).condition({"X"}),
                         p.marginal({"X", "Z"}).condition({"X"}), Kernel(2, 2, qy), W);
        Kernel u_channel = oracle::random_kernel(rng, 2, 3, 0.05);
        SimplexVector p_x = p.marginal({"X"}).flatten();
        JointTable p_uxyz = p.extend(u_channel, {"X"}, "U").permute({"U", "X", "Y", "Z"});
        double cap = thm2_cap(p_uxyz, V).value();
        double avg = 0.0;
        for (int u = 0; u < 3; ++u) {
            double pu = 0.0;
            for (int x = 0; x < 2; ++x) pu += p_x[x] * u_channel(x, u);
            if (pu <= 1e-14) continue;
            std::vector<double> row(2);
            for (int x = 0; x < 2; ++x)
                row[static_cast<size_t>(x)] = p_x[x] * u_channel(x, u) / pu;
            double s = row[0] + row[1];
            row[0] /= s;
            row[1] /= s;
            avg += pu * f_max(SimplexVector(row), quad, q_x, cfg).value.value();
        }
        c.expect(avg <= cap + 1e-6, "instance " + std::to_string(t) + ": averaged cost " +
                                        format_sig(avg) + " exceeds cap " + format_sig(cap));
    }
    return c;
}

Criterion criterion7() {
    Criterion c;
    OptimizerConfig cfg;
    std::mt19937_64 rng(0);
    for (int t = 0; t < 30; ++t) {
        auto inst = oracle::sample_markov_r_instance(rng, 2, 2, 2, 0.05 + 0.02 * t);
        MembershipResult mr = membership_R_check(inst.scn, inst.aux, 1e-9);
        c.expect(mr.member, "instance " + std::to_string(t) + " not admissible");
        double ac = ac_lower_bound(inst.scn, cfg).value.value();
        double c1 = corollary1_bound(inst.scn, inst.aux, cfg).value.value();
        double rw = rw_bound(inst.scn, inst.aux, cfg).value.value();
        double as =
            addsub_upper_bound(inst.scn, inst.aux, TerminalBound::zero(), cfg).value.value();
        c.expect(ac <= c1 + 1e-6, "instance " + std::to_string(t) + ": ac " + format_sig(ac) +
                                      " > corollary1 " + format_sig(c1));
        c.expect(c1 <= rw + 1e-6, "instance " + std::to_string(t) + ": corollary1 " +
                                      format_sig(c1) + " > rw " + format_sig(rw));
        c.expect(ac <= as + 1e-6, "instance " + std::to_string(t) + ": ac " + format_sig(ac) +
                                      " > addsub " + format_sig(as));
    }
    return c;
}

Criterion criterion8() {
    Criterion c;
    OptimizerConfig cfg;
    SimplexVector u = SimplexVector::uniform(2);
    DiscreteScenario scn(compose_joint(u, Kernel::binary_symmetric(0.1), "X", "Y"),
                         compose_joint(u, Kernel::binary_symmetric(0.2), "X", "Y"), 0.2);
    Kernel pz(2, 2, {0.75, 0.25, 0.35, 0.65});
    std::vector<double> rows(8);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                rows[(static_cast<size_t>(x) * 2 + y) * 2 + z] = pz(x, z);
    AuxiliaryReceiver aux{Kernel(4, 2, rows), Kernel(4, 2, rows)};

    Kernel j_const(8, 1, std::vector<double>(8, 1.0));
    double with_const = j_augmented_bound(scn, j_const, j_const, aux, cfg).value.value();
    double plain =
        addsub_upper_bound(scn, aux, TerminalBound::centralized(), cfg).value.value();
    c.expect(std::abs(with_const - plain) <= 1e-6,
             "constant J: " + format_sig(with_const) + " vs addsub " + format_sig(plain));

    std::vector<double> jx(16, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int yz = 0; yz < 4; ++yz) jx[(static_cast<size_t>(x) * 4 + yz) * 2 + x] = 1.0;
    Kernel j_is_x(8, 2, std::move(jx));
    double with_x = j_augmented_bound(scn, j_is_x, j_is_x, aux, cfg).value.value();
    double cent = centralized_bound(scn).value();
    c.expect(std::abs(with_x - cent) <= 1e-6,
             "J=X: " + format_sig(with_x) + " vs centralized " + format_sig(cent));
    return c;
}

Criterion criterion9() {
    Criterion c;
    RunConfig cfg = preset_fig2();
    cfg.seed = 0;
    std::string a = run_gaussian_sweep(cfg);
    std::string b = run_gaussian_sweep(cfg);
    c.expect(a == b, "fig2 CSVs differ between runs");
    c.expect(!a.empty() && a.find("rho0,") == 0, "fig2 CSV malformed");
    return c;
}

Criterion criterion10() {
    Criterion c;
    // The figure reproduction covers the three curves whose closed forms are
    // given here (rw, new, centralized) plus the captions' qualitative
    // ordering; the published lower-bound curve and the transport-based bound
    // come from formulas not stated in this source and are excluded.
    RunConfig cfg = preset_fig2();
    std::string csv = run_gaussian_sweep(cfg);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    c.expect(header ==
                 "rho0,rho1,R,rho,rw_bound,new_bound,centralized,active_branch,rw_norm,"
                 "new_norm,cent_norm",
             "unexpected column set: " + header);
    std::string line;
    bool orderings = true;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string f;
        std::vector<double> v;
        int col = 0;
        while (std::getline(ls, f, ',')) {
            if (col != 7) v.push_back(std::stod(f));
            ++col;
        }
        // v: rho0 rho1 R rho rw new cent | norms...
        if (!(v[5] <= v[4] + 1e-12 && v[5] <= v[6] + 1e-12)) orderings = false;
    }
    c.expect(orderings, "caption orderings fail on the emitted data");
    return c;
}

} // namespace

int main() {
    struct Entry {
        const char* name;
        double budget_s;
        std::function<Criterion()> fn;
    };
    const std::vector<Entry> entries = {
        {"1. gaussian reduction to the rw bound on the fig2 grid", 0.1, criterion1},
        {"2. below the centralized bound across rho1 grids", 1.0, criterion2},
        {"3. strict-improvement witness at (0.75, 0.7, 0.5)", 10.0, criterion3},
        {"4. two-form consistency on a 200x200x20 grid", 10.0, criterion4},
        {"5. inner maximization matches the grid oracle", 60.0, criterion5},
        {"6. averaged swap cost capped by the coupling divergence", 120.0, criterion6},
        {"7. sandwich ordering on admissible random scenarios", 600.0, criterion7},
        {"8. augmentation endpoints (constant J, J = X)", 120.0, criterion8},
        {"9. byte-identical fig2 preset reruns", 1.0, criterion9},
        {"10. figure scope: rw/new/centralized curves only", 10.0, criterion10},
    };

    int failures = 0;
    for (const auto& e : entries) {
        double t0 = now_seconds();
        Criterion c;
        try {
            c = e.fn();
        } catch (const std::exception& ex) {
            c.pass = false;
            c.detail = std::string("exception: ") + ex.what();
        }
        double dt = now_seconds() - t0;
        bool in_time = dt < e.budget_s;
        bool ok = c.pass && in_time;
        std::printf("%s  criterion %s  (%d checks, %.2fs / budget %.1fs)%s%s\n",
                    ok ? "PASS" : "FAIL", e.name, c.checks, dt, e.budget_s,
                    c.pass ? "" : (" -- " + c.detail).c_str(),
                    in_time ? "" : " -- over time budget");
        if (!ok) ++failures;
    }
    if (failures == 0)
        std::printf("acceptance: all %zu criteria passed\n", entries.size());
    else
        std::printf("acceptance: %d criteria FAILED\n", failures);
    return failures;
}
