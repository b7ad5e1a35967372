#include <benchmark/benchmark.h>

#include <random>

#include "dht/bounds.hpp"
#include "dht/gaussian.hpp"
#include "dht/info.hpp"
#include "dht/inner_objective.hpp"
#include "dht/sweep.hpp"

namespace {

using namespace dht;

SimplexVector random_simplex(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> ud(1e-9, 1.0);
    std::vector<double> v(static_cast<size_t>(n));
    double s = 0.0;
    for (double& x : v) s += (x = -std::log(ud(rng)));
    for (double& x : v) x = 0.98 * (x / s) + 0.02 / n;
    double s2 = 0.0;
    for (double x : v) s2 += x;
    for (double& x : v) x /= s2;
    return SimplexVector(std::move(v));
}

Kernel random_kernel(std::mt19937_64& rng, int rows, int cols) {
    std::vector<double> m;
    for (int r = 0; r < rows; ++r) {
        auto row = random_simplex(rng, cols);
        m.insert(m.end(), row.entries().begin(), row.entries().end());
    }
    return Kernel(rows, cols, std::move(m));
}

void BM_kl_divergence(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const int n = static_cast<int>(state.range(0));
    SimplexVector p = random_simplex(rng, n);
    SimplexVector q = random_simplex(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(kl_divergence(p, q).value());
}
BENCHMARK(BM_kl_divergence)->Arg(4)->Arg(16)->Arg(256);

void BM_conditional_mi(benchmark::State& state) {
    std::mt19937_64 rng(2);
    JointTable j({{"A", 4}, {"B", 4}, {"C", 4}}, random_simplex(rng, 64).entries());
    for (auto _ : state) benchmark::DoNotOptimize(conditional_mi(j, "A", "B", {"C"}));
}
BENCHMARK(BM_conditional_mi);

void BM_f_max(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const int nx = static_cast<int>(state.range(0));
    ChannelQuad quad(random_kernel(rng, nx, nx), random_kernel(rng, nx, nx),
                     random_kernel(rng, nx, nx), random_kernel(rng, nx, nx));
    SimplexVector p_x = random_simplex(rng, nx);
    SimplexVector q_x = random_simplex(rng, nx);
    OptimizerConfig cfg;
    cfg.threads = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(f_max(p_x, quad, q_x, cfg).value.value());
}
BENCHMARK(BM_f_max)->Arg(2)->Arg(3)->Arg(4);

void BM_rw_bound(benchmark::State& state) {
    std::mt19937_64 rng(4);
    SimplexVector q_x = random_simplex(rng, 2);
    Kernel W = random_kernel(rng, 2, 2);
    Kernel V = random_kernel(rng, 2, 2);
    std::vector<double> qy(4, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 2; ++z)
            for (int y = 0; y < 2; ++y) qy[static_cast<size_t>(x) * 2 + y] += W(x, z) * V(z, y);
    Kernel p_y_given_x = random_kernel(rng, 2, 2);
    std::vector<double> p_xy(4), q_xy(4), paux(8), qaux(8);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            p_xy[static_cast<size_t>(x) * 2 + y] = q_x[x] * p_y_given_x(x, y);
            q_xy[static_cast<size_t>(x) * 2 + y] = q_x[x] * qy[static_cast<size_t>(x) * 2 + y];
            double den = qy[static_cast<size_t>(x) * 2 + y];
            for (int z = 0; z < 2; ++z) {
                paux[(static_cast<size_t>(x) * 2 + y) * 2 + z] = W(x, z);
                qaux[(static_cast<size_t>(x) * 2 + y) * 2 + z] = W(x, z) * V(z, y) / den;
            }
        }
    DiscreteScenario scn(JointTable({{"X", 2}, {"Y", 2}}, p_xy),
                         JointTable({{"X", 2}, {"Y", 2}}, q_xy), 0.25);
    AuxiliaryReceiver aux{Kernel(4, 2, paux), Kernel(4, 2, qaux)};
    OptimizerConfig cfg;
    cfg.starts = static_cast<int>(state.range(0));
    cfg.threads = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(rw_bound(scn, aux, cfg).value.value());
}
BENCHMARK(BM_rw_bound)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_g_bound(benchmark::State& state) {
    std::mt19937_64 rng(5);
    SimplexVector u = SimplexVector::uniform(2);
    DiscreteScenario scn(compose_joint(u, Kernel::binary_symmetric(0.1), "X", "Y"),
                         compose_joint(u, Kernel::binary_symmetric(0.2), "X", "Y"), 0.2);
    Kernel z_chan = Kernel::binary_symmetric(0.3);
    OptimizerConfig cfg;
    cfg.starts = static_cast<int>(state.range(0));
    cfg.threads = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(g_bound(scn, z_chan, z_chan, cfg).value.value());
}
BENCHMARK(BM_g_bound)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_new_gaussian(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(new_gaussian({0.82, 0.63, 0.4}).value);
}
BENCHMARK(BM_new_gaussian);

void BM_fig2_sweep(benchmark::State& state) {
    RunConfig cfg = preset_fig2();
    cfg.opt.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run_gaussian_sweep(cfg).size());
}
BENCHMARK(BM_fig2_sweep)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
