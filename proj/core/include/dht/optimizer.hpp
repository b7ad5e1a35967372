#pragma once

#include <vector>

namespace dht {

/// Shared knobs for the inner (f) and outer (auxiliary-variable channel)
/// maximizations. Everything is seeded and deterministic: identical config
/// and inputs give identical results, including under parallel evaluation.
struct OptimizerConfig {
    unsigned seed = 0;

    // Outer maximization over P_{U|X} (logit-parametrized, multi-start
    // projected-gradient ascent with central finite differences).
    int starts = 32;
    int max_iters = 150;
    double fd_step = 1e-6;
    double penalty_init = 10.0;
    double penalty_growth = 10.0;
    int penalty_rounds = 8;
    double constraint_slack = 1e-9;

    // Inner maximization over Qhat_X (grid seeding + projected-gradient
    // ascent with backtracking).
    int f_starts = 8;
    int f_max_iters = 200;
    double eta = 1e-9; // simplex interior clamp

    double oracle_tol = 1e-4;
    double membership_tol = 1e-9;
    int threads = 0; // 0 -> hardware concurrency

    /// Grid step for the inner maximization, adaptive in the support size.
    /// 0 disables the grid (seeds only) beyond desk scale.
    double f_grid_step(int support_size) const {
        if (support_size <= 3) return 1e-2;
        if (support_size <= 6) return 5e-2;
        return 0.0;
    }
};

/// All points of the probability simplex in `dim` coordinates whose entries
/// are multiples of `step` (compositions of round(1/step)). Lexicographic
/// order, so grid indices are stable tie-breakers.
std::vector<std::vector<double>> simplex_grid(int dim, double step);

/// Mix x toward uniform so that every coordinate is >= eta (sum preserved).
void clamp_to_interior(std::vector<double>& x, double eta);

/// Euclidean projection onto {x : sum x = 1, x_i >= floor}.
std::vector<double> project_to_simplex(std::vector<double> x, double floor);

} // namespace dht
