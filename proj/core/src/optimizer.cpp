#include "dht/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dht/errors.hpp"

namespace dht {

namespace {
void emit_compositions(int remaining, int pos, int dim, int n, std::vector<int>& cur,
                       std::vector<std::vector<double>>& out) {
    if (pos == dim - 1) {
        cur[static_cast<size_t>(pos)] = remaining;
        std::vector<double> x(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i) x[static_cast<size_t>(i)] = static_cast<double>(cur[static_cast<size_t>(i)]) / n;
        out.push_back(std::move(x));
        return;
    }
    for (int k = remaining; k >= 0; --k) {
        cur[static_cast<size_t>(pos)] = k;
        emit_compositions(remaining - k, pos + 1, dim, n, cur, out);
    }
}
} // namespace

std::vector<std::vector<double>> simplex_grid(int dim, double step) {
    if (dim <= 0) throw InputError("simplex_grid: non-positive dimension");
    if (!(step > 0.0 && step <= 1.0)) throw InputError("simplex_grid: step outside (0,1]");
    int n = static_cast<int>(std::lround(1.0 / step));
    std::vector<std::vector<double>> out;
    if (dim == 1) {
        out.push_back({1.0});
        return out;
    }
    std::vector<int> cur(static_cast<size_t>(dim), 0);
    emit_compositions(n, 0, dim, n, cur, out);
    return out;
}

void clamp_to_interior(std::vector<double>& x, double eta) {
    const int n = static_cast<int>(x.size());
    if (n == 0) return;
    double lo = *std::min_element(x.begin(), x.end());
    if (lo >= eta) return;
    // mix toward uniform: (1 - t) x + t/n with t chosen so the minimum hits eta
    double t = (eta - lo) / (1.0 / n - lo);
    t = std::clamp(t, 0.0, 1.0);
    for (double& v : x) v = (1.0 - t) * v + t / n;
}

std::vector<double> project_to_simplex(std::vector<double> x, double floor) {
    const int n = static_cast<int>(x.size());
    if (n == 0) throw InputError("project_to_simplex: empty vector");
    if (floor * n > 1.0) throw InputError("project_to_simplex: floor too large for dimension");
    // project y = x - floor onto the simplex of mass 1 - n*floor, then add back
    double mass = 1.0 - floor * n;
    std::vector<double> y(x);
    for (double& v : y) v -= floor;
    std::vector<double> u(y);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    int rho = 0;
    for (int i = 0; i < n; ++i) {
        css += u[static_cast<size_t>(i)];
        double t = (css - mass) / (i + 1);
        if (u[static_cast<size_t>(i)] - t > 0.0) {
            rho = i + 1;
            tau = t;
        }
    }
    (void)rho;
    std::vector<double> out(static_cast<size_t>(n));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        out[static_cast<size_t>(i)] = std::max(y[static_cast<size_t>(i)] - tau, 0.0) + floor;
        sum += out[static_cast<size_t>(i)];
    }
    // tidy fp residue so downstream SimplexVector construction succeeds
    if (sum > 0.0 && std::abs(sum - 1.0) > 1e-15) {
        double inv = 1.0 / sum;
        for (double& v : out) v *= inv;
    }
    return out;
}

} // namespace dht
