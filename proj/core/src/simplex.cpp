#include "dht/simplex.hpp"

#include <cmath>
#include <string>

#include "dht/errors.hpp"

namespace dht {

namespace {
constexpr int kMaxFlat = 1 << 16; // flattened composites stay dense

void validate(const std::vector<double>& e) {
    if (e.empty()) throw InputError("SimplexVector: empty");
    if (static_cast<int>(e.size()) > kMaxFlat)
        throw InputError("SimplexVector: length " + std::to_string(e.size()) + " exceeds cap");
    double sum = 0.0;
    for (size_t i = 0; i < e.size(); ++i) {
        if (!(e[i] >= 0.0) || !std::isfinite(e[i]))
            throw InputError("SimplexVector: entry " + std::to_string(i) + " is " +
                             std::to_string(e[i]) + ", must be a finite non-negative real");
        sum += e[i];
    }
    if (std::abs(sum - 1.0) > kSumTol)
        throw InputError("SimplexVector: entries sum to " + std::to_string(sum) +
                         ", drift exceeds 1e-12");
}
} // namespace

SimplexVector::SimplexVector(std::vector<double> entries) : e_(std::move(entries)) {
    validate(e_);
}

SimplexVector SimplexVector::uniform(int n) {
    if (n <= 0) throw InputError("SimplexVector::uniform: n must be positive");
    return SimplexVector(std::vector<double>(static_cast<size_t>(n), 1.0 / n));
}

SimplexVector SimplexVector::point_mass(int n, int i) {
    if (n <= 0 || i < 0 || i >= n) throw InputError("SimplexVector::point_mass: bad index");
    std::vector<double> e(static_cast<size_t>(n), 0.0);
    e[static_cast<size_t>(i)] = 1.0;
    return SimplexVector(std::move(e));
}

} // namespace dht
