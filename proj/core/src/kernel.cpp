#include "dht/kernel.hpp"

#include <cmath>
#include <string>

#include "dht/errors.hpp"

namespace dht {

Kernel::Kernel(int rows, int cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), m_(std::move(row_major)) {
    if (rows <= 0 || cols <= 0) throw InputError("Kernel: non-positive shape");
    if (m_.size() != static_cast<size_t>(rows) * cols)
        throw InputError("Kernel: data size does not match " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    for (int r = 0; r < rows; ++r) {
        double sum = 0.0;
        for (int c = 0; c < cols; ++c) {
            double v = (*this)(r, c);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw InputError("Kernel: row " + std::to_string(r) + " col " + std::to_string(c) +
                                 " is not a finite non-negative real");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kSumTol)
            throw InputError("Kernel: row " + std::to_string(r) + " sums to " +
                             std::to_string(sum) + ", drift exceeds 1e-12");
    }
}

Kernel Kernel::identity(int n) {
    std::vector<double> m(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) m[static_cast<size_t>(i) * n + i] = 1.0;
    return Kernel(n, n, std::move(m));
}

Kernel Kernel::constant_row(const SimplexVector& row, int rows) {
    std::vector<double> m;
    m.reserve(static_cast<size_t>(rows) * row.size());
    for (int r = 0; r < rows; ++r)
        m.insert(m.end(), row.entries().begin(), row.entries().end());
    return Kernel(rows, row.size(), std::move(m));
}

Kernel Kernel::binary_symmetric(double crossover) {
    if (!(crossover >= 0.0 && crossover <= 1.0))
        throw InputError("Kernel::binary_symmetric: crossover outside [0,1]");
    return Kernel(2, 2, {1.0 - crossover, crossover, crossover, 1.0 - crossover});
}

SimplexVector Kernel::row(int r) const {
    if (r < 0 || r >= rows_) throw InputError("Kernel::row: index out of range");
    std::vector<double> e(m_.begin() + static_cast<size_t>(r) * cols_,
                          m_.begin() + static_cast<size_t>(r + 1) * cols_);
    return SimplexVector(std::move(e));
}

} // namespace dht
