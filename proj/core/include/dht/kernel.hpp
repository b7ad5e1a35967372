#pragma once

#include <vector>

#include "dht/simplex.hpp"

namespace dht {

/// Row-stochastic conditional distribution between finite alphabets.
/// Row r holds the output distribution given input symbol r; rows may range
/// over a product alphabet (row-major flattening), so the row count is not
/// capped at kAxisCap.
class Kernel {
  public:
    Kernel(int rows, int cols, std::vector<double> row_major);

    static Kernel identity(int n);
    /// All rows equal to `row` (output independent of input).
    static Kernel constant_row(const SimplexVector& row, int rows);
    /// Binary symmetric channel with the given crossover probability.
    static Kernel binary_symmetric(double crossover);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double operator()(int r, int c) const { return m_[static_cast<size_t>(r) * cols_ + c]; }
    SimplexVector row(int r) const;
    const std::vector<double>& flat() const { return m_; }

    bool operator==(const Kernel& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && m_ == o.m_;
    }

  private:
    int rows_;
    int cols_;
    std::vector<double> m_;
};

} // namespace dht
