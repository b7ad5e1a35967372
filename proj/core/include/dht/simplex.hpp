#pragma once

#include <vector>

namespace dht {

/// Per-axis alphabet cap (desk scale). Flattened composites (joint tables
/// viewed as one vector, kernel input rows over product alphabets) may be
/// larger; the cap applies to named axes and kernel output alphabets.
inline constexpr int kAxisCap = 16;

/// Absolute drift allowed on probability-vector normalization at construction.
inline constexpr double kSumTol = 1e-12;

/// Finite probability vector. Validated at construction: entries >= 0 and
/// summing to 1 within kSumTol; drift beyond that is rejected, never
/// silently renormalized.
class SimplexVector {
  public:
    explicit SimplexVector(std::vector<double> entries);

    static SimplexVector uniform(int n);
    static SimplexVector point_mass(int n, int i);

    int size() const { return static_cast<int>(e_.size()); }
    double operator[](int i) const { return e_[static_cast<size_t>(i)]; }
    const std::vector<double>& entries() const { return e_; }

    bool operator==(const SimplexVector& o) const { return e_ == o.e_; }

  private:
    std::vector<double> e_;
};

} // namespace dht
