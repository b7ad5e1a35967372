#pragma once

#include <string>
#include <vector>

#include "dht/kernel.hpp"
#include "dht/simplex.hpp"

namespace dht {

struct Axis {
    std::string name;
    int size;
};

/// Dense joint probability table over named finite axes (each capped at
/// kAxisCap symbols). Entries are stored row-major, first axis slowest.
/// Immutable after construction; all operations return new tables.
class JointTable {
  public:
    JointTable(std::vector<Axis> axes, std::vector<double> probs);

    const std::vector<Axis>& axes() const { return axes_; }
    int axis_index(const std::string& name) const; // InputError if absent
    bool has_axis(const std::string& name) const;
    int axis_size(const std::string& name) const;

    int total_size() const { return static_cast<int>(p_.size()); }
    const std::vector<double>& flat() const { return p_; }
    double at(const std::vector<int>& idx) const;

    /// Marginal over `keep` (result axes ordered as in *this).
    JointTable marginal(const std::vector<std::string>& keep) const;

    /// Extend by a new axis drawn from `k` conditioned on `given`:
    /// result(axes..., new) = (*this)(axes...) * k(new | given...).
    /// Kernel rows enumerate `given` combinations row-major in the order passed.
    JointTable extend(const Kernel& k, const std::vector<std::string>& given,
                      const std::string& new_axis) const;

    /// Conditional kernel of the remaining axes given `given`. Rows enumerate
    /// `given` combinations row-major in the order passed; columns enumerate
    /// the remaining axes in this table's order. Zero-mass conditioning rows
    /// become uniform and their indices are appended to *zero_rows when given.
    Kernel condition(const std::vector<std::string>& given,
                     std::vector<int>* zero_rows = nullptr) const;

    /// Reordered copy with axes in the given order (must be a permutation).
    JointTable permute(const std::vector<std::string>& order) const;

    /// The whole table as one probability vector (row-major).
    SimplexVector flatten() const;

    bool same_shape(const JointTable& o) const;
    bool operator==(const JointTable& o) const;

  private:
    std::vector<Axis> axes_;
    std::vector<double> p_;
    std::vector<int> strides_;

    void decode(int flat, std::vector<int>& idx) const;
};

} // namespace dht
