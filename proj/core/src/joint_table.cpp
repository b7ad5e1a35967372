#include "dht/joint_table.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dht/errors.hpp"

namespace dht {

JointTable::JointTable(std::vector<Axis> axes, std::vector<double> probs)
    : axes_(std::move(axes)), p_(std::move(probs)) {
    if (axes_.empty()) throw InputError("JointTable: no axes");
    std::set<std::string> names;
    size_t total = 1;
    for (const auto& ax : axes_) {
        if (ax.size <= 0 || ax.size > kAxisCap)
            throw InputError("JointTable: axis '" + ax.name + "' size " +
                             std::to_string(ax.size) + " outside [1," +
                             std::to_string(kAxisCap) + "]");
        if (!names.insert(ax.name).second)
            throw InputError("JointTable: duplicate axis '" + ax.name + "'");
        total *= static_cast<size_t>(ax.size);
    }
    if (p_.size() != total)
        throw InputError("JointTable: expected " + std::to_string(total) + " entries, got " +
                         std::to_string(p_.size()));
    double sum = 0.0;
    for (size_t i = 0; i < p_.size(); ++i) {
        if (!(p_[i] >= 0.0) || !std::isfinite(p_[i]))
            throw InputError("JointTable: entry " + std::to_string(i) +
                             " is not a finite non-negative real");
        sum += p_[i];
    }
    if (std::abs(sum - 1.0) > kSumTol)
        throw InputError("JointTable: total mass " + std::to_string(sum) +
                         ", drift exceeds 1e-12");
    strides_.assign(axes_.size(), 1);
    for (int i = static_cast<int>(axes_.size()) - 2; i >= 0; --i)
        strides_[static_cast<size_t>(i)] =
            strides_[static_cast<size_t>(i) + 1] * axes_[static_cast<size_t>(i) + 1].size;
}

int JointTable::axis_index(const std::string& name) const {
    for (size_t i = 0; i < axes_.size(); ++i)
        if (axes_[i].name == name) return static_cast<int>(i);
    throw InputError("JointTable: no axis named '" + name + "'");
}

bool JointTable::has_axis(const std::string& name) const {
    for (const auto& ax : axes_)
        if (ax.name == name) return true;
    return false;
}

int JointTable::axis_size(const std::string& name) const {
    return axes_[static_cast<size_t>(axis_index(name))].size;
}

double JointTable::at(const std::vector<int>& idx) const {
    if (idx.size() != axes_.size()) throw InputError("JointTable::at: index arity mismatch");
    size_t flat = 0;
    for (size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= axes_[i].size)
            throw InputError("JointTable::at: index out of range on axis '" + axes_[i].name + "'");
        flat += static_cast<size_t>(idx[i]) * strides_[i];
    }
    return p_[flat];
}

void JointTable::decode(int flat, std::vector<int>& idx) const {
    for (size_t i = 0; i < axes_.size(); ++i) {
        idx[i] = flat / strides_[i];
        flat %= strides_[i];
    }
}

JointTable JointTable::marginal(const std::vector<std::string>& keep) const {
    if (keep.empty()) throw InputError("JointTable::marginal: nothing to keep");
    std::vector<int> keep_idx;
    for (const auto& n : keep) keep_idx.push_back(axis_index(n));
    // result axes in this table's order
    std::vector<int> order(keep_idx);
    std::sort(order.begin(), order.end());
    if (std::adjacent_find(order.begin(), order.end()) != order.end())
        throw InputError("JointTable::marginal: repeated axis");
    std::vector<Axis> out_axes;
    for (int i : order) out_axes.push_back(axes_[static_cast<size_t>(i)]);
    std::vector<int> out_strides(out_axes.size(), 1);
    for (int i = static_cast<int>(out_axes.size()) - 2; i >= 0; --i)
        out_strides[static_cast<size_t>(i)] =
            out_strides[static_cast<size_t>(i) + 1] * out_axes[static_cast<size_t>(i) + 1].size;
    size_t out_total = 1;
    for (const auto& ax : out_axes) out_total *= static_cast<size_t>(ax.size);
    std::vector<double> out(out_total, 0.0);
    std::vector<int> idx(axes_.size());
    for (int f = 0; f < total_size(); ++f) {
        decode(f, idx);
        size_t o = 0;
        for (size_t k = 0; k < order.size(); ++k)
            o += static_cast<size_t>(idx[static_cast<size_t>(order[k])]) * out_strides[k];
        out[o] += p_[static_cast<size_t>(f)];
    }
    return JointTable(std::move(out_axes), std::move(out));
}

JointTable JointTable::extend(const Kernel& k, const std::vector<std::string>& given,
                              const std::string& new_axis) const {
    if (has_axis(new_axis)) throw InputError("JointTable::extend: axis '" + new_axis +
                                             "' already present");
    std::vector<int> gidx;
    int rows = 1;
    for (const auto& n : given) {
        gidx.push_back(axis_index(n));
        rows *= axes_[static_cast<size_t>(axis_index(n))].size;
    }
    if (k.rows() != rows)
        throw InputError("JointTable::extend: kernel rows " + std::to_string(k.rows()) +
                         " != product of given axes " + std::to_string(rows));
    std::vector<Axis> out_axes = axes_;
    out_axes.push_back({new_axis, k.cols()});
    std::vector<double> out(p_.size() * static_cast<size_t>(k.cols()), 0.0);
    std::vector<int> idx(axes_.size());
    for (int f = 0; f < total_size(); ++f) {
        decode(f, idx);
        int row = 0;
        for (size_t g = 0; g < gidx.size(); ++g)
            row = row * axes_[static_cast<size_t>(gidx[g])].size + idx[static_cast<size_t>(gidx[g])];
        for (int c = 0; c < k.cols(); ++c)
            out[static_cast<size_t>(f) * k.cols() + c] = p_[static_cast<size_t>(f)] * k(row, c);
    }
    return JointTable(std::move(out_axes), std::move(out));
}

Kernel JointTable::condition(const std::vector<std::string>& given,
                             std::vector<int>* zero_rows) const {
    if (given.empty() || given.size() >= axes_.size())
        throw InputError("JointTable::condition: need a proper non-empty axis subset");
    std::vector<int> gidx;
    int rows = 1;
    for (const auto& n : given) {
        gidx.push_back(axis_index(n));
        rows *= axes_[static_cast<size_t>(axis_index(n))].size;
    }
    std::vector<int> rest;
    int cols = 1;
    for (size_t i = 0; i < axes_.size(); ++i) {
        if (std::find(gidx.begin(), gidx.end(), static_cast<int>(i)) == gidx.end()) {
            rest.push_back(static_cast<int>(i));
            cols *= axes_[i].size;
        }
    }
    std::vector<double> m(static_cast<size_t>(rows) * cols, 0.0);
    std::vector<double> mass(static_cast<size_t>(rows), 0.0);
    std::vector<int> idx(axes_.size());
    for (int f = 0; f < total_size(); ++f) {
        decode(f, idx);
        int row = 0;
        for (size_t g = 0; g < gidx.size(); ++g)
            row = row * axes_[static_cast<size_t>(gidx[g])].size + idx[static_cast<size_t>(gidx[g])];
        int col = 0;
        for (size_t r = 0; r < rest.size(); ++r)
            col = col * axes_[static_cast<size_t>(rest[r])].size + idx[static_cast<size_t>(rest[r])];
        m[static_cast<size_t>(row) * cols + col] += p_[static_cast<size_t>(f)];
        mass[static_cast<size_t>(row)] += p_[static_cast<size_t>(f)];
    }
    for (int r = 0; r < rows; ++r) {
        if (mass[static_cast<size_t>(r)] <= 0.0) {
            // zero-mass conditioning event: uniform placeholder row
            for (int c = 0; c < cols; ++c) m[static_cast<size_t>(r) * cols + c] = 1.0 / cols;
            if (zero_rows) zero_rows->push_back(r);
        } else {
            double inv = 1.0 / mass[static_cast<size_t>(r)];
            double sum = 0.0;
            for (int c = 0; c < cols; ++c) sum += (m[static_cast<size_t>(r) * cols + c] *= inv);
            // renormalize the fp residue so Kernel validation holds exactly
            if (sum > 0.0 && std::abs(sum - 1.0) > 1e-15) {
                double inv2 = 1.0 / sum;
                for (int c = 0; c < cols; ++c) m[static_cast<size_t>(r) * cols + c] *= inv2;
            }
        }
    }
    return Kernel(rows, cols, std::move(m));
}

JointTable JointTable::permute(const std::vector<std::string>& order) const {
    if (order.size() != axes_.size()) throw InputError("JointTable::permute: arity mismatch");
    std::vector<int> perm;
    for (const auto& n : order) perm.push_back(axis_index(n));
    std::vector<int> sorted(perm);
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != static_cast<int>(i))
            throw InputError("JointTable::permute: not a permutation");
    std::vector<Axis> out_axes;
    for (int p : perm) out_axes.push_back(axes_[static_cast<size_t>(p)]);
    std::vector<int> out_strides(out_axes.size(), 1);
    for (int i = static_cast<int>(out_axes.size()) - 2; i >= 0; --i)
        out_strides[static_cast<size_t>(i)] =
            out_strides[static_cast<size_t>(i) + 1] * out_axes[static_cast<size_t>(i) + 1].size;
    std::vector<double> out(p_.size(), 0.0);
    std::vector<int> idx(axes_.size());
    for (int f = 0; f < total_size(); ++f) {
        decode(f, idx);
        size_t o = 0;
        for (size_t k = 0; k < perm.size(); ++k)
            o += static_cast<size_t>(idx[static_cast<size_t>(perm[k])]) * out_strides[k];
        out[o] = p_[static_cast<size_t>(f)];
    }
    return JointTable(std::move(out_axes), std::move(out));
}

SimplexVector JointTable::flatten() const { return SimplexVector(p_); }

bool JointTable::same_shape(const JointTable& o) const {
    if (axes_.size() != o.axes_.size()) return false;
    for (size_t i = 0; i < axes_.size(); ++i)
        if (axes_[i].name != o.axes_[i].name || axes_[i].size != o.axes_[i].size) return false;
    return true;
}

bool JointTable::operator==(const JointTable& o) const { return same_shape(o) && p_ == o.p_; }

} // namespace dht
