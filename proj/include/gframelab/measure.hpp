#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "gframelab/linops.hpp"

// Discretized positive measure space (Omega, mu) and the mu-weighted
// coefficient space l2({H_w}_w). Nodes are opaque ordinals 0..size()-1;
// builders record nothing beyond weights and block dimensions.

namespace gframelab {

class MeasureSpace {
public:
    MeasureSpace(std::vector<double> weights, std::vector<Eigen::Index> block_dims)
        : weights_(std::move(weights)), block_dims_(std::move(block_dims)) {
        if (weights_.empty() || weights_.size() != block_dims_.size())
            throw DimensionMismatch("MeasureSpace: weights/block_dims must have equal length >= 1");
        offsets_.reserve(weights_.size());
        Eigen::Index off = 0;
        for (std::size_t w = 0; w < weights_.size(); ++w) {
            if (!(weights_[w] > 0.0) || !std::isfinite(weights_[w]))
                throw BadInterval("MeasureSpace: weight at node " + std::to_string(w) +
                                  " must be strictly positive and finite");
            if (block_dims_[w] < 1)
                throw DimensionMismatch("MeasureSpace: block dim at node " +
                                        std::to_string(w) + " must be >= 1");
            offsets_.push_back(off);
            off += block_dims_[w];
        }
        total_dim_ = off;
    }

    std::size_t size() const { return weights_.size(); }
    double weight(std::size_t w) const { return weights_.at(w); }
    Eigen::Index dim(std::size_t w) const { return block_dims_.at(w); }
    /// Row offset of node w in the stacked coefficient vector.
    Eigen::Index offset(std::size_t w) const { return offsets_.at(w); }
    /// Sum of block dimensions (dimension of the stacked space).
    Eigen::Index total_dim() const { return total_dim_; }

    double total_mass() const {
        return std::accumulate(weights_.begin(), weights_.end(), 0.0);
    }

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<Eigen::Index>& block_dims() const { return block_dims_; }

    friend bool operator==(const MeasureSpace& a, const MeasureSpace& b) {
        return a.weights_ == b.weights_ && a.block_dims_ == b.block_dims_;
    }

private:
    std::vector<double> weights_;
    std::vector<Eigen::Index> block_dims_;
    std::vector<Eigen::Index> offsets_;
    Eigen::Index total_dim_ = 0;
};

/// Element of l2({H_w}_w): one complex vector per node, inner product
/// weighted by mu.
struct CoefficientFamily {
    MeasureSpace space;
    std::vector<Vec> blocks;

    CoefficientFamily(MeasureSpace s, std::vector<Vec> b)
        : space(std::move(s)), blocks(std::move(b)) {
        if (blocks.size() != space.size())
            throw DimensionMismatch("CoefficientFamily: one block per node required");
        for (std::size_t w = 0; w < blocks.size(); ++w) {
            if (blocks[w].size() != space.dim(w))
                throw DimensionMismatch("CoefficientFamily: block at node " +
                                        std::to_string(w) + " has wrong length");
            if (!blocks[w].allFinite())
                throw NonFiniteValue("CoefficientFamily: non-finite block at node " +
                                     std::to_string(w));
        }
    }

    static CoefficientFamily zero(const MeasureSpace& s) {
        std::vector<Vec> b;
        b.reserve(s.size());
        for (std::size_t w = 0; w < s.size(); ++w) b.push_back(Vec::Zero(s.dim(w)));
        return CoefficientFamily(s, std::move(b));
    }
};

/// <x, y> = sum_w mu_w <x_w, y_w>, linear in x, conjugate-linear in y.
inline Complex weighted_inner_product(const CoefficientFamily& x,
                                      const CoefficientFamily& y) {
    if (!(x.space == y.space))
        throw SpaceMismatch("weighted_inner_product: different measure spaces");
    Complex acc(0.0, 0.0);
    for (std::size_t w = 0; w < x.space.size(); ++w)
        acc += x.space.weight(w) * y.blocks[w].dot(x.blocks[w]);
    return acc;
}

inline double weighted_norm_squared(const CoefficientFamily& x) {
    double acc = 0.0;
    for (std::size_t w = 0; w < x.space.size(); ++w)
        acc += x.space.weight(w) * x.blocks[w].squaredNorm();
    return acc;
}

/// Point-mass family: v / mu_w at node w and zero elsewhere, so that
/// synthesis-type integrals against it reproduce point evaluation with unit
/// mass ({g_w}_w = integral of g_w delta_w dmu(w) holds exactly).
inline CoefficientFamily delta_embedding(const MeasureSpace& space, std::size_t w,
                                         const Vec& v) {
    if (w >= space.size())
        throw UnknownNode("delta_embedding: node " + std::to_string(w) + " out of range");
    if (v.size() != space.dim(w))
        throw DimensionMismatch("delta_embedding: vector length does not match block dim");
    CoefficientFamily family = CoefficientFamily::zero(space);
    family.blocks[w] = v / space.weight(w);
    return family;
}

/// N midpoint nodes on [a, b], each of weight (b-a)/N, all blocks of dim d.
inline MeasureSpace uniform_interval_space(double a, double b, std::size_t n_nodes,
                                           Eigen::Index block_dim) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw BadInterval("uniform_interval_space: need finite a < b");
    if (n_nodes < 1) throw BadInterval("uniform_interval_space: need N >= 1");
    std::vector<double> weights(n_nodes, (b - a) / static_cast<double>(n_nodes));
    std::vector<Eigen::Index> dims(n_nodes, block_dim);
    return MeasureSpace(std::move(weights), std::move(dims));
}

/// Midpoint of the k-th subinterval used by uniform_interval_space.
inline double interval_midpoint(double a, double b, std::size_t n_nodes, std::size_t k) {
    const double h = (b - a) / static_cast<double>(n_nodes);
    return a + (static_cast<double>(k) + 0.5) * h;
}

}  // namespace gframelab
