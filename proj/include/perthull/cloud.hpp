// Point clouds in R^d with optional model metadata.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perthull/error.hpp"
#include "perthull/vec.hpp"

namespace perthull {

struct ModelDescriptor {
    std::string kind;  // "binomial" or "poisson"
    double alpha = 0.0;
    double scale = 0.0;  // n or lambda
    uint64_t seed = 0;
};

class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(int dim) : dim_(dim) {
        if (dim < 1 || dim > kMaxDim) throw DomainError("PointCloud: dimension out of range");
    }

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(data_.size()) / dim_; }
    bool empty() const { return data_.empty(); }

    void reserve(int n) { data_.reserve(static_cast<size_t>(n) * dim_); }
    void add(const Vec& p) {
        if (p.dim() != dim_) throw DomainError("PointCloud::add: dimension mismatch");
        data_.insert(data_.end(), p.data(), p.data() + dim_);
    }

    std::span<const double> row(int i) const {
        return {data_.data() + static_cast<size_t>(i) * dim_, static_cast<size_t>(dim_)};
    }
    Vec point(int i) const { return Vec::from(row(i)); }

    std::optional<ModelDescriptor> meta;

private:
    int dim_ = 0;
    std::vector<double> data_;
};

}  // namespace perthull
