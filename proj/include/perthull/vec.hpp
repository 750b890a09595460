// Small fixed-capacity vector for points in dimension 1..8.
#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>

namespace perthull {

inline constexpr int kMaxDim = 8;

class Vec {
public:
    Vec() = default;
    explicit Vec(int dim) : dim_(dim) { assert(dim >= 0 && dim <= kMaxDim); }
    Vec(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
        assert(dim_ <= kMaxDim);
        int i = 0;
        for (double x : xs) c_[i++] = x;
    }
    static Vec zero(int dim) { return Vec(dim); }
    static Vec from(std::span<const double> xs) {
        Vec v(static_cast<int>(xs.size()));
        for (int i = 0; i < v.dim_; ++i) v.c_[i] = xs[i];
        return v;
    }

    int dim() const { return dim_; }
    double operator[](int i) const { return c_[i]; }
    double& operator[](int i) { return c_[i]; }
    const double* data() const { return c_.data(); }
    double* data() { return c_.data(); }
    std::span<const double> span() const { return {c_.data(), static_cast<size_t>(dim_)}; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < dim_; ++i) c_[i] *= s;
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator*(Vec a, double s) { return a *= s; }

    friend double dot(const Vec& a, const Vec& b) {
        double s = 0;
        for (int i = 0; i < a.dim_; ++i) s += a.c_[i] * b.c_[i];
        return s;
    }
    double norm2() const { return dot(*this, *this); }
    double norm() const { return std::sqrt(norm2()); }

    bool all_finite() const {
        for (int i = 0; i < dim_; ++i)
            if (!std::isfinite(c_[i])) return false;
        return true;
    }

    // First n coordinates as a lower-dimensional vector.
    Vec head(int n) const {
        Vec v(n);
        for (int i = 0; i < n; ++i) v.c_[i] = c_[i];
        return v;
    }

private:
    std::array<double, kMaxDim> c_{};
    int dim_ = 0;
};

}  // namespace perthull
