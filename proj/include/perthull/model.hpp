// The two perturbed input models: n uniform sphere points (binomial) or a
// Poisson(lambda) number of them, each displaced by uniform noise in a ball
// of radius scale^alpha.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "perthull/cloud.hpp"
#include "perthull/rng.hpp"

namespace perthull {

enum class ModelKind { Binomial, Poisson };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct ModelParams {
    int d = 2;
    double alpha = 0.0;
    double scale = 1.0;  // n for binomial, lambda for Poisson
    ModelKind kind = ModelKind::Poisson;
    uint64_t seed = 0;

    void validate() const;
};

// Exactly n = scale points X_i + e_i; throws DomainError if scale is not a
// positive integer.
PointCloud sample_binomial_cloud(const ModelParams& params, RngStream& rng);

// Poisson(lambda) many points; an empty cloud is a valid outcome.
PointCloud sample_poisson_cloud(const ModelParams& params, RngStream& rng);

PointCloud sample_cloud(const ModelParams& params, RngStream& rng);

// CSV serialization used by the CLI: a name header line, a value line
// (dim,alpha,scale,kind,seed), then one row of d coordinates per point at 17
// significant digits.
void write_cloud_csv(std::ostream& os, const PointCloud& cloud);
PointCloud read_cloud_csv(std::istream& is);

}  // namespace perthull
