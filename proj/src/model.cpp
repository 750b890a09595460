#include "perthull/model.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "perthull/geometry.hpp"

namespace perthull {

std::string to_string(ModelKind kind) {
    return kind == ModelKind::Binomial ? "binomial" : "poisson";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "binomial") return ModelKind::Binomial;
    if (s == "poisson") return ModelKind::Poisson;
    throw DomainError("unknown model kind: " + s);
}

void ModelParams::validate() const {
    if (d < 2 || d > kMaxDim) throw DomainError("ModelParams: dimension must be in [2, 8]");
    if (!(scale >= 1.0)) throw DomainError("ModelParams: scale must be >= 1");
    if (!std::isfinite(alpha)) throw DomainError("ModelParams: alpha must be finite");
}

namespace {

PointCloud sample_points(const ModelParams& params, long long count, RngStream& rng) {
    const double radius = std::pow(params.scale, params.alpha);
    PointCloud cloud(params.d);
    cloud.reserve(static_cast<int>(count));
    for (long long i = 0; i < count; ++i) {
        Vec x = sample_uniform_sphere(params.d, rng);
        x += sample_uniform_ball(params.d, radius, rng);
        cloud.add(x);
    }
    cloud.meta = ModelDescriptor{to_string(params.kind), params.alpha, params.scale,
                                 params.seed};
    return cloud;
}

}  // namespace

PointCloud sample_binomial_cloud(const ModelParams& params, RngStream& rng) {
    params.validate();
    if (params.kind != ModelKind::Binomial)
        throw DomainError("sample_binomial_cloud: params.kind is not binomial");
    const double r = std::round(params.scale);
    if (std::fabs(params.scale - r) > 1e-9)
        throw DomainError("sample_binomial_cloud: n must be an integer");
    return sample_points(params, static_cast<long long>(r), rng);
}

PointCloud sample_poisson_cloud(const ModelParams& params, RngStream& rng) {
    params.validate();
    if (params.kind != ModelKind::Poisson)
        throw DomainError("sample_poisson_cloud: params.kind is not poisson");
    return sample_points(params, rng.next_poisson(params.scale), rng);
}

PointCloud sample_cloud(const ModelParams& params, RngStream& rng) {
    return params.kind == ModelKind::Binomial ? sample_binomial_cloud(params, rng)
                                              : sample_poisson_cloud(params, rng);
}

void write_cloud_csv(std::ostream& os, const PointCloud& cloud) {
    const ModelDescriptor meta = cloud.meta.value_or(ModelDescriptor{});
    os << "dim,alpha,scale,kind,seed\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%s,%llu\n", cloud.dim(), meta.alpha,
                  meta.scale, meta.kind.c_str(),
                  static_cast<unsigned long long>(meta.seed));
    os << buf;
    for (int i = 0; i < cloud.size(); ++i) {
        const auto row = cloud.row(i);
        for (int j = 0; j < cloud.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", row[j]);
            os << (j ? "," : "") << buf;
        }
        os << '\n';
    }
}

PointCloud read_cloud_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("dim,", 0) != 0)
        throw DomainError("read_cloud_csv: missing header");
    if (!std::getline(is, line)) throw DomainError("read_cloud_csv: missing metadata row");
    std::stringstream meta_ss(line);
    std::string field;
    ModelDescriptor meta;
    int dim = 0;
    std::getline(meta_ss, field, ',');
    dim = std::stoi(field);
    std::getline(meta_ss, field, ',');
    meta.alpha = std::stod(field);
    std::getline(meta_ss, field, ',');
    meta.scale = std::stod(field);
    std::getline(meta_ss, meta.kind, ',');
    std::getline(meta_ss, field, ',');
    meta.seed = std::stoull(field);

    PointCloud cloud(dim);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row_ss(line);
        Vec p(dim);
        for (int j = 0; j < dim; ++j) {
            if (!std::getline(row_ss, field, ','))
                throw DomainError("read_cloud_csv: short coordinate row");
            p[j] = std::stod(field);
        }
        cloud.add(p);
    }
    cloud.meta = meta;
    return cloud;
}

}  // namespace perthull
