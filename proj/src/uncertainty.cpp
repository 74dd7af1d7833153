#include "aerosurvey/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aerosurvey {

namespace {
constexpr double kProbClamp = 1e-12;
}

UncertaintyField power_uncertainty(const Eigen::VectorXd& posterior_var, const ChannelParams& params) {
    const double prior = params.prior_var();
    if (!(prior > 0.0)) throw std::invalid_argument("power_uncertainty: zero prior variance");
    UncertaintyField field{std::vector<double>(static_cast<std::size_t>(posterior_var.size())), MapKind::power};
    for (Eigen::Index j = 0; j < posterior_var.size(); ++j)
        field.values[static_cast<std::size_t>(j)] = std::clamp(posterior_var[j] / prior, 0.0, 1.0);
    return field;
}

UncertaintyField power_uncertainty(const PosteriorState& state, const ChannelParams& params) {
    return power_uncertainty(state.cov.diagonal(), params);
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binary_entropy: p outside [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    const double q = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

UncertaintyField service_uncertainty(std::span<const double> p) {
    UncertaintyField field{std::vector<double>(p.size()), MapKind::service};
    std::transform(p.begin(), p.end(), field.values.begin(), binary_entropy);
    return field;
}

UncertaintyField aggregate(std::span<const UncertaintyField> fields, Aggregation mode) {
    if (fields.empty()) throw std::invalid_argument("aggregate: no fields");
    UncertaintyField out = fields.front();
    for (std::size_t k = 1; k < fields.size(); ++k) {
        if (fields[k].values.size() != out.values.size())
            throw std::invalid_argument("aggregate: fields differ in length");
        for (std::size_t j = 0; j < out.values.size(); ++j) {
            if (mode == Aggregation::max)
                out.values[j] = std::max(out.values[j], fields[k].values[j]);
            else
                out.values[j] += fields[k].values[j];
        }
    }
    if (mode == Aggregation::mean && fields.size() > 1) {
        const double n = static_cast<double>(fields.size());
        for (auto& v : out.values) v /= n;
    }
    return out;
}

double total_uncertainty(const UncertaintyField& field) {
    if (field.values.empty()) throw std::invalid_argument("total_uncertainty: empty field");
    return std::accumulate(field.values.begin(), field.values.end(), 0.0) / static_cast<double>(field.values.size());
}

}  // namespace aerosurvey
