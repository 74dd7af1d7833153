#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "aerosurvey/channel.hpp"
#include "aerosurvey/estimator.hpp"

namespace aerosurvey {

enum class MapKind { power, service };
enum class Aggregation { max, mean };

/// Per-grid-point uncertainty in [0, 1].
struct UncertaintyField {
    std::vector<double> values;
    MapKind kind = MapKind::power;
};

/// Posterior variance normalized by the prior variance.
UncertaintyField power_uncertainty(const Eigen::VectorXd& posterior_var, const ChannelParams& params);
UncertaintyField power_uncertainty(const PosteriorState& state, const ChannelParams& params);

/// Binary entropy (bits) of the service indicator.
UncertaintyField service_uncertainty(std::span<const double> p);

double binary_entropy(double p);

UncertaintyField aggregate(std::span<const UncertaintyField> fields, Aggregation mode);

double total_uncertainty(const UncertaintyField& field);

}  // namespace aerosurvey
