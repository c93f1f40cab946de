#pragma once

namespace canopy::map {

enum class Measurement { Hit, Miss };

/// ln(p / (1 - p)). Throws std::domain_error unless 0 < p < 1.
double prob_to_logodds(double p);

/// Inverse of prob_to_logodds.
double logodds_to_prob(double l);

/// Bayesian posterior P(n | z_1:k) from the prior P(n | z_1:k-1), the
/// measurement probability and the map prior, computed in probability space.
double bayes_update_probability(double prior, double measurement, double map_prior = 0.5);

}  // namespace canopy::map
