#pragma once

#include <netcomp/measurement.hpp>

#include <span>

namespace netcomp
{

inline constexpr double default_failure_reward = -1.0;

/*! \brief 1 - ((m - target) / norm)^2, clamped below at -1. */
double subreward( double m, double target, double norm );

/*! \brief 1 when `r_sub >= r_min`, otherwise `r_sub`. */
double saturate( double r_sub, double r_min );

/*! \brief Mean saturated subreward over `specs`, or `failure_reward` on a simulator error.
 *
 * Throws `missing_measurement` when a spec has no matching measurement.
 */
double aggregate_reward( sim_outcome const& outcome, std::span<measurement_spec const> specs,
                         double failure_reward = default_failure_reward );

} // namespace netcomp
