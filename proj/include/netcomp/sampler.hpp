#pragma once

#include <netcomp/circuit_graph.hpp>
#include <netcomp/policy.hpp>
#include <netcomp/rules_checks.hpp>
#include <netcomp/sampler_config.hpp>
#include <netcomp/task.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace netcomp
{

using rng_t = std::mt19937_64;

/*! \brief Independent stream for episode `k` of training step `step`. */
rng_t episode_rng( std::uint64_t seed, std::uint64_t step, std::uint64_t k );

enum class termination : std::uint8_t
{
  stop_action,
  step_limit,
  regeneration_exhausted
};

std::string_view to_string( termination t );

struct episode_step
{
  action act;
  step_masks masks;
  /*! check pass flags fed to the policy at this step */
  std::vector<double> check_features;
  double log_prob{0.0};
  double entropy{0.0};
};

struct episode
{
  std::vector<episode_step> steps;
  circuit_graph graph;
  termination cause{termination::step_limit};
  /*! attempts made, 1 unless after-generation checks forced regeneration */
  std::uint32_t trials{1};

  double log_prob() const noexcept;
  double entropy() const noexcept;
};

/*! \brief Additive mask over (add_net, add_component, stop).
 *
 * `during` holds the results of the during-generation checks; all three
 * entries may end up masked, in which case the episode ends.
 */
Eigen::VectorXd action_mask( circuit_graph const& g, sampler_config const& cfg, std::uint32_t net_capacity,
                             check_report const& during );

/*! \brief Applies a realized action to `g`. */
void apply_action( circuit_graph& g, circuit_domain const& domain, action const& a );

/*! \brief Samples one episode from the policy; deterministic given the rng state. */
episode sample_episode( policy_params const& p, task_spec const& task, rng_t& rng );

/*! \brief Same loop with uniform choices after masking and uniform parameter draws. */
episode random_episode( task_spec const& task, rng_t& rng );

/*! \brief Re-runs the policy on the recorded trace and returns the taped per-step factors.
 *
 * Forward passes use `t`; the returned log-probabilities and entropies
 * are differentiable with respect to `p`.
 */
std::vector<log_prob_entropy> replay( ad::tape& t, policy_params const& p, task_spec const& task, episode const& e );

} // namespace netcomp
