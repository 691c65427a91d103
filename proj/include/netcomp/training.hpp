#pragma once

#include <netcomp/evaluator.hpp>
#include <netcomp/policy.hpp>
#include <netcomp/sampler.hpp>
#include <netcomp/task.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace netcomp
{

/*! \brief (r_k - mean of the others) / (population std of the others + eps), clipped to [-clip, clip]. */
std::vector<double> loo_advantages( std::span<double const> rewards, double eps, double clip = 10.0 );

/*! \brief Linear warmup (step+1)/warmup * peak, then peak, peak/10 from 50% and peak/100 from 75% of the steps. */
double lr_at( std::uint32_t step, train_config const& cfg );

/*! \brief Adam moments over the flat parameter vector; `step` descends along `grad`. */
class adam
{
public:
  adam( std::size_t n, train_config const& cfg );
  void step( std::vector<double>& params, std::span<double const> grad, double lr );
  std::uint64_t count() const noexcept { return t_; }

private:
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t t_{0};
  double beta1_;
  double beta2_;
  double eps_;
};

struct loss_and_grad
{
  double loss{0.0};
  std::vector<double> grad;
};

/*! \brief Policy-gradient loss -(1/K) sum_k [A_k sum_t log pi + s * lambda * sum_t H] and its gradient.
 *
 * s = 1 with the entropy bonus, s = -1 when the entropy is added to the loss.
 */
loss_and_grad rloo_loss( policy_params const& p, task_spec const& task, std::span<episode const> episodes,
                         std::span<double const> advantages, train_config const& cfg );

/*! \brief One RLOO update; throws `non_finite_loss` and leaves `p` untouched on a non-finite loss or gradient. */
void rloo_step( policy_params& p, adam& opt, task_spec const& task, std::span<episode const> episodes,
                std::span<double const> rewards, train_config const& cfg, std::uint32_t step );

/*! \brief K perturbations from N(0, sigma^2 I); the second half negates the first. */
std::vector<std::vector<double>> mirrored_perturbations( std::size_t k, std::size_t dim, double sigma, rng_t& rng );

/*! \brief (1 / (K sigma^2)) sum_k A_k eps_k, an ascent direction on the reward. */
std::vector<double> es_gradient( std::span<std::vector<double> const> eps, std::span<double const> advantages,
                                 double sigma );

/*! \brief One ES update from rewards of the perturbed parameter vectors. */
void es_step( policy_params& p, adam& opt, std::span<std::vector<double> const> eps, std::span<double const> rewards,
              train_config const& cfg, std::uint32_t step );

/*! \brief Calls `fn(i)` for every i in [0, n) on up to `workers` threads. */
void parallel_for( std::size_t n, std::size_t workers, std::function<void( std::size_t )> const& fn );

struct run_record
{
  std::string task;
  learner_kind learner{learner_kind::es};
  std::uint64_t seed{0};
  std::map<std::string, std::string> overrides;
  std::uint32_t batch{0};
  std::uint32_t step_budget{0};

  /*! one reward vector per completed training step */
  std::vector<std::vector<double>> rewards;
  /*! best reward so far after each step */
  std::vector<double> best_trajectory;
  double best_reward{-std::numeric_limits<double>::infinity()};
  std::string best_netlist;
  /*! 1-based index of the first sample reaching reward 1 */
  std::optional<std::uint64_t> samples_to_success;
  std::uint64_t total_samples{0};
  /*! steps aborted by a non-finite loss */
  std::uint32_t skipped_updates{0};
  double wall_clock_s{0.0};

  std::uint64_t sample_budget() const noexcept { return std::uint64_t{batch} * step_budget; }
  bool success() const noexcept { return samples_to_success.has_value(); }
  double mean_reward() const;
};

struct training_hooks
{
  std::function<void( run_record const& )> on_step;
  /*! receives the parameters after the last update */
  policy_params* final_params{nullptr};
};

policy_dims training_dims( task_spec const& task );

/*! \brief Runs the configured learner on `task.train`, evaluating every sampled circuit.
 *
 * Stops early after the first step that produced a reward-1 circuit.
 */
run_record run_training( task_spec const& task, evaluator const& eval, std::uint64_t seed,
                         training_hooks const& hooks = {} );

} // namespace netcomp
