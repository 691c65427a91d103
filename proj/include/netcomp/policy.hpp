#pragma once

#include <netcomp/autodiff.hpp>
#include <netcomp/circuit_graph.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace netcomp
{

inline constexpr double log_std_min = -4.0;
inline constexpr double log_std_max = 1.0;

/*! \brief Shape inputs of the policy network. */
struct policy_dims
{
  std::size_t feature_width{0};
  std::size_t hidden{64};
  std::size_t depth{8};
  std::vector<std::size_t> kind_params;
  std::vector<std::size_t> kind_terminals;
  std::size_t check_features{0};
  double log_std_bias{-1.0};
  /*! initial mean of the parameter Gaussians, in normalized [0, 1] coordinates */
  double mean_bias{0.5};
  /*! scale of the initial head weights relative to the trunk; 0 starts from uniform categoricals */
  double head_init_scale{0.0};

  std::size_t num_kinds() const noexcept { return kind_params.size(); }
  std::size_t head_input() const noexcept { return hidden + check_features; }

  bool operator==( policy_dims const& ) const = default;
};

policy_dims make_policy_dims( circuit_domain const& domain, std::size_t check_features, std::size_t hidden = 64,
                              std::size_t depth = 8 );

struct param_block
{
  std::string name;
  std::size_t offset{0};
  std::size_t rows{0};
  std::size_t cols{0};

  std::size_t size() const noexcept { return rows * cols; }
};

/*! \brief Layout table of the flat parameter vector; a pure function of `policy_dims`. */
class param_layout
{
public:
  param_layout() = default;
  explicit param_layout( policy_dims const& dims );

  std::vector<param_block> const& blocks() const noexcept { return blocks_; }
  std::size_t total() const noexcept { return total_; }
  param_block const& at( std::string const& name ) const;

private:
  void add( std::string name, std::size_t rows, std::size_t cols );

  std::vector<param_block> blocks_;
  std::size_t total_{0};
};

struct policy_params
{
  policy_dims dims;
  param_layout layout;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

/*! \brief Seeded initialization: weights from U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero
 * except the Gaussian heads (mean `dims.mean_bias`, log-std `dims.log_std_bias`).
 *
 * Head weight bounds are multiplied by `dims.head_init_scale`. */
policy_params init_params( std::uint64_t seed, policy_dims const& dims );

/*! \brief Head outputs for one graph; per-kind entries follow the inventory order. */
struct policy_outputs
{
  ad::var action_logits;                 /* 1 x 3 */
  ad::var component_logits;              /* 1 x n_c */
  std::vector<ad::var> mean;             /* per kind, 1 x n_p */
  std::vector<ad::var> log_std;          /* per kind, 1 x n_p */
  std::vector<ad::var> terminal_logits;  /* per kind, n_st x n_v */
  ad::var node_embeddings;               /* n_nt x hidden */
  ad::var pooled;                        /* 1 x (hidden + checks) */
};

/*! \brief Runs the message-passing network and all heads on one graph.
 *
 * Net rows are the rows whose node-type flag is 0, in node order.
 * Throws `shape_mismatch` on a feature width or check-vector length
 * that does not match `p.dims`.
 */
policy_outputs forward( ad::tape& t, policy_params const& p, feature_matrix const& x,
                        std::span<double const> check_features = {} );

enum class action_type : std::uint8_t
{
  add_net = 0,
  add_component = 1,
  stop = 2
};

std::string_view to_string( action_type a );

/*! \brief One structured action of an episode. */
struct action
{
  action_type type{action_type::stop};
  std::uint32_t kind{0};
  /*! Gaussian draws in normalized coordinates, before clipping */
  std::vector<double> raw_params;
  /*! physical parameter values after clipping to the declared range */
  std::vector<double> values;
  /*! chosen net row per terminal */
  std::vector<std::uint32_t> net_rows;
};

/*! \brief Additive masks applied when the action was sampled. */
struct step_masks
{
  Eigen::VectorXd action{Eigen::VectorXd::Zero( 3 )};
  Eigen::VectorXd component;
  /*! n_st x n_v for the realized kind; empty unless a component was added */
  Eigen::MatrixXd terminal;
};

struct log_prob_entropy
{
  ad::var log_prob;
  ad::var entropy;
};

/*! \brief Joint log-probability of the realized action and summed entropy of its categorical factors.
 *
 * Throws `masked_action_realized` if any realized choice is masked.
 */
log_prob_entropy log_prob_and_entropy( ad::tape& t, policy_outputs const& out, step_masks const& masks,
                                       action const& a );

} // namespace netcomp
