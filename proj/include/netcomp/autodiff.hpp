#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace netcomp::ad
{

class tape;

/*! \brief Handle to a matrix-valued node recorded on a tape. */
struct var
{
  tape* owner{nullptr};
  std::uint32_t id{0};

  Eigen::MatrixXd const& value() const;
  double scalar() const;
};

using adjacency_list = std::vector<std::vector<std::uint32_t>>;

/*! \brief Reverse-mode automatic differentiation over dense matrices.
 *
 * Operations append nodes in evaluation order; `backward` walks them in
 * reverse. Leaves created with `parameter` map onto a slice of a flat
 * parameter vector, and `backward` returns the gradient with respect to
 * that whole vector. A tape created with `record = false` only computes
 * values.
 */
class tape
{
public:
  explicit tape( bool record = true ) : record_( record ) {}

  tape( tape const& ) = delete;
  tape& operator=( tape const& ) = delete;

  bool recording() const noexcept { return record_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  var constant( Eigen::MatrixXd value );
  /*! row-major slice `flat[offset, offset + rows*cols)` */
  var parameter( std::span<double const> flat, std::size_t offset, Eigen::Index rows, Eigen::Index cols );

  var matmul( var a, var b );
  /*! a * b^T */
  var matmul_nt( var a, var b );
  var add( var a, var b );
  /*! adds the 1 x C row `row` to every row of `a` */
  var add_row( var a, var row );
  var scale( var a, double c );
  var relu( var a );
  /*! row i becomes the mean of the rows of its neighbours (zero when isolated) */
  var neighbor_mean( var a, std::shared_ptr<adjacency_list const> adj );
  var mean_rows( var a );
  var concat_cols( var a, var b );
  var gather_rows( var a, std::vector<std::uint32_t> rows );
  var column( var a, Eigen::Index j );
  var row( var a, Eigen::Index i );
  var slice_cols( var a, Eigen::Index start, Eigen::Index count );

  /*! log-softmax of the flattened `a + mask`; masked entries come out as -inf */
  var log_softmax( var a, Eigen::VectorXd const& mask );
  /*! entropy of the categorical with logits `a + mask` (flattened), 1 x 1 */
  var entropy( var a, Eigen::VectorXd const& mask );
  var pick( var a, Eigen::Index flat_index );
  /*! sum of Gaussian log-densities of `x` with log-std clamped to [lo, hi], 1 x 1 */
  var gaussian_log_prob( var mu, var log_std, Eigen::VectorXd const& x, double lo, double hi );
  var sum( std::span<var const> terms );

  /*! \brief Gradient of the 1 x 1 node `loss` with respect to the flat parameter vector. */
  std::vector<double> backward( var loss, std::size_t num_params );

  /*! number of `backward` calls in this process */
  static std::uint64_t backward_calls() noexcept;

  Eigen::MatrixXd const& value( std::uint32_t id ) const { return nodes_[id].value; }

private:
  struct node
  {
    Eigen::MatrixXd value;
    std::function<void( tape& )> back;
    std::int64_t param_offset{-1};
  };

  var push( Eigen::MatrixXd value, std::function<void( tape& )> back );
  Eigen::MatrixXd& grad( std::uint32_t id ) { return grads_[id]; }

  bool record_;
  std::vector<node> nodes_;
  std::vector<Eigen::MatrixXd> grads_;
};

} // namespace netcomp::ad
