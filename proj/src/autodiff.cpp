#include <netcomp/autodiff.hpp>
#include <netcomp/errors.hpp>

#include <atomic>
#include <cmath>
#include <limits>

namespace netcomp::ad
{

namespace
{
std::atomic<std::uint64_t> g_backward_calls{0};

Eigen::Map<Eigen::VectorXd const> flat( Eigen::MatrixXd const& m )
{
  return {m.data(), m.size()};
}

Eigen::Map<Eigen::VectorXd> flat( Eigen::MatrixXd& m )
{
  return {m.data(), m.size()};
}

void require( bool ok, char const* what )
{
  if ( !ok )
  {
    throw shape_mismatch( what );
  }
}
} // namespace

Eigen::MatrixXd const& var::value() const
{
  return owner->value( id );
}

double var::scalar() const
{
  return value()( 0, 0 );
}

var tape::push( Eigen::MatrixXd value, std::function<void( tape& )> back )
{
  node n;
  n.value = std::move( value );
  if ( record_ )
  {
    n.back = std::move( back );
  }
  nodes_.push_back( std::move( n ) );
  return {this, static_cast<std::uint32_t>( nodes_.size() - 1u )};
}

var tape::constant( Eigen::MatrixXd value )
{
  return push( std::move( value ), {} );
}

var tape::parameter( std::span<double const> flat_params, std::size_t offset, Eigen::Index rows, Eigen::Index cols )
{
  require( offset + static_cast<std::size_t>( rows * cols ) <= flat_params.size(), "parameter slice out of range" );
  Eigen::MatrixXd m( rows, cols );
  for ( Eigen::Index r = 0; r < rows; ++r )
  {
    for ( Eigen::Index c = 0; c < cols; ++c )
    {
      m( r, c ) = flat_params[offset + static_cast<std::size_t>( r * cols + c )];
    }
  }
  auto v = push( std::move( m ), {} );
  nodes_.back().param_offset = static_cast<std::int64_t>( offset );
  return v;
}

var tape::matmul( var a, var b )
{
  require( value( a.id ).cols() == value( b.id ).rows(), "matmul: inner dimensions differ" );
  Eigen::MatrixXd out = value( a.id ) * value( b.id );
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, b]( tape& t ) {
    auto const& g = t.grad( self );
    t.grad( a.id ).noalias() += g * t.value( b.id ).transpose();
    t.grad( b.id ).noalias() += t.value( a.id ).transpose() * g;
  } );
}

var tape::matmul_nt( var a, var b )
{
  require( value( a.id ).cols() == value( b.id ).cols(), "matmul_nt: inner dimensions differ" );
  Eigen::MatrixXd out = value( a.id ) * value( b.id ).transpose();
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, b]( tape& t ) {
    auto const& g = t.grad( self );
    t.grad( a.id ).noalias() += g * t.value( b.id );
    t.grad( b.id ).noalias() += g.transpose() * t.value( a.id );
  } );
}

var tape::add( var a, var b )
{
  require( value( a.id ).rows() == value( b.id ).rows() && value( a.id ).cols() == value( b.id ).cols(),
           "add: shapes differ" );
  Eigen::MatrixXd out = value( a.id ) + value( b.id );
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, b]( tape& t ) {
    t.grad( a.id ) += t.grad( self );
    t.grad( b.id ) += t.grad( self );
  } );
}

var tape::add_row( var a, var row_v )
{
  require( value( row_v.id ).rows() == 1 && value( row_v.id ).cols() == value( a.id ).cols(), "add_row: shapes differ" );
  Eigen::MatrixXd out = value( a.id ).rowwise() + value( row_v.id ).row( 0 );
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, row_v]( tape& t ) {
    t.grad( a.id ) += t.grad( self );
    t.grad( row_v.id ) += t.grad( self ).colwise().sum();
  } );
}

var tape::scale( var a, double c )
{
  Eigen::MatrixXd out = value( a.id ) * c;
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, c]( tape& t ) { t.grad( a.id ) += c * t.grad( self ); } );
}

var tape::relu( var a )
{
  Eigen::MatrixXd out = value( a.id ).cwiseMax( 0.0 );
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a]( tape& t ) {
    t.grad( a.id ).array() += ( t.value( a.id ).array() > 0.0 ).select( t.grad( self ).array(), 0.0 );
  } );
}

var tape::neighbor_mean( var a, std::shared_ptr<adjacency_list const> adj )
{
  auto const& in = value( a.id );
  require( static_cast<Eigen::Index>( adj->size() ) == in.rows(), "neighbor_mean: adjacency size differs" );
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero( in.rows(), in.cols() );
  for ( std::size_t i = 0; i < adj->size(); ++i )
  {
    auto const& nb = ( *adj )[i];
    if ( nb.empty() )
    {
      continue;
    }
    auto row_i = out.row( static_cast<Eigen::Index>( i ) );
    for ( auto j : nb )
    {
      row_i += in.row( j );
    }
    row_i /= static_cast<double>( nb.size() );
  }
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, adj]( tape& t ) {
    auto const& g = t.grad( self );
    auto& ga = t.grad( a.id );
    for ( std::size_t i = 0; i < adj->size(); ++i )
    {
      auto const& nb = ( *adj )[i];
      if ( nb.empty() )
      {
        continue;
      }
      Eigen::RowVectorXd const share = g.row( static_cast<Eigen::Index>( i ) ) / static_cast<double>( nb.size() );
      for ( auto j : nb )
      {
        ga.row( j ) += share;
      }
    }
  } );
}

var tape::mean_rows( var a )
{
  auto const n = value( a.id ).rows();
  require( n > 0, "mean_rows: empty matrix" );
  Eigen::MatrixXd out = value( a.id ).colwise().mean();
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, n]( tape& t ) {
    Eigen::RowVectorXd const share = t.grad( self ).row( 0 ) / static_cast<double>( n );
    t.grad( a.id ).rowwise() += share;
  } );
}

var tape::concat_cols( var a, var b )
{
  auto const& va = value( a.id );
  auto const& vb = value( b.id );
  require( va.rows() == vb.rows(), "concat_cols: row counts differ" );
  Eigen::MatrixXd out( va.rows(), va.cols() + vb.cols() );
  out << va, vb;
  auto const ca = va.cols();
  auto const cb = vb.cols();
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, b, ca, cb]( tape& t ) {
    auto const& g = t.grad( self );
    t.grad( a.id ) += g.leftCols( ca );
    t.grad( b.id ) += g.rightCols( cb );
  } );
}

var tape::gather_rows( var a, std::vector<std::uint32_t> rows )
{
  auto const& in = value( a.id );
  Eigen::MatrixXd out( static_cast<Eigen::Index>( rows.size() ), in.cols() );
  for ( std::size_t r = 0; r < rows.size(); ++r )
  {
    require( rows[r] < in.rows(), "gather_rows: row out of range" );
    out.row( static_cast<Eigen::Index>( r ) ) = in.row( rows[r] );
  }
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, rows = std::move( rows )]( tape& t ) {
    auto const& g = t.grad( self );
    auto& ga = t.grad( a.id );
    for ( std::size_t r = 0; r < rows.size(); ++r )
    {
      ga.row( rows[r] ) += g.row( static_cast<Eigen::Index>( r ) );
    }
  } );
}

var tape::column( var a, Eigen::Index j )
{
  require( j >= 0 && j < value( a.id ).cols(), "column: index out of range" );
  Eigen::MatrixXd out = value( a.id ).col( j );
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, j]( tape& t ) { t.grad( a.id ).col( j ) += t.grad( self ).col( 0 ); } );
}

var tape::row( var a, Eigen::Index i )
{
  require( i >= 0 && i < value( a.id ).rows(), "row: index out of range" );
  Eigen::MatrixXd out = value( a.id ).row( i );
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, i]( tape& t ) { t.grad( a.id ).row( i ) += t.grad( self ).row( 0 ); } );
}

var tape::slice_cols( var a, Eigen::Index start, Eigen::Index count )
{
  require( start >= 0 && start + count <= value( a.id ).cols(), "slice_cols: range out of bounds" );
  Eigen::MatrixXd out = value( a.id ).middleCols( start, count );
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, start, count]( tape& t ) {
    t.grad( a.id ).middleCols( start, count ) += t.grad( self );
  } );
}

namespace
{
/* log-probabilities of the masked categorical; -inf where masked */
Eigen::VectorXd masked_log_softmax( Eigen::Ref<Eigen::VectorXd const> z, Eigen::VectorXd const& mask )
{
  auto const n = z.size();
  Eigen::VectorXd y( n );
  double m = -std::numeric_limits<double>::infinity();
  for ( Eigen::Index i = 0; i < n; ++i )
  {
    y( i ) = z( i ) + mask( i );
    m = std::max( m, y( i ) );
  }
  if ( !std::isfinite( m ) )
  {
    throw masked_action_realized( "categorical with every choice masked" );
  }
  double s = 0.0;
  for ( Eigen::Index i = 0; i < n; ++i )
  {
    if ( std::isfinite( y( i ) ) )
    {
      s += std::exp( y( i ) - m );
    }
  }
  double const lse = m + std::log( s );
  for ( Eigen::Index i = 0; i < n; ++i )
  {
    y( i ) = std::isfinite( y( i ) ) ? y( i ) - lse : -std::numeric_limits<double>::infinity();
  }
  return y;
}
} // namespace

var tape::log_softmax( var a, Eigen::VectorXd const& mask )
{
  auto const& in = value( a.id );
  require( mask.size() == in.size(), "log_softmax: mask size differs" );
  Eigen::VectorXd y = masked_log_softmax( flat( in ), mask );
  Eigen::MatrixXd out = Eigen::Map<Eigen::MatrixXd>( y.data(), in.rows(), in.cols() );
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a]( tape& t ) {
    auto const& yv = t.value( self );
    auto g = flat( t.grad( self ) );
    auto ga = flat( t.grad( a.id ) );
    auto y = flat( yv );
    double gsum = 0.0;
    for ( Eigen::Index i = 0; i < y.size(); ++i )
    {
      if ( std::isfinite( y( i ) ) )
      {
        gsum += g( i );
      }
    }
    for ( Eigen::Index i = 0; i < y.size(); ++i )
    {
      if ( std::isfinite( y( i ) ) )
      {
        ga( i ) += g( i ) - std::exp( y( i ) ) * gsum;
      }
    }
  } );
}

var tape::entropy( var a, Eigen::VectorXd const& mask )
{
  auto const& in = value( a.id );
  require( mask.size() == in.size(), "entropy: mask size differs" );
  Eigen::VectorXd logp = masked_log_softmax( flat( in ), mask );
  double h = 0.0;
  for ( Eigen::Index i = 0; i < logp.size(); ++i )
  {
    if ( std::isfinite( logp( i ) ) )
    {
      h -= std::exp( logp( i ) ) * logp( i );
    }
  }
  Eigen::MatrixXd out( 1, 1 );
  out( 0, 0 ) = h;
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, logp = std::move( logp ), h]( tape& t ) {
    double const g = t.grad( self )( 0, 0 );
    auto ga = flat( t.grad( a.id ) );
    for ( Eigen::Index i = 0; i < logp.size(); ++i )
    {
      if ( std::isfinite( logp( i ) ) )
      {
        ga( i ) -= g * std::exp( logp( i ) ) * ( logp( i ) + h );
      }
    }
  } );
}

var tape::pick( var a, Eigen::Index flat_index )
{
  auto const& in = value( a.id );
  require( flat_index >= 0 && flat_index < in.size(), "pick: index out of range" );
  Eigen::MatrixXd out( 1, 1 );
  out( 0, 0 ) = in.data()[flat_index];
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, a, flat_index]( tape& t ) {
    t.grad( a.id ).data()[flat_index] += t.grad( self )( 0, 0 );
  } );
}

var tape::gaussian_log_prob( var mu, var log_std, Eigen::VectorXd const& x, double lo, double hi )
{
  auto const m = flat( value( mu.id ) );
  auto const ls = flat( value( log_std.id ) );
  require( m.size() == x.size() && ls.size() == x.size(), "gaussian_log_prob: sizes differ" );
  constexpr double half_log_2pi = 0.91893853320467274178;
  double lp = 0.0;
  for ( Eigen::Index i = 0; i < x.size(); ++i )
  {
    double const s = std::clamp( ls( i ), lo, hi );
    double const z = ( x( i ) - m( i ) ) * std::exp( -s );
    lp += -0.5 * z * z - s - half_log_2pi;
  }
  Eigen::MatrixXd out( 1, 1 );
  out( 0, 0 ) = lp;
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, mu, log_std, x, lo, hi]( tape& t ) {
    double const g = t.grad( self )( 0, 0 );
    auto const m = flat( t.value( mu.id ) );
    auto const ls = flat( t.value( log_std.id ) );
    auto gm = flat( t.grad( mu.id ) );
    auto gs = flat( t.grad( log_std.id ) );
    for ( Eigen::Index i = 0; i < x.size(); ++i )
    {
      double const s = std::clamp( ls( i ), lo, hi );
      double const inv_var = std::exp( -2.0 * s );
      double const d = x( i ) - m( i );
      gm( i ) += g * d * inv_var;
      if ( ls( i ) > lo && ls( i ) < hi )
      {
        gs( i ) += g * ( d * d * inv_var - 1.0 );
      }
    }
  } );
}

var tape::sum( std::span<var const> terms )
{
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero( 1, 1 );
  std::vector<std::uint32_t> ids;
  ids.reserve( terms.size() );
  for ( auto const& v : terms )
  {
    require( value( v.id ).size() == 1, "sum: expects 1 x 1 terms" );
    out( 0, 0 ) += value( v.id )( 0, 0 );
    ids.push_back( v.id );
  }
  auto const self = static_cast<std::uint32_t>( nodes_.size() );
  return push( std::move( out ), [self, ids = std::move( ids )]( tape& t ) {
    double const g = t.grad( self )( 0, 0 );
    for ( auto id : ids )
    {
      t.grad( id )( 0, 0 ) += g;
    }
  } );
}

std::vector<double> tape::backward( var loss, std::size_t num_params )
{
  ++g_backward_calls;
  require( record_, "backward on a non-recording tape" );
  require( value( loss.id ).size() == 1, "backward: loss must be 1 x 1" );

  grads_.resize( nodes_.size() );
  for ( std::size_t i = 0; i <= loss.id; ++i )
  {
    grads_[i] = Eigen::MatrixXd::Zero( nodes_[i].value.rows(), nodes_[i].value.cols() );
  }
  grads_[loss.id]( 0, 0 ) = 1.0;

  std::vector<double> out( num_params, 0.0 );
  for ( std::size_t k = loss.id + 1u; k-- > 0; )
  {
    auto const& n = nodes_[k];
    if ( n.back )
    {
      n.back( *this );
    }
    if ( n.param_offset >= 0 )
    {
      auto const& g = grads_[k];
      auto const cols = g.cols();
      for ( Eigen::Index r = 0; r < g.rows(); ++r )
      {
        for ( Eigen::Index c = 0; c < cols; ++c )
        {
          out[static_cast<std::size_t>( n.param_offset ) + static_cast<std::size_t>( r * cols + c )] += g( r, c );
        }
      }
    }
  }
  grads_.clear();
  return out;
}

std::uint64_t tape::backward_calls() noexcept
{
  return g_backward_calls.load();
}

} // namespace netcomp::ad
