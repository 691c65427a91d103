#include <netcomp/errors.hpp>
#include <netcomp/policy.hpp>

#include <cmath>
#include <random>

namespace netcomp
{

policy_dims make_policy_dims( circuit_domain const& domain, std::size_t check_features, std::size_t hidden,
                              std::size_t depth )
{
  policy_dims d;
  d.feature_width = make_feature_layout( domain ).width();
  d.hidden = hidden;
  d.depth = depth;
  d.check_features = check_features;
  for ( auto const& k : domain.inventory )
  {
    d.kind_params.push_back( k.num_params() );
    d.kind_terminals.push_back( k.num_terminals() );
  }
  return d;
}

param_layout::param_layout( policy_dims const& dims )
{
  auto const h = dims.hidden;
  auto const p = dims.head_input();
  add( "in.w", dims.feature_width, h );
  add( "in.b", 1, h );
  for ( std::size_t l = 0; l < dims.depth; ++l )
  {
    /* rows [0, h) act on the node itself, rows [h, 2h) on the neighbour mean */
    add( "layer" + std::to_string( l ) + ".w", 2 * h, h );
    add( "layer" + std::to_string( l ) + ".b", 1, h );
  }
  add( "action.w", p, 3 );
  add( "action.b", 1, 3 );
  add( "component.w", p, dims.num_kinds() );
  add( "component.b", 1, dims.num_kinds() );
  for ( std::size_t c = 0; c < dims.num_kinds(); ++c )
  {
    auto const np = dims.kind_params[c];
    auto const id = std::to_string( c );
    add( "mean" + id + ".w", p, np );
    add( "mean" + id + ".b", 1, np );
    add( "logstd" + id + ".w", p, np );
    add( "logstd" + id + ".b", 1, np );
    add( "terminal" + id, dims.kind_terminals[c], h );
  }
}

void param_layout::add( std::string name, std::size_t rows, std::size_t cols )
{
  blocks_.push_back( {std::move( name ), total_, rows, cols} );
  total_ += rows * cols;
}

param_block const& param_layout::at( std::string const& name ) const
{
  for ( auto const& b : blocks_ )
  {
    if ( b.name == name )
    {
      return b;
    }
  }
  throw shape_mismatch( "no parameter block named " + name );
}

policy_params init_params( std::uint64_t seed, policy_dims const& dims )
{
  policy_params p;
  p.dims = dims;
  p.layout = param_layout( dims );
  p.values.assign( p.layout.total(), 0.0 );

  std::mt19937_64 rng( seed );
  for ( auto const& b : p.layout.blocks() )
  {
    auto const is_bias = b.name.ends_with( ".b" );
    if ( is_bias )
    {
      double fill = 0.0;
      if ( b.name.starts_with( "logstd" ) )
      {
        fill = dims.log_std_bias;
      }
      else if ( b.name.starts_with( "mean" ) )
      {
        fill = dims.mean_bias;
      }
      std::fill_n( p.values.begin() + static_cast<std::ptrdiff_t>( b.offset ), b.size(), fill );
      continue;
    }
    /* terminal embeddings are used as (n_v x hidden) against hidden-wide net embeddings */
    auto const fan_in = b.name.starts_with( "terminal" ) ? b.cols : b.rows;
    auto const is_head = !b.name.starts_with( "in." ) && !b.name.starts_with( "layer" );
    double const bound =
        ( fan_in > 0 ? 1.0 / std::sqrt( static_cast<double>( fan_in ) ) : 0.0 ) * ( is_head ? dims.head_init_scale : 1.0 );
    std::uniform_real_distribution<double> u( -bound, bound );
    for ( std::size_t i = 0; i < b.size(); ++i )
    {
      p.values[b.offset + i] = u( rng );
    }
  }
  return p;
}

namespace
{

ad::var leaf( ad::tape& t, policy_params const& p, std::string const& name )
{
  auto const& b = p.layout.at( name );
  return t.parameter( p.values, b.offset, static_cast<Eigen::Index>( b.rows ), static_cast<Eigen::Index>( b.cols ) );
}

ad::var linear( ad::tape& t, policy_params const& p, ad::var in, std::string const& prefix )
{
  return t.add_row( t.matmul( in, leaf( t, p, prefix + ".w" ) ), leaf( t, p, prefix + ".b" ) );
}

} // namespace

policy_outputs forward( ad::tape& t, policy_params const& p, feature_matrix const& x,
                        std::span<double const> check_features )
{
  auto const& dims = p.dims;
  if ( x.x.rows() == 0 )
  {
    throw shape_mismatch( "forward: empty feature matrix" );
  }
  if ( static_cast<std::size_t>( x.x.cols() ) != dims.feature_width )
  {
    throw shape_mismatch( "forward: feature width " + std::to_string( x.x.cols() ) + " differs from " +
                          std::to_string( dims.feature_width ) );
  }
  if ( check_features.size() != dims.check_features )
  {
    throw shape_mismatch( "forward: expected " + std::to_string( dims.check_features ) + " check features" );
  }

  auto const n = static_cast<std::size_t>( x.x.rows() );
  auto adj = std::make_shared<ad::adjacency_list>( n );
  std::vector<std::uint32_t> net_rows;
  for ( Eigen::Index e = 0; e < x.edge_index.cols(); ++e )
  {
    auto const a = x.edge_index( 0, e );
    auto const b = x.edge_index( 1, e );
    ( *adj )[a].push_back( b );
    ( *adj )[b].push_back( a );
  }
  for ( std::size_t i = 0; i < n; ++i )
  {
    if ( x.x( static_cast<Eigen::Index>( i ), 0 ) == 0.0 )
    {
      net_rows.push_back( static_cast<std::uint32_t>( i ) );
    }
  }

  policy_outputs out;
  auto h = linear( t, p, t.constant( x.x ), "in" );
  for ( std::size_t l = 0; l < dims.depth; ++l )
  {
    auto const z = t.relu( h );
    auto const msg = t.concat_cols( z, t.neighbor_mean( z, adj ) );
    h = t.add( h, linear( t, p, msg, "layer" + std::to_string( l ) ) );
  }
  out.node_embeddings = h;

  auto pooled = t.mean_rows( h );
  if ( !check_features.empty() )
  {
    Eigen::MatrixXd cf( 1, static_cast<Eigen::Index>( check_features.size() ) );
    for ( std::size_t i = 0; i < check_features.size(); ++i )
    {
      cf( 0, static_cast<Eigen::Index>( i ) ) = check_features[i];
    }
    pooled = t.concat_cols( pooled, t.constant( std::move( cf ) ) );
  }
  out.pooled = pooled;

  out.action_logits = linear( t, p, pooled, "action" );
  out.component_logits = linear( t, p, pooled, "component" );

  auto const nets = t.gather_rows( h, std::move( net_rows ) );
  for ( std::size_t c = 0; c < dims.num_kinds(); ++c )
  {
    auto const id = std::to_string( c );
    out.mean.push_back( linear( t, p, pooled, "mean" + id ) );
    out.log_std.push_back( linear( t, p, pooled, "logstd" + id ) );
    out.terminal_logits.push_back( t.matmul_nt( nets, leaf( t, p, "terminal" + id ) ) );
  }
  return out;
}

std::string_view to_string( action_type a )
{
  switch ( a )
  {
  case action_type::add_net:
    return "add_net";
  case action_type::add_component:
    return "add_component";
  case action_type::stop:
    return "stop";
  }
  return "?";
}

log_prob_entropy log_prob_and_entropy( ad::tape& t, policy_outputs const& out, step_masks const& masks,
                                       action const& a )
{
  auto const type = static_cast<Eigen::Index>( a.type );
  if ( !std::isfinite( masks.action( type ) ) )
  {
    throw masked_action_realized( std::string( "action '" ) + std::string( to_string( a.type ) ) + "' is masked" );
  }

  std::vector<ad::var> lp;
  std::vector<ad::var> ent;
  lp.push_back( t.pick( t.log_softmax( out.action_logits, masks.action ), type ) );
  ent.push_back( t.entropy( out.action_logits, masks.action ) );

  if ( a.type == action_type::add_component )
  {
    auto const kind = static_cast<Eigen::Index>( a.kind );
    if ( a.kind >= out.terminal_logits.size() )
    {
      throw shape_mismatch( "realized component kind out of range" );
    }
    Eigen::VectorXd const cmask =
        masks.component.size() == 0 ? Eigen::VectorXd::Zero( out.component_logits.value().size() ) : masks.component;
    if ( !std::isfinite( cmask( kind ) ) )
    {
      throw masked_action_realized( "component kind " + std::to_string( a.kind ) + " is masked" );
    }
    lp.push_back( t.pick( t.log_softmax( out.component_logits, cmask ), kind ) );
    ent.push_back( t.entropy( out.component_logits, cmask ) );

    if ( !a.raw_params.empty() )
    {
      Eigen::VectorXd const x = Eigen::Map<Eigen::VectorXd const>( a.raw_params.data(),
                                                                   static_cast<Eigen::Index>( a.raw_params.size() ) );
      lp.push_back( t.gaussian_log_prob( out.mean[a.kind], out.log_std[a.kind], x, log_std_min, log_std_max ) );
    }

    auto const& tl = out.terminal_logits[a.kind];
    auto const rows = tl.value().rows();
    auto const cols = tl.value().cols();
    if ( masks.terminal.rows() != rows || masks.terminal.cols() != cols ||
         a.net_rows.size() != static_cast<std::size_t>( cols ) )
    {
      throw shape_mismatch( "terminal mask or assignment does not match the terminal logits" );
    }
    for ( Eigen::Index j = 0; j < cols; ++j )
    {
      auto const r = static_cast<Eigen::Index>( a.net_rows[static_cast<std::size_t>( j )] );
      if ( r >= rows || !std::isfinite( masks.terminal( r, j ) ) )
      {
        throw masked_action_realized( "terminal " + std::to_string( j ) + " assigned to a masked net" );
      }
      Eigen::VectorXd const m = masks.terminal.col( j );
      auto const col = t.column( tl, j );
      lp.push_back( t.pick( t.log_softmax( col, m ), r ) );
      ent.push_back( t.entropy( col, m ) );
    }
  }
  return {t.sum( lp ), t.sum( ent )};
}

} // namespace netcomp
