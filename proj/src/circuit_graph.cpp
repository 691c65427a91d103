#include <netcomp/circuit_graph.hpp>
#include <netcomp/errors.hpp>

#include <algorithm>
#include <string>

namespace netcomp
{

std::string_view to_string( net_kind k )
{
  switch ( k )
  {
  case net_kind::ground:
    return "ground";
  case net_kind::internal:
    return "internal";
  case net_kind::input:
    return "input";
  case net_kind::output:
    return "output";
  case net_kind::supply:
    return "supply";
  }
  return "?";
}

std::string_view to_string( device_role r )
{
  switch ( r )
  {
  case device_role::nmos:
    return "nmos";
  case device_role::pmos:
    return "pmos";
  case device_role::other:
    return "other";
  }
  return "?";
}

std::string_view to_string( terminal_role r )
{
  switch ( r )
  {
  case terminal_role::drain:
    return "drain";
  case terminal_role::gate:
    return "gate";
  case terminal_role::source:
    return "source";
  case terminal_role::bulk:
    return "bulk";
  case terminal_role::other:
    return "other";
  }
  return "?";
}

int component_kind::terminal_with_role( terminal_role r ) const noexcept
{
  for ( std::size_t j = 0; j < terminal_roles.size(); ++j )
  {
    if ( terminal_roles[j] == r )
    {
      return static_cast<int>( j );
    }
  }
  return -1;
}

component_kind make_mosfet( std::string name, std::string model, device_role role,
                            double w_min, double w_max, double l_min, double l_max )
{
  component_kind k;
  k.name = std::move( name );
  k.model = std::move( model );
  k.role = role;
  k.terminal_names = {"d", "g", "s", "b"};
  k.terminal_roles = {terminal_role::drain, terminal_role::gate, terminal_role::source, terminal_role::bulk};
  k.params = {{"w", w_min, w_max, "u"}, {"l", l_min, l_max, "u"}};
  return k;
}

std::uint32_t circuit_graph::add_net( net_kind kind, std::uint32_t index )
{
  auto const id = static_cast<std::uint32_t>( nodes_.size() );
  node_record r;
  r.is_net = true;
  r.kind = kind;
  r.index = index;
  nodes_.push_back( r );
  degree_.push_back( 0u );
  net_nodes_.push_back( id );
  return id;
}

std::uint32_t circuit_graph::add_internal_net()
{
  return add_net( net_kind::internal, internal_count_++ );
}

std::uint32_t circuit_graph::add_component( std::vector<component_kind> const& inventory, std::uint32_t kind,
                                            std::span<double const> params,
                                            std::span<std::uint32_t const> net_nodes )
{
  if ( kind >= inventory.size() )
  {
    throw shape_mismatch( "component kind " + std::to_string( kind ) + " not in inventory" );
  }
  auto const& ck = inventory[kind];
  if ( net_nodes.size() != ck.num_terminals() )
  {
    throw shape_mismatch( "expected " + std::to_string( ck.num_terminals() ) + " terminal assignments for " + ck.name );
  }
  if ( params.size() != ck.num_params() )
  {
    throw shape_mismatch( "expected " + std::to_string( ck.num_params() ) + " parameters for " + ck.name );
  }
  for ( std::size_t p = 0; p < params.size(); ++p )
  {
    auto const& spec = ck.params[p];
    if ( !( params[p] >= spec.min && params[p] <= spec.max ) )
    {
      throw param_out_of_range( ck.name + "." + spec.name + " = " + std::to_string( params[p] ) + " outside [" +
                                std::to_string( spec.min ) + ", " + std::to_string( spec.max ) + "]" );
    }
  }
  for ( auto n : net_nodes )
  {
    if ( n >= nodes_.size() || !nodes_[n].is_net )
    {
      throw assignment_to_non_net( "terminal assignment target " + std::to_string( n ) + " is not a net node" );
    }
  }

  auto const instance_id = static_cast<std::uint32_t>( instances_.size() );
  component_instance inst;
  inst.kind = kind;
  inst.params.assign( params.begin(), params.end() );
  inst.nets.assign( net_nodes.begin(), net_nodes.end() );

  auto const nv = ck.num_terminals();
  for ( std::size_t j = 0; j < nv; ++j )
  {
    node_record r;
    r.is_net = false;
    r.terminal = static_cast<std::uint32_t>( j );
    r.instance = instance_id;
    r.component = kind;
    inst.terminal_nodes.push_back( static_cast<std::uint32_t>( nodes_.size() ) );
    nodes_.push_back( r );
    degree_.push_back( 0u );
  }

  auto connect = [this]( std::uint32_t a, std::uint32_t b ) {
    edges_.emplace_back( a, b );
    ++degree_[a];
    ++degree_[b];
  };
  for ( std::size_t a = 0; a < nv; ++a )
  {
    for ( std::size_t b = a + 1; b < nv; ++b )
    {
      connect( inst.terminal_nodes[a], inst.terminal_nodes[b] );
    }
  }
  for ( std::size_t j = 0; j < nv; ++j )
  {
    connect( inst.terminal_nodes[j], net_nodes[j] );
  }

  instances_.push_back( std::move( inst ) );
  return instance_id;
}

int circuit_graph::net_row( std::uint32_t node ) const noexcept
{
  auto it = std::find( net_nodes_.begin(), net_nodes_.end(), node );
  return it == net_nodes_.end() ? -1 : static_cast<int>( it - net_nodes_.begin() );
}

std::vector<std::vector<std::uint32_t>> circuit_graph::adjacency() const
{
  std::vector<std::vector<std::uint32_t>> adj( nodes_.size() );
  for ( auto const& [a, b] : edges_ )
  {
    adj[a].push_back( b );
    adj[b].push_back( a );
  }
  return adj;
}

bool circuit_graph::operator==( circuit_graph const& other ) const
{
  if ( nodes_.size() != other.nodes_.size() || edges_ != other.edges_ || net_nodes_ != other.net_nodes_ ||
       instances_.size() != other.instances_.size() )
  {
    return false;
  }
  for ( std::size_t i = 0; i < nodes_.size(); ++i )
  {
    auto const& a = nodes_[i];
    auto const& b = other.nodes_[i];
    if ( a.is_net != b.is_net || a.kind != b.kind || a.index != b.index || a.terminal != b.terminal ||
         a.instance != b.instance || a.component != b.component )
    {
      return false;
    }
  }
  for ( std::size_t i = 0; i < instances_.size(); ++i )
  {
    auto const& a = instances_[i];
    auto const& b = other.instances_[i];
    if ( a.kind != b.kind || a.params != b.params || a.nets != b.nets )
    {
      return false;
    }
  }
  return true;
}

circuit_graph new_task_graph( net_declaration const& nets )
{
  circuit_graph g;
  for ( std::size_t i = 0; i < nets.inputs.size(); ++i )
  {
    g.add_net( net_kind::input, static_cast<std::uint32_t>( i ) );
  }
  for ( std::size_t i = 0; i < nets.outputs.size(); ++i )
  {
    g.add_net( net_kind::output, static_cast<std::uint32_t>( i ) );
  }
  for ( std::size_t i = 0; i < nets.supplies.size(); ++i )
  {
    g.add_net( net_kind::supply, static_cast<std::uint32_t>( i ) );
  }
  g.add_net( net_kind::ground, 0u );
  return g;
}

feature_layout make_feature_layout( circuit_domain const& domain )
{
  feature_layout l;
  l.net_index_capacity = domain.nets.num_externals() + domain.max_internal_nets;
  l.num_kinds = domain.inventory.size();
  for ( auto const& k : domain.inventory )
  {
    l.max_terminals = std::max( l.max_terminals, k.num_terminals() );
    l.max_params = std::max( l.max_params, k.num_params() );
  }
  return l;
}

feature_matrix encode( circuit_graph const& g, circuit_domain const& domain )
{
  auto const layout = make_feature_layout( domain );
  feature_matrix fm;
  fm.x = Eigen::MatrixXd::Zero( static_cast<Eigen::Index>( g.num_nodes() ), static_cast<Eigen::Index>( layout.width() ) );

  auto const& nodes = g.nodes();
  for ( std::size_t i = 0; i < nodes.size(); ++i )
  {
    auto const& n = nodes[i];
    auto row = fm.x.row( static_cast<Eigen::Index>( i ) );
    if ( n.is_net )
    {
      row( static_cast<Eigen::Index>( layout.kind_offset() + static_cast<std::size_t>( n.kind ) ) ) = 1.0;
      if ( n.index < layout.net_index_capacity )
      {
        row( static_cast<Eigen::Index>( layout.net_index_offset() + n.index ) ) = 1.0;
      }
      continue;
    }

    row( 0 ) = 1.0;
    row( static_cast<Eigen::Index>( layout.terminal_offset() + n.terminal ) ) = 1.0;
    row( static_cast<Eigen::Index>( layout.component_offset() + n.component ) ) = 1.0;
    auto const& inst = g.instances()[n.instance];
    auto const& kind = domain.inventory[inst.kind];
    for ( std::size_t p = 0; p < inst.params.size(); ++p )
    {
      auto const& spec = kind.params[p];
      row( static_cast<Eigen::Index>( layout.param_offset() + p ) ) = ( inst.params[p] - spec.min ) / ( spec.max - spec.min );
    }
  }

  fm.edge_index.resize( 2, static_cast<Eigen::Index>( g.num_edges() ) );
  for ( std::size_t e = 0; e < g.edges().size(); ++e )
  {
    fm.edge_index( 0, static_cast<Eigen::Index>( e ) ) = g.edges()[e].first;
    fm.edge_index( 1, static_cast<Eigen::Index>( e ) ) = g.edges()[e].second;
  }
  return fm;
}

} // namespace netcomp
