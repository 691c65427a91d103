#include <netcomp/errors.hpp>
#include <netcomp/rules_checks.hpp>

#include <numeric>
#include <queue>
#include <string>

namespace netcomp
{

std::string_view to_string( check_kind c )
{
  switch ( c )
  {
  case check_kind::connected_io:
    return "connected_io";
  case check_kind::io_paths:
    return "io_paths";
  case check_kind::no_floating_nets:
    return "no_floating_nets";
  case check_kind::no_isolated_subgraphs:
    return "no_isolated_subgraphs";
  }
  return "?";
}

std::optional<check_kind> check_kind_from_string( std::string_view s )
{
  for ( auto c : all_checks )
  {
    if ( to_string( c ) == s )
    {
      return c;
    }
  }
  return std::nullopt;
}

std::vector<check_kind> check_set::members() const
{
  std::vector<check_kind> v;
  for ( auto c : all_checks )
  {
    if ( contains( c ) )
    {
      v.push_back( c );
    }
  }
  return v;
}

bool check_report::passed() const noexcept
{
  for ( auto const& [c, ok] : results )
  {
    if ( !ok )
    {
      return false;
    }
  }
  return true;
}

std::vector<double> check_report::as_features() const
{
  std::vector<double> f;
  f.reserve( results.size() );
  for ( auto const& [c, ok] : results )
  {
    f.push_back( ok ? 1.0 : 0.0 );
  }
  return f;
}

namespace
{

bool is_external( node_record const& n )
{
  return n.is_net && n.kind != net_kind::internal;
}

class union_find
{
public:
  explicit union_find( std::size_t n ) : parent_( n )
  {
    std::iota( parent_.begin(), parent_.end(), std::size_t{0} );
  }

  std::size_t find( std::size_t x )
  {
    while ( parent_[x] != x )
    {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite( std::size_t a, std::size_t b ) { parent_[find( a )] = find( b ); }

private:
  std::vector<std::size_t> parent_;
};

/* connected-component label per node, by breadth-first search */
std::vector<std::uint32_t> component_labels( circuit_graph const& g )
{
  auto const adj = g.adjacency();
  constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label( g.num_nodes(), unset );
  std::uint32_t next = 0;
  for ( std::uint32_t s = 0; s < g.num_nodes(); ++s )
  {
    if ( label[s] != unset )
    {
      continue;
    }
    std::queue<std::uint32_t> q;
    q.push( s );
    label[s] = next;
    while ( !q.empty() )
    {
      auto const u = q.front();
      q.pop();
      for ( auto v : adj[u] )
      {
        if ( label[v] == unset )
        {
          label[v] = next;
          q.push( v );
        }
      }
    }
    ++next;
  }
  return label;
}

} // namespace

bool check_connected_io( circuit_graph const& g )
{
  for ( auto id : g.net_nodes() )
  {
    auto const k = g.nodes()[id].kind;
    if ( ( k == net_kind::input || k == net_kind::output ) && g.degree( id ) == 0u )
    {
      return false;
    }
  }
  return true;
}

bool check_io_paths( circuit_graph const& g )
{
  union_find uf( g.num_nodes() );
  for ( auto const& [a, b] : g.edges() )
  {
    uf.unite( a, b );
  }
  for ( auto i : g.net_nodes() )
  {
    if ( g.nodes()[i].kind != net_kind::input )
    {
      continue;
    }
    for ( auto o : g.net_nodes() )
    {
      if ( g.nodes()[o].kind == net_kind::output && uf.find( i ) != uf.find( o ) )
      {
        return false;
      }
    }
  }
  return true;
}

bool check_no_floating_nets( circuit_graph const& g )
{
  bool ground_driven = false;
  std::size_t driven_sources = 0;
  for ( auto id : g.net_nodes() )
  {
    auto const& n = g.nodes()[id];
    auto const deg = g.degree( id );
    switch ( n.kind )
    {
    case net_kind::internal:
    case net_kind::output:
      if ( deg == 1u )
      {
        return false;
      }
      break;
    case net_kind::ground:
      ground_driven = ground_driven || deg >= 1u;
      break;
    case net_kind::input:
    case net_kind::supply:
      driven_sources += deg >= 1u ? 1u : 0u;
      break;
    }
  }
  return ground_driven || driven_sources >= 2u;
}

bool check_no_isolated_subgraphs( circuit_graph const& g )
{
  if ( g.num_components() == 0u )
  {
    return true;
  }
  auto const label = component_labels( g );
  auto const main = label[g.instances().front().terminal_nodes.front()];

  for ( auto const& inst : g.instances() )
  {
    if ( label[inst.terminal_nodes.front()] != main )
    {
      return false;
    }
  }
  bool has_external = false;
  for ( auto id : g.net_nodes() )
  {
    auto const& n = g.nodes()[id];
    if ( !is_external( n ) || g.degree( id ) == 0u )
    {
      continue;
    }
    if ( label[id] != main )
    {
      return false;
    }
    has_external = true;
  }
  return has_external;
}

bool run_check( circuit_graph const& g, check_kind c )
{
  switch ( c )
  {
  case check_kind::connected_io:
    return check_connected_io( g );
  case check_kind::io_paths:
    return check_io_paths( g );
  case check_kind::no_floating_nets:
    return check_no_floating_nets( g );
  case check_kind::no_isolated_subgraphs:
    return check_no_isolated_subgraphs( g );
  }
  return false;
}

check_report run_checks( circuit_graph const& g, check_set const& subset )
{
  check_report r;
  for ( auto c : subset.members() )
  {
    r.results.emplace_back( c, run_check( g, c ) );
  }
  return r;
}

Eigen::MatrixXd wiring_mask( circuit_graph const& g, component_kind const& kind, wiring_rule_set const& rules )
{
  auto const rows = static_cast<Eigen::Index>( g.num_nets() );
  auto const cols = static_cast<Eigen::Index>( kind.num_terminals() );
  Eigen::MatrixXd mask = Eigen::MatrixXd::Zero( rows, cols );
  if ( !kind.is_mosfet() )
  {
    return mask;
  }

  auto const gate = kind.terminal_with_role( terminal_role::gate );
  auto const bulk = kind.terminal_with_role( terminal_role::bulk );

  /* bulk goes to ground (nmos) or the first supply (pmos) */
  if ( rules.bulk_to_rail && bulk >= 0 )
  {
    auto const want = kind.role == device_role::nmos ? net_kind::ground : net_kind::supply;
    bool kept = false;
    for ( Eigen::Index r = 0; r < rows; ++r )
    {
      auto const& n = g.nodes()[g.net_nodes()[static_cast<std::size_t>( r )]];
      if ( !kept && n.kind == want )
      {
        kept = true;
        continue;
      }
      mask( r, bulk ) = neg_inf;
    }
  }

  for ( Eigen::Index r = 0; r < rows; ++r )
  {
    auto const k = g.nodes()[g.net_nodes()[static_cast<std::size_t>( r )]].kind;
    for ( Eigen::Index c = 0; c < cols; ++c )
    {
      auto const role = kind.terminal_roles[static_cast<std::size_t>( c )];
      if ( rules.no_rail_to_gate && c == gate && ( k == net_kind::supply || k == net_kind::ground ) )
      {
        mask( r, c ) = neg_inf;
      }
      if ( rules.inputs_to_gate && gate >= 0 && c != gate && k == net_kind::input )
      {
        mask( r, c ) = neg_inf;
      }
      if ( rules.outputs_to_drain_source && k == net_kind::output &&
           ( role == terminal_role::gate || role == terminal_role::bulk ) )
      {
        mask( r, c ) = neg_inf;
      }
    }
  }

  for ( Eigen::Index c = 0; c < cols; ++c )
  {
    bool any = false;
    for ( Eigen::Index r = 0; r < rows && !any; ++r )
    {
      any = mask( r, c ) == 0.0;
    }
    if ( !any )
    {
      throw rule_conflict( "wiring rules leave no allowed net for terminal '" +
                           kind.terminal_names[static_cast<std::size_t>( c )] + "' of " + kind.name );
    }
  }
  return mask;
}

} // namespace netcomp
