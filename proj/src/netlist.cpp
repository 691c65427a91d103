#include <netcomp/errors.hpp>
#include <netcomp/netlist.hpp>

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

namespace netcomp
{

std::string net_name( node_record const& n, net_declaration const& nets )
{
  switch ( n.kind )
  {
  case net_kind::ground:
    return std::string( spice_ground );
  case net_kind::internal:
    return "net" + std::to_string( n.index );
  case net_kind::input:
    return nets.inputs.at( n.index );
  case net_kind::output:
    return nets.outputs.at( n.index );
  case net_kind::supply:
    return nets.supplies.at( n.index );
  }
  return {};
}

namespace
{
std::string format_param( double v )
{
  char buf[32];
  std::snprintf( buf, sizeof( buf ), "%.6g", v );
  return buf;
}
} // namespace

double round_to_spice_precision( double v )
{
  return std::stod( format_param( v ) );
}

netlist graph_to_netlist( circuit_graph const& g, net_declaration const& nets )
{
  netlist n;
  for ( auto id : g.net_nodes() )
  {
    n.net_names.push_back( net_name( g.nodes()[id], nets ) );
  }
  for ( std::size_t i = 0; i < g.instances().size(); ++i )
  {
    auto const& inst = g.instances()[i];
    device d;
    d.name = "XM" + std::to_string( i );
    d.kind = inst.kind;
    for ( auto p : inst.params )
    {
      d.params.push_back( round_to_spice_precision( p ) );
    }
    for ( auto net : inst.nets )
    {
      d.nets.push_back( net_name( g.nodes()[net], nets ) );
    }
    n.devices.push_back( std::move( d ) );
  }
  return n;
}

circuit_graph graph_from_netlist( netlist const& n, circuit_domain const& domain )
{
  auto g = new_task_graph( domain.nets );
  std::map<std::string, std::uint32_t> by_name;
  for ( auto id : g.net_nodes() )
  {
    by_name[net_name( g.nodes()[id], domain.nets )] = id;
  }
  for ( auto const& name : n.net_names )
  {
    if ( by_name.contains( name ) )
    {
      continue;
    }
    if ( !name.starts_with( "net" ) )
    {
      throw parse_error( name, "unknown net" );
    }
    auto const id = g.add_internal_net();
    if ( net_name( g.nodes()[id], domain.nets ) != name )
    {
      throw parse_error( name, "internal nets must be numbered in creation order" );
    }
    by_name[name] = id;
  }
  for ( auto const& d : n.devices )
  {
    std::vector<std::uint32_t> targets;
    for ( auto const& net : d.nets )
    {
      auto it = by_name.find( net );
      if ( it == by_name.end() )
      {
        throw parse_error( d.name, "undeclared net '" + net + "'" );
      }
      targets.push_back( it->second );
    }
    g.add_component( domain.inventory, d.kind, d.params, targets );
  }
  return g;
}

std::string emit_spice( netlist const& n, circuit_domain const& domain, std::string const& cell )
{
  std::ostringstream os;
  os << ".subckt " << cell;
  for ( auto const* group : {&domain.nets.inputs, &domain.nets.outputs, &domain.nets.supplies} )
  {
    for ( auto const& pin : *group )
    {
      os << ' ' << pin;
    }
  }
  os << '\n';
  os << "* nets:";
  for ( auto const& name : n.net_names )
  {
    os << ' ' << name;
  }
  os << '\n';
  for ( auto const& d : n.devices )
  {
    auto const& kind = domain.inventory.at( d.kind );
    os << d.name;
    for ( auto const& net : d.nets )
    {
      os << ' ' << net;
    }
    os << ' ' << kind.model;
    for ( std::size_t p = 0; p < d.params.size(); ++p )
    {
      os << ' ' << kind.params[p].name << '=' << format_param( d.params[p] );
    }
    os << '\n';
  }
  os << ".ends " << cell << '\n';
  return os.str();
}

netlist parse_spice( std::string_view text, circuit_domain const& domain )
{
  netlist n;
  std::istringstream is{std::string( text )};
  std::string line;
  std::size_t lineno = 0;
  bool in_cell = false;
  bool done = false;
  auto where = [&lineno] { return "line " + std::to_string( lineno ); };

  while ( std::getline( is, line ) )
  {
    ++lineno;
    std::istringstream ls( line );
    std::vector<std::string> tok;
    for ( std::string t; ls >> t; )
    {
      tok.push_back( t );
    }
    if ( tok.empty() )
    {
      continue;
    }
    if ( tok[0] == ".subckt" )
    {
      in_cell = true;
      continue;
    }
    if ( tok[0] == ".ends" )
    {
      done = true;
      break;
    }
    if ( !in_cell )
    {
      continue;
    }
    if ( tok[0] == "*" && tok.size() >= 1 && ( tok.size() == 1 || tok[1] == "nets:" ) )
    {
      n.net_names.assign( tok.begin() + std::min<std::ptrdiff_t>( 2, static_cast<std::ptrdiff_t>( tok.size() ) ), tok.end() );
      continue;
    }
    if ( tok[0][0] == '*' )
    {
      continue;
    }

    /* device line: name nets... model key=value... */
    device d;
    d.name = tok[0];
    std::size_t model_at = 0;
    for ( std::size_t i = 1; i < tok.size(); ++i )
    {
      for ( std::size_t k = 0; k < domain.inventory.size(); ++k )
      {
        if ( domain.inventory[k].model == tok[i] )
        {
          model_at = i;
          d.kind = static_cast<std::uint32_t>( k );
          break;
        }
      }
      if ( model_at != 0 )
      {
        break;
      }
    }
    if ( model_at == 0 )
    {
      throw parse_error( where(), "no inventory model on device line" );
    }
    auto const& kind = domain.inventory[d.kind];
    d.nets.assign( tok.begin() + 1, tok.begin() + static_cast<std::ptrdiff_t>( model_at ) );
    if ( d.nets.size() != kind.num_terminals() )
    {
      throw parse_error( where(), "expected " + std::to_string( kind.num_terminals() ) + " nets for " + kind.name );
    }
    d.params.assign( kind.num_params(), 0.0 );
    std::vector<bool> seen( kind.num_params(), false );
    for ( std::size_t i = model_at + 1; i < tok.size(); ++i )
    {
      auto const eq = tok[i].find( '=' );
      if ( eq == std::string::npos )
      {
        throw parse_error( where(), "expected key=value, got '" + tok[i] + "'" );
      }
      auto const key = tok[i].substr( 0, eq );
      auto const val = tok[i].substr( eq + 1 );
      bool matched = false;
      for ( std::size_t p = 0; p < kind.num_params(); ++p )
      {
        if ( kind.params[p].name == key )
        {
          double v = 0.0;
          auto const [ptr, ec] = std::from_chars( val.data(), val.data() + val.size(), v );
          if ( ec != std::errc() || ptr != val.data() + val.size() )
          {
            throw parse_error( where(), "bad number '" + val + "'" );
          }
          d.params[p] = v;
          seen[p] = true;
          matched = true;
        }
      }
      if ( !matched )
      {
        throw parse_error( where(), "unknown parameter '" + key + "'" );
      }
    }
    for ( std::size_t p = 0; p < seen.size(); ++p )
    {
      if ( !seen[p] )
      {
        throw parse_error( where(), "missing parameter '" + kind.params[p].name + "'" );
      }
    }
    n.devices.push_back( std::move( d ) );
  }
  if ( !done )
  {
    throw parse_error( where(), "missing .ends" );
  }
  return n;
}

} // namespace netcomp
