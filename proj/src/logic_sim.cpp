#include <netcomp/logic_sim.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <unordered_map>

namespace netcomp
{

std::vector<std::vector<bool>> all_input_vectors( std::size_t num_inputs )
{
  std::vector<std::vector<bool>> v;
  for ( std::size_t i = 0; i < ( std::size_t{1} << num_inputs ); ++i )
  {
    std::vector<bool> bits( num_inputs );
    for ( std::size_t j = 0; j < num_inputs; ++j )
    {
      bits[j] = ( i >> ( num_inputs - 1 - j ) ) & 1u;
    }
    v.push_back( std::move( bits ) );
  }
  return v;
}

std::string logic_voltage_name( std::string const& out, std::size_t i )
{
  return "v_" + out + "_" + std::to_string( i );
}

namespace
{

struct switch_device
{
  std::uint32_t drain;
  std::uint32_t gate;
  std::uint32_t source;
  bool nmos;
};

bool conducts( switch_device const& t, logic_level gate )
{
  return t.nmos ? gate == logic_level::one : gate == logic_level::zero;
}

struct union_find
{
  std::vector<std::uint32_t> parent;

  explicit union_find( std::size_t n ) : parent( n ) { std::iota( parent.begin(), parent.end(), 0u ); }

  std::uint32_t find( std::uint32_t a )
  {
    while ( parent[a] != a )
    {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite( std::uint32_t a, std::uint32_t b ) { parent[find( a )] = find( b ); }
};

class settler
{
public:
  settler( netlist const& n, std::vector<component_kind> const& inventory, net_declaration const& nets,
           std::vector<bool> const& inputs )
  {
    auto id_of = [this]( std::string const& name ) {
      auto [it, fresh] = ids_.try_emplace( name, static_cast<std::uint32_t>( names_.size() ) );
      if ( fresh )
      {
        names_.push_back( name );
      }
      return it->second;
    };
    for ( auto const& name : n.net_names )
    {
      id_of( name );
    }
    for ( auto const& d : n.devices )
    {
      auto const& kind = inventory.at( d.kind );
      if ( !kind.is_mosfet() )
      {
        non_mos_ = true;
        continue;
      }
      auto pin = [&]( terminal_role r ) { return id_of( d.nets.at( static_cast<std::size_t>( kind.terminal_with_role( r ) ) ) ); };
      devices_.push_back( {pin( terminal_role::drain ), pin( terminal_role::gate ), pin( terminal_role::source ),
                           kind.role == device_role::nmos} );
    }
    for ( auto const& out : nets.outputs )
    {
      outputs_.push_back( id_of( out ) );
    }

    source_.assign( names_.size(), std::nullopt );
    source_[id_of( std::string( spice_ground ) )] = logic_level::zero;
    for ( auto const& s : nets.supplies )
    {
      source_[id_of( s )] = logic_level::one;
    }
    for ( std::size_t i = 0; i < nets.inputs.size(); ++i )
    {
      source_[id_of( nets.inputs[i] )] = inputs.at( i ) ? logic_level::one : logic_level::zero;
    }
  }

  vector_result run()
  {
    vector_result r;
    if ( non_mos_ )
    {
      r.status = vector_status::invalid_circuit;
      return r;
    }
    build_blocks();

    values_.assign( names_.size(), logic_level::z );
    for ( std::size_t i = 0; i < names_.size(); ++i )
    {
      if ( source_[i] )
      {
        values_[i] = *source_[i];
      }
    }
    solutions_ = 0;
    search( 0 );
    if ( solutions_ != 1 )
    {
      r.status = vector_status::non_convergence;
      return r;
    }
    auto const& v = solution_;

    for ( auto const& t : devices_ )
    {
      if ( source_[t.drain] && source_[t.source] && conducts( t, v[t.gate] ) && *source_[t.drain] != *source_[t.source] )
      {
        r.short_path = true;
      }
    }
    r.short_path = r.short_path || std::ranges::find( v, logic_level::x ) != v.end();

    bool invalid = false;
    bool contention = false;
    bool floating = false;
    for ( auto const& t : devices_ )
    {
      invalid = invalid || v[t.gate] == logic_level::z;
      contention = contention || v[t.gate] == logic_level::x;
    }
    for ( auto o : outputs_ )
    {
      contention = contention || v[o] == logic_level::x;
      floating = floating || v[o] == logic_level::z;
      r.outputs.push_back( v[o] );
    }
    if ( invalid )
    {
      r.status = vector_status::invalid_circuit;
    }
    else if ( contention )
    {
      r.status = vector_status::contention;
    }
    else if ( floating )
    {
      r.status = vector_status::floating_output;
    }
    return r;
  }

private:
  /* channel-connected groups of non-source nets, then their SCCs in dependency order */
  void build_blocks()
  {
    auto const n = names_.size();
    union_find uf( n );
    for ( auto const& t : devices_ )
    {
      if ( !source_[t.drain] && !source_[t.source] )
      {
        uf.unite( t.drain, t.source );
      }
    }
    group_of_net_.assign( n, -1 );
    std::vector<int> root_group( n, -1 );
    std::size_t groups = 0;
    for ( std::uint32_t i = 0; i < n; ++i )
    {
      if ( source_[i] )
      {
        continue;
      }
      auto const r = uf.find( i );
      if ( root_group[r] < 0 )
      {
        root_group[r] = static_cast<int>( groups++ );
      }
      group_of_net_[i] = root_group[r];
    }
    auto channel_group = [this]( switch_device const& t ) {
      return source_[t.drain] ? group_of_net_[t.source] : group_of_net_[t.drain];
    };

    std::vector<std::vector<std::uint32_t>> group_devices( groups );
    std::vector<std::vector<int>> succ( groups );
    for ( std::uint32_t k = 0; k < devices_.size(); ++k )
    {
      auto const& t = devices_[k];
      auto const g = channel_group( t );
      if ( g < 0 )
      {
        continue; /* source-to-source device */
      }
      group_devices[static_cast<std::size_t>( g )].push_back( k );
      if ( !source_[t.gate] )
      {
        succ[static_cast<std::size_t>( group_of_net_[t.gate] )].push_back( g );
      }
    }

    /* Tarjan; components come out in reverse topological order */
    std::vector<int> index( groups, -1 ), low( groups, 0 ), comp( groups, -1 );
    std::vector<bool> on_stack( groups, false );
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> sccs;
    int counter = 0;
    std::function<void( std::size_t )> strong = [&]( std::size_t v ) {
      index[v] = low[v] = counter++;
      stack.push_back( v );
      on_stack[v] = true;
      for ( auto w : succ[v] )
      {
        auto const uw = static_cast<std::size_t>( w );
        if ( index[uw] < 0 )
        {
          strong( uw );
          low[v] = std::min( low[v], low[uw] );
        }
        else if ( on_stack[uw] )
        {
          low[v] = std::min( low[v], index[uw] );
        }
      }
      if ( low[v] == index[v] )
      {
        std::vector<std::size_t> members;
        std::size_t w;
        do
        {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = static_cast<int>( sccs.size() );
          members.push_back( w );
        } while ( w != v );
        sccs.push_back( std::move( members ) );
      }
    };
    for ( std::size_t v = 0; v < groups; ++v )
    {
      if ( index[v] < 0 )
      {
        strong( v );
      }
    }
    std::ranges::reverse( sccs );

    blocks_.clear();
    for ( auto const& members : sccs )
    {
      block b;
      for ( auto g : members )
      {
        b.devices.insert( b.devices.end(), group_devices[g].begin(), group_devices[g].end() );
      }
      for ( std::uint32_t i = 0; i < n; ++i )
      {
        if ( group_of_net_[i] >= 0 && std::ranges::find( members, static_cast<std::size_t>( group_of_net_[i] ) ) != members.end() )
        {
          b.nets.push_back( i );
        }
      }
      for ( auto k : b.devices )
      {
        auto const gate = devices_[k].gate;
        if ( !source_[gate] && std::ranges::find( b.nets, gate ) != b.nets.end() )
        {
          b.feedback.push_back( k );
        }
      }
      blocks_.push_back( std::move( b ) );
    }
  }

  /* net values of one block given the conduction state of its devices */
  void resolve( std::size_t bi, std::vector<bool> const& on )
  {
    auto const& b = blocks_[bi];
    union_find uf( names_.size() );
    for ( std::size_t i = 0; i < b.devices.size(); ++i )
    {
      auto const& t = devices_[b.devices[i]];
      if ( on[i] && !source_[t.drain] && !source_[t.source] )
      {
        uf.unite( t.drain, t.source );
      }
    }
    std::unordered_map<std::uint32_t, unsigned> reach; /* bit 0: reaches 0, bit 1: reaches 1 */
    for ( std::size_t i = 0; i < b.devices.size(); ++i )
    {
      auto const& t = devices_[b.devices[i]];
      if ( !on[i] )
      {
        continue;
      }
      for ( auto [src, other] : {std::pair{t.drain, t.source}, std::pair{t.source, t.drain}} )
      {
        if ( source_[src] && !source_[other] )
        {
          reach[uf.find( other )] |= *source_[src] == logic_level::one ? 2u : 1u;
        }
      }
    }
    for ( auto net : b.nets )
    {
      auto const it = reach.find( uf.find( net ) );
      auto const r = it == reach.end() ? 0u : it->second;
      values_[net] = r == 0u ? logic_level::z : r == 1u ? logic_level::zero : r == 2u ? logic_level::one : logic_level::x;
    }
  }

  void search( std::size_t bi )
  {
    if ( solutions_ > 1 )
    {
      return;
    }
    if ( bi == blocks_.size() )
    {
      if ( ++solutions_ == 1 )
      {
        solution_ = values_;
      }
      return;
    }
    auto const& b = blocks_[bi];
    if ( b.feedback.size() > max_feedback )
    {
      solutions_ = 2;
      return;
    }
    std::vector<bool> on( b.devices.size() );
    for ( std::uint64_t mask = 0; mask < ( std::uint64_t{1} << b.feedback.size() ); ++mask )
    {
      std::size_t f = 0;
      for ( std::size_t i = 0; i < b.devices.size(); ++i )
      {
        auto const k = b.devices[i];
        if ( f < b.feedback.size() && b.feedback[f] == k )
        {
          on[i] = ( mask >> f ) & 1u;
          ++f;
        }
        else
        {
          on[i] = conducts( devices_[k], values_[devices_[k].gate] );
        }
      }
      resolve( bi, on );
      bool consistent = true;
      f = 0;
      for ( std::size_t i = 0; i < b.devices.size() && consistent; ++i )
      {
        if ( f < b.feedback.size() && b.feedback[f] == b.devices[i] )
        {
          consistent = on[i] == conducts( devices_[b.devices[i]], values_[devices_[b.devices[i]].gate] );
          ++f;
        }
      }
      if ( consistent )
      {
        search( bi + 1 );
      }
      for ( auto net : b.nets )
      {
        values_[net] = logic_level::z;
      }
      if ( solutions_ > 1 )
      {
        return;
      }
    }
  }

  struct block
  {
    std::vector<std::uint32_t> devices; /* ascending within each group */
    std::vector<std::uint32_t> nets;
    std::vector<std::uint32_t> feedback; /* devices gated from inside the block, in `devices` order */
  };

  static constexpr std::size_t max_feedback = 16;

  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> names_;
  std::vector<switch_device> devices_;
  std::vector<std::uint32_t> outputs_;
  std::vector<std::optional<logic_level>> source_;
  bool non_mos_{false};

  std::vector<int> group_of_net_;
  std::vector<block> blocks_;
  std::vector<logic_level> values_;
  std::vector<logic_level> solution_;
  std::size_t solutions_{0};
};

} // namespace

vector_result logic_settle( netlist const& n, std::vector<component_kind> const& inventory,
                            net_declaration const& nets, std::vector<bool> const& inputs )
{
  return settler( n, inventory, nets, inputs ).run();
}

sim_outcome summarize_vectors( std::vector<vector_result> const& results, net_declaration const& nets, double vdd )
{
  std::vector<measurement> m;
  bool short_path = false;
  for ( std::size_t i = 0; i < results.size(); ++i )
  {
    switch ( results[i].status )
    {
    case vector_status::ok:
      break;
    case vector_status::non_convergence:
      return sim_error::non_convergence;
    case vector_status::invalid_circuit:
      return sim_error::invalid_circuit;
    case vector_status::contention:
      return sim_error::contention;
    case vector_status::floating_output:
      return sim_error::floating_output;
    }
    for ( std::size_t o = 0; o < nets.outputs.size(); ++o )
    {
      m.push_back( {logic_voltage_name( nets.outputs[o], i ), measurement_kind::sampled_voltage,
                    results[i].outputs[o] == logic_level::one ? vdd : 0.0} );
    }
    short_path = short_path || results[i].short_path;
  }
  m.push_back( {supply_short_name, measurement_kind::supply_current_flag, short_path ? 1.0 : 0.0} );
  return m;
}

sim_outcome logic_evaluate( netlist const& n, std::vector<component_kind> const& inventory, net_declaration const& nets,
                            std::vector<std::vector<bool>> const& vectors, double vdd )
{
  std::vector<vector_result> results;
  for ( auto const& v : vectors )
  {
    results.push_back( logic_settle( n, inventory, nets, v ) );
    if ( results.back().status != vector_status::ok )
    {
      break;
    }
  }
  return summarize_vectors( results, nets, vdd );
}

} // namespace netcomp
