#pragma once

#include <netcomp/circuit_graph.hpp>
#include <netcomp/task.hpp>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace netcomp::test
{

inline std::filesystem::path source_dir()
{
  return NETCOMP_SOURCE_DIR;
}

inline task_spec bundled_task( std::string const& name )
{
  return load_task( source_dir() / "tasks" / ( name + ".json" ) );
}

inline std::filesystem::path fixture( std::string const& name )
{
  return source_dir() / "tests" / "fixtures" / name;
}

inline std::filesystem::path scratch_dir( std::string const& name )
{
  auto const d = std::filesystem::temp_directory_path() / ( "netcomp_test_" + name );
  std::filesystem::remove_all( d );
  std::filesystem::create_directories( d );
  return d;
}

inline std::vector<component_kind> mosfet_inventory()
{
  return {make_mosfet( "nmos", "sky130_nfet_01v8", device_role::nmos, 0.36, 5.0, 0.15, 5.0 ),
          make_mosfet( "pmos", "sky130_pfet_01v8", device_role::pmos, 0.42, 5.0, 0.15, 5.0 )};
}

inline net_declaration inverter_nets()
{
  return {{"in"}, {"out"}, {"supply"}, "gnd"};
}

inline net_declaration nand2_nets()
{
  return {{"in1", "in2"}, {"out"}, {"supply"}, "gnd"};
}

inline circuit_domain make_domain( net_declaration nets, std::uint32_t internal = 4 )
{
  return {std::move( nets ), mosfet_inventory(), internal};
}

/* node ids of the task graph: inputs, outputs, supplies, ground */
struct inverter_ids
{
  std::uint32_t in = 0, out = 1, supply = 2, gnd = 3;
};

inline void add_mos( circuit_graph& g, std::vector<component_kind> const& inv, std::uint32_t kind, std::uint32_t d,
                     std::uint32_t gate, std::uint32_t s, std::uint32_t b, double w = 1.0, double l = 0.15 )
{
  std::vector<double> const params{w, l};
  std::vector<std::uint32_t> const nets{d, gate, s, b};
  g.add_component( inv, kind, params, nets );
}

inline circuit_graph standard_inverter()
{
  auto const inv = mosfet_inventory();
  auto g = new_task_graph( inverter_nets() );
  inverter_ids n;
  add_mos( g, inv, 0, n.out, n.in, n.gnd, n.gnd );
  add_mos( g, inv, 1, n.out, n.in, n.supply, n.supply );
  return g;
}

/* nets: in1 = 0, in2 = 1, out = 2, supply = 3, gnd = 4, internal = 5 */
inline circuit_graph standard_nand2()
{
  auto const inv = mosfet_inventory();
  auto g = new_task_graph( nand2_nets() );
  auto const mid = g.add_internal_net();
  add_mos( g, inv, 0, 2, 0, mid, 4 );
  add_mos( g, inv, 0, mid, 1, 4, 4 );
  add_mos( g, inv, 1, 2, 0, 3, 3 );
  add_mos( g, inv, 1, 2, 1, 3, 3 );
  return g;
}

/*! \brief Random graph with up to `max_nodes` nodes built from random nets and MOSFETs. */
inline circuit_graph random_graph( std::mt19937_64& rng, std::size_t max_nodes = 30 )
{
  auto const inv = mosfet_inventory();
  std::uniform_int_distribution<int> n_in( 0, 2 ), n_sup( 1, 2 ), n_out( 1, 2 );
  net_declaration nets;
  for ( int i = n_in( rng ); i > 0; --i )
  {
    nets.inputs.push_back( "i" + std::to_string( i ) );
  }
  for ( int i = n_out( rng ); i > 0; --i )
  {
    nets.outputs.push_back( "o" + std::to_string( i ) );
  }
  for ( int i = n_sup( rng ); i > 0; --i )
  {
    nets.supplies.push_back( "s" + std::to_string( i ) );
  }
  auto g = new_task_graph( nets );
  std::uniform_int_distribution<int> coin( 0, 3 );
  while ( g.num_nodes() + 4 <= max_nodes )
  {
    auto const c = coin( rng );
    if ( c == 0 )
    {
      g.add_internal_net();
      continue;
    }
    if ( c == 3 && g.num_nodes() > 12 )
    {
      break;
    }
    auto const& nn = g.net_nodes();
    std::uniform_int_distribution<std::size_t> pick( 0, nn.size() - 1 );
    add_mos( g, inv, static_cast<std::uint32_t>( coin( rng ) % 2 ), nn[pick( rng )], nn[pick( rng )], nn[pick( rng )],
             nn[pick( rng )] );
  }
  return g;
}

} // namespace netcomp::test
