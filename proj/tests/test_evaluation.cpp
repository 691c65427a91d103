#include "oracles.hpp"
#include "support.hpp"

#include <netcomp/errors.hpp>
#include <netcomp/evaluator.hpp>
#include <netcomp/logic_sim.hpp>
#include <netcomp/netlist.hpp>
#include <netcomp/ngspice.hpp>
#include <netcomp/reward.hpp>
#include <netcomp/sampler.hpp>

#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <fstream>

using namespace netcomp;
using namespace netcomp::test;

namespace
{

std::filesystem::path write_script( std::filesystem::path const& dir, std::string const& name, std::string const& body )
{
  auto const p = dir / name;
  std::ofstream( p ) << "#!/bin/sh\n" << body;
  std::filesystem::permissions( p, std::filesystem::perms::owner_all );
  return p;
}

std::string const good_output = "Circuit: transient testbench\n"
                                "v_out_low_in        =  1.799990e+00\n"
                                "v_out_high_in       =  1.20e-05\n"
                                "t_fall              =  1.5e-11 targ= 1.04e-09 trig= 1.025e-09\n"
                                "t_rise              =  2.1e-11\n"
                                "supply_short        =  -3.2e-12\n";

} // namespace

TEST_CASE( "subreward and saturation examples" )
{
  CHECK( subreward( 1.8, 1.8, 1.8 ) == 1.0 );
  CHECK( subreward( 0.0, 1.8, 1.8 ) == 0.0 );
  CHECK( subreward( 0.9, 0.0, 1.8 ) == doctest::Approx( 0.75 ) );
  CHECK( subreward( 10.0, 0.0, 1.0 ) == -1.0 );
  CHECK( subreward( 1.0, 0.0, 0.5 ) == -1.0 );
  CHECK( saturate( 0.95, 0.9 ) == 1.0 );
  CHECK( saturate( 0.9, 0.9 ) == 1.0 );
  CHECK( saturate( 0.8, 0.9 ) == 0.8 );
  CHECK( saturate( 0.99, 1.0 ) == 0.99 );
}

TEST_CASE( "aggregate reward" )
{
  std::vector<measurement_spec> specs( 2 );
  specs[0].name = "a";
  specs[0].target = 1.0;
  specs[0].norm = 1.0;
  specs[0].r_min = 0.9;
  specs[1].name = "b";
  specs[1].target = 0.0;
  specs[1].norm = 1.0;
  specs[1].r_min = 1.0;
  sim_outcome const good{std::vector<measurement>{{"a", measurement_kind::sampled_voltage, 0.99},
                                                  {"b", measurement_kind::sampled_voltage, 0.5}}};
  CHECK( aggregate_reward( good, specs ) == doctest::Approx( ( 1.0 + 0.75 ) / 2.0 ) );
  for ( auto e : {sim_error::timeout, sim_error::non_convergence, sim_error::parse_failure, sim_error::invalid_circuit,
                  sim_error::contention, sim_error::floating_output} )
  {
    CHECK( aggregate_reward( sim_outcome{e}, specs ) == -1.0 );
    CHECK( aggregate_reward( sim_outcome{e}, specs, -2.0 ) == -2.0 );
  }
  sim_outcome const partial{std::vector<measurement>{{"a", measurement_kind::sampled_voltage, 1.0}}};
  CHECK_THROWS_AS( aggregate_reward( partial, specs ), missing_measurement );
}

TEST_CASE( "input vectors count with the first input most significant" )
{
  auto const v = all_input_vectors( 2 );
  REQUIRE( v.size() == 4 );
  CHECK( v[0] == std::vector<bool>{false, false} );
  CHECK( v[1] == std::vector<bool>{false, true} );
  CHECK( v[2] == std::vector<bool>{true, false} );
  CHECK( v[3] == std::vector<bool>{true, true} );
  CHECK( all_input_vectors( 0 ).size() == 1 );
}

TEST_CASE( "logic evaluation of reference cells" )
{
  auto const inv_task = bundled_task( "inverter" );
  auto const nand_task = bundled_task( "nand2" );
  auto const inv_eval = make_evaluator( inv_task, scratch_dir( "logic_inv" ) );
  auto const nand_eval = make_evaluator( nand_task, scratch_dir( "logic_nand" ) );

  CHECK( inv_eval->evaluate( standard_inverter() ).reward == 1.0 );
  CHECK( nand_eval->evaluate( standard_nand2() ).reward == 1.0 );

  auto const empty = inv_eval->evaluate( new_task_graph( inv_task.nets ) );
  CHECK_FALSE( empty.outcome.ok() );
  CHECK( empty.outcome.error() == sim_error::floating_output );
  CHECK( empty.reward == -1.0 );

  SUBCASE( "pull-down only floats" )
  {
    auto const inv = mosfet_inventory();
    auto g = new_task_graph( inverter_nets() );
    inverter_ids n;
    add_mos( g, inv, 0, n.out, n.in, n.gnd, n.gnd );
    auto const e = inv_eval->evaluate( g );
    CHECK( e.outcome.error() == sim_error::floating_output );
  }
  SUBCASE( "a rail short costs the short subreward" )
  {
    auto const inv = mosfet_inventory();
    auto g = standard_inverter();
    inverter_ids n;
    add_mos( g, inv, 0, n.supply, n.in, n.gnd, n.gnd );
    auto const e = inv_eval->evaluate( g );
    REQUIRE( e.outcome.ok() );
    CHECK( e.outcome.find( supply_short_name )->value == 1.0 );
    CHECK( e.reward == doctest::Approx( ( 1.0 + 1.0 - 1.0 ) / 3.0 ) );
  }
  SUBCASE( "swapped transistors give the wrong levels" )
  {
    auto const inv = mosfet_inventory();
    auto g = new_task_graph( inverter_nets() );
    inverter_ids n;
    add_mos( g, inv, 0, n.out, n.in, n.supply, n.gnd );
    add_mos( g, inv, 1, n.out, n.in, n.gnd, n.supply );
    auto const e = inv_eval->evaluate( g );
    REQUIRE( e.outcome.ok() );
    CHECK( e.reward == doctest::Approx( ( 0.0 + 0.0 + 1.0 ) / 3.0 ) );
  }
  SUBCASE( "a gate on an undriven net is invalid" )
  {
    auto const inv = mosfet_inventory();
    auto g = standard_inverter();
    auto const mid = g.add_internal_net();
    inverter_ids n;
    add_mos( g, inv, 0, n.out, mid, n.gnd, n.gnd );
    CHECK( inv_eval->evaluate( g ).outcome.error() == sim_error::invalid_circuit );
  }
  SUBCASE( "a buffer driving the output from both rails is contention" )
  {
    auto const inv = mosfet_inventory();
    auto g = standard_inverter();
    inverter_ids n;
    add_mos( g, inv, 1, n.out, n.gnd, n.supply, n.supply );
    CHECK( inv_eval->evaluate( g ).outcome.error() == sim_error::contention );
  }
}

TEST_CASE( "logic settle agrees with brute-force enumeration" )
{
  for ( auto const* name : {"inverter", "nand2"} )
  {
    auto task = bundled_task( name );
    auto const domain = task.domain();
    auto const vectors = all_input_vectors( task.nets.inputs.size() );
    std::size_t ok = 0, errors = 0;
    for ( int rules = 0; rules < 2; ++rules )
    {
      task.rules = rules == 0 ? wiring_rule_set{} : wiring_rule_set::none();
      for ( std::uint64_t k = 0; k < 1500; ++k )
      {
        auto rng = episode_rng( 77, static_cast<std::uint64_t>( rules ), k );
        auto const e = random_episode( task, rng );
        auto const n = graph_to_netlist( e.graph, task.nets );
        for ( auto const& v : vectors )
        {
          auto const fast = logic_settle( n, domain.inventory, task.nets, v );
          auto const slow = oracle::brute_force_settle( n, domain.inventory, task.nets, v );
          CHECK( fast.status == slow.status );
          if ( fast.status != vector_status::non_convergence )
          {
            CHECK( fast.short_path == slow.short_path );
          }
          if ( fast.status == vector_status::ok && slow.status == vector_status::ok )
          {
            CHECK( fast.outputs == slow.outputs );
          }
          ( fast.status == vector_status::ok ? ok : errors ) += 1;
        }
      }
    }
    CHECK( ok > 0 );
    CHECK( errors > 0 );
  }
}

TEST_CASE( "spice text" )
{
  auto const domain = make_domain( inverter_nets() );
  auto const inv = mosfet_inventory();
  auto g = new_task_graph( inverter_nets() );
  inverter_ids n;
  add_mos( g, inv, 0, n.out, n.in, n.gnd, n.gnd, 0.36, 0.15 );
  add_mos( g, inv, 1, n.out, n.in, n.supply, n.supply, 1.234567891, 0.15 );
  g.add_internal_net();
  auto const nl = graph_to_netlist( g, domain.nets );
  auto const text = emit_spice( nl, domain, "cell" );
  CHECK( text.find( ".subckt cell in out supply\n" ) == 0 );
  CHECK( text.find( "XM0 out in 0 0 sky130_nfet_01v8 w=0.36 l=0.15\n" ) != std::string::npos );
  CHECK( text.find( "XM1 out in supply supply sky130_pfet_01v8 w=1.23457 l=0.15\n" ) != std::string::npos );
  CHECK( text.find( "net0" ) != std::string::npos );
  CHECK( text.find( ".ends cell" ) != std::string::npos );
  CHECK( round_to_spice_precision( 1.234567891 ) == 1.23457 );
  CHECK( round_to_spice_precision( 0.36 ) == 0.36 );

  auto const back = parse_spice( text, domain );
  CHECK( back.net_names == nl.net_names );
  CHECK( back.devices[0] == nl.devices[0] );
  CHECK( back.devices[1].params[0] == 1.23457 );
  CHECK_THROWS_AS( parse_spice( "XM0 out in 0 0 bogus w=1 l=1\n", domain ), parse_error );
  CHECK_THROWS_AS( parse_spice( ".subckt cell in out supply\nXM0 out in\n.ends cell\n", domain ), parse_error );
}

TEST_CASE( "transient deck" )
{
  auto const task = bundled_task( "inverter" );
  auto const domain = task.domain();
  auto const nl = graph_to_netlist( standard_inverter(), task.nets );
  ngspice_config cfg;
  auto deck = make_deck( nl, domain, task.evaluator.bench, cfg );
  CHECK( deck.find( ".include" ) == std::string::npos );
  CHECK( deck.find( ".option scale=1e-6\n" ) != std::string::npos );
  CHECK( deck.find( "xdut in out supply dut\n" ) != std::string::npos );
  CHECK( deck.find( "vsup0 supply 0 dc 1.8\n" ) != std::string::npos );
  CHECK( deck.find( "vin_in in 0 pwl(0 0 1e-09 0 1.05e-09 1.8 2.5e-09 1.8 2.55e-09 0)\n" ) != std::string::npos );
  CHECK( deck.find( "cload_out out 0 1e-14\n" ) != std::string::npos );
  CHECK( deck.find( ".tran 1e-12 4e-09\n" ) != std::string::npos );
  CHECK( deck.find( ".meas tran v_out_low_in find v(out) at=9e-10\n" ) != std::string::npos );
  CHECK( deck.find( ".meas tran t_fall trig at=1.025e-09 targ v(out) val=0.9 td=1.025e-09 cross=1\n" ) !=
         std::string::npos );
  CHECK( deck.find( ".meas tran supply_short find i(vsup0) at=2.4e-09\n" ) != std::string::npos );
  CHECK( deck.rfind( ".end\n" ) == deck.size() - 5 );

  cfg.pdk_include = "/pdk/models.spice";
  deck = make_deck( nl, domain, task.evaluator.bench, cfg );
  CHECK( deck.find( ".include \"/pdk/models.spice\"\n" ) != std::string::npos );
}

TEST_CASE( "measurement parsing" )
{
  auto const tb = bundled_task( "inverter" ).evaluator.bench;
  auto const out = parse_measurements( good_output, tb );
  REQUIRE( out.ok() );
  CHECK( out.measurements().size() == 5 );
  CHECK( out.find( "v_out_low_in" )->value == 1.79999 );
  CHECK( out.find( "t_fall" )->value == 1.5e-11 );
  CHECK( out.find( "supply_short" )->value == 0.0 );
  CHECK( aggregate_reward( out, tb.measurements ) == 1.0 );

  auto upper = good_output;
  upper.replace( upper.find( "v_out_low_in" ), 12, "V_OUT_LOW_IN" );
  CHECK( parse_measurements( upper, tb ).ok() );

  auto shorted = good_output;
  shorted.replace( shorted.find( "-3.2e-12" ), 8, "-2.0e-04" );
  CHECK( parse_measurements( shorted, tb ).find( "supply_short" )->value == 1.0 );

  auto missing = good_output;
  missing.erase( missing.find( "t_rise" ) );
  CHECK( parse_measurements( missing, tb ).error() == sim_error::non_convergence );

  auto garbled = good_output;
  garbled.replace( garbled.find( "2.1e-11" ), 7, "failed!" );
  CHECK( parse_measurements( garbled, tb ).error() == sim_error::parse_failure );
}

TEST_CASE( "ngspice process handling with stand-in binaries" )
{
  auto const dir = scratch_dir( "fake_ngspice" );
  auto const task = bundled_task( "inverter" );
  auto const domain = task.domain();
  auto const nl = graph_to_netlist( standard_inverter(), task.nets );
  auto tb = task.evaluator.bench;
  ngspice_config cfg;

  SUBCASE( "successful run" )
  {
    cfg.binary = write_script( dir, "ok.sh", "test \"$1\" = -b || exit 9\ntest -f \"$2\" || exit 8\ncat <<'EOF'\n" +
                                                 good_output + "EOF\n" )
                     .string();
    CHECK( ngspice_available( cfg ) );
    auto const r = ngspice_run( nl, domain, tb, cfg, dir / "run_ok" );
    REQUIRE( r.ok() );
    CHECK( aggregate_reward( r, tb.measurements ) == 1.0 );
    CHECK_FALSE( std::filesystem::exists( dir / "run_ok" ) );
  }
  SUBCASE( "nonzero exit" )
  {
    cfg.binary = write_script( dir, "fail.sh", "echo 'v_out_low_in = 1.8'\nexit 1\n" ).string();
    auto const r = ngspice_run( nl, domain, tb, cfg, dir / "run_fail" );
    CHECK( r.error() == sim_error::non_convergence );
    CHECK( std::filesystem::exists( dir / "run_fail" / "deck.sp" ) );
    CHECK( std::filesystem::exists( dir / "run_fail" / "ngspice.log" ) );
  }
  SUBCASE( "timeout kills the process" )
  {
    cfg.binary = write_script( dir, "slow.sh", "sleep 30\n" ).string();
    tb.timeout_s = 0.3;
    auto const t0 = std::chrono::steady_clock::now();
    auto const r = ngspice_run( nl, domain, tb, cfg, dir / "run_slow" );
    auto const dt = std::chrono::duration<double>( std::chrono::steady_clock::now() - t0 ).count();
    CHECK( r.error() == sim_error::timeout );
    CHECK( dt < 5.0 );
  }
  SUBCASE( "missing binary" )
  {
    cfg.binary = ( dir / "does_not_exist" ).string();
    CHECK_FALSE( ngspice_available( cfg ) );
    CHECK_FALSE( ngspice_run( nl, domain, tb, cfg, dir / "run_missing" ).ok() );
  }
  SUBCASE( "evaluator reports the failure reward" )
  {
    auto t = task;
    t.evaluator.backend = backend_kind::ngspice;
    t.evaluator.ngspice.binary = write_script( dir, "fail2.sh", "exit 3\n" ).string();
    ::unsetenv( ngspice_bin_env );
    auto const eval = make_evaluator( t, dir / "work" );
    auto const e = eval->evaluate( standard_inverter() );
    CHECK_FALSE( e.outcome.ok() );
    CHECK( e.reward == -1.0 );
  }
}

TEST_CASE( "environment overrides" )
{
  ngspice_config cfg;
  cfg.binary = "ngspice";
  cfg.pdk_include = "a.spice";
  ::setenv( ngspice_bin_env, "/opt/ng/bin/ngspice", 1 );
  ::setenv( pdk_include_env, "/opt/pdk/all.spice", 1 );
  auto const c = apply_env_overrides( cfg );
  CHECK( c.binary == "/opt/ng/bin/ngspice" );
  CHECK( c.pdk_include == "/opt/pdk/all.spice" );
  ::unsetenv( ngspice_bin_env );
  ::unsetenv( pdk_include_env );
  CHECK( apply_env_overrides( cfg ) == cfg );
}
