#include "support.hpp"

#include <netcomp/errors.hpp>
#include <netcomp/task.hpp>

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace netcomp;
using namespace netcomp::test;

namespace
{

std::string read_file( std::filesystem::path const& p )
{
  std::ifstream in( p );
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> violations_of( std::string const& name )
{
  try
  {
    load_task( fixture( name + ".json" ) );
  }
  catch ( validation_error const& e )
  {
    return e.violations();
  }
  return {};
}

} // namespace

TEST_CASE( "bundled tasks load and validate" )
{
  auto const inv = bundled_task( "inverter" );
  CHECK( inv.name == "inverter" );
  CHECK( inv.sampler.max_steps == 6 );
  CHECK( inv.nets.inputs.size() == 1 );
  CHECK( inv.inventory.size() == 2 );
  CHECK( inv.evaluator.truth_table.size() == 2 );
  CHECK( validate( inv ).empty() );

  auto const nand = bundled_task( "nand2" );
  CHECK( nand.sampler.max_steps == 10 );
  CHECK( nand.nets.inputs.size() == 2 );
  CHECK( nand.evaluator.truth_table.size() == 4 );
  CHECK( validate( nand ).empty() );

  CHECK( nand.domain().max_internal_nets == 10 );
  auto capped = nand;
  capped.sampler.max_internal_nets = 2;
  CHECK( capped.domain().max_internal_nets == 2 );

  /* defaults for omitted sections */
  CHECK( inv.train == train_config{} );
  CHECK( inv.rules == wiring_rule_set{} );
  CHECK( inv.train.batch == 256 );
  CHECK( inv.train.steps == 1024 );
  CHECK( inv.train.peak_lr == 1e-3 );
  CHECK( inv.train.es_sigma == 0.05 );
}

TEST_CASE( "save and load round trip" )
{
  auto const dir = scratch_dir( "task_roundtrip" );
  for ( auto const* name : {"inverter", "nand2"} )
  {
    auto t = bundled_task( name );
    t.sampler.as_input = check_set::all();
    t.sampler.during_generation = {check_kind::io_paths};
    t.sampler.min_components = 2;
    t.rules.inputs_to_gate = true;
    t.train.learner = learner_kind::rloo;
    t.train.peak_lr = 0.0123456789012345;
    t.evaluator.ngspice.pdk_include = "/pdk/x.spice";
    auto const path = dir / ( std::string( name ) + ".json" );
    save_task( t, path );
    auto const back = load_task( path );
    CHECK( back == t );
    CHECK( dump_task( back ) == dump_task( t ) );
    CHECK( parse_task( dump_task( t ) ) == t );
  }
}

TEST_CASE( "every validation rule has a failing fixture" )
{
  CHECK( violations_of( "valid_inverter" ).empty() );
  struct expectation
  {
    char const* file;
    char const* message;
  };
  std::vector<expectation> const cases{
      {"bad_schema_version", "unsupported schema_version 2"},
      {"empty_name", "task name is empty"},
      {"no_outputs", "at least one output net is required"},
      {"no_supplies", "at least one supply net is required"},
      {"reserved_net_name", "net name 'net3' is reserved"},
      {"duplicate_net_name", "duplicate net name 'in'"},
      {"ground_clash", "ground name 'supply' clashes with another net"},
      {"empty_inventory", "inventory is empty"},
      {"duplicate_component", "duplicate component kind 'nmos'"},
      {"missing_model", "component 'nmos' has no model name"},
      {"one_terminal", "component 'pin' needs at least two terminals"},
      {"param_min_ge_max", "component 'pmos' parameter 'w' has min >= max"},
      {"mosfet_missing_bulk", "MOSFET 'nmos' lacks a bulk"},
      {"rule_conflict", "rule conflict for 'nmos'"},
      {"zero_max_steps", "sampler.max_steps must be at least 1"},
      {"min_components_over_max", "sampler.min_components exceeds max_components"},
      {"min_nets_over_max", "sampler.min_internal_nets exceeds max_internal_nets"},
      {"zero_regeneration_trials", "sampler.max_regeneration_trials must be at least 1"},
      {"failure_reward_range", "evaluator.failure_reward must lie in [-1, 1]"},
      {"no_truth_table", "logic backend needs a truth table"},
      {"logic_r_min_range", "evaluator.logic_r_min must lie in [-1, 1]"},
      {"logic_non_mosfet", "logic backend supports MOSFETs only; 'res' is not one"},
      {"truth_table_width", "truth table row 0 does not match the declared nets"},
      {"timeout_nonpositive", "testbench.timeout_s must be positive"},
      {"duplicate_measurement", "duplicate measurement name 'v_out_low_in'"},
      {"measurement_norm", "measurement 'v_out_low_in' needs norm > 0"},
      {"measurement_unknown_net", "measurement 'v_out_low_in' references unknown net 'nowhere'"},
      {"stimulus_not_input", "stimulus on 'out', which is not an input net"},
      {"stimulus_after_stop", "stimulus on 'in' has an edge after t_stop"},
      {"ngspice_without_measurements", "ngspice backend needs at least one measurement"},
      {"small_batch", "train.batch must be at least 2"},
      {"odd_es_batch", "train.batch must be even for the es learner"},
      {"zero_steps", "train.steps must be at least 1"},
      {"negative_lr", "train rates (peak_lr, es_sigma, advantage_clip, adam_eps) must be positive"},
      {"bad_beta", "train Adam betas must lie in [0, 1)"},
      {"zero_workers", "train.hidden and train.workers must be at least 1"},
  };
  for ( auto const& c : cases )
  {
    CAPTURE( c.file );
    auto const v = violations_of( c.file );
    REQUIRE_FALSE( v.empty() );
    bool found = false;
    for ( auto const& m : v )
    {
      found = found || m.find( c.message ) != std::string::npos;
    }
    CHECK( found );
  }
}

TEST_CASE( "parse errors name the offending place" )
{
  auto where = []( std::string const& name ) -> std::string {
    try
    {
      load_task( fixture( name + ".json" ) );
    }
    catch ( parse_error const& e )
    {
      return e.where();
    }
    return "";
  };
  CHECK( where( "unknown_field" ).ends_with( ":/colour" ) );
  CHECK( where( "wrong_type" ).ends_with( ":/sampler/max_steps" ) );
  CHECK( where( "unknown_learner" ).ends_with( "/train/learner" ) );
  CHECK( where( "unknown_check" ).find( "as_input" ) != std::string::npos );
  auto const m = where( "malformed" );
  CHECK( m.find( "malformed.json:" ) != std::string::npos );
  CHECK( m.ends_with( ":5" ) );
  CHECK_THROWS_AS( load_task( fixture( "does_not_exist.json" ) ), parse_error );
  CHECK_THROWS_AS( parse_task( "[]" ), parse_error );
}

TEST_CASE( "validation reports all violations at once" )
{
  auto t = parse_task( read_file( fixture( "valid_inverter.json" ) ) );
  t.name.clear();
  t.sampler.max_steps = 0;
  t.train.learner = learner_kind::rloo;
  t.train.batch = 1;
  CHECK( validate( t ).size() == 3 );
}
