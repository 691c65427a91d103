#include <netcomp/evaluator.hpp>
#include <netcomp/logic_sim.hpp>
#include <netcomp/reward.hpp>
#include <netcomp/task.hpp>

namespace netcomp
{

std::vector<measurement_spec> logic_specs( net_declaration const& nets, std::vector<truth_row> const& table, double vdd,
                                           double r_min )
{
  std::vector<measurement_spec> specs;
  for ( std::size_t i = 0; i < table.size(); ++i )
  {
    for ( std::size_t o = 0; o < nets.outputs.size(); ++o )
    {
      measurement_spec s;
      s.name = logic_voltage_name( nets.outputs[o], i );
      s.kind = measurement_kind::sampled_voltage;
      s.target = table[i].outputs.at( o ) ? vdd : 0.0;
      s.norm = vdd;
      s.r_min = r_min;
      s.net = nets.outputs[o];
      specs.push_back( s );
    }
  }
  measurement_spec s;
  s.name = supply_short_name;
  s.kind = measurement_kind::supply_current_flag;
  s.target = 0.0;
  s.norm = 0.5;
  s.r_min = 1.0;
  specs.push_back( s );
  return specs;
}

logic_evaluator::logic_evaluator( circuit_domain domain, std::vector<truth_row> const& table, double vdd, double r_min,
                                  double failure_reward )
    : domain_( std::move( domain ) ), vdd_( vdd ), failure_reward_( failure_reward ),
      specs_( logic_specs( domain_.nets, table, vdd, r_min ) )
{
  for ( auto const& row : table )
  {
    vectors_.push_back( row.inputs );
  }
}

evaluation logic_evaluator::evaluate( circuit_graph const& g ) const
{
  auto const n = graph_to_netlist( g, domain_.nets );
  evaluation e;
  e.outcome = logic_evaluate( n, domain_.inventory, domain_.nets, vectors_, vdd_ );
  e.reward = aggregate_reward( e.outcome, specs_, failure_reward_ );
  return e;
}

ngspice_evaluator::ngspice_evaluator( circuit_domain domain, testbench bench, ngspice_config cfg,
                                      std::filesystem::path workroot, double failure_reward )
    : domain_( std::move( domain ) ), bench_( std::move( bench ) ), cfg_( std::move( cfg ) ),
      workroot_( std::move( workroot ) ), failure_reward_( failure_reward )
{
}

evaluation ngspice_evaluator::evaluate( circuit_graph const& g ) const
{
  auto const id = counter_.fetch_add( 1 );
  auto const n = graph_to_netlist( g, domain_.nets );
  evaluation e;
  e.outcome = ngspice_run( n, domain_, bench_, cfg_, workroot_ / ( "sim" + std::to_string( id ) ) );
  e.reward = aggregate_reward( e.outcome, bench_.measurements, failure_reward_ );
  return e;
}

std::unique_ptr<evaluator> make_evaluator( task_spec const& task, std::filesystem::path const& workroot )
{
  auto const& ev = task.evaluator;
  if ( ev.backend == backend_kind::logic )
  {
    return std::make_unique<logic_evaluator>( task.domain(), ev.truth_table, ev.bench.supply_voltage, ev.logic_r_min,
                                              ev.failure_reward );
  }
  return std::make_unique<ngspice_evaluator>( task.domain(), ev.bench, apply_env_overrides( ev.ngspice ), workroot,
                                              ev.failure_reward );
}

} // namespace netcomp
