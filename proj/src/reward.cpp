#include <netcomp/errors.hpp>
#include <netcomp/reward.hpp>

#include <algorithm>

namespace netcomp
{

double subreward( double m, double target, double norm )
{
  auto const d = ( m - target ) / norm;
  return std::max( 1.0 - d * d, -1.0 );
}

double saturate( double r_sub, double r_min )
{
  return r_sub >= r_min ? 1.0 : r_sub;
}

double aggregate_reward( sim_outcome const& outcome, std::span<measurement_spec const> specs, double failure_reward )
{
  if ( !outcome.ok() )
  {
    return failure_reward;
  }
  if ( specs.empty() )
  {
    throw missing_measurement( "no measurement specs configured" );
  }
  double sum = 0.0;
  for ( auto const& s : specs )
  {
    auto const* m = outcome.find( s.name );
    if ( m == nullptr )
    {
      throw missing_measurement( "measurement '" + s.name + "' missing from simulator output" );
    }
    sum += saturate( subreward( m->value, s.target, s.norm ), s.r_min );
  }
  return sum / static_cast<double>( specs.size() );
}

} // namespace netcomp
