#include <netcomp/measurement.hpp>

#include <array>

namespace netcomp
{

namespace
{
constexpr std::array<std::string_view, 5> measurement_names = {"sampled_voltage", "rise_time", "fall_time",
                                                               "propagation_delay", "supply_current_flag"};
constexpr std::array<std::string_view, 6> error_names = {"timeout",         "non_convergence", "parse_failure",
                                                         "invalid_circuit", "contention",      "floating_output"};
} // namespace

std::string_view to_string( measurement_kind k )
{
  return measurement_names.at( static_cast<std::size_t>( k ) );
}

std::optional<measurement_kind> measurement_kind_from_string( std::string_view s )
{
  for ( std::size_t i = 0; i < measurement_names.size(); ++i )
  {
    if ( measurement_names[i] == s )
    {
      return static_cast<measurement_kind>( i );
    }
  }
  return std::nullopt;
}

std::string_view to_string( sim_error e )
{
  return error_names.at( static_cast<std::size_t>( e ) );
}

measurement const* sim_outcome::find( std::string_view name ) const
{
  if ( !ok() )
  {
    return nullptr;
  }
  for ( auto const& m : measurements() )
  {
    if ( m.name == name )
    {
      return &m;
    }
  }
  return nullptr;
}

} // namespace netcomp
