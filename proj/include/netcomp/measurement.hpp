#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace netcomp
{

enum class measurement_kind : std::uint8_t
{
  sampled_voltage,
  rise_time,
  fall_time,
  propagation_delay,
  supply_current_flag
};

std::string_view to_string( measurement_kind k );
std::optional<measurement_kind> measurement_kind_from_string( std::string_view s );

/*! \brief How one simulator metric becomes a subreward.
 *
 * `net`, `from_net`, `at` and `edge` only matter for SPICE decks:
 * sampled voltages read `net` at time `at`; rise/fall times use the
 * `edge`-th transition of `net`; delays run from time `at` (the 50%
 * point of the stimulus edge on `from_net`) to the next 50% crossing of
 * `net`.
 */
struct measurement_spec
{
  std::string name;
  measurement_kind kind{measurement_kind::sampled_voltage};
  double target{0.0};
  double norm{1.0};
  double r_min{1.0};

  std::string net;
  std::string from_net;
  double at{0.0};
  std::uint32_t edge{1};

  bool operator==( measurement_spec const& ) const = default;
};

struct measurement
{
  std::string name;
  measurement_kind kind{measurement_kind::sampled_voltage};
  double value{0.0};

  bool operator==( measurement const& ) const = default;
};

enum class sim_error : std::uint8_t
{
  timeout,
  non_convergence,
  parse_failure,
  invalid_circuit,
  contention,
  floating_output
};

std::string_view to_string( sim_error e );

/*! \brief Either a list of measurements or a simulator failure. */
class sim_outcome
{
public:
  sim_outcome( std::vector<measurement> m ) : v_( std::move( m ) ) {}
  sim_outcome( sim_error e ) : v_( e ) {}

  bool ok() const noexcept { return std::holds_alternative<std::vector<measurement>>( v_ ); }
  std::vector<measurement> const& measurements() const { return std::get<std::vector<measurement>>( v_ ); }
  sim_error error() const { return std::get<sim_error>( v_ ); }
  measurement const* find( std::string_view name ) const;

  bool operator==( sim_outcome const& ) const = default;

private:
  std::variant<std::vector<measurement>, sim_error> v_;
};

/*! \brief Piecewise-linear voltage source on one input net. */
struct stimulus
{
  std::string net;
  std::vector<std::pair<double, double>> points;

  bool operator==( stimulus const& ) const = default;
};

struct testbench
{
  double supply_voltage{1.8};
  std::vector<stimulus> stimuli;
  double load_capacitance{10e-15};
  double t_stop{0.0};
  double t_step{1e-12};
  std::vector<measurement_spec> measurements;
  /*! static supply current above this marks a rail short (amperes) */
  double short_current{1e-5};
  double timeout_s{30.0};

  bool operator==( testbench const& ) const = default;
};

} // namespace netcomp
