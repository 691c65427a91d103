#pragma once

#include <netcomp/circuit_graph.hpp>
#include <netcomp/rules_checks.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace netcomp
{

using big_int = boost::multiprecision::cpp_int;
using big_rational = boost::multiprecision::cpp_rational;

/*! \brief Bell number B_n from the Bell triangle. */
big_int bell( unsigned n );

struct bounds_query
{
  net_declaration nets;
  std::vector<component_kind> inventory;
  std::uint32_t steps{1};
  wiring_rule_set rules;
  /*! the terminating stop action counts against `steps` */
  bool stop_consumes_step{true};
  /*! internal-net cap; unlimited when empty */
  std::optional<std::uint32_t> max_internal_nets;
};

struct bounds_point
{
  std::uint32_t steps{0};
  big_int lower;
  big_int upper;
};

/*! \brief Allowed net count per terminal of `kind` when `internal` internal nets exist. */
std::vector<std::uint64_t> allowed_nets( net_declaration const& nets, component_kind const& kind,
                                         wiring_rule_set const& rules, std::uint32_t internal );

/*! \brief Bounds for every step budget 1..q.steps.
 *
 * The upper bound counts distinct action sequences ending in stop that
 * place at least one component, weighting each add-component by the
 * product of allowed nets over its terminals. The lower bound divides
 * each sequence length L by L! and every MOSFET by 2 (source/drain swap),
 * floored and kept at least 1 when the upper bound is positive.
 */
std::vector<bounds_point> topology_bounds( bounds_query const& q );

struct rule_effect
{
  std::vector<bounds_point> rules_off;
  std::vector<bounds_point> rules_on;
};

/*! \brief `topology_bounds` without any wiring rule and with `q.rules`. */
rule_effect rule_effect_curve( bounds_query const& q );

/*! \brief Step multiset of a reference circuit. */
struct gate_recipe
{
  /*! instances per inventory kind */
  std::vector<std::uint32_t> kind_counts;
  std::uint32_t internal_nets{0};
};

/*! \brief Bounds over the orderings of exactly the recipe's steps, followed by stop. */
bounds_point recipe_bounds( bounds_query const& q, gate_recipe const& recipe );

} // namespace netcomp
