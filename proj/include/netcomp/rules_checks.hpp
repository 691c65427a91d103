#pragma once

#include <netcomp/circuit_graph.hpp>

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace netcomp
{

/* Graph consistency checks, in their fixed evaluation order. */
enum class check_kind : std::uint8_t
{
  connected_io = 0,
  io_paths = 1,
  no_floating_nets = 2,
  no_isolated_subgraphs = 3
};

inline constexpr std::array<check_kind, 4> all_checks = {check_kind::connected_io, check_kind::io_paths,
                                                         check_kind::no_floating_nets,
                                                         check_kind::no_isolated_subgraphs};

std::string_view to_string( check_kind c );
std::optional<check_kind> check_kind_from_string( std::string_view s );

/*! \brief Subset of checks as a bit set; iteration is always in enumeration order. */
class check_set
{
public:
  check_set() = default;
  check_set( std::initializer_list<check_kind> checks )
  {
    for ( auto c : checks )
    {
      insert( c );
    }
  }

  static check_set all() { return {check_kind::connected_io, check_kind::io_paths, check_kind::no_floating_nets, check_kind::no_isolated_subgraphs}; }

  void insert( check_kind c ) { bits_ |= 1u << static_cast<unsigned>( c ); }
  bool contains( check_kind c ) const noexcept { return ( bits_ >> static_cast<unsigned>( c ) ) & 1u; }
  bool empty() const noexcept { return bits_ == 0u; }
  std::size_t size() const noexcept { return static_cast<std::size_t>( __builtin_popcount( bits_ ) ); }
  std::vector<check_kind> members() const;

  bool operator==( check_set const& ) const = default;

private:
  unsigned bits_{0u};
};

struct check_report
{
  std::vector<std::pair<check_kind, bool>> results;

  bool passed() const noexcept;
  std::size_t size() const noexcept { return results.size(); }
  /*! \brief Pass flags as 0/1 features, in evaluation order. */
  std::vector<double> as_features() const;
};

bool check_connected_io( circuit_graph const& g );
bool check_io_paths( circuit_graph const& g );
bool check_no_floating_nets( circuit_graph const& g );
bool check_no_isolated_subgraphs( circuit_graph const& g );

bool run_check( circuit_graph const& g, check_kind c );
check_report run_checks( circuit_graph const& g, check_set const& subset );

struct wiring_rule_set
{
  bool bulk_to_rail{true};
  bool no_rail_to_gate{true};
  bool inputs_to_gate{false};
  bool outputs_to_drain_source{false};

  static wiring_rule_set none() { return {false, false, false, false}; }

  bool operator==( wiring_rule_set const& ) const = default;
};

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/*! \brief Additive logit mask of shape (#nets x #terminals), entries in {0, -inf}.
 *
 * Rows follow `g.net_nodes()`. Throws `rule_conflict` when a terminal
 * column ends up with every row masked.
 */
Eigen::MatrixXd wiring_mask( circuit_graph const& g, component_kind const& kind, wiring_rule_set const& rules );

} // namespace netcomp
