#pragma once

#include <netcomp/circuit_graph.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace netcomp
{

struct device
{
  std::string name;
  std::uint32_t kind{0};
  std::vector<double> params;
  /*! net name per terminal, in the kind's terminal order */
  std::vector<std::string> nets;

  bool operator==( device const& ) const = default;
};

/*! \brief Flat device list plus the table of every net name (unused internal nets included). */
struct netlist
{
  std::vector<std::string> net_names;
  std::vector<device> devices;

  bool operator==( netlist const& ) const = default;
};

inline constexpr std::string_view spice_ground = "0";

/*! \brief SPICE name of a net node: task names for externals, `0` for ground, `net<k>` for internals. */
std::string net_name( node_record const& n, net_declaration const& nets );

/*! \brief Rounds to the 6 significant digits used in emitted decks. */
double round_to_spice_precision( double v );

/*! \brief Converts a graph into a netlist; devices follow instance creation order. */
netlist graph_to_netlist( circuit_graph const& g, net_declaration const& nets );

/*! \brief Rebuilds a graph from a netlist produced by `graph_to_netlist`. */
circuit_graph graph_from_netlist( netlist const& n, circuit_domain const& domain );

/*! \brief Emits the netlist as one `.subckt` block named `cell` with the external pins. */
std::string emit_spice( netlist const& n, circuit_domain const& domain, std::string const& cell );

/*! \brief Parses text written by `emit_spice`. Throws `parse_error`. */
netlist parse_spice( std::string_view text, circuit_domain const& domain );

} // namespace netcomp
