#pragma once

#include <netcomp/circuit_graph.hpp>
#include <netcomp/measurement.hpp>
#include <netcomp/netlist.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace netcomp
{

enum class logic_level : std::uint8_t
{
  zero,
  one,
  x, /* driven to both values */
  z  /* undriven */
};

enum class vector_status : std::uint8_t
{
  ok,
  non_convergence,
  invalid_circuit,
  contention,
  floating_output
};

/*! \brief Settled state of one input vector. */
struct vector_result
{
  vector_status status{vector_status::ok};
  /*! per declared output; only meaningful when `status == ok` */
  std::vector<logic_level> outputs;
  /*! a conducting path joins sources of different value */
  bool short_path{false};

  bool operator==( vector_result const& ) const = default;
};

/*! \brief All 2^n input vectors in counting order, first input as the most significant bit. */
std::vector<std::vector<bool>> all_input_vectors( std::size_t num_inputs );

/*! \brief Switch-level settle of one input vector.
 *
 * Ground drives 0, supplies drive 1, inputs drive their vector bit.
 * NMOS conducts on a gate at 1, PMOS on a gate at 0; a gate at X or Z
 * leaves the device open.  Gate feedback is resolved by enumerating
 * switch states per strongly connected block of channel groups; zero or
 * several consistent states give `non_convergence`.
 */
vector_result logic_settle( netlist const& n, std::vector<component_kind> const& inventory,
                            net_declaration const& nets, std::vector<bool> const& inputs );

/*! \brief Name of the sampled-voltage measurement of output `out` under vector `i`. */
std::string logic_voltage_name( std::string const& out, std::size_t i );

inline constexpr char const* supply_short_name = "supply_short";

/*! \brief Folds per-vector results into one outcome.
 *
 * The first vector with a failure decides the error. Otherwise returns
 * one sampled voltage (0 or `vdd`) per output and vector, plus the
 * supply-short flag.
 */
sim_outcome summarize_vectors( std::vector<vector_result> const& results, net_declaration const& nets, double vdd );

sim_outcome logic_evaluate( netlist const& n, std::vector<component_kind> const& inventory, net_declaration const& nets,
                            std::vector<std::vector<bool>> const& vectors, double vdd );

} // namespace netcomp
