#pragma once

#include <netcomp/circuit_graph.hpp>
#include <netcomp/measurement.hpp>
#include <netcomp/netlist.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace netcomp
{

struct ngspice_config
{
  std::string binary{"ngspice"};
  /*! model library pulled in with `.include`; empty to skip */
  std::string pdk_include;
  /*! keep decks and logs of successful runs as well */
  bool keep_workdirs{false};

  bool operator==( ngspice_config const& ) const = default;
};

inline constexpr char const* ngspice_bin_env = "GRACO_NGSPICE_BIN";
inline constexpr char const* pdk_include_env = "GRACO_PDK_INCLUDE";

/*! \brief Replaces binary and include path with the environment overrides when set. */
ngspice_config apply_env_overrides( ngspice_config c );

/*! \brief Full transient deck: DUT subcircuit, rails, stimuli, loads and `.meas` lines. */
std::string make_deck( netlist const& n, circuit_domain const& domain, testbench const& tb,
                       ngspice_config const& cfg );

/*! \brief Reads `name = value` lines for every spec from batch-mode output.
 *
 * Names are matched case-insensitively because ngspice lower-cases
 * them. Supply-current specs are turned into a 0/1 flag against
 * `tb.short_current`. Missing values give `non_convergence`, unreadable
 * numbers `parse_failure`.
 */
sim_outcome parse_measurements( std::string_view output, testbench const& tb );

/*! \brief Writes the deck into `workdir`, runs ngspice in batch mode and parses the result. */
sim_outcome ngspice_run( netlist const& n, circuit_domain const& domain, testbench const& tb,
                         ngspice_config const& cfg, std::filesystem::path const& workdir );

/*! \brief Whether `cfg.binary` resolves to an executable. */
bool ngspice_available( ngspice_config const& cfg );

} // namespace netcomp
