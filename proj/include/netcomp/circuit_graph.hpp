#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netcomp
{

enum class net_kind : std::uint8_t
{
  ground = 0,
  internal = 1,
  input = 2,
  output = 3,
  supply = 4
};

inline constexpr std::size_t num_net_kinds = 5;

std::string_view to_string( net_kind k );

/*! \brief Electrical role of a component; drives the MOSFET-specific wiring rules. */
enum class device_role : std::uint8_t
{
  nmos,
  pmos,
  other
};

enum class terminal_role : std::uint8_t
{
  drain,
  gate,
  source,
  bulk,
  other
};

std::string_view to_string( device_role r );
std::string_view to_string( terminal_role r );

struct parameter_spec
{
  std::string name;
  double min{0.0};
  double max{1.0};
  std::string unit;

  bool operator==( parameter_spec const& ) const = default;
};

/*! \brief An inventory entry: terminal list, sizing ranges and SPICE model name. */
struct component_kind
{
  std::string name;
  std::string model;
  device_role role{device_role::other};
  std::vector<std::string> terminal_names;
  std::vector<terminal_role> terminal_roles;
  std::vector<parameter_spec> params;

  std::size_t num_terminals() const noexcept { return terminal_names.size(); }
  std::size_t num_params() const noexcept { return params.size(); }

  /*! \brief Column of the first terminal with role `r`, or -1. */
  int terminal_with_role( terminal_role r ) const noexcept;
  bool is_mosfet() const noexcept { return role != device_role::other; }

  bool operator==( component_kind const& ) const = default;
};

/*! \brief Standard 4-terminal MOSFET kind with terminal order (d, g, s, b). */
component_kind make_mosfet( std::string name, std::string model, device_role role,
                            double w_min, double w_max, double l_min, double l_max );

struct net_declaration
{
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> supplies;
  std::string ground{"gnd"};

  std::size_t num_externals() const noexcept { return inputs.size() + outputs.size() + supplies.size() + 1u; }

  bool operator==( net_declaration const& ) const = default;
};

/*! \brief The parts of a task the graph model needs: nets, inventory and the internal-net capacity. */
struct circuit_domain
{
  net_declaration nets;
  std::vector<component_kind> inventory;
  std::uint32_t max_internal_nets{0};
};

struct node_record
{
  bool is_net{true};

  /* net nodes */
  net_kind kind{net_kind::ground};
  std::uint32_t index{0};

  /* terminal nodes */
  std::uint32_t terminal{0};
  std::uint32_t instance{0};
  std::uint32_t component{0};

  bool is_terminal() const noexcept { return !is_net; }
};

struct component_instance
{
  std::uint32_t kind{0};
  std::vector<double> params;
  std::vector<std::uint32_t> terminal_nodes;
  /*! net node id each terminal is wired to */
  std::vector<std::uint32_t> nets;
};

using edge = std::pair<std::uint32_t, std::uint32_t>;

/*! \brief Nets-and-terminals-as-nodes graph of a (partial) circuit.
 *
 * Every component instance contributes one node per terminal; those
 * nodes form a clique and each is tied by exactly one edge to a net
 * node.  Edges are stored once, in insertion order.
 */
class circuit_graph
{
public:
  circuit_graph() = default;

  std::uint32_t add_net( net_kind kind, std::uint32_t index );
  std::uint32_t add_internal_net();

  /*! \brief Appends a component instance.
   *
   * `net_nodes[j]` is the node id terminal `j` is wired to. Throws
   * `assignment_to_non_net`, `param_out_of_range` or `shape_mismatch`.
   */
  std::uint32_t add_component( std::vector<component_kind> const& inventory, std::uint32_t kind,
                               std::span<double const> params,
                               std::span<std::uint32_t const> net_nodes );

  std::vector<node_record> const& nodes() const noexcept { return nodes_; }
  std::vector<edge> const& edges() const noexcept { return edges_; }
  std::vector<component_instance> const& instances() const noexcept { return instances_; }
  /*! net node ids in creation order; row order of the terminal-logit matrix */
  std::vector<std::uint32_t> const& net_nodes() const noexcept { return net_nodes_; }

  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::size_t num_nets() const noexcept { return net_nodes_.size(); }
  std::size_t num_components() const noexcept { return instances_.size(); }
  std::uint32_t num_internal_nets() const noexcept { return internal_count_; }
  std::uint32_t degree( std::uint32_t node ) const { return degree_.at( node ); }

  /*! \brief Row in `net_nodes()` of a net node id, or -1. */
  int net_row( std::uint32_t node ) const noexcept;

  /*! \brief Symmetric adjacency lists. */
  std::vector<std::vector<std::uint32_t>> adjacency() const;

  bool operator==( circuit_graph const& other ) const;

private:
  std::vector<node_record> nodes_;
  std::vector<edge> edges_;
  std::vector<component_instance> instances_;
  std::vector<std::uint32_t> net_nodes_;
  std::vector<std::uint32_t> degree_;
  std::uint32_t internal_count_{0};
};

/*! \brief Initial graph: one node per input, output and supply net, then ground. */
circuit_graph new_task_graph( net_declaration const& nets );

/*! \brief Column layout of the node feature matrix.
 *
 * [type flag | net kind (5) | net index | terminal index | component kind | normalized params]
 */
struct feature_layout
{
  std::size_t net_index_capacity{0};
  std::size_t max_terminals{0};
  std::size_t num_kinds{0};
  std::size_t max_params{0};

  std::size_t kind_offset() const noexcept { return 1u; }
  std::size_t net_index_offset() const noexcept { return 1u + num_net_kinds; }
  std::size_t terminal_offset() const noexcept { return net_index_offset() + net_index_capacity; }
  std::size_t component_offset() const noexcept { return terminal_offset() + max_terminals; }
  std::size_t param_offset() const noexcept { return component_offset() + num_kinds; }
  std::size_t width() const noexcept { return param_offset() + max_params; }
};

feature_layout make_feature_layout( circuit_domain const& domain );

struct feature_matrix
{
  Eigen::MatrixXd x;
  /*! 2 x n_et, each undirected edge once */
  Eigen::Matrix<std::uint32_t, 2, Eigen::Dynamic> edge_index;
};

feature_matrix encode( circuit_graph const& g, circuit_domain const& domain );

} // namespace netcomp
