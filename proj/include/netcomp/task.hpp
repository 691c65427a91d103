#pragma once

#include <netcomp/circuit_graph.hpp>
#include <netcomp/measurement.hpp>
#include <netcomp/ngspice.hpp>
#include <netcomp/rules_checks.hpp>
#include <netcomp/sampler_config.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netcomp
{

inline constexpr int task_schema_version = 1;

enum class learner_kind : std::uint8_t
{
  rloo,
  es,
  random
};

std::string_view to_string( learner_kind l );
std::optional<learner_kind> learner_from_string( std::string_view s );

struct train_config
{
  learner_kind learner{learner_kind::es};
  std::uint32_t batch{256};
  std::uint32_t steps{1024};
  double entropy_weight{0.01};
  /*! subtract the entropy term from the loss (bonus); false adds it as printed in the objective */
  bool entropy_bonus{true};
  double es_sigma{0.05};
  double peak_lr{1e-3};
  std::uint32_t warmup{5};
  double advantage_eps{1e-8};
  double advantage_clip{10.0};
  double adam_beta1{0.9};
  double adam_beta2{0.999};
  double adam_eps{1e-8};
  std::uint32_t hidden{64};
  std::uint32_t depth{8};
  double log_std_bias{-1.0};
  std::uint32_t workers{1};

  bool operator==( train_config const& ) const = default;
};

enum class backend_kind : std::uint8_t
{
  logic,
  ngspice
};

std::string_view to_string( backend_kind b );

struct truth_row
{
  std::vector<bool> inputs;
  std::vector<bool> outputs;

  bool operator==( truth_row const& ) const = default;
};

struct evaluator_config
{
  backend_kind backend{backend_kind::logic};
  double failure_reward{-1.0};

  /* logic backend */
  std::vector<truth_row> truth_table;
  double logic_r_min{0.9};

  /* ngspice backend; `bench.supply_voltage` is also the logic-high level */
  testbench bench;
  ngspice_config ngspice;

  bool operator==( evaluator_config const& ) const = default;
};

/*! \brief A synthesis task: nets, inventory, limits, rules, evaluator and training settings. */
struct task_spec
{
  int schema_version{task_schema_version};
  std::string name;
  net_declaration nets;
  std::vector<component_kind> inventory;
  sampler_config sampler;
  wiring_rule_set rules;
  evaluator_config evaluator;
  train_config train;

  /*! graph-model view; internal-net capacity is the configured maximum, else `max_steps` */
  circuit_domain domain() const;

  bool operator==( task_spec const& ) const = default;
};

/*! \brief Every invariant violation of `spec`, one message each; empty iff valid. */
std::vector<std::string> validate( task_spec const& spec );

/*! \brief Parses a task document; throws `parse_error`. Does not validate. */
task_spec parse_task( std::string_view json_text, std::string const& source = "<task>" );

/*! \brief Reads, parses and validates a task file; throws `parse_error` or `validation_error`. */
task_spec load_task( std::filesystem::path const& path );

std::string dump_task( task_spec const& spec );
void save_task( task_spec const& spec, std::filesystem::path const& path );

} // namespace netcomp
