#pragma once

#include <netcomp/circuit_graph.hpp>
#include <netcomp/measurement.hpp>
#include <netcomp/netlist.hpp>
#include <netcomp/ngspice.hpp>

#include <atomic>
#include <filesystem>
#include <memory>
#include <vector>

namespace netcomp
{

struct task_spec;
struct truth_row;

struct evaluation
{
  sim_outcome outcome{sim_error::invalid_circuit};
  double reward{-1.0};
};

/*! \brief Scores finished circuits. Implementations are safe to call concurrently. */
class evaluator
{
public:
  virtual ~evaluator() = default;
  virtual evaluation evaluate( circuit_graph const& g ) const = 0;
  virtual std::vector<measurement_spec> const& specs() const noexcept = 0;
  virtual double failure_reward() const noexcept = 0;
};

/*! \brief One sampled-voltage spec per output and truth-table row plus the rail-short spec.
 *
 * A short yields subreward 1 - (1 / 0.5)^2, which clamps to -1.
 */
std::vector<measurement_spec> logic_specs( net_declaration const& nets, std::vector<truth_row> const& table, double vdd,
                                           double r_min );

class logic_evaluator : public evaluator
{
public:
  logic_evaluator( circuit_domain domain, std::vector<truth_row> const& table, double vdd, double r_min,
                   double failure_reward );

  evaluation evaluate( circuit_graph const& g ) const override;
  std::vector<measurement_spec> const& specs() const noexcept override { return specs_; }
  double failure_reward() const noexcept override { return failure_reward_; }

private:
  circuit_domain domain_;
  std::vector<std::vector<bool>> vectors_;
  double vdd_;
  double failure_reward_;
  std::vector<measurement_spec> specs_;
};

class ngspice_evaluator : public evaluator
{
public:
  ngspice_evaluator( circuit_domain domain, testbench bench, ngspice_config cfg, std::filesystem::path workroot,
                     double failure_reward );

  evaluation evaluate( circuit_graph const& g ) const override;
  std::vector<measurement_spec> const& specs() const noexcept override { return bench_.measurements; }
  double failure_reward() const noexcept override { return failure_reward_; }

private:
  circuit_domain domain_;
  testbench bench_;
  ngspice_config cfg_;
  std::filesystem::path workroot_;
  double failure_reward_;
  mutable std::atomic<std::uint64_t> counter_{0};
};

/*! \brief Evaluator selected by the task; ngspice paths honour the environment overrides. */
std::unique_ptr<evaluator> make_evaluator( task_spec const& task, std::filesystem::path const& workroot );

} // namespace netcomp
