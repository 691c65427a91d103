#pragma once

#include <netcomp/rules_checks.hpp>

#include <cstdint>
#include <optional>

namespace netcomp
{

/*! \brief Episode limits and the application mode of each consistency check.
 *
 * A check may appear in several modes at once.
 */
struct sampler_config
{
  std::uint32_t max_steps{6};
  std::optional<std::uint32_t> min_components;
  std::optional<std::uint32_t> max_components;
  std::optional<std::uint32_t> min_internal_nets;
  std::optional<std::uint32_t> max_internal_nets;

  /*! stop is masked while any of these fails */
  check_set during_generation;
  /*! a stopped episode failing any of these is regenerated */
  check_set after_generation;
  /*! pass flags are fed to the policy heads */
  check_set as_input;

  std::uint32_t max_regeneration_trials{10};

  bool operator==( sampler_config const& ) const = default;
};

} // namespace netcomp
