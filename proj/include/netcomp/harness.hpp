#pragma once

#include <netcomp/design_space.hpp>
#include <netcomp/task.hpp>
#include <netcomp/training.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netcomp
{

inline constexpr int run_record_version = 1;

std::string run_record_to_json( run_record const& r );
/*! \brief Throws `parse_error`. */
run_record run_record_from_json( std::string_view text );

/*! \brief Writes task.json, run.json, rewards.tsv and best.sp into `dir`. */
void persist_run( run_record const& r, task_spec const& task, std::filesystem::path const& dir );
/*! \brief Reads `dir/run.json`; empty when absent or unreadable. */
std::optional<run_record> load_run( std::filesystem::path const& dir );

/*! \brief Directory of one study job: `<root>/<learner>/seed_<seed>`. */
std::filesystem::path run_dir( std::filesystem::path const& root, learner_kind l, std::uint64_t seed );

struct learner_summary
{
  learner_kind learner{learner_kind::es};
  std::size_t runs{0};
  std::size_t successes{0};
  /*! medians of samples-to-success over successful runs; empty without successes */
  std::optional<double> median_samples_success;
  /*! medians over all runs, failures counted at the full sample budget */
  double median_samples_all{0.0};
  std::optional<double> median_wall_success;
  double median_wall_all{0.0};
  double mean_train_reward{0.0};
  /*! 1 - best reward per run, ascending */
  std::vector<double> gaps;
};

double median( std::vector<double> v );

/*! \brief Per-learner statistics in the order learners first appear in `runs`. */
std::vector<learner_summary> summarize( std::vector<run_record> const& runs );

/*! \brief Tab-separated medians table, one row per learner. */
std::string summary_table( std::vector<learner_summary> const& s );
/*! \brief Tab-separated optimality gaps, one column per learner, sorted ascending. */
std::string gap_table( std::vector<learner_summary> const& s );
/*! \brief Tab-separated per-run samples and wall-clock, for scatter plots. */
std::string runs_table( std::vector<run_record> const& runs );

struct study_options
{
  std::vector<learner_kind> learners{learner_kind::random, learner_kind::rloo, learner_kind::es};
  std::uint32_t seeds{1};
  std::uint64_t first_seed{0};
  std::filesystem::path out{"study"};
  /*! concurrent runs */
  std::uint32_t workers{1};
};

/*! \brief Runs every learner and seed, reusing persisted runs, and writes the summary files. */
std::vector<run_record> run_study( task_spec const& task, study_options const& opt, std::ostream* log = nullptr );

/*! \brief Four columns per step 1..s: lower/upper without rules, lower/upper with the task rules. */
std::string bounds_table( rule_effect const& e );

/*! \brief Text checkpoint: a version line, the layout table, then the flat vector. */
void save_checkpoint( policy_params const& p, std::filesystem::path const& path );
/*! \brief Reads a checkpoint written for `dims`; throws `parse_error` on a layout mismatch. */
policy_params load_checkpoint( std::filesystem::path const& path, policy_dims const& dims );

bounds_query task_bounds_query( task_spec const& task, std::uint32_t steps );

} // namespace netcomp
