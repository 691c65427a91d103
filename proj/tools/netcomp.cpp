#include <netcomp/errors.hpp>
#include <netcomp/harness.hpp>
#include <netcomp/ngspice.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace
{

using namespace netcomp;

constexpr int exit_config = 2;
constexpr int exit_runtime = 3;

/*! \brief Flags shared by run and study that modify the loaded task. */
struct task_overrides
{
  std::string task;
  std::optional<std::string> evaluator;
  std::optional<std::string> ngspice_bin;
  std::optional<std::string> pdk_include;
  std::optional<double> timeout_s;
  std::optional<std::uint32_t> steps;
  std::optional<std::uint32_t> batch;
  std::optional<double> peak_lr;
  std::optional<double> es_sigma;
  std::optional<std::uint32_t> max_steps;
  std::optional<std::vector<std::string>> during;
  std::optional<std::vector<std::string>> after;
  std::optional<std::vector<std::string>> as_input;

  void add_to( CLI::App* app )
  {
    app->add_option( "--task", task, "task file" )->required()->check( CLI::ExistingFile );
    app->add_option( "--evaluator", evaluator, "logic or ngspice" )->check( CLI::IsMember( {"logic", "ngspice"} ) );
    app->add_option( "--ngspice-bin", ngspice_bin, "ngspice executable" );
    app->add_option( "--pdk-include", pdk_include, "PDK model include file" );
    app->add_option( "--timeout-s", timeout_s, "per-simulation timeout" );
    app->add_option( "--steps", steps, "training steps" );
    app->add_option( "--batch", batch, "episodes per step" );
    app->add_option( "--peak-lr", peak_lr, "peak learning rate" );
    app->add_option( "--es-sigma", es_sigma, "ES perturbation scale" );
    app->add_option( "--max-steps", max_steps, "sampling steps per episode" );
    app->add_option( "--during-generation", during, "checks masking stop" )->expected( 0, -1 );
    app->add_option( "--after-generation", after, "checks triggering regeneration" )->expected( 0, -1 );
    app->add_option( "--as-input", as_input, "checks fed to the policy" )->expected( 0, -1 );
  }

  /*! \brief Applies the overrides and records each as flag -> value. */
  task_spec apply( std::map<std::string, std::string>& record ) const
  {
    auto t = load_task( task );
    auto note = [&]( std::string const& k, auto const& v ) {
      std::ostringstream os;
      os << v;
      record[k] = os.str();
    };
    if ( evaluator )
    {
      t.evaluator.backend = *evaluator == "ngspice" ? backend_kind::ngspice : backend_kind::logic;
      note( "evaluator", *evaluator );
    }
    if ( ngspice_bin )
    {
      t.evaluator.ngspice.binary = *ngspice_bin;
      note( "ngspice-bin", *ngspice_bin );
    }
    if ( pdk_include )
    {
      t.evaluator.ngspice.pdk_include = *pdk_include;
      note( "pdk-include", *pdk_include );
    }
    if ( timeout_s )
    {
      t.evaluator.bench.timeout_s = *timeout_s;
      note( "timeout-s", *timeout_s );
    }
    if ( steps )
    {
      t.train.steps = *steps;
      note( "steps", *steps );
    }
    if ( batch )
    {
      t.train.batch = *batch;
      note( "batch", *batch );
    }
    if ( peak_lr )
    {
      t.train.peak_lr = *peak_lr;
      note( "peak-lr", *peak_lr );
    }
    if ( es_sigma )
    {
      t.train.es_sigma = *es_sigma;
      note( "es-sigma", *es_sigma );
    }
    if ( max_steps )
    {
      t.sampler.max_steps = *max_steps;
      note( "max-steps", *max_steps );
    }
    auto checks = [&]( std::string const& flag, std::optional<std::vector<std::string>> const& names, check_set& out ) {
      if ( !names )
      {
        return;
      }
      out = {};
      std::string joined;
      for ( auto const& n : *names )
      {
        auto c = check_kind_from_string( n );
        if ( !c )
        {
          throw parse_error( "--" + flag, "unknown check '" + n + "'" );
        }
        out.insert( *c );
        joined += ( joined.empty() ? "" : "," ) + n;
      }
      record[flag] = joined;
    };
    checks( "during-generation", during, t.sampler.during_generation );
    checks( "after-generation", after, t.sampler.after_generation );
    checks( "as-input", as_input, t.sampler.as_input );

    if ( auto v = validate( t ); !v.empty() )
    {
      throw validation_error( v );
    }
    if ( t.evaluator.backend == backend_kind::ngspice &&
         !ngspice_available( apply_env_overrides( t.evaluator.ngspice ) ) )
    {
      throw validation_error( {"ngspice backend requested but no ngspice executable was found"} );
    }
    return t;
  }
};

learner_kind parse_learner( std::string const& s )
{
  auto l = learner_from_string( s );
  if ( !l )
  {
    throw parse_error( "--learner", "unknown learner '" + s + "'" );
  }
  return *l;
}

int cmd_run( task_overrides const& o, std::string const& learner, std::uint64_t seed, std::string const& out,
             std::optional<std::uint32_t> workers )
{
  std::map<std::string, std::string> record;
  auto t = o.apply( record );
  t.train.learner = parse_learner( learner );
  if ( workers )
  {
    t.train.workers = *workers;
  }
  auto const dir = std::filesystem::path( out );
  auto const eval = make_evaluator( t, dir / "sim" );
  policy_params params;
  training_hooks hooks;
  hooks.final_params = &params;
  auto r = run_training( t, *eval, seed, hooks );
  r.overrides = record;
  persist_run( r, t, dir );
  if ( t.train.learner != learner_kind::random )
  {
    save_checkpoint( params, dir / "params.txt" );
  }
  std::cout << "best reward " << r.best_reward;
  if ( r.success() )
  {
    std::cout << ", success after " << *r.samples_to_success << " samples";
  }
  std::cout << "\nrun written to " << dir.string() << '\n';
  return 0;
}

int cmd_study( task_overrides const& o, std::vector<std::string> const& learners, std::uint32_t seeds,
               std::uint64_t first_seed, std::string const& out, std::uint32_t workers )
{
  std::map<std::string, std::string> record;
  auto const t = o.apply( record );
  study_options opt;
  opt.learners.clear();
  for ( auto const& l : learners )
  {
    opt.learners.push_back( parse_learner( l ) );
  }
  if ( seeds < 1 )
  {
    throw validation_error( {"--seeds must be at least 1"} );
  }
  opt.seeds = seeds;
  opt.first_seed = first_seed;
  opt.out = out;
  opt.workers = workers;
  auto const runs = run_study( t, opt, &std::cerr );
  std::cout << summary_table( summarize( runs ) );
  return 0;
}

int cmd_bounds( std::string const& task, std::optional<std::uint32_t> max_steps, std::optional<std::string> const& out )
{
  auto const t = load_task( task );
  auto const q = task_bounds_query( t, max_steps.value_or( t.sampler.max_steps ) );
  auto const table = bounds_table( rule_effect_curve( q ) );
  if ( out )
  {
    std::ofstream( *out ) << table;
  }
  else
  {
    std::cout << table;
  }
  return 0;
}

int cmd_validate( std::string const& task )
{
  auto const t = load_task( task );
  std::cout << t.name << ": ok\n";
  return 0;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{"netcomp: graph-based circuit topology synthesis"};
  app.require_subcommand( 1 );

  task_overrides run_o, study_o;
  std::string learner = "es";
  std::uint64_t seed = 0;
  std::string run_out = "run";
  std::optional<std::uint32_t> run_workers;
  auto* run = app.add_subcommand( "run", "train one learner on a task" );
  run_o.add_to( run );
  run->add_option( "--learner", learner, "random, rloo or es" );
  run->add_option( "--seed", seed, "run seed" );
  run->add_option( "--out", run_out, "output directory" );
  run->add_option( "--workers", run_workers, "evaluation threads" );

  std::vector<std::string> learners{"random", "rloo", "es"};
  std::uint32_t seeds = 3;
  std::uint64_t first_seed = 0;
  std::string study_out = "study";
  std::uint32_t study_workers = 1;
  auto* study = app.add_subcommand( "study", "run learners over seeds and summarize" );
  study_o.add_to( study );
  study->add_option( "--learner", learners, "learners to compare" )->expected( 1, -1 );
  study->add_option( "--seeds", seeds, "seeds per learner" );
  study->add_option( "--seed", first_seed, "first seed" );
  study->add_option( "--out", study_out, "output directory" );
  study->add_option( "--workers", study_workers, "concurrent runs" );

  std::string bounds_task;
  std::optional<std::uint32_t> bounds_steps;
  std::optional<std::string> bounds_out;
  auto* bounds = app.add_subcommand( "bounds", "design-space bounds with and without wiring rules" );
  bounds->add_option( "--task", bounds_task, "task file" )->required()->check( CLI::ExistingFile );
  bounds->add_option( "--max-steps", bounds_steps, "largest step budget" );
  bounds->add_option( "--out", bounds_out, "output file" );

  std::string validate_task;
  auto* val = app.add_subcommand( "validate", "check a task file" );
  val->add_option( "--task", validate_task, "task file" )->required()->check( CLI::ExistingFile );

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::ParseError const& e )
  {
    auto const code = app.exit( e );
    return code == 0 ? 0 : exit_config;
  }

  try
  {
    if ( run->parsed() )
    {
      return cmd_run( run_o, learner, seed, run_out, run_workers );
    }
    if ( study->parsed() )
    {
      return cmd_study( study_o, learners, seeds, first_seed, study_out, study_workers );
    }
    if ( bounds->parsed() )
    {
      return cmd_bounds( bounds_task, bounds_steps, bounds_out );
    }
    return cmd_validate( validate_task );
  }
  catch ( parse_error const& e )
  {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  }
  catch ( validation_error const& e )
  {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  }
  catch ( std::exception const& e )
  {
    std::cerr << "runtime error: " << e.what() << '\n';
    return exit_runtime;
  }
}
