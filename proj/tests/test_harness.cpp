#include "support.hpp"

#include <netcomp/errors.hpp>
#include <netcomp/harness.hpp>

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace netcomp;
using namespace netcomp::test;

namespace
{

std::string read_file( std::filesystem::path const& p )
{
  std::ifstream in( p );
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of( std::string const& text )
{
  std::vector<std::string> out;
  std::istringstream is( text );
  for ( std::string l; std::getline( is, l ); )
  {
    out.push_back( l );
  }
  return out;
}

run_record make_record( learner_kind l, std::uint64_t seed, std::optional<std::uint64_t> success, double best,
                        double wall )
{
  run_record r;
  r.task = "inverter";
  r.learner = l;
  r.seed = seed;
  r.batch = 4;
  r.step_budget = 3;
  r.overrides = {{"peak-lr", "0.03"}};
  r.rewards = {{-1.0, 0.5, -1.0, 0.25}, {best, -1.0, 0.0, 0.0}};
  r.best_trajectory = {0.5, std::max( 0.5, best )};
  r.best_reward = std::max( 0.5, best );
  r.best_netlist = ".subckt inverter in out supply\n.ends inverter\n";
  r.samples_to_success = success;
  r.total_samples = 8;
  r.wall_clock_s = wall;
  return r;
}

int run_cli( std::string const& args, std::filesystem::path const& log )
{
  auto const cmd = std::string( NETCOMP_CLI ) + " " + args + " > " + log.string() + " 2>&1";
  auto const status = std::system( cmd.c_str() );
  return WIFEXITED( status ) ? WEXITSTATUS( status ) : -1;
}

task_spec tiny_task()
{
  auto t = bundled_task( "inverter" );
  t.train.hidden = 8;
  t.train.depth = 2;
  t.train.batch = 4;
  t.train.steps = 3;
  return t;
}

} // namespace

TEST_CASE( "run records round trip through json" )
{
  auto const a = make_record( learner_kind::rloo, 3, 5, 1.0, 0.25 );
  auto const text = run_record_to_json( a );
  auto const b = run_record_from_json( text );
  CHECK( b.task == a.task );
  CHECK( b.learner == a.learner );
  CHECK( b.seed == a.seed );
  CHECK( b.overrides == a.overrides );
  CHECK( b.rewards == a.rewards );
  CHECK( b.best_trajectory == a.best_trajectory );
  CHECK( b.best_reward == a.best_reward );
  CHECK( b.best_netlist == a.best_netlist );
  CHECK( b.samples_to_success == a.samples_to_success );
  CHECK( b.total_samples == a.total_samples );
  CHECK( b.wall_clock_s == a.wall_clock_s );
  CHECK( run_record_to_json( b ) == text );

  auto const failed = make_record( learner_kind::es, 1, std::nullopt, 0.1, 1.0 );
  CHECK_FALSE( run_record_from_json( run_record_to_json( failed ) ).samples_to_success );

  CHECK_THROWS_AS( run_record_from_json( "{" ), parse_error );
  CHECK_THROWS_AS( run_record_from_json( "{\"version\": 99}" ), parse_error );
}

TEST_CASE( "persisted runs" )
{
  auto const dir = scratch_dir( "persist" );
  auto const task = bundled_task( "inverter" );
  auto const r = make_record( learner_kind::es, 2, std::nullopt, 0.75, 2.0 );
  CHECK_FALSE( load_run( dir / "nothing" ) );
  persist_run( r, task, dir / "run" );
  for ( auto const* f : {"task.json", "run.json", "rewards.tsv", "best.sp"} )
  {
    CHECK( std::filesystem::exists( dir / "run" / f ) );
  }
  CHECK_FALSE( std::filesystem::exists( dir / "run" / "run.json.tmp" ) );
  CHECK( load_task( dir / "run" / "task.json" ) == task );
  CHECK( read_file( dir / "run" / "best.sp" ) == r.best_netlist );
  auto const rows = lines_of( read_file( dir / "run" / "rewards.tsv" ) );
  REQUIRE( rows.size() == 3 );
  CHECK( rows[0] == "step\tmean\tmax\tbest" );
  auto const back = load_run( dir / "run" );
  REQUIRE( back );
  CHECK( back->rewards == r.rewards );

  std::ofstream( dir / "run" / "run.json" ) << "garbage";
  CHECK_FALSE( load_run( dir / "run" ) );

  CHECK( run_dir( "root", learner_kind::rloo, 7 ) == std::filesystem::path( "root/rloo/seed_7" ) );
}

TEST_CASE( "summaries match a direct recomputation" )
{
  CHECK( median( {3.0, 1.0, 2.0} ) == 2.0 );
  CHECK( median( {4.0, 1.0, 2.0, 3.0} ) == 2.5 );

  std::vector<run_record> runs{make_record( learner_kind::es, 0, 5, 1.0, 1.0 ),
                               make_record( learner_kind::random, 0, std::nullopt, 0.2, 4.0 ),
                               make_record( learner_kind::es, 1, 2, 1.0, 3.0 ),
                               make_record( learner_kind::es, 2, std::nullopt, 0.8, 2.0 ),
                               make_record( learner_kind::random, 1, std::nullopt, 0.6, 5.0 )};
  auto const s = summarize( runs );
  REQUIRE( s.size() == 2 );
  CHECK( s[0].learner == learner_kind::es );
  CHECK( s[1].learner == learner_kind::random );

  for ( auto const& ls : s )
  {
    std::vector<double> success, all, wall_success, wall_all, gaps;
    double reward_sum = 0.0;
    std::size_t reward_count = 0;
    for ( auto const& r : runs )
    {
      if ( r.learner != ls.learner )
      {
        continue;
      }
      if ( r.samples_to_success )
      {
        success.push_back( static_cast<double>( *r.samples_to_success ) );
        wall_success.push_back( r.wall_clock_s );
      }
      all.push_back( static_cast<double>( r.samples_to_success.value_or( 12 ) ) );
      wall_all.push_back( r.wall_clock_s );
      gaps.push_back( 1.0 - r.best_reward );
      for ( auto const& step : r.rewards )
      {
        for ( auto x : step )
        {
          reward_sum += x;
          ++reward_count;
        }
      }
    }
    std::sort( gaps.begin(), gaps.end() );
    CHECK( ls.runs == all.size() );
    CHECK( ls.successes == success.size() );
    CHECK( ls.median_samples_all == median( all ) );
    CHECK( ls.median_wall_all == median( wall_all ) );
    CHECK( ls.gaps == gaps );
    CHECK( ls.mean_train_reward == doctest::Approx( reward_sum / static_cast<double>( reward_count ) ) );
    if ( success.empty() )
    {
      CHECK_FALSE( ls.median_samples_success );
      CHECK( ls.median_samples_all == 12.0 );
    }
    else
    {
      CHECK( *ls.median_samples_success == median( success ) );
      CHECK( *ls.median_wall_success == median( wall_success ) );
    }
  }
  CHECK( s[0].gaps.front() == 0.0 );

  auto const table = lines_of( summary_table( s ) );
  CHECK( table.size() == 3 );
  CHECK( table[1].starts_with( "es\t" ) );
  auto const gaps = lines_of( gap_table( s ) );
  CHECK( gaps[0] == "es\trandom" );
  CHECK( gaps.size() == 4 );
  CHECK( lines_of( runs_table( runs ) ).size() == runs.size() + 1 );
}

TEST_CASE( "studies run every job once and resume" )
{
  auto const dir = scratch_dir( "study" );
  study_options opt;
  opt.learners = {learner_kind::random, learner_kind::es};
  opt.seeds = 2;
  opt.first_seed = 5;
  opt.out = dir;
  opt.workers = 2;
  auto const task = tiny_task();
  auto const first = run_study( task, opt );
  REQUIRE( first.size() == 4 );
  CHECK( first[0].learner == learner_kind::random );
  CHECK( first[0].seed == 5 );
  CHECK( first[3].learner == learner_kind::es );
  CHECK( first[3].seed == 6 );
  for ( auto const* f : {"summary.tsv", "gaps.tsv", "runs.tsv"} )
  {
    CHECK( std::filesystem::exists( dir / f ) );
  }
  CHECK( std::filesystem::exists( run_dir( dir, learner_kind::es, 6 ) / "run.json" ) );

  auto const again = run_study( task, opt );
  REQUIRE( again.size() == 4 );
  for ( std::size_t i = 0; i < 4; ++i )
  {
    CHECK( again[i].wall_clock_s == first[i].wall_clock_s );
    CHECK( again[i].rewards == first[i].rewards );
  }

  /* one worker gives the same runs */
  auto serial = opt;
  serial.workers = 1;
  serial.out = scratch_dir( "study_serial" );
  auto const s = run_study( task, serial );
  for ( std::size_t i = 0; i < 4; ++i )
  {
    CHECK( s[i].rewards == first[i].rewards );
  }
}

TEST_CASE( "bounds table" )
{
  auto const task = bundled_task( "inverter" );
  CHECK( lines_of( bounds_table( rule_effect_curve( task_bounds_query( task, 0 ) ) ) ).size() == 1 );
  auto const rows = lines_of( bounds_table( rule_effect_curve( task_bounds_query( task, 4 ) ) ) );
  REQUIRE( rows.size() == 5 );
  CHECK( rows[0] == "lower_rules_off\tupper_rules_off\tlower_rules_on\tupper_rules_on" );
  CHECK( std::count( rows[4].begin(), rows[4].end(), '\t' ) == 3 );
}

TEST_CASE( "checkpoints" )
{
  auto const dir = scratch_dir( "checkpoint" );
  auto const task = tiny_task();
  auto const p = init_params( 3, training_dims( task ) );
  save_checkpoint( p, dir / "p.txt" );
  auto const q = load_checkpoint( dir / "p.txt", p.dims );
  CHECK( q.values == p.values );

  auto other = p.dims;
  other.hidden = 9;
  CHECK_THROWS_AS( load_checkpoint( dir / "p.txt", other ), parse_error );
  std::ofstream( dir / "bad.txt" ) << "netcomp-params 2\n";
  CHECK_THROWS_AS( load_checkpoint( dir / "bad.txt", p.dims ), parse_error );
}

TEST_CASE( "command line" )
{
  auto const dir = scratch_dir( "cli" );
  auto const log = dir / "log.txt";
  auto const inv = ( source_dir() / "tasks" / "inverter.json" ).string();

  CHECK( run_cli( "validate --task " + inv, log ) == 0 );
  CHECK( read_file( log ).find( "inverter: ok" ) != std::string::npos );
  CHECK( run_cli( "validate --task " + fixture( "odd_es_batch.json" ).string(), log ) == 2 );
  CHECK( read_file( log ).find( "train.batch must be even" ) != std::string::npos );
  CHECK( run_cli( "validate --task " + fixture( "malformed.json" ).string(), log ) == 2 );
  CHECK( run_cli( "validate", log ) == 2 );
  CHECK( run_cli( "run --task " + inv + " --learner nope", log ) == 2 );
  CHECK( run_cli( "run --task " + inv + " --evaluator ngspice --ngspice-bin " + ( dir / "missing" ).string(), log ) == 2 );

  auto const out = dir / "run";
  CHECK( run_cli( "run --task " + inv + " --learner es --seed 1 --steps 2 --batch 4 --max-steps 4 --out " + out.string(),
                  log ) == 0 );
  CHECK( read_file( log ).find( "best reward" ) != std::string::npos );
  auto const rec = load_run( out );
  REQUIRE( rec );
  CHECK( rec->overrides.at( "batch" ) == "4" );
  CHECK( std::filesystem::exists( out / "params.txt" ) );
  CHECK( load_task( out / "task.json" ).sampler.max_steps == 4 );

  std::ofstream( dir / "blocker" ) << "x";
  CHECK( run_cli( "run --task " + inv + " --steps 1 --batch 2 --out " + ( dir / "blocker" / "sub" ).string(), log ) ==
         3 );

  CHECK( run_cli( "bounds --task " + inv + " --max-steps 3 --out " + ( dir / "b.tsv" ).string(), log ) == 0 );
  CHECK( lines_of( read_file( dir / "b.tsv" ) ).size() == 4 );

  auto const study = dir / "study";
  CHECK( run_cli( "study --task " + inv + " --learner random es --seeds 2 --steps 1 --batch 2 --out " + study.string(),
                  log ) == 0 );
  CHECK( lines_of( read_file( study / "runs.tsv" ) ).size() == 5 );
}
