#include <netcomp/errors.hpp>
#include <netcomp/harness.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>

namespace netcomp
{

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string run_record_to_json( run_record const& r )
{
  json j;
  j["version"] = run_record_version;
  j["task"] = r.task;
  j["learner"] = to_string( r.learner );
  j["seed"] = r.seed;
  j["overrides"] = r.overrides;
  j["batch"] = r.batch;
  j["step_budget"] = r.step_budget;
  j["total_samples"] = r.total_samples;
  j["samples_to_success"] = r.samples_to_success ? json( *r.samples_to_success ) : json( nullptr );
  j["best_reward"] = r.best_reward;
  j["skipped_updates"] = r.skipped_updates;
  j["wall_clock_s"] = r.wall_clock_s;
  j["best_trajectory"] = r.best_trajectory;
  j["rewards"] = r.rewards;
  j["best_netlist"] = r.best_netlist;
  return j.dump( 1 ) + "\n";
}

run_record run_record_from_json( std::string_view text )
{
  try
  {
    auto const j = json::parse( text );
    run_record r;
    if ( j.at( "version" ).get<int>() != run_record_version )
    {
      throw parse_error( "version", "unsupported run record version" );
    }
    r.task = j.at( "task" ).get<std::string>();
    auto l = learner_from_string( j.at( "learner" ).get<std::string>() );
    if ( !l )
    {
      throw parse_error( "learner", "unknown learner" );
    }
    r.learner = *l;
    r.seed = j.at( "seed" ).get<std::uint64_t>();
    r.overrides = j.at( "overrides" ).get<std::map<std::string, std::string>>();
    r.batch = j.at( "batch" ).get<std::uint32_t>();
    r.step_budget = j.at( "step_budget" ).get<std::uint32_t>();
    r.total_samples = j.at( "total_samples" ).get<std::uint64_t>();
    if ( !j.at( "samples_to_success" ).is_null() )
    {
      r.samples_to_success = j.at( "samples_to_success" ).get<std::uint64_t>();
    }
    r.best_reward = j.at( "best_reward" ).get<double>();
    r.skipped_updates = j.at( "skipped_updates" ).get<std::uint32_t>();
    r.wall_clock_s = j.at( "wall_clock_s" ).get<double>();
    r.best_trajectory = j.at( "best_trajectory" ).get<std::vector<double>>();
    r.rewards = j.at( "rewards" ).get<std::vector<std::vector<double>>>();
    r.best_netlist = j.at( "best_netlist" ).get<std::string>();
    return r;
  }
  catch ( json::exception const& e )
  {
    throw parse_error( "run record", e.what() );
  }
}

void persist_run( run_record const& r, task_spec const& task, fs::path const& dir )
{
  fs::create_directories( dir );
  save_task( task, dir / "task.json" );
  std::ofstream( dir / "best.sp" ) << r.best_netlist;
  {
    std::ofstream tsv( dir / "rewards.tsv" );
    tsv << "step\tmean\tmax\tbest\n";
    for ( std::size_t s = 0; s < r.rewards.size(); ++s )
    {
      auto const& v = r.rewards[s];
      double sum = 0.0;
      double hi = -1e300;
      for ( auto x : v )
      {
        sum += x;
        hi = std::max( hi, x );
      }
      tsv << s << '\t' << sum / static_cast<double>( v.size() ) << '\t' << hi << '\t' << r.best_trajectory[s] << '\n';
    }
  }
  /* written last so a present run.json marks a complete run */
  auto const tmp = dir / "run.json.tmp";
  std::ofstream( tmp ) << run_record_to_json( r );
  fs::rename( tmp, dir / "run.json" );
}

std::optional<run_record> load_run( fs::path const& dir )
{
  std::ifstream is( dir / "run.json" );
  if ( !is )
  {
    return std::nullopt;
  }
  std::stringstream ss;
  ss << is.rdbuf();
  try
  {
    return run_record_from_json( ss.str() );
  }
  catch ( parse_error const& )
  {
    return std::nullopt;
  }
}

fs::path run_dir( fs::path const& root, learner_kind l, std::uint64_t seed )
{
  return root / std::string( to_string( l ) ) / ( "seed_" + std::to_string( seed ) );
}

double median( std::vector<double> v )
{
  if ( v.empty() )
  {
    return 0.0;
  }
  std::ranges::sort( v );
  auto const n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * ( v[n / 2 - 1] + v[n / 2] );
}

std::vector<learner_summary> summarize( std::vector<run_record> const& runs )
{
  std::vector<learner_summary> out;
  for ( auto const& r : runs )
  {
    if ( std::ranges::none_of( out, [&]( auto const& s ) { return s.learner == r.learner; } ) )
    {
      learner_summary s;
      s.learner = r.learner;
      out.push_back( s );
    }
  }
  for ( auto& s : out )
  {
    std::vector<double> succ, all, wall_succ, wall_all;
    double reward_sum = 0.0;
    for ( auto const& r : runs )
    {
      if ( r.learner != s.learner )
      {
        continue;
      }
      ++s.runs;
      auto const samples =
          r.success() ? static_cast<double>( *r.samples_to_success ) : static_cast<double>( r.sample_budget() );
      all.push_back( samples );
      wall_all.push_back( r.wall_clock_s );
      if ( r.success() )
      {
        ++s.successes;
        succ.push_back( samples );
        wall_succ.push_back( r.wall_clock_s );
      }
      s.gaps.push_back( 1.0 - r.best_reward );
      reward_sum += r.mean_reward();
    }
    s.median_samples_all = median( all );
    s.median_wall_all = median( wall_all );
    if ( !succ.empty() )
    {
      s.median_samples_success = median( succ );
      s.median_wall_success = median( wall_succ );
    }
    s.mean_train_reward = s.runs ? reward_sum / static_cast<double>( s.runs ) : 0.0;
    std::ranges::sort( s.gaps );
  }
  return out;
}

namespace
{
std::string opt_num( std::optional<double> v )
{
  if ( !v )
  {
    return "NA";
  }
  std::ostringstream os;
  os << *v;
  return os.str();
}
} // namespace

std::string summary_table( std::vector<learner_summary> const& s )
{
  std::ostringstream os;
  os << "learner\truns\tsuccesses\tmedian_samples_success\tmedian_samples_all\tmedian_wall_s_success\t"
        "median_wall_s_all\tmean_train_reward\n";
  for ( auto const& x : s )
  {
    os << to_string( x.learner ) << '\t' << x.runs << '\t' << x.successes << '\t' << opt_num( x.median_samples_success )
       << '\t' << x.median_samples_all << '\t' << opt_num( x.median_wall_success ) << '\t' << x.median_wall_all << '\t'
       << x.mean_train_reward << '\n';
  }
  return os.str();
}

std::string gap_table( std::vector<learner_summary> const& s )
{
  std::ostringstream os;
  std::size_t rows = 0;
  for ( std::size_t i = 0; i < s.size(); ++i )
  {
    os << ( i ? "\t" : "" ) << to_string( s[i].learner );
    rows = std::max( rows, s[i].gaps.size() );
  }
  os << '\n';
  for ( std::size_t r = 0; r < rows; ++r )
  {
    for ( std::size_t i = 0; i < s.size(); ++i )
    {
      os << ( i ? "\t" : "" );
      if ( r < s[i].gaps.size() )
      {
        os << s[i].gaps[r];
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string runs_table( std::vector<run_record> const& runs )
{
  std::ostringstream os;
  os << "learner\tseed\tsuccess\tsamples\twall_s\tbest_reward\n";
  for ( auto const& r : runs )
  {
    os << to_string( r.learner ) << '\t' << r.seed << '\t' << ( r.success() ? 1 : 0 ) << '\t'
       << ( r.success() ? *r.samples_to_success : r.sample_budget() ) << '\t' << r.wall_clock_s << '\t'
       << r.best_reward << '\n';
  }
  return os.str();
}

std::vector<run_record> run_study( task_spec const& task, study_options const& opt, std::ostream* log )
{
  struct job
  {
    learner_kind learner;
    std::uint64_t seed;
  };
  std::vector<job> jobs;
  for ( auto l : opt.learners )
  {
    for ( std::uint32_t i = 0; i < opt.seeds; ++i )
    {
      jobs.push_back( {l, opt.first_seed + i} );
    }
  }

  std::vector<run_record> records( jobs.size() );
  std::mutex log_mutex;
  parallel_for( jobs.size(), opt.workers, [&]( std::size_t i ) {
    auto const dir = run_dir( opt.out, jobs[i].learner, jobs[i].seed );
    if ( auto prior = load_run( dir ) )
    {
      records[i] = std::move( *prior );
      return;
    }
    auto t = task;
    t.train.learner = jobs[i].learner;
    if ( opt.workers > 1 )
    {
      t.train.workers = 1;
    }
    auto const eval = make_evaluator( t, dir / "sim" );
    records[i] = run_training( t, *eval, jobs[i].seed );
    persist_run( records[i], t, dir );
    if ( log != nullptr )
    {
      std::lock_guard lock( log_mutex );
      *log << to_string( jobs[i].learner ) << " seed " << jobs[i].seed << ": best " << records[i].best_reward
           << ( records[i].success() ? " after " + std::to_string( *records[i].samples_to_success ) + " samples" : "" )
           << '\n';
    }
  } );

  auto const s = summarize( records );
  fs::create_directories( opt.out );
  std::ofstream( opt.out / "summary.tsv" ) << summary_table( s );
  std::ofstream( opt.out / "gaps.tsv" ) << gap_table( s );
  std::ofstream( opt.out / "runs.tsv" ) << runs_table( records );
  return records;
}

std::string bounds_table( rule_effect const& e )
{
  std::ostringstream os;
  os << "lower_rules_off\tupper_rules_off\tlower_rules_on\tupper_rules_on\n";
  for ( std::size_t i = 0; i < e.rules_off.size(); ++i )
  {
    os << e.rules_off[i].lower << '\t' << e.rules_off[i].upper << '\t' << e.rules_on[i].lower << '\t'
       << e.rules_on[i].upper << '\n';
  }
  return os.str();
}

void save_checkpoint( policy_params const& p, fs::path const& path )
{
  std::ofstream os( path );
  os << "netcomp-params 1\n";
  os << "blocks " << p.layout.blocks().size() << '\n';
  for ( auto const& b : p.layout.blocks() )
  {
    os << b.name << ' ' << b.offset << ' ' << b.rows << ' ' << b.cols << '\n';
  }
  os << "values " << p.values.size() << '\n';
  os.precision( 17 );
  for ( auto v : p.values )
  {
    os << v << '\n';
  }
}

policy_params load_checkpoint( fs::path const& path, policy_dims const& dims )
{
  auto p = init_params( 0, dims );
  std::ifstream is( path );
  std::string tag;
  int version = 0;
  std::size_t n = 0;
  if ( !( is >> tag >> version ) || tag != "netcomp-params" || version != 1 )
  {
    throw parse_error( path.string(), "not a checkpoint" );
  }
  if ( !( is >> tag >> n ) || tag != "blocks" || n != p.layout.blocks().size() )
  {
    throw parse_error( path.string(), "layout mismatch" );
  }
  for ( auto const& b : p.layout.blocks() )
  {
    param_block r;
    if ( !( is >> r.name >> r.offset >> r.rows >> r.cols ) || r.name != b.name || r.offset != b.offset ||
         r.rows != b.rows || r.cols != b.cols )
    {
      throw parse_error( path.string(), "layout mismatch at block " + b.name );
    }
  }
  if ( !( is >> tag >> n ) || tag != "values" || n != p.values.size() )
  {
    throw parse_error( path.string(), "value count mismatch" );
  }
  for ( auto& v : p.values )
  {
    if ( !( is >> v ) )
    {
      throw parse_error( path.string(), "truncated values" );
    }
  }
  return p;
}

bounds_query task_bounds_query( task_spec const& task, std::uint32_t steps )
{
  bounds_query q;
  q.nets = task.nets;
  q.inventory = task.inventory;
  q.steps = steps;
  q.rules = task.rules;
  q.max_internal_nets = task.sampler.max_internal_nets;
  return q;
}

} // namespace netcomp
