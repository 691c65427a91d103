#include <netcomp/ngspice.hpp>

#include <spawn.h>
#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

extern char** environ;

namespace netcomp
{

namespace
{

std::string num( double v )
{
  char buf[32];
  std::snprintf( buf, sizeof( buf ), "%.6g", v );
  return buf;
}

std::string lower( std::string s )
{
  for ( auto& c : s )
  {
    c = static_cast<char>( std::tolower( static_cast<unsigned char>( c ) ) );
  }
  return s;
}

std::string spice_net( std::string const& name, net_declaration const& nets )
{
  return name == nets.ground ? std::string( spice_ground ) : name;
}

constexpr char const* dut_cell = "dut";

} // namespace

ngspice_config apply_env_overrides( ngspice_config c )
{
  if ( auto const* b = std::getenv( ngspice_bin_env ); b != nullptr && *b != '\0' )
  {
    c.binary = b;
  }
  if ( auto const* p = std::getenv( pdk_include_env ); p != nullptr && *p != '\0' )
  {
    c.pdk_include = p;
  }
  return c;
}

std::string make_deck( netlist const& n, circuit_domain const& domain, testbench const& tb,
                       ngspice_config const& cfg )
{
  auto const& nets = domain.nets;
  auto const vdd = tb.supply_voltage;
  std::ostringstream os;
  os << "* transient testbench\n";
  if ( !cfg.pdk_include.empty() )
  {
    os << ".include \"" << cfg.pdk_include << "\"\n";
  }
  auto const micron = std::ranges::any_of( domain.inventory, []( auto const& k ) {
    return std::ranges::any_of( k.params, []( auto const& p ) { return p.unit == "u"; } );
  } );
  if ( micron )
  {
    os << ".option scale=1e-6\n";
  }
  os << emit_spice( n, domain, dut_cell );

  os << "xdut";
  for ( auto const* group : {&nets.inputs, &nets.outputs, &nets.supplies} )
  {
    for ( auto const& pin : *group )
    {
      os << ' ' << pin;
    }
  }
  os << ' ' << dut_cell << '\n';

  for ( std::size_t i = 0; i < nets.supplies.size(); ++i )
  {
    os << "vsup" << i << ' ' << nets.supplies[i] << " 0 dc " << num( vdd ) << '\n';
  }
  for ( auto const& s : tb.stimuli )
  {
    os << "vin_" << s.net << ' ' << spice_net( s.net, nets ) << " 0 pwl(";
    for ( std::size_t k = 0; k < s.points.size(); ++k )
    {
      os << ( k ? " " : "" ) << num( s.points[k].first ) << ' ' << num( s.points[k].second );
    }
    os << ")\n";
  }
  for ( auto const& out : nets.outputs )
  {
    os << "cload_" << out << ' ' << out << " 0 " << num( tb.load_capacitance ) << '\n';
  }
  os << ".tran " << num( tb.t_step ) << ' ' << num( tb.t_stop ) << '\n';

  for ( auto const& m : tb.measurements )
  {
    auto const v = "v(" + spice_net( m.net, nets ) + ")";
    auto const edge = std::to_string( m.edge );
    os << ".meas tran " << lower( m.name ) << ' ';
    switch ( m.kind )
    {
    case measurement_kind::sampled_voltage:
      os << "find " << v << " at=" << num( m.at );
      break;
    case measurement_kind::rise_time:
      os << "trig " << v << " val=" << num( 0.1 * vdd ) << " rise=" << edge << " targ " << v << " val="
         << num( 0.9 * vdd ) << " rise=" << edge;
      break;
    case measurement_kind::fall_time:
      os << "trig " << v << " val=" << num( 0.9 * vdd ) << " fall=" << edge << " targ " << v << " val="
         << num( 0.1 * vdd ) << " fall=" << edge;
      break;
    case measurement_kind::propagation_delay:
      os << "trig at=" << num( m.at ) << " targ " << v << " val=" << num( 0.5 * vdd ) << " td=" << num( m.at )
         << " cross=1";
      break;
    case measurement_kind::supply_current_flag:
      os << "find i(vsup0) at=" << num( m.at > 0.0 ? m.at : tb.t_stop );
      break;
    }
    os << '\n';
  }
  os << ".end\n";
  return os.str();
}

sim_outcome parse_measurements( std::string_view output, testbench const& tb )
{
  static std::regex const line_re( R"(^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+))" );
  std::vector<std::pair<std::string, std::string>> found;
  std::istringstream is{std::string( output )};
  for ( std::string line; std::getline( is, line ); )
  {
    std::smatch m;
    if ( std::regex_search( line, m, line_re ) )
    {
      found.emplace_back( lower( m[1] ), m[2] );
    }
  }

  std::vector<measurement> out;
  for ( auto const& spec : tb.measurements )
  {
    auto const key = lower( spec.name );
    auto it = std::ranges::find_if( found, [&]( auto const& kv ) { return kv.first == key; } );
    if ( it == found.end() )
    {
      return sim_error::non_convergence;
    }
    char* end = nullptr;
    auto const v = std::strtod( it->second.c_str(), &end );
    if ( end == it->second.c_str() || *end != '\0' || !std::isfinite( v ) )
    {
      return sim_error::parse_failure;
    }
    auto value = v;
    if ( spec.kind == measurement_kind::supply_current_flag )
    {
      value = std::abs( v ) > tb.short_current ? 1.0 : 0.0;
    }
    out.push_back( {spec.name, spec.kind, value} );
  }
  return out;
}

bool ngspice_available( ngspice_config const& cfg )
{
  if ( cfg.binary.find( '/' ) != std::string::npos )
  {
    return ::access( cfg.binary.c_str(), X_OK ) == 0;
  }
  auto const* path = std::getenv( "PATH" );
  if ( path == nullptr )
  {
    return false;
  }
  std::istringstream dirs( path );
  for ( std::string dir; std::getline( dirs, dir, ':' ); )
  {
    if ( !dir.empty() && ::access( ( std::filesystem::path( dir ) / cfg.binary ).c_str(), X_OK ) == 0 )
    {
      return true;
    }
  }
  return false;
}

sim_outcome ngspice_run( netlist const& n, circuit_domain const& domain, testbench const& tb,
                         ngspice_config const& cfg, std::filesystem::path const& workdir )
{
  namespace fs = std::filesystem;
  fs::create_directories( workdir );
  auto const deck = workdir / "deck.sp";
  auto const log = workdir / "ngspice.log";
  std::ofstream( deck ) << make_deck( n, domain, tb, cfg );

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init( &actions );
  posix_spawn_file_actions_addopen( &actions, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644 );
  posix_spawn_file_actions_adddup2( &actions, STDOUT_FILENO, STDERR_FILENO );
  posix_spawnattr_t attr;
  posix_spawnattr_init( &attr );
  posix_spawnattr_setflags( &attr, POSIX_SPAWN_SETPGROUP );
  posix_spawnattr_setpgroup( &attr, 0 );

  std::string bin = cfg.binary;
  std::string batch = "-b";
  std::string deck_arg = deck.string();
  char* argv[] = {bin.data(), batch.data(), deck_arg.data(), nullptr};
  pid_t pid = 0;
  auto const rc = posix_spawnp( &pid, bin.c_str(), &actions, &attr, argv, environ );
  posix_spawn_file_actions_destroy( &actions );
  posix_spawnattr_destroy( &attr );
  if ( rc != 0 )
  {
    return sim_error::non_convergence;
  }

  auto const deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>( tb.timeout_s );
  int status = 0;
  for ( ;; )
  {
    auto const r = ::waitpid( pid, &status, WNOHANG );
    if ( r == pid )
    {
      break;
    }
    if ( std::chrono::steady_clock::now() >= deadline )
    {
      ::kill( -pid, SIGKILL );
      ::waitpid( pid, &status, 0 );
      return sim_error::timeout;
    }
    std::this_thread::sleep_for( std::chrono::milliseconds( 5 ) );
  }

  std::ifstream in( log );
  std::stringstream text;
  text << in.rdbuf();
  sim_outcome outcome = sim_error::non_convergence;
  if ( WIFEXITED( status ) && WEXITSTATUS( status ) == 0 )
  {
    outcome = parse_measurements( text.str(), tb );
  }
  if ( outcome.ok() && !cfg.keep_workdirs )
  {
    std::error_code ec;
    fs::remove_all( workdir, ec );
  }
  return outcome;
}

} // namespace netcomp
