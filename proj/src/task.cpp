#include <netcomp/errors.hpp>
#include <netcomp/task.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace netcomp
{

using json = nlohmann::ordered_json;

namespace
{

constexpr std::array<std::string_view, 3> learner_names = {"rloo", "es", "random"};
constexpr std::array<std::string_view, 2> backend_names = {"logic", "ngspice"};
constexpr std::array<std::string_view, 3> role_names = {"nmos", "pmos", "other"};
constexpr std::array<std::string_view, 5> terminal_role_names = {"drain", "gate", "source", "bulk", "other"};

template<typename E, std::size_t N>
std::optional<E> lookup( std::array<std::string_view, N> const& names, std::string_view s )
{
  for ( std::size_t i = 0; i < N; ++i )
  {
    if ( names[i] == s )
    {
      return static_cast<E>( i );
    }
  }
  return std::nullopt;
}

/* typed access to one JSON object with a path for error messages */
class reader
{
public:
  reader( json const& j, std::string path, std::string const& source ) : j_( j ), path_( std::move( path ) ), source_( source )
  {
    if ( !j_.is_object() )
    {
      fail( "expected an object" );
    }
  }

  void allow( std::initializer_list<char const*> keys ) const
  {
    for ( auto const& [k, v] : j_.items() )
    {
      if ( std::ranges::none_of( keys, [&]( char const* a ) { return k == a; } ) )
      {
        throw parse_error( source_ + ":" + path_ + "/" + k, "unknown field" );
      }
    }
  }

  bool has( char const* key ) const { return j_.contains( key ); }

  template<typename T>
  void get( char const* key, T& out, bool required = false ) const
  {
    if ( !j_.contains( key ) )
    {
      if ( required )
      {
        fail( std::string( "missing field '" ) + key + "'" );
      }
      return;
    }
    try
    {
      out = j_.at( key ).get<T>();
    }
    catch ( json::exception const& e )
    {
      throw parse_error( source_ + ":" + path_ + "/" + key, e.what() );
    }
  }

  template<typename T>
  void get( char const* key, std::optional<T>& out ) const
  {
    if ( j_.contains( key ) && !j_.at( key ).is_null() )
    {
      T v{};
      get( key, v );
      out = v;
    }
  }

  reader child( char const* key ) const { return reader( j_.at( key ), path_ + "/" + key, source_ ); }

  std::vector<reader> array( char const* key ) const
  {
    auto const& a = j_.at( key );
    if ( !a.is_array() )
    {
      throw parse_error( source_ + ":" + path_ + "/" + key, "expected an array" );
    }
    std::vector<reader> r;
    for ( std::size_t i = 0; i < a.size(); ++i )
    {
      r.emplace_back( a[i], path_ + "/" + key + "/" + std::to_string( i ), source_ );
    }
    return r;
  }

  template<typename E, std::size_t N>
  void get_enum( char const* key, E& out, std::array<std::string_view, N> const& names ) const
  {
    if ( !j_.contains( key ) )
    {
      return;
    }
    std::string s;
    get( key, s );
    auto v = lookup<E>( names, s );
    if ( !v )
    {
      throw parse_error( source_ + ":" + path_ + "/" + key, "unknown value '" + s + "'" );
    }
    out = *v;
  }

  check_set checks( char const* key ) const
  {
    check_set set;
    std::vector<std::string> names;
    get( key, names );
    for ( auto const& n : names )
    {
      auto c = check_kind_from_string( n );
      if ( !c )
      {
        throw parse_error( source_ + ":" + path_ + "/" + key, "unknown check '" + n + "'" );
      }
      set.insert( *c );
    }
    return set;
  }

  [[noreturn]] void fail( std::string const& what ) const { throw parse_error( source_ + ":" + ( path_.empty() ? "/" : path_ ), what ); }

private:
  json const& j_;
  std::string path_;
  std::string const& source_;
};

component_kind read_component( reader const& r )
{
  r.allow( {"name", "model", "role", "terminals", "params"} );
  component_kind k;
  r.get( "name", k.name, true );
  r.get( "model", k.model );
  r.get_enum( "role", k.role, role_names );
  if ( r.has( "terminals" ) )
  {
    for ( auto const& t : r.array( "terminals" ) )
    {
      t.allow( {"name", "role"} );
      std::string name;
      terminal_role role = terminal_role::other;
      t.get( "name", name, true );
      t.get_enum( "role", role, terminal_role_names );
      k.terminal_names.push_back( name );
      k.terminal_roles.push_back( role );
    }
  }
  else if ( k.is_mosfet() )
  {
    auto const m = make_mosfet( "", "", k.role, 0, 1, 0, 1 );
    k.terminal_names = m.terminal_names;
    k.terminal_roles = m.terminal_roles;
  }
  if ( r.has( "params" ) )
  {
    for ( auto const& p : r.array( "params" ) )
    {
      p.allow( {"name", "min", "max", "unit"} );
      parameter_spec s;
      p.get( "name", s.name, true );
      p.get( "min", s.min, true );
      p.get( "max", s.max, true );
      p.get( "unit", s.unit );
      k.params.push_back( s );
    }
  }
  return k;
}

measurement_spec read_measurement( reader const& r )
{
  r.allow( {"name", "kind", "target", "norm", "r_min", "net", "from_net", "at", "edge"} );
  measurement_spec m;
  r.get( "name", m.name, true );
  std::string kind;
  r.get( "kind", kind, true );
  auto k = measurement_kind_from_string( kind );
  if ( !k )
  {
    r.fail( "unknown measurement kind '" + kind + "'" );
  }
  m.kind = *k;
  r.get( "target", m.target );
  r.get( "norm", m.norm );
  r.get( "r_min", m.r_min );
  r.get( "net", m.net );
  r.get( "from_net", m.from_net );
  r.get( "at", m.at );
  r.get( "edge", m.edge );
  return m;
}

std::vector<bool> bits( std::vector<int> const& v )
{
  std::vector<bool> b;
  for ( auto x : v )
  {
    b.push_back( x != 0 );
  }
  return b;
}

std::vector<int> ints( std::vector<bool> const& v )
{
  return {v.begin(), v.end()};
}

std::vector<std::string> names( check_set const& s )
{
  std::vector<std::string> n;
  for ( auto c : s.members() )
  {
    n.emplace_back( to_string( c ) );
  }
  return n;
}

std::size_t line_of( std::string_view text, std::size_t byte )
{
  byte = std::min( byte, text.size() );
  return 1u + static_cast<std::size_t>( std::count( text.begin(), text.begin() + static_cast<std::ptrdiff_t>( byte ), '\n' ) );
}

} // namespace

std::string_view to_string( learner_kind l )
{
  return learner_names.at( static_cast<std::size_t>( l ) );
}

std::optional<learner_kind> learner_from_string( std::string_view s )
{
  return lookup<learner_kind>( learner_names, s );
}

std::string_view to_string( backend_kind b )
{
  return backend_names.at( static_cast<std::size_t>( b ) );
}

circuit_domain task_spec::domain() const
{
  return {nets, inventory, sampler.max_internal_nets.value_or( sampler.max_steps )};
}

task_spec parse_task( std::string_view text, std::string const& source )
{
  json doc;
  try
  {
    doc = json::parse( text );
  }
  catch ( json::parse_error const& e )
  {
    throw parse_error( source + ":" + std::to_string( line_of( text, e.byte ) ), e.what() );
  }

  task_spec t;
  reader const root( doc, "", source );
  root.allow( {"schema_version", "name", "nets", "inventory", "sampler", "rules", "evaluator", "train"} );
  root.get( "schema_version", t.schema_version, true );
  root.get( "name", t.name, true );

  auto const nets = root.child( "nets" );
  nets.allow( {"inputs", "outputs", "supplies", "ground"} );
  nets.get( "inputs", t.nets.inputs );
  nets.get( "outputs", t.nets.outputs );
  nets.get( "supplies", t.nets.supplies );
  nets.get( "ground", t.nets.ground );

  for ( auto const& c : root.array( "inventory" ) )
  {
    t.inventory.push_back( read_component( c ) );
  }

  if ( root.has( "sampler" ) )
  {
    auto const s = root.child( "sampler" );
    s.allow( {"max_steps", "min_components", "max_components", "min_internal_nets", "max_internal_nets", "checks",
              "max_regeneration_trials"} );
    s.get( "max_steps", t.sampler.max_steps );
    s.get( "min_components", t.sampler.min_components );
    s.get( "max_components", t.sampler.max_components );
    s.get( "min_internal_nets", t.sampler.min_internal_nets );
    s.get( "max_internal_nets", t.sampler.max_internal_nets );
    s.get( "max_regeneration_trials", t.sampler.max_regeneration_trials );
    if ( s.has( "checks" ) )
    {
      auto const c = s.child( "checks" );
      c.allow( {"during_generation", "after_generation", "as_input"} );
      t.sampler.during_generation = c.checks( "during_generation" );
      t.sampler.after_generation = c.checks( "after_generation" );
      t.sampler.as_input = c.checks( "as_input" );
    }
  }

  if ( root.has( "rules" ) )
  {
    auto const r = root.child( "rules" );
    r.allow( {"bulk_to_rail", "no_rail_to_gate", "inputs_to_gate", "outputs_to_drain_source"} );
    r.get( "bulk_to_rail", t.rules.bulk_to_rail );
    r.get( "no_rail_to_gate", t.rules.no_rail_to_gate );
    r.get( "inputs_to_gate", t.rules.inputs_to_gate );
    r.get( "outputs_to_drain_source", t.rules.outputs_to_drain_source );
  }

  if ( root.has( "evaluator" ) )
  {
    auto const e = root.child( "evaluator" );
    e.allow( {"backend", "failure_reward", "truth_table", "logic_r_min", "testbench", "ngspice"} );
    auto& ev = t.evaluator;
    e.get_enum( "backend", ev.backend, backend_names );
    e.get( "failure_reward", ev.failure_reward );
    e.get( "logic_r_min", ev.logic_r_min );
    if ( e.has( "truth_table" ) )
    {
      for ( auto const& row : e.array( "truth_table" ) )
      {
        row.allow( {"in", "out"} );
        std::vector<int> in, out;
        row.get( "in", in, true );
        row.get( "out", out, true );
        ev.truth_table.push_back( {bits( in ), bits( out )} );
      }
    }
    if ( e.has( "testbench" ) )
    {
      auto const b = e.child( "testbench" );
      b.allow( {"supply_voltage", "stimuli", "load_capacitance", "t_stop", "t_step", "measurements", "short_current",
                "timeout_s"} );
      b.get( "supply_voltage", ev.bench.supply_voltage );
      b.get( "load_capacitance", ev.bench.load_capacitance );
      b.get( "t_stop", ev.bench.t_stop );
      b.get( "t_step", ev.bench.t_step );
      b.get( "short_current", ev.bench.short_current );
      b.get( "timeout_s", ev.bench.timeout_s );
      if ( b.has( "stimuli" ) )
      {
        for ( auto const& s : b.array( "stimuli" ) )
        {
          s.allow( {"net", "pwl"} );
          stimulus st;
          s.get( "net", st.net, true );
          s.get( "pwl", st.points, true );
          ev.bench.stimuli.push_back( std::move( st ) );
        }
      }
      if ( b.has( "measurements" ) )
      {
        for ( auto const& m : b.array( "measurements" ) )
        {
          ev.bench.measurements.push_back( read_measurement( m ) );
        }
      }
    }
    if ( e.has( "ngspice" ) )
    {
      auto const n = e.child( "ngspice" );
      n.allow( {"binary", "pdk_include", "keep_workdirs"} );
      n.get( "binary", ev.ngspice.binary );
      n.get( "pdk_include", ev.ngspice.pdk_include );
      n.get( "keep_workdirs", ev.ngspice.keep_workdirs );
    }
  }

  if ( root.has( "train" ) )
  {
    auto const r = root.child( "train" );
    r.allow( {"learner", "batch", "steps", "entropy_weight", "entropy_bonus", "es_sigma", "peak_lr", "warmup",
              "advantage_eps", "advantage_clip", "adam_beta1", "adam_beta2", "adam_eps", "hidden", "depth",
              "log_std_bias", "workers"} );
    auto& c = t.train;
    r.get_enum( "learner", c.learner, learner_names );
    r.get( "batch", c.batch );
    r.get( "steps", c.steps );
    r.get( "entropy_weight", c.entropy_weight );
    r.get( "entropy_bonus", c.entropy_bonus );
    r.get( "es_sigma", c.es_sigma );
    r.get( "peak_lr", c.peak_lr );
    r.get( "warmup", c.warmup );
    r.get( "advantage_eps", c.advantage_eps );
    r.get( "advantage_clip", c.advantage_clip );
    r.get( "adam_beta1", c.adam_beta1 );
    r.get( "adam_beta2", c.adam_beta2 );
    r.get( "adam_eps", c.adam_eps );
    r.get( "hidden", c.hidden );
    r.get( "depth", c.depth );
    r.get( "log_std_bias", c.log_std_bias );
    r.get( "workers", c.workers );
  }
  return t;
}

std::string dump_task( task_spec const& t )
{
  json j;
  j["schema_version"] = t.schema_version;
  j["name"] = t.name;
  j["nets"] = {{"inputs", t.nets.inputs}, {"outputs", t.nets.outputs}, {"supplies", t.nets.supplies},
               {"ground", t.nets.ground}};

  j["inventory"] = json::array();
  for ( auto const& k : t.inventory )
  {
    json c;
    c["name"] = k.name;
    c["model"] = k.model;
    c["role"] = role_names.at( static_cast<std::size_t>( k.role ) );
    c["terminals"] = json::array();
    for ( std::size_t i = 0; i < k.terminal_names.size(); ++i )
    {
      c["terminals"].push_back(
          {{"name", k.terminal_names[i]}, {"role", terminal_role_names.at( static_cast<std::size_t>( k.terminal_roles[i] ) )}} );
    }
    c["params"] = json::array();
    for ( auto const& p : k.params )
    {
      c["params"].push_back( {{"name", p.name}, {"min", p.min}, {"max", p.max}, {"unit", p.unit}} );
    }
    j["inventory"].push_back( c );
  }

  auto const& s = t.sampler;
  json sj;
  sj["max_steps"] = s.max_steps;
  auto opt = [&sj]( char const* key, std::optional<std::uint32_t> const& v ) {
    if ( v )
    {
      sj[key] = *v;
    }
  };
  opt( "min_components", s.min_components );
  opt( "max_components", s.max_components );
  opt( "min_internal_nets", s.min_internal_nets );
  opt( "max_internal_nets", s.max_internal_nets );
  sj["checks"] = {{"during_generation", names( s.during_generation )},
                  {"after_generation", names( s.after_generation )},
                  {"as_input", names( s.as_input )}};
  sj["max_regeneration_trials"] = s.max_regeneration_trials;
  j["sampler"] = sj;

  j["rules"] = {{"bulk_to_rail", t.rules.bulk_to_rail},
                {"no_rail_to_gate", t.rules.no_rail_to_gate},
                {"inputs_to_gate", t.rules.inputs_to_gate},
                {"outputs_to_drain_source", t.rules.outputs_to_drain_source}};

  auto const& ev = t.evaluator;
  json e;
  e["backend"] = to_string( ev.backend );
  e["failure_reward"] = ev.failure_reward;
  e["logic_r_min"] = ev.logic_r_min;
  e["truth_table"] = json::array();
  for ( auto const& row : ev.truth_table )
  {
    e["truth_table"].push_back( {{"in", ints( row.inputs )}, {"out", ints( row.outputs )}} );
  }
  json b;
  b["supply_voltage"] = ev.bench.supply_voltage;
  b["load_capacitance"] = ev.bench.load_capacitance;
  b["t_stop"] = ev.bench.t_stop;
  b["t_step"] = ev.bench.t_step;
  b["short_current"] = ev.bench.short_current;
  b["timeout_s"] = ev.bench.timeout_s;
  b["stimuli"] = json::array();
  for ( auto const& st : ev.bench.stimuli )
  {
    b["stimuli"].push_back( {{"net", st.net}, {"pwl", st.points}} );
  }
  b["measurements"] = json::array();
  for ( auto const& m : ev.bench.measurements )
  {
    b["measurements"].push_back( {{"name", m.name},
                                  {"kind", to_string( m.kind )},
                                  {"target", m.target},
                                  {"norm", m.norm},
                                  {"r_min", m.r_min},
                                  {"net", m.net},
                                  {"from_net", m.from_net},
                                  {"at", m.at},
                                  {"edge", m.edge}} );
  }
  e["testbench"] = b;
  e["ngspice"] = {{"binary", ev.ngspice.binary},
                  {"pdk_include", ev.ngspice.pdk_include},
                  {"keep_workdirs", ev.ngspice.keep_workdirs}};
  j["evaluator"] = e;

  auto const& c = t.train;
  j["train"] = {{"learner", to_string( c.learner )},
                {"batch", c.batch},
                {"steps", c.steps},
                {"entropy_weight", c.entropy_weight},
                {"entropy_bonus", c.entropy_bonus},
                {"es_sigma", c.es_sigma},
                {"peak_lr", c.peak_lr},
                {"warmup", c.warmup},
                {"advantage_eps", c.advantage_eps},
                {"advantage_clip", c.advantage_clip},
                {"adam_beta1", c.adam_beta1},
                {"adam_beta2", c.adam_beta2},
                {"adam_eps", c.adam_eps},
                {"hidden", c.hidden},
                {"depth", c.depth},
                {"log_std_bias", c.log_std_bias},
                {"workers", c.workers}};
  return j.dump( 2 ) + "\n";
}

void save_task( task_spec const& spec, std::filesystem::path const& path )
{
  std::ofstream os( path );
  if ( !os )
  {
    throw error( "cannot write " + path.string() );
  }
  os << dump_task( spec );
}

task_spec load_task( std::filesystem::path const& path )
{
  std::ifstream is( path );
  if ( !is )
  {
    throw parse_error( path.string(), "cannot open file" );
  }
  std::stringstream ss;
  ss << is.rdbuf();
  auto spec = parse_task( ss.str(), path.string() );
  if ( auto v = validate( spec ); !v.empty() )
  {
    throw validation_error( std::move( v ) );
  }
  return spec;
}

std::vector<std::string> validate( task_spec const& t )
{
  std::vector<std::string> v;
  auto add = [&v]( std::string s ) { v.push_back( std::move( s ) ); };

  if ( t.schema_version != task_schema_version )
  {
    add( "unsupported schema_version " + std::to_string( t.schema_version ) );
  }
  if ( t.name.empty() )
  {
    add( "task name is empty" );
  }

  /* nets */
  if ( t.nets.outputs.empty() )
  {
    add( "at least one output net is required" );
  }
  if ( t.nets.supplies.empty() )
  {
    add( "at least one supply net is required" );
  }
  std::set<std::string> seen;
  for ( auto const* group : {&t.nets.inputs, &t.nets.outputs, &t.nets.supplies} )
  {
    for ( auto const& n : *group )
    {
      if ( n.empty() || n == "0" || ( n.starts_with( "net" ) && n.size() > 3 &&
                                      std::ranges::all_of( n.substr( 3 ), []( char c ) { return std::isdigit( static_cast<unsigned char>( c ) ); } ) ) )
      {
        add( "net name '" + n + "' is reserved" );
      }
      if ( !seen.insert( n ).second )
      {
        add( "duplicate net name '" + n + "'" );
      }
    }
  }
  if ( seen.contains( t.nets.ground ) )
  {
    add( "ground name '" + t.nets.ground + "' clashes with another net" );
  }

  /* inventory */
  if ( t.inventory.empty() )
  {
    add( "inventory is empty" );
  }
  std::set<std::string> kinds;
  for ( auto const& k : t.inventory )
  {
    if ( !kinds.insert( k.name ).second )
    {
      add( "duplicate component kind '" + k.name + "'" );
    }
    if ( k.model.empty() )
    {
      add( "component '" + k.name + "' has no model name" );
    }
    if ( k.num_terminals() < 2 )
    {
      add( "component '" + k.name + "' needs at least two terminals" );
    }
    for ( auto const& p : k.params )
    {
      if ( !( p.min < p.max ) )
      {
        add( "component '" + k.name + "' parameter '" + p.name + "' has min >= max" );
      }
    }
    if ( k.is_mosfet() )
    {
      for ( auto r : {terminal_role::drain, terminal_role::gate, terminal_role::source, terminal_role::bulk} )
      {
        if ( k.terminal_with_role( r ) < 0 )
        {
          add( "MOSFET '" + k.name + "' lacks a " + std::string( terminal_role_names[static_cast<std::size_t>( r )] ) +
               " terminal" );
        }
      }
    }
    if ( k.num_terminals() >= 1 && !t.nets.outputs.empty() && !t.nets.supplies.empty() )
    {
      try
      {
        wiring_mask( new_task_graph( t.nets ), k, t.rules );
      }
      catch ( rule_conflict const& e )
      {
        add( "rule conflict for '" + k.name + "': " + e.what() );
      }
    }
  }

  /* sampler */
  auto const& s = t.sampler;
  if ( s.max_steps < 1 )
  {
    add( "sampler.max_steps must be at least 1" );
  }
  if ( s.min_components && s.max_components && *s.min_components > *s.max_components )
  {
    add( "sampler.min_components exceeds max_components" );
  }
  if ( s.min_internal_nets && s.max_internal_nets && *s.min_internal_nets > *s.max_internal_nets )
  {
    add( "sampler.min_internal_nets exceeds max_internal_nets" );
  }
  if ( s.max_regeneration_trials < 1 )
  {
    add( "sampler.max_regeneration_trials must be at least 1" );
  }

  /* evaluator */
  auto const& ev = t.evaluator;
  if ( !( ev.failure_reward >= -1.0 && ev.failure_reward <= 1.0 ) )
  {
    add( "evaluator.failure_reward must lie in [-1, 1]" );
  }
  if ( !( ev.bench.supply_voltage > 0.0 ) )
  {
    add( "testbench.supply_voltage must be positive" );
  }
  if ( ev.backend == backend_kind::logic )
  {
    if ( ev.truth_table.empty() )
    {
      add( "logic backend needs a truth table" );
    }
    if ( !( ev.logic_r_min >= -1.0 && ev.logic_r_min <= 1.0 ) )
    {
      add( "evaluator.logic_r_min must lie in [-1, 1]" );
    }
    for ( auto const& k : t.inventory )
    {
      if ( !k.is_mosfet() )
      {
        add( "logic backend supports MOSFETs only; '" + k.name + "' is not one" );
      }
    }
  }
  for ( std::size_t i = 0; i < ev.truth_table.size(); ++i )
  {
    if ( ev.truth_table[i].inputs.size() != t.nets.inputs.size() ||
         ev.truth_table[i].outputs.size() != t.nets.outputs.size() )
    {
      add( "truth table row " + std::to_string( i ) + " does not match the declared nets" );
    }
  }

  auto const& b = ev.bench;
  auto is_net = [&]( std::string const& n ) { return seen.contains( n ) || n == t.nets.ground; };
  if ( !( b.timeout_s > 0.0 ) )
  {
    add( "testbench.timeout_s must be positive" );
  }
  std::set<std::string> mnames;
  for ( auto const& m : b.measurements )
  {
    if ( !mnames.insert( m.name ).second )
    {
      add( "duplicate measurement name '" + m.name + "'" );
    }
    if ( !( m.norm > 0.0 ) )
    {
      add( "measurement '" + m.name + "' needs norm > 0" );
    }
    if ( !( m.r_min >= -1.0 && m.r_min <= 1.0 ) )
    {
      add( "measurement '" + m.name + "' needs r_min in [-1, 1]" );
    }
    if ( m.kind != measurement_kind::supply_current_flag && !is_net( m.net ) )
    {
      add( "measurement '" + m.name + "' references unknown net '" + m.net + "'" );
    }
    if ( !m.from_net.empty() && !is_net( m.from_net ) )
    {
      add( "measurement '" + m.name + "' references unknown net '" + m.from_net + "'" );
    }
  }
  for ( auto const& st : b.stimuli )
  {
    if ( std::ranges::find( t.nets.inputs, st.net ) == t.nets.inputs.end() )
    {
      add( "stimulus on '" + st.net + "', which is not an input net" );
    }
    for ( auto const& [time, volts] : st.points )
    {
      if ( time > b.t_stop )
      {
        add( "stimulus on '" + st.net + "' has an edge after t_stop" );
        break;
      }
    }
  }
  if ( ev.backend == backend_kind::ngspice )
  {
    if ( b.measurements.empty() )
    {
      add( "ngspice backend needs at least one measurement" );
    }
    if ( !( b.t_stop > 0.0 && b.t_step > 0.0 ) )
    {
      add( "testbench analysis window must be positive" );
    }
  }

  /* training */
  auto const& c = t.train;
  if ( c.batch < 2 )
  {
    add( "train.batch must be at least 2" );
  }
  if ( c.learner == learner_kind::es && c.batch % 2 != 0 )
  {
    add( "train.batch must be even for the es learner" );
  }
  if ( c.steps < 1 )
  {
    add( "train.steps must be at least 1" );
  }
  if ( !( c.peak_lr > 0.0 && c.es_sigma > 0.0 && c.advantage_clip > 0.0 && c.adam_eps > 0.0 ) )
  {
    add( "train rates (peak_lr, es_sigma, advantage_clip, adam_eps) must be positive" );
  }
  if ( !( c.entropy_weight >= 0.0 && c.advantage_eps >= 0.0 ) )
  {
    add( "train.entropy_weight and train.advantage_eps must be non-negative" );
  }
  if ( !( c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0 && c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0 ) )
  {
    add( "train Adam betas must lie in [0, 1)" );
  }
  if ( c.hidden < 1 || c.workers < 1 )
  {
    add( "train.hidden and train.workers must be at least 1" );
  }
  return v;
}

} // namespace netcomp
