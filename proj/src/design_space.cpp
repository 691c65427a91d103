#include <netcomp/design_space.hpp>
#include <netcomp/errors.hpp>

#include <map>

namespace netcomp
{

big_int bell( unsigned n )
{
  /* row k of the triangle starts with the last entry of row k-1; B_k is its first entry */
  std::vector<big_int> row{1};
  for ( unsigned k = 0; k < n; ++k )
  {
    std::vector<big_int> next{row.back()};
    for ( auto const& x : row )
    {
      next.push_back( next.back() + x );
    }
    row = std::move( next );
  }
  return row.front();
}

std::vector<std::uint64_t> allowed_nets( net_declaration const& nets, component_kind const& kind,
                                         wiring_rule_set const& rules, std::uint32_t internal )
{
  auto g = new_task_graph( nets );
  for ( std::uint32_t i = 0; i < internal; ++i )
  {
    g.add_internal_net();
  }
  std::vector<std::uint64_t> counts( kind.num_terminals(), 0 );
  try
  {
    auto const m = wiring_mask( g, kind, rules );
    for ( Eigen::Index j = 0; j < m.cols(); ++j )
    {
      counts[static_cast<std::size_t>( j )] = static_cast<std::uint64_t>( ( m.col( j ).array() == 0.0 ).count() );
    }
  }
  catch ( rule_conflict const& )
  {
    std::ranges::fill( counts, 0 );
  }
  return counts;
}

namespace
{

struct kind_factor
{
  big_int count;
  bool mosfet;
};

/* assignment count of every kind at a given internal-net count, memoized */
class factor_table
{
public:
  explicit factor_table( bounds_query const& q ) : q_( q ) {}

  std::vector<kind_factor> const& at( std::uint32_t internal )
  {
    auto it = cache_.find( internal );
    if ( it != cache_.end() )
    {
      return it->second;
    }
    std::vector<kind_factor> f;
    for ( auto const& k : q_.inventory )
    {
      big_int c = 1;
      for ( auto n : allowed_nets( q_.nets, k, q_.rules, internal ) )
      {
        c *= n;
      }
      f.push_back( {c, k.is_mosfet()} );
    }
    return cache_.emplace( internal, std::move( f ) ).first->second;
  }

private:
  bounds_query const& q_;
  std::map<std::uint32_t, std::vector<kind_factor>> cache_;
};

struct cell
{
  big_int count;
  /* count with every MOSFET weighted by 1/2 */
  big_rational weighted;
};

big_int factorial( std::uint32_t n )
{
  big_int f = 1;
  for ( std::uint32_t i = 2; i <= n; ++i )
  {
    f *= i;
  }
  return f;
}

big_int floor_at_least_one( big_rational const& r, big_int const& upper )
{
  big_int l = boost::multiprecision::numerator( r ) / boost::multiprecision::denominator( r );
  if ( upper > 0 && l < 1 )
  {
    l = 1;
  }
  return l;
}

} // namespace

std::vector<bounds_point> topology_bounds( bounds_query const& q )
{
  factor_table table( q );
  auto const cap = q.max_internal_nets.value_or( q.steps );
  auto const max_actions = q.stop_consumes_step ? ( q.steps == 0 ? 0u : q.steps - 1u ) : q.steps;

  /* state after L non-stop actions: (internal nets, has component) */
  std::map<std::pair<std::uint32_t, bool>, cell> layer;
  layer[{0u, false}] = {1, 1};
  std::vector<big_int> upper_by_len( max_actions + 1, 0 );
  std::vector<big_rational> lower_by_len( max_actions + 1, 0 );

  for ( std::uint32_t len = 0;; ++len )
  {
    for ( auto const& [state, c] : layer )
    {
      if ( state.second )
      {
        upper_by_len[len] += c.count;
        lower_by_len[len] += c.weighted;
      }
    }
    if ( len == max_actions )
    {
      break;
    }
    std::map<std::pair<std::uint32_t, bool>, cell> next;
    for ( auto const& [state, c] : layer )
    {
      auto const [nets, has] = state;
      if ( nets < cap )
      {
        auto& d = next[{nets + 1, has}];
        d.count += c.count;
        d.weighted += c.weighted;
      }
      for ( auto const& f : table.at( nets ) )
      {
        if ( f.count == 0 )
        {
          continue;
        }
        auto& d = next[{nets, true}];
        d.count += c.count * f.count;
        d.weighted += c.weighted * big_rational( f.count, f.mosfet ? 2 : 1 );
      }
    }
    layer = std::move( next );
  }

  std::vector<bounds_point> out;
  big_int upper = 0;
  big_rational lower = 0;
  for ( std::uint32_t s = 1; s <= q.steps; ++s )
  {
    auto const len = q.stop_consumes_step ? s - 1 : s;
    upper += upper_by_len[len];
    lower += lower_by_len[len] / big_rational( factorial( len ) );
    out.push_back( {s, floor_at_least_one( lower, upper ), upper} );
  }
  return out;
}

rule_effect rule_effect_curve( bounds_query const& q )
{
  auto off = q;
  off.rules = wiring_rule_set::none();
  return {topology_bounds( off ), topology_bounds( q )};
}

bounds_point recipe_bounds( bounds_query const& q, gate_recipe const& recipe )
{
  factor_table table( q );
  auto const n_kinds = recipe.kind_counts.size();

  /* state: instances placed per kind, then internal nets placed */
  using key = std::vector<std::uint32_t>;
  std::map<key, cell> layer;
  layer[key( n_kinds + 1, 0 )] = {1, 1};
  std::uint32_t total = recipe.internal_nets;
  for ( auto c : recipe.kind_counts )
  {
    total += c;
  }
  for ( std::uint32_t step = 0; step < total; ++step )
  {
    std::map<key, cell> next;
    for ( auto const& [k, c] : layer )
    {
      auto const nets = k[n_kinds];
      if ( nets < recipe.internal_nets )
      {
        auto nk = k;
        ++nk[n_kinds];
        auto& d = next[nk];
        d.count += c.count;
        d.weighted += c.weighted;
      }
      auto const& f = table.at( nets );
      for ( std::size_t i = 0; i < n_kinds; ++i )
      {
        if ( k[i] < recipe.kind_counts[i] && f[i].count != 0 )
        {
          auto nk = k;
          ++nk[i];
          auto& d = next[nk];
          d.count += c.count * f[i].count;
          d.weighted += c.weighted * big_rational( f[i].count, f[i].mosfet ? 2 : 1 );
        }
      }
    }
    layer = std::move( next );
  }

  bounds_point p;
  p.steps = total + 1;
  big_rational lower = 0;
  for ( auto const& [k, c] : layer )
  {
    p.upper += c.count;
    lower += c.weighted;
  }
  p.lower = floor_at_least_one( lower / big_rational( factorial( total ) ), p.upper );
  return p;
}

} // namespace netcomp
