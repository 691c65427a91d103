#include <netcomp/sampler.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netcomp
{

rng_t episode_rng( std::uint64_t seed, std::uint64_t step, std::uint64_t k )
{
  std::seed_seq seq{static_cast<std::uint32_t>( seed ), static_cast<std::uint32_t>( seed >> 32 ),
                    static_cast<std::uint32_t>( step ), static_cast<std::uint32_t>( step >> 32 ),
                    static_cast<std::uint32_t>( k ), static_cast<std::uint32_t>( k >> 32 )};
  return rng_t( seq );
}

std::string_view to_string( termination t )
{
  switch ( t )
  {
  case termination::stop_action:
    return "stop_action";
  case termination::step_limit:
    return "step_limit";
  case termination::regeneration_exhausted:
    return "regeneration_exhausted";
  }
  return "?";
}

double episode::log_prob() const noexcept
{
  return std::accumulate( steps.begin(), steps.end(), 0.0, []( double a, auto const& s ) { return a + s.log_prob; } );
}

double episode::entropy() const noexcept
{
  return std::accumulate( steps.begin(), steps.end(), 0.0, []( double a, auto const& s ) { return a + s.entropy; } );
}

Eigen::VectorXd action_mask( circuit_graph const& g, sampler_config const& cfg, std::uint32_t net_capacity,
                             check_report const& during )
{
  Eigen::VectorXd m = Eigen::VectorXd::Zero( 3 );
  auto const nets = g.num_internal_nets();
  auto const comps = static_cast<std::uint32_t>( g.num_components() );

  auto const net_cap = std::min( net_capacity, cfg.max_internal_nets.value_or( net_capacity ) );
  if ( nets >= net_cap )
  {
    m( static_cast<Eigen::Index>( action_type::add_net ) ) = neg_inf;
  }
  if ( cfg.max_components && comps >= *cfg.max_components )
  {
    m( static_cast<Eigen::Index>( action_type::add_component ) ) = neg_inf;
  }
  if ( ( cfg.min_components && comps < *cfg.min_components ) ||
       ( cfg.min_internal_nets && nets < *cfg.min_internal_nets ) || !during.passed() )
  {
    m( static_cast<Eigen::Index>( action_type::stop ) ) = neg_inf;
  }
  return m;
}

void apply_action( circuit_graph& g, circuit_domain const& domain, action const& a )
{
  switch ( a.type )
  {
  case action_type::add_net:
    g.add_internal_net();
    break;
  case action_type::add_component:
  {
    std::vector<std::uint32_t> targets;
    for ( auto r : a.net_rows )
    {
      targets.push_back( g.net_nodes().at( r ) );
    }
    g.add_component( domain.inventory, a.kind, a.values, targets );
    break;
  }
  case action_type::stop:
    break;
  }
}

namespace
{

double uniform01( rng_t& rng )
{
  return std::uniform_real_distribution<double>( 0.0, 1.0 )( rng );
}

/* draws an index from softmax(logits + mask) */
Eigen::Index sample_categorical( Eigen::VectorXd const& logits, Eigen::VectorXd const& mask, rng_t& rng )
{
  Eigen::VectorXd z = logits + mask;
  auto const top = z.maxCoeff();
  Eigen::VectorXd w = ( z.array() - top ).exp();
  auto const u = uniform01( rng ) * w.sum();
  double acc = 0.0;
  Eigen::Index last = -1;
  for ( Eigen::Index i = 0; i < w.size(); ++i )
  {
    if ( w( i ) <= 0.0 )
    {
      continue;
    }
    last = i;
    acc += w( i );
    if ( u < acc )
    {
      return i;
    }
  }
  return last;
}

double allowed( Eigen::VectorXd const& mask )
{
  return static_cast<double>( ( mask.array() == 0.0 ).count() );
}

std::vector<double> physical_values( component_kind const& kind, std::vector<double> const& raw )
{
  std::vector<double> v;
  for ( std::size_t i = 0; i < raw.size(); ++i )
  {
    auto const& p = kind.params[i];
    auto const c = std::clamp( raw[i], 0.0, 1.0 );
    v.push_back( std::clamp( p.min + c * ( p.max - p.min ), p.min, p.max ) );
  }
  return v;
}

bool all_masked( Eigen::VectorXd const& m )
{
  return ( m.array() == neg_inf ).all();
}

/* one attempt; `p == nullptr` samples uniformly */
episode run_attempt( policy_params const* p, task_spec const& task, rng_t& rng )
{
  auto const domain = task.domain();
  auto const& cfg = task.sampler;
  auto const n_kinds = static_cast<Eigen::Index>( domain.inventory.size() );

  episode e;
  e.graph = new_task_graph( domain.nets );
  auto& g = e.graph;
  e.cause = termination::step_limit;

  for ( std::uint32_t step = 0; step < cfg.max_steps; ++step )
  {
    episode_step st;
    st.masks.action = action_mask( g, cfg, domain.max_internal_nets, run_checks( g, cfg.during_generation ) );
    if ( all_masked( st.masks.action ) )
    {
      break;
    }
    st.masks.component = Eigen::VectorXd::Zero( n_kinds );
    if ( !cfg.as_input.empty() )
    {
      st.check_features = run_checks( g, cfg.as_input ).as_features();
    }
    auto& a = st.act;

    if ( p != nullptr )
    {
      ad::tape t( false );
      auto const out = forward( t, *p, encode( g, domain ), st.check_features );
      a.type = static_cast<action_type>( sample_categorical( out.action_logits.value().row( 0 ).transpose(), st.masks.action, rng ) );
      if ( a.type == action_type::add_component )
      {
        a.kind = static_cast<std::uint32_t>(
            sample_categorical( out.component_logits.value().row( 0 ).transpose(), st.masks.component, rng ) );
        auto const& kind = domain.inventory[a.kind];
        auto const& mu = out.mean[a.kind].value();
        auto const& ls = out.log_std[a.kind].value();
        std::normal_distribution<double> normal( 0.0, 1.0 );
        for ( std::size_t i = 0; i < kind.num_params(); ++i )
        {
          auto const j = static_cast<Eigen::Index>( i );
          a.raw_params.push_back( mu( 0, j ) + std::exp( std::clamp( ls( 0, j ), log_std_min, log_std_max ) ) * normal( rng ) );
        }
        a.values = physical_values( kind, a.raw_params );
        st.masks.terminal = wiring_mask( g, kind, task.rules );
        auto const& tl = out.terminal_logits[a.kind].value();
        for ( Eigen::Index j = 0; j < tl.cols(); ++j )
        {
          a.net_rows.push_back( static_cast<std::uint32_t>( sample_categorical( tl.col( j ), st.masks.terminal.col( j ), rng ) ) );
        }
      }
      auto const lp = log_prob_and_entropy( t, out, st.masks, a );
      st.log_prob = lp.log_prob.scalar();
      st.entropy = lp.entropy.scalar();
    }
    else
    {
      Eigen::VectorXd const zeros3 = Eigen::VectorXd::Zero( 3 );
      a.type = static_cast<action_type>( sample_categorical( zeros3, st.masks.action, rng ) );
      st.log_prob = -std::log( allowed( st.masks.action ) );
      st.entropy = std::log( allowed( st.masks.action ) );
      if ( a.type == action_type::add_component )
      {
        a.kind = static_cast<std::uint32_t>( sample_categorical( Eigen::VectorXd::Zero( n_kinds ), st.masks.component, rng ) );
        st.log_prob -= std::log( static_cast<double>( n_kinds ) );
        st.entropy += std::log( static_cast<double>( n_kinds ) );
        auto const& kind = domain.inventory[a.kind];
        for ( std::size_t i = 0; i < kind.num_params(); ++i )
        {
          a.raw_params.push_back( uniform01( rng ) );
        }
        a.values = physical_values( kind, a.raw_params );
        st.masks.terminal = wiring_mask( g, kind, task.rules );
        for ( Eigen::Index j = 0; j < st.masks.terminal.cols(); ++j )
        {
          Eigen::VectorXd const col = st.masks.terminal.col( j );
          a.net_rows.push_back( static_cast<std::uint32_t>( sample_categorical( Eigen::VectorXd::Zero( col.size() ), col, rng ) ) );
          st.log_prob -= std::log( allowed( col ) );
          st.entropy += std::log( allowed( col ) );
        }
      }
    }

    apply_action( g, domain, a );
    auto const stopped = a.type == action_type::stop;
    e.steps.push_back( std::move( st ) );
    if ( stopped )
    {
      e.cause = termination::stop_action;
      break;
    }
  }
  return e;
}

episode run_episode( policy_params const* p, task_spec const& task, rng_t& rng )
{
  auto const& cfg = task.sampler;
  for ( std::uint32_t trial = 1;; ++trial )
  {
    auto e = run_attempt( p, task, rng );
    e.trials = trial;
    if ( e.cause != termination::stop_action || cfg.after_generation.empty() ||
         run_checks( e.graph, cfg.after_generation ).passed() )
    {
      return e;
    }
    if ( trial >= cfg.max_regeneration_trials )
    {
      e.cause = termination::regeneration_exhausted;
      return e;
    }
  }
}

} // namespace

episode sample_episode( policy_params const& p, task_spec const& task, rng_t& rng )
{
  return run_episode( &p, task, rng );
}

episode random_episode( task_spec const& task, rng_t& rng )
{
  return run_episode( nullptr, task, rng );
}

std::vector<log_prob_entropy> replay( ad::tape& t, policy_params const& p, task_spec const& task, episode const& e )
{
  auto const domain = task.domain();
  auto g = new_task_graph( domain.nets );
  std::vector<log_prob_entropy> out;
  for ( auto const& st : e.steps )
  {
    auto const o = forward( t, p, encode( g, domain ), st.check_features );
    out.push_back( log_prob_and_entropy( t, o, st.masks, st.act ) );
    apply_action( g, domain, st.act );
  }
  return out;
}

} // namespace netcomp
