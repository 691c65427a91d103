#include <netcomp/errors.hpp>
#include <netcomp/training.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace netcomp
{

std::vector<double> loo_advantages( std::span<double const> rewards, double eps, double clip )
{
  auto const k = rewards.size();
  std::vector<double> adv( k, 0.0 );
  if ( k < 2 )
  {
    return adv;
  }
  for ( std::size_t i = 0; i < k; ++i )
  {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    for ( std::size_t j = 0; j < k; ++j )
    {
      if ( j != i )
      {
        lo = std::min( lo, rewards[j] );
        hi = std::max( hi, rewards[j] );
        sum += rewards[j];
      }
    }
    auto const n = static_cast<double>( k - 1 );
    double mean = lo;
    double sd = 0.0;
    if ( lo != hi )
    {
      mean = sum / n;
      double sq = 0.0;
      for ( std::size_t j = 0; j < k; ++j )
      {
        if ( j != i )
        {
          sq += ( rewards[j] - mean ) * ( rewards[j] - mean );
        }
      }
      sd = std::sqrt( sq / n );
    }
    auto const num = rewards[i] - mean;
    if ( num == 0.0 )
    {
      continue;
    }
    auto const a = num / ( sd + eps );
    adv[i] = std::isnan( a ) ? 0.0 : std::clamp( a, -clip, clip );
  }
  return adv;
}

double lr_at( std::uint32_t step, train_config const& cfg )
{
  auto const peak = cfg.peak_lr;
  auto const s = std::uint64_t{step};
  auto const total = std::uint64_t{cfg.steps};
  double rate = peak;
  if ( 4 * s >= 3 * total )
  {
    rate = peak / 100.0;
  }
  else if ( 2 * s >= total )
  {
    rate = peak / 10.0;
  }
  if ( s < cfg.warmup )
  {
    rate = std::min( rate, static_cast<double>( s + 1 ) / static_cast<double>( cfg.warmup ) * peak );
  }
  return rate;
}

adam::adam( std::size_t n, train_config const& cfg )
    : m_( n, 0.0 ), v_( n, 0.0 ), beta1_( cfg.adam_beta1 ), beta2_( cfg.adam_beta2 ), eps_( cfg.adam_eps )
{
}

void adam::step( std::vector<double>& params, std::span<double const> grad, double lr )
{
  ++t_;
  auto const c1 = 1.0 - std::pow( beta1_, static_cast<double>( t_ ) );
  auto const c2 = 1.0 - std::pow( beta2_, static_cast<double>( t_ ) );
  for ( std::size_t i = 0; i < params.size(); ++i )
  {
    m_[i] = beta1_ * m_[i] + ( 1.0 - beta1_ ) * grad[i];
    v_[i] = beta2_ * v_[i] + ( 1.0 - beta2_ ) * grad[i] * grad[i];
    params[i] -= lr * ( m_[i] / c1 ) / ( std::sqrt( v_[i] / c2 ) + eps_ );
  }
}

loss_and_grad rloo_loss( policy_params const& p, task_spec const& task, std::span<episode const> episodes,
                         std::span<double const> advantages, train_config const& cfg )
{
  loss_and_grad r;
  r.grad.assign( p.size(), 0.0 );
  auto const k = static_cast<double>( episodes.size() );
  auto const ent_coef = ( cfg.entropy_bonus ? -1.0 : 1.0 ) * cfg.entropy_weight / k;
  for ( std::size_t i = 0; i < episodes.size(); ++i )
  {
    if ( episodes[i].steps.empty() )
    {
      continue;
    }
    ad::tape t;
    auto const factors = replay( t, p, task, episodes[i] );
    std::vector<ad::var> terms;
    for ( auto const& f : factors )
    {
      terms.push_back( t.scale( f.log_prob, -advantages[i] / k ) );
      terms.push_back( t.scale( f.entropy, ent_coef ) );
    }
    auto const loss = t.sum( terms );
    r.loss += loss.scalar();
    auto const g = t.backward( loss, p.size() );
    for ( std::size_t j = 0; j < g.size(); ++j )
    {
      r.grad[j] += g[j];
    }
  }
  return r;
}

void rloo_step( policy_params& p, adam& opt, task_spec const& task, std::span<episode const> episodes,
                std::span<double const> rewards, train_config const& cfg, std::uint32_t step )
{
  auto const adv = loo_advantages( rewards, cfg.advantage_eps, cfg.advantage_clip );
  auto const lg = rloo_loss( p, task, episodes, adv, cfg );
  if ( !std::isfinite( lg.loss ) || !std::ranges::all_of( lg.grad, []( double g ) { return std::isfinite( g ); } ) )
  {
    throw non_finite_loss( "non-finite loss at step " + std::to_string( step ) );
  }
  opt.step( p.values, lg.grad, lr_at( step, cfg ) );
}

std::vector<std::vector<double>> mirrored_perturbations( std::size_t k, std::size_t dim, double sigma, rng_t& rng )
{
  std::normal_distribution<double> normal( 0.0, sigma );
  std::vector<std::vector<double>> eps( k );
  auto const half = k / 2;
  for ( std::size_t i = 0; i < half; ++i )
  {
    eps[i].resize( dim );
    eps[i + half].resize( dim );
    for ( std::size_t j = 0; j < dim; ++j )
    {
      eps[i][j] = normal( rng );
      eps[i + half][j] = -eps[i][j];
    }
  }
  return eps;
}

std::vector<double> es_gradient( std::span<std::vector<double> const> eps, std::span<double const> advantages,
                                 double sigma )
{
  if ( eps.empty() )
  {
    return {};
  }
  std::vector<double> g( eps.front().size(), 0.0 );
  auto const scale = 1.0 / ( static_cast<double>( eps.size() ) * sigma * sigma );
  for ( std::size_t k = 0; k < eps.size(); ++k )
  {
    if ( advantages[k] == 0.0 )
    {
      continue;
    }
    for ( std::size_t j = 0; j < g.size(); ++j )
    {
      g[j] += advantages[k] * eps[k][j];
    }
  }
  for ( auto& x : g )
  {
    x *= scale;
  }
  return g;
}

void es_step( policy_params& p, adam& opt, std::span<std::vector<double> const> eps, std::span<double const> rewards,
              train_config const& cfg, std::uint32_t step )
{
  auto const adv = loo_advantages( rewards, cfg.advantage_eps, cfg.advantage_clip );
  auto g = es_gradient( eps, adv, cfg.es_sigma );
  for ( auto& x : g )
  {
    x = -x;
  }
  opt.step( p.values, g, lr_at( step, cfg ) );
}

void parallel_for( std::size_t n, std::size_t workers, std::function<void( std::size_t )> const& fn )
{
  workers = std::max<std::size_t>( 1, std::min( workers, n ) );
  if ( workers == 1 )
  {
    for ( std::size_t i = 0; i < n; ++i )
    {
      fn( i );
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for ( std::size_t w = 0; w < workers; ++w )
  {
    pool.emplace_back( [&] {
      for ( auto i = next++; i < n; i = next++ )
      {
        try
        {
          fn( i );
        }
        catch ( ... )
        {
          std::lock_guard lock( failure_mutex );
          if ( !failure )
          {
            failure = std::current_exception();
          }
        }
      }
    } );
  }
  for ( auto& t : pool )
  {
    t.join();
  }
  if ( failure )
  {
    std::rethrow_exception( failure );
  }
}

double run_record::mean_reward() const
{
  double sum = 0.0;
  std::size_t n = 0;
  for ( auto const& r : rewards )
  {
    sum = std::accumulate( r.begin(), r.end(), sum );
    n += r.size();
  }
  return n == 0 ? 0.0 : sum / static_cast<double>( n );
}

policy_dims training_dims( task_spec const& task )
{
  auto d = make_policy_dims( task.domain(), task.sampler.as_input.size(), task.train.hidden, task.train.depth );
  d.log_std_bias = task.train.log_std_bias;
  return d;
}

run_record run_training( task_spec const& task, evaluator const& eval, std::uint64_t seed, training_hooks const& hooks )
{
  auto const start = std::chrono::steady_clock::now();
  auto const& cfg = task.train;
  auto const domain = task.domain();
  auto const k = std::size_t{cfg.batch};

  run_record rec;
  rec.task = task.name;
  rec.learner = cfg.learner;
  rec.seed = seed;
  rec.batch = cfg.batch;
  rec.step_budget = cfg.steps;

  auto params = init_params( seed, training_dims( task ) );
  adam opt( params.size(), cfg );

  for ( std::uint32_t step = 0; step < cfg.steps; ++step )
  {
    std::vector<std::vector<double>> eps;
    if ( cfg.learner == learner_kind::es )
    {
      auto rng = episode_rng( seed, step, std::numeric_limits<std::uint64_t>::max() );
      eps = mirrored_perturbations( k, params.size(), cfg.es_sigma, rng );
    }

    std::vector<episode> episodes( k );
    std::vector<evaluation> evals( k );
    parallel_for( k, cfg.workers, [&]( std::size_t i ) {
      auto rng = episode_rng( seed, step, i );
      switch ( cfg.learner )
      {
      case learner_kind::random:
        episodes[i] = random_episode( task, rng );
        break;
      case learner_kind::rloo:
        episodes[i] = sample_episode( params, task, rng );
        break;
      case learner_kind::es:
      {
        auto q = params;
        for ( std::size_t j = 0; j < q.values.size(); ++j )
        {
          q.values[j] += eps[i][j];
        }
        episodes[i] = sample_episode( q, task, rng );
        break;
      }
      }
      if ( episodes[i].cause == termination::regeneration_exhausted )
      {
        evals[i].reward = eval.failure_reward();
      }
      else
      {
        evals[i] = eval.evaluate( episodes[i].graph );
      }
    } );

    std::vector<double> rewards( k );
    for ( std::size_t i = 0; i < k; ++i )
    {
      rewards[i] = evals[i].reward;
      if ( rewards[i] > rec.best_reward )
      {
        rec.best_reward = rewards[i];
        rec.best_netlist = emit_spice( graph_to_netlist( episodes[i].graph, domain.nets ), domain, task.name );
      }
      if ( rewards[i] >= 1.0 && !rec.samples_to_success )
      {
        rec.samples_to_success = std::uint64_t{step} * k + i + 1;
      }
    }
    rec.total_samples += k;
    rec.rewards.push_back( rewards );
    rec.best_trajectory.push_back( rec.best_reward );

    if ( !rec.samples_to_success )
    {
      try
      {
        if ( cfg.learner == learner_kind::rloo )
        {
          rloo_step( params, opt, task, episodes, rewards, cfg, step );
        }
        else if ( cfg.learner == learner_kind::es )
        {
          es_step( params, opt, eps, rewards, cfg, step );
        }
      }
      catch ( non_finite_loss const& )
      {
        ++rec.skipped_updates;
      }
    }
    rec.wall_clock_s = std::chrono::duration<double>( std::chrono::steady_clock::now() - start ).count();
    if ( hooks.on_step )
    {
      hooks.on_step( rec );
    }
    if ( rec.samples_to_success )
    {
      break;
    }
  }
  if ( hooks.final_params != nullptr )
  {
    *hooks.final_params = params;
  }
  return rec;
}

} // namespace netcomp
