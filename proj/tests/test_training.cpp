#include "support.hpp"

#include <netcomp/errors.hpp>
#include <netcomp/evaluator.hpp>
#include <netcomp/training.hpp>

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

using namespace netcomp;
using namespace netcomp::test;

namespace
{

task_spec small_task( learner_kind l, std::uint32_t batch = 8, std::uint32_t steps = 4 )
{
  auto t = bundled_task( "inverter" );
  t.train.hidden = 8;
  t.train.depth = 2;
  t.train.learner = l;
  t.train.batch = batch;
  t.train.steps = steps;
  return t;
}

std::vector<episode> sample_batch( policy_params const& p, task_spec const& task, std::size_t k )
{
  std::vector<episode> out;
  for ( std::size_t i = 0; i < k; ++i )
  {
    auto rng = episode_rng( 31, 0, i );
    out.push_back( sample_episode( p, task, rng ) );
  }
  return out;
}

} // namespace

TEST_CASE( "leave-one-out advantages" )
{
  std::vector<double> const r{1, 0, 1, 0};
  auto const a = loo_advantages( r, 0.0 );
  CHECK( a[0] == doctest::Approx( std::sqrt( 2.0 ) ) );
  CHECK( a[1] == doctest::Approx( -std::sqrt( 2.0 ) ) );
  CHECK( a[2] == doctest::Approx( a[0] ) );

  std::vector<double> const two{1, 0};
  auto const b = loo_advantages( two, 1e-8 );
  CHECK( b[0] == 10.0 );
  CHECK( b[1] == -10.0 );

  std::vector<double> const flat{0.3, 0.3, 0.3};
  for ( auto x : loo_advantages( flat, 0.0 ) )
  {
    CHECK( x == 0.0 );
  }
  std::vector<double> const one{5.0};
  CHECK( loo_advantages( one, 1e-8 ) == std::vector<double>{0.0} );

  /* oracle: explicit mean and population std of the others */
  std::mt19937_64 rng( 3 );
  std::uniform_real_distribution<double> u( -1.0, 1.0 );
  std::vector<double> rs( 9 );
  for ( auto& x : rs )
  {
    x = u( rng );
  }
  auto const adv = loo_advantages( rs, 1e-8, 1e9 );
  for ( std::size_t i = 0; i < rs.size(); ++i )
  {
    std::vector<double> others;
    for ( std::size_t j = 0; j < rs.size(); ++j )
    {
      if ( j != i )
      {
        others.push_back( rs[j] );
      }
    }
    auto const mean = std::accumulate( others.begin(), others.end(), 0.0 ) / 8.0;
    double var = 0.0;
    for ( auto x : others )
    {
      var += ( x - mean ) * ( x - mean ) / 8.0;
    }
    CHECK( adv[i] == doctest::Approx( ( rs[i] - mean ) / ( std::sqrt( var ) + 1e-8 ) ) );
  }
}

TEST_CASE( "learning-rate schedule" )
{
  train_config cfg;
  cfg.peak_lr = 1e-3;
  cfg.warmup = 5;
  cfg.steps = 1024;
  CHECK( lr_at( 0, cfg ) == doctest::Approx( 2e-4 ) );
  CHECK( lr_at( 4, cfg ) == doctest::Approx( 1e-3 ) );
  CHECK( lr_at( 511, cfg ) == doctest::Approx( 1e-3 ) );
  CHECK( lr_at( 512, cfg ) == doctest::Approx( 1e-4 ) );
  CHECK( lr_at( 767, cfg ) == doctest::Approx( 1e-4 ) );
  CHECK( lr_at( 768, cfg ) == doctest::Approx( 1e-5 ) );
  CHECK( lr_at( 1023, cfg ) == doctest::Approx( 1e-5 ) );
  for ( std::uint32_t s = 1; s < 1024; ++s )
  {
    CHECK( lr_at( s, cfg ) > 0.0 );
    if ( s >= 5 )
    {
      CHECK( lr_at( s, cfg ) <= lr_at( s - 1, cfg ) );
    }
  }
}

TEST_CASE( "adam" )
{
  train_config cfg;
  adam opt( 3, cfg );
  std::vector<double> p{1.0, 1.0, 1.0};
  std::vector<double> const g{2.0, -0.5, 0.0};
  opt.step( p, g, 0.1 );
  CHECK( opt.count() == 1 );
  CHECK( p[0] == doctest::Approx( 0.9 ) );
  CHECK( p[1] == doctest::Approx( 1.1 ) );
  CHECK( p[2] == 1.0 );

  /* minimizes a quadratic */
  adam q( 1, cfg );
  std::vector<double> x{3.0};
  for ( int i = 0; i < 2000; ++i )
  {
    std::vector<double> const grad{2.0 * ( x[0] - 1.0 )};
    q.step( x, grad, 0.01 );
  }
  CHECK( x[0] == doctest::Approx( 1.0 ).epsilon( 1e-3 ) );
}

TEST_CASE( "mirrored perturbations" )
{
  auto rng = episode_rng( 1, 0, 0 );
  auto const eps = mirrored_perturbations( 16, 50, 0.1, rng );
  REQUIRE( eps.size() == 16 );
  for ( std::size_t j = 0; j < 50; ++j )
  {
    double s = 0.0;
    for ( std::size_t i = 0; i < 8; ++i )
    {
      CHECK( eps[i][j] + eps[i + 8][j] == 0.0 );
      s += eps[i][j] + eps[i + 8][j];
    }
    CHECK( s == 0.0 );
  }
  CHECK( eps[0][0] == -eps[8][0] );

  std::vector<double> flat( 16, 0.0 );
  for ( auto x : es_gradient( eps, flat, 0.1 ) )
  {
    CHECK( x == 0.0 );
  }
}

TEST_CASE( "evolution-strategy gradient has the right sign" )
{
  double const theta = 1.0;
  double const sigma = 0.05;
  int negative = 0;
  for ( std::uint64_t trial = 0; trial < 100; ++trial )
  {
    auto rng = episode_rng( 123, trial, 0 );
    auto const eps = mirrored_perturbations( 64, 1, sigma, rng );
    std::vector<double> r;
    for ( auto const& e : eps )
    {
      auto const x = theta + e[0];
      r.push_back( -x * x );
    }
    auto const adv = loo_advantages( r, 1e-8 );
    auto const g = es_gradient( eps, adv, sigma );
    negative += g[0] < 0.0 ? 1 : 0;
  }
  CHECK( negative >= 95 );
}

TEST_CASE( "policy-gradient loss gradient matches finite differences" )
{
  auto const task = small_task( learner_kind::rloo );
  auto d = training_dims( task );
  d.head_init_scale = 1.0;
  auto const p = init_params( 4, d );
  auto const episodes = sample_batch( p, task, 6 );
  std::vector<double> const adv{1.0, -0.5, 0.25, -1.0, 0.0, 0.75};
  auto const lg = rloo_loss( p, task, episodes, adv, task.train );
  REQUIRE( lg.grad.size() == p.size() );

  std::mt19937_64 rng( 8 );
  std::uniform_int_distribution<std::size_t> pick( 0, p.size() - 1 );
  double const h = 1e-6;
  for ( int k = 0; k < 150; ++k )
  {
    auto const i = pick( rng );
    auto plus = p;
    auto minus = p;
    plus.values[i] += h;
    minus.values[i] -= h;
    auto const fd =
        ( rloo_loss( plus, task, episodes, adv, task.train ).loss - rloo_loss( minus, task, episodes, adv, task.train ).loss ) /
        ( 2.0 * h );
    CHECK( lg.grad[i] == doctest::Approx( fd ).epsilon( 1e-4 ).scale( 1e-6 ) );
  }

  /* loss oracle from the recorded per-episode factors */
  double expected = 0.0;
  for ( std::size_t k = 0; k < episodes.size(); ++k )
  {
    expected -= ( adv[k] * episodes[k].log_prob() + task.train.entropy_weight * episodes[k].entropy() ) / 6.0;
  }
  CHECK( lg.loss == doctest::Approx( expected ).epsilon( 1e-10 ) );
}

TEST_CASE( "entropy sign follows the configuration" )
{
  auto task = small_task( learner_kind::rloo );
  auto const p = init_params( 2, training_dims( task ) );
  auto const episodes = sample_batch( p, task, 4 );
  std::vector<double> const zero( 4, 0.0 );
  auto const bonus = rloo_loss( p, task, episodes, zero, task.train ).loss;
  task.train.entropy_bonus = false;
  auto const penalty = rloo_loss( p, task, episodes, zero, task.train ).loss;
  CHECK( bonus < 0.0 );
  CHECK( penalty == doctest::Approx( -bonus ) );
}

TEST_CASE( "non-finite losses leave the parameters untouched" )
{
  auto const task = small_task( learner_kind::rloo );
  auto p = init_params( 2, training_dims( task ) );
  auto const episodes = sample_batch( p, task, 4 );
  p.values[p.layout.at( "action.b" ).offset] = std::numeric_limits<double>::quiet_NaN();
  auto const before = p.values;
  adam opt( p.size(), task.train );
  std::vector<double> const r{1.0, 0.0, 0.5, -1.0};
  CHECK_THROWS_AS( rloo_step( p, opt, task, episodes, r, task.train, 0 ), non_finite_loss );
  CHECK( opt.count() == 0 );
  for ( std::size_t i = 0; i < before.size(); ++i )
  {
    CHECK( ( p.values[i] == before[i] || ( std::isnan( p.values[i] ) && std::isnan( before[i] ) ) ) );
  }
}

TEST_CASE( "parallel_for visits every index once" )
{
  for ( std::size_t workers : {1u, 3u, 8u} )
  {
    std::vector<std::atomic<int>> hits( 37 );
    parallel_for( hits.size(), workers, [&]( std::size_t i ) { ++hits[i]; } );
    for ( auto const& h : hits )
    {
      CHECK( h.load() == 1 );
    }
  }
}

TEST_CASE( "training runs" )
{
  SUBCASE( "the random learner never changes the parameters" )
  {
    auto const task = small_task( learner_kind::random, 4, 3 );
    auto const eval = make_evaluator( task, scratch_dir( "train_random" ) );
    policy_params final;
    training_hooks hooks;
    hooks.final_params = &final;
    auto const rec = run_training( task, *eval, 5, hooks );
    CHECK( final.values == init_params( 5, training_dims( task ) ).values );
    CHECK( rec.rewards.size() <= 3 );
  }
  SUBCASE( "runs are deterministic and independent of the worker count" )
  {
    for ( auto l : {learner_kind::es, learner_kind::rloo, learner_kind::random} )
    {
      auto task = small_task( l, 6, 3 );
      auto const eval = make_evaluator( task, scratch_dir( "train_det" ) );
      auto const a = run_training( task, *eval, 11 );
      task.train.workers = 3;
      auto const b = run_training( task, *eval, 11 );
      CHECK( a.rewards == b.rewards );
      CHECK( a.best_netlist == b.best_netlist );
      CHECK( a.samples_to_success == b.samples_to_success );
    }
  }
  SUBCASE( "evolution strategies never backpropagate" )
  {
    auto const task = small_task( learner_kind::es, 16, 6 );
    auto const eval = make_evaluator( task, scratch_dir( "train_es" ) );
    auto const before = ad::tape::backward_calls();
    policy_params final;
    training_hooks hooks;
    hooks.final_params = &final;
    auto const rec = run_training( task, *eval, 1, hooks );
    CHECK( ad::tape::backward_calls() == before );
    /* only steps with unequal rewards before a success move the parameters */
    bool informative = false;
    auto const updates = rec.success() ? rec.rewards.size() - 1 : rec.rewards.size();
    for ( std::size_t s = 0; s < updates; ++s )
    {
      auto const [lo, hi] = std::minmax_element( rec.rewards[s].begin(), rec.rewards[s].end() );
      informative = informative || *lo != *hi;
    }
    CHECK( informative == ( final.values != init_params( 1, training_dims( task ) ).values ) );

    auto const rtask = small_task( learner_kind::rloo, 6, 2 );
    run_training( rtask, *eval, 1 );
    CHECK( ad::tape::backward_calls() > before );
  }
  SUBCASE( "training stops after the first successful step" )
  {
    auto const task = small_task( learner_kind::random, 32, 64 );
    auto const eval = make_evaluator( task, scratch_dir( "train_stop" ) );
    int found = 0;
    for ( std::uint64_t seed = 0; seed < 4; ++seed )
    {
      std::size_t callbacks = 0;
      training_hooks hooks;
      hooks.on_step = [&]( run_record const& ) { ++callbacks; };
      auto const rec = run_training( task, *eval, seed, hooks );
      CHECK( callbacks == rec.rewards.size() );
      CHECK( rec.best_trajectory.size() == rec.rewards.size() );
      CHECK( rec.total_samples == rec.rewards.size() * 32 );
      CHECK( std::is_sorted( rec.best_trajectory.begin(), rec.best_trajectory.end() ) );
      if ( rec.success() )
      {
        ++found;
        auto const s = *rec.samples_to_success - 1;
        CHECK( rec.rewards.size() == s / 32 + 1 );
        CHECK( rec.rewards[s / 32][s % 32] == 1.0 );
        for ( std::size_t i = 0; i < s; ++i )
        {
          CHECK( rec.rewards[i / 32][i % 32] < 1.0 );
        }
        CHECK( rec.best_reward == 1.0 );
      }
      else
      {
        CHECK( rec.rewards.size() == 64 );
      }
    }
    CHECK( found > 0 );
  }
}
