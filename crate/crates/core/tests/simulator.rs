use crowdnav_core::predictors::PredictorKind;
use crowdnav_core::rewards::{RewardBranch, RewardConfig};
use crowdnav_core::simulator::{
    run_episode, Action, GoToGoal, Kinematics, ObservationLayout, Outcome, Simulator, Stationary, WorldConfig,
    OBSERVATION_LAYOUT_VERSION,
};
use crowdnav_core::{AgentState, Error, Vec2};

fn empty_world() -> WorldConfig<f64> {
    WorldConfig { n_humans: 0, ..Default::default() }
}

fn reward() -> RewardConfig<f64> {
    RewardConfig::default()
}

fn robot(p: (f64, f64), g: (f64, f64)) -> AgentState<f64> {
    AgentState::at_rest(Vec2::new(p.0, p.1), Vec2::new(g.0, g.1), 0.3, 1.0)
}

#[test]
fn holonomic_step_is_exact_euler() {
    let world = empty_world();
    let r = robot((-2.0, 1.0), (4.0, 1.0));
    let (mut sim, _) = Simulator::from_states(&world, &reward(), PredictorKind::None, 0, r, vec![]).unwrap();
    let v = Vec2::new(0.6, -0.3);
    sim.step(Action::Velocity(v)).unwrap();
    assert_eq!(sim.robot().position, r.position + v * world.dt);
    assert_eq!(sim.robot().velocity, v);
}

#[test]
fn humans_integrate_with_their_policy_velocity() {
    let world = WorldConfig { n_humans: 1, ..Default::default() };
    let h = AgentState::at_rest(Vec2::new(0.0, 3.0), Vec2::new(0.0, -3.0), 0.4, 1.2);
    let (mut sim, _) =
        Simulator::from_states(&world, &reward(), PredictorKind::None, 0, robot((-5.0, -5.0), (5.0, -5.0)), vec![h]).unwrap();
    let v = sim.crowd().policy_velocities()[0];
    sim.step(Action::Velocity(Vec2::zero())).unwrap();
    assert_eq!(sim.humans()[0].position, h.position + v * world.dt);
}

#[test]
fn speed_is_capped() {
    let world = empty_world();
    let (mut sim, _) =
        Simulator::from_states(&world, &reward(), PredictorKind::None, 0, robot((0.0, 0.0), (5.0, 0.0)), vec![]).unwrap();
    let s = sim.step(Action::Velocity(Vec2::new(3.0, 4.0))).unwrap();
    assert!(s.info.action_clamped);
    assert!((sim.robot().velocity.norm() - 1.0).abs() < 1e-12);
    assert!((sim.robot().position - Vec2::new(0.15, 0.2)).norm() < 1e-12);
}

#[test]
fn potential_telescopes_over_a_truncated_run() {
    // Goal 20 m away, 5 s limit: every step is nominal.
    let world = WorldConfig { n_humans: 0, time_limit: 5.0, arena_size: 40.0, ..Default::default() };
    let (sim, obs) =
        Simulator::from_states(&world, &reward(), PredictorKind::None, 0, robot((-10.0, 0.0), (10.0, 0.0)), vec![]).unwrap();
    let rec = crowdnav_core::simulator::drive(sim, obs, &mut GoToGoal).unwrap();
    assert_eq!(rec.outcome, Outcome::Timeout);
    assert!(rec.steps.iter().all(|s| s.reward.branch == RewardBranch::Nominal));
    let sum: f64 = rec.steps.iter().map(|s| s.reward.potential).sum();
    let d_end = rec.steps.last().unwrap().d_goal;
    assert!((sum - 1.5 * (20.0 - d_end)).abs() < 1e-6, "{sum}");
}

#[test]
fn potential_telescopes_up_to_the_goal() {
    let world = empty_world();
    let start = robot((-4.0, -1.0), (3.0, 2.0));
    let d0 = start.distance_to_goal();
    let (sim, obs) = Simulator::from_states(&world, &reward(), PredictorKind::None, 0, start, vec![]).unwrap();
    let rec = crowdnav_core::simulator::drive(sim, obs, &mut GoToGoal).unwrap();
    assert_eq!(rec.outcome, Outcome::Success);
    let (last, nominal) = rec.steps.split_last().unwrap();
    assert_eq!(last.reward.total, 10.0);
    let sum: f64 = nominal.iter().map(|s| s.reward.potential).sum();
    let d_before_goal = nominal.last().unwrap().d_goal;
    assert!((sum - 1.5 * (d0 - d_before_goal)).abs() < 1e-6);
    assert!(last.d_goal <= world.goal_tolerance);
    assert!(d_before_goal > world.goal_tolerance);
}

#[test]
fn straight_run_takes_the_expected_number_of_steps() {
    let world = empty_world();
    for (g, d) in [((6.0, 0.0), 6.0), ((0.0, 7.3), 7.3), ((3.0, 4.0), 5.0)] {
        let start = robot((0.0, 0.0), g);
        let (sim, obs) = Simulator::from_states(&world, &reward(), PredictorKind::None, 0, start, vec![]).unwrap();
        let rec = crowdnav_core::simulator::drive(sim, obs, &mut GoToGoal).unwrap();
        let expected = ((d - world.goal_tolerance) / (world.robot_v_max * world.dt) - 1e-9).ceil() as usize;
        assert_eq!(rec.outcome, Outcome::Success);
        assert_eq!(rec.len(), expected, "goal {g:?}");
    }
}

#[test]
fn stationary_robot_times_out() {
    let rec = run_episode(&empty_world(), &reward(), PredictorKind::None, &mut Stationary, 3).unwrap();
    assert_eq!(rec.outcome, Outcome::Timeout);
    assert!(rec.outcome.is_truncated() && !rec.outcome.is_terminated());
    assert_eq!(rec.len(), 200);
    assert!(rec.steps.iter().all(|s| s.reward.total == 0.0));
}

#[test]
fn overlap_at_placement_collides_on_the_first_step() {
    let world = WorldConfig { n_humans: 1, ..Default::default() };
    let h = AgentState::at_rest(Vec2::new(0.3, 0.0), Vec2::new(0.3, 0.0), 0.3, 1.0);
    let (mut sim, _) =
        Simulator::from_states(&world, &reward(), PredictorKind::None, 0, robot((0.0, 0.0), (5.0, 0.0)), vec![h]).unwrap();
    let s = sim.step(Action::Velocity(Vec2::zero())).unwrap();
    assert_eq!(s.outcome, Some(Outcome::Collision));
    assert_eq!(s.reward.total, -10.0);
    assert!(Outcome::Collision.is_terminated());
}

#[test]
fn goal_wins_a_tie_with_collision() {
    let world = WorldConfig { n_humans: 1, ..Default::default() };
    let h = AgentState::at_rest(Vec2::new(0.5, 0.0), Vec2::new(0.5, 0.0), 0.3, 1.0);
    let (mut sim, _) =
        Simulator::from_states(&world, &reward(), PredictorKind::None, 0, robot((0.0, 0.0), (0.1, 0.0)), vec![h]).unwrap();
    let s = sim.step(Action::Velocity(Vec2::zero())).unwrap();
    assert_eq!(s.outcome, Some(Outcome::Success));
    assert_eq!(s.reward.total, 10.0);
}

#[test]
fn stepping_after_the_end_is_an_error() {
    let world = empty_world();
    let (mut sim, _) =
        Simulator::from_states(&world, &reward(), PredictorKind::None, 0, robot((0.0, 0.0), (0.1, 0.0)), vec![]).unwrap();
    assert_eq!(sim.step(Action::Velocity(Vec2::zero())).unwrap().outcome, Some(Outcome::Success));
    assert!(matches!(sim.step(Action::Velocity(Vec2::zero())), Err(Error::Usage(_))));
}

#[test]
fn bad_actions_are_rejected() {
    let world = empty_world();
    let (mut sim, _) =
        Simulator::from_states(&world, &reward(), PredictorKind::None, 0, robot((0.0, 0.0), (5.0, 0.0)), vec![]).unwrap();
    assert!(matches!(sim.step(Action::Unicycle { speed: 1.0, turn_rate: 0.0 }), Err(Error::Usage(_))));
    assert!(matches!(sim.step(Action::Velocity(Vec2::new(f64::NAN, 0.0))), Err(Error::Usage(_))));
    assert_eq!(sim.steps_taken(), 0);
}

#[test]
fn resets_respect_the_scenario_constraints() {
    let world = WorldConfig::<f64>::default();
    let half = world.arena_size / 2.0;
    for seed in 0..500 {
        let (sim, obs) = Simulator::reset(&world, &reward(), PredictorKind::None, seed).unwrap();
        let r = sim.robot();
        assert_eq!(sim.humans().len(), 20);
        assert_eq!(r.velocity, Vec2::zero());
        assert!(r.position.distance(r.goal) >= world.min_start_goal_separation);
        let inside = |a: &AgentState<f64>| {
            a.position.x.abs() <= half - a.radius + 1e-12 && a.position.y.abs() <= half - a.radius + 1e-12
        };
        assert!(inside(r));
        for (i, h) in sim.humans().iter().enumerate() {
            assert!(inside(h), "seed {seed} human {i}");
            assert!((0.3..=0.5).contains(&h.radius));
            assert!((0.5..=1.5).contains(&h.v_max));
            assert!(h.position.distance(h.goal) >= world.min_start_goal_separation);
            assert!(r.surface_distance(h) >= world.spawn_clearance - 1e-12);
            for other in &sim.humans()[i + 1..] {
                assert!(h.surface_distance(other) >= world.spawn_clearance - 1e-12, "seed {seed}");
            }
        }
        assert_eq!(obs.step, 0);
    }
}

#[test]
fn same_seed_same_episode() {
    let world = WorldConfig::<f64>::default();
    for predictor in [PredictorKind::None, PredictorKind::ConstVel, PredictorKind::GroundTruth] {
        let a = run_episode(&world, &reward(), predictor, &mut GoToGoal, 11).unwrap();
        let b = run_episode(&world, &reward(), predictor, &mut GoToGoal, 11).unwrap();
        assert_eq!(a, b);
    }
    let c = run_episode(&world, &reward(), PredictorKind::None, &mut GoToGoal, 12).unwrap();
    let a = run_episode(&world, &reward(), PredictorKind::None, &mut GoToGoal, 11).unwrap();
    assert_ne!(a.initial_robot, c.initial_robot);
}

#[test]
fn overcrowded_arena_is_a_config_error() {
    let world = WorldConfig { n_humans: 400, ..Default::default() };
    assert!(matches!(Simulator::reset(&world, &reward(), PredictorKind::None, 0), Err(Error::Config(_))));
}

#[test]
fn observation_layout_is_stable() {
    let world = WorldConfig { n_humans: 3, sensor_range: 100.0, ..Default::default() };
    let (_, obs) = Simulator::reset(&world, &reward(), PredictorKind::None, 5).unwrap();
    let layout = obs.layout();
    assert_eq!(layout.version, OBSERVATION_LAYOUT_VERSION);
    assert_eq!(layout.len(), 9 + 3 * 3);
    let flat = obs.flatten();
    assert_eq!(flat.len(), layout.len());
    let r = obs.robot;
    assert_eq!(&flat[..9], &[r.position.x, r.position.y, r.velocity.x, r.velocity.y, r.goal.x, r.goal.y, r.v_max, r.heading, r.radius]);
    for h in &obs.humans {
        let o = layout.human_offset(h.id);
        assert_eq!(&flat[o..o + 2], &[h.position.x, h.position.y]);
        assert_eq!(flat[layout.mask_offset() + h.id], 1.0);
    }
    assert_eq!(ObservationLayout::new(3).mask_offset(), 15);
}

#[test]
fn hidden_humans_are_zeroed_and_masked() {
    let world = WorldConfig { n_humans: 1, sensor_range: 2.0, ..Default::default() };
    let far = AgentState::at_rest(Vec2::new(5.0, 5.0), Vec2::new(-5.0, 5.0), 0.3, 1.0);
    let (_, obs) = Simulator::from_states(&world, &reward(), PredictorKind::None, 0, robot((0.0, 0.0), (5.0, 0.0)), vec![far]).unwrap();
    assert!(obs.humans.is_empty());
    assert_eq!(obs.visible, vec![false]);
    assert_eq!(&obs.flatten()[9..], &[0.0, 0.0, 0.0]);
}

#[test]
fn history_is_bounded_by_memory() {
    let world = WorldConfig { n_humans: 2, sensor_range: 100.0, ..Default::default() };
    let (mut sim, mut obs) = Simulator::reset(&world, &reward(), PredictorKind::None, 1).unwrap();
    for _ in 0..8 {
        obs = sim.step(Action::Velocity(Vec2::zero())).unwrap().observation;
    }
    for h in &obs.humans {
        assert_eq!(h.past.len(), world.memory);
        let v = h.estimated_velocity(world.dt).unwrap();
        assert!((v - sim.humans()[h.id].velocity).norm() < 1e-12);
    }
}

fn unicycle_step_error(dt: f64) -> f64 {
    let world = WorldConfig { n_humans: 0, kinematics: Kinematics::Unicycle, dt, ..Default::default() };
    let start = robot((0.0, 0.0), (5.0, 5.0));
    let (mut sim, _) = Simulator::from_states(&world, &reward(), PredictorKind::None, 0, start, vec![]).unwrap();
    let (v, w) = (0.8, 1.3);
    sim.step(Action::Unicycle { speed: v, turn_rate: w }).unwrap();
    // Fine-step oracle of the continuous arc.
    let n = 100_000;
    let h = dt / n as f64;
    let (mut x, mut y, mut th) = (0.0, 0.0, start.heading);
    for _ in 0..n {
        x += v * th.cos() * h;
        y += v * th.sin() * h;
        th += w * h;
    }
    assert!((sim.robot().heading - th).abs() < 1e-9);
    (sim.robot().position - Vec2::new(x, y)).norm()
}

#[test]
fn unicycle_local_error_is_second_order() {
    let e1 = unicycle_step_error(0.2);
    let e2 = unicycle_step_error(0.1);
    let e3 = unicycle_step_error(0.05);
    assert!(e1 < 0.8 * 1.3 * 0.2 * 0.2, "{e1}");
    for ratio in [e1 / e2, e2 / e3] {
        assert!((3.6..4.4).contains(&ratio), "{e1} {e2} {e3}");
    }
}

#[test]
fn f32_instantiation_runs() {
    let world = WorldConfig::<f32> { n_humans: 5, ..Default::default() };
    let rec = run_episode(&world, &RewardConfig::<f32>::default(), PredictorKind::ConstVel, &mut GoToGoal, 2).unwrap();
    assert!(!rec.steps.is_empty());
    assert!(rec.steps.iter().all(|s| s.robot.is_finite()));
}
