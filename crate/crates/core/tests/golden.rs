use prioplan_core::cost::SyntheticCosts;
use prioplan_core::prioritized::{pp, rpp, sequential_oracle, verify_solution, FailureReason, Outcome, PlannerConfig};
use prioplan_core::roadmap::check_rpp_solvable;
use prioplan_core::scenarios;
use prioplan_core::sim::{run_ad, run_sd, SimConfig, SimStatus};
use prioplan_core::prioritized::Solver;

fn cfg() -> PlannerConfig {
    PlannerConfig::default()
}

fn costs() -> SyntheticCosts {
    SyntheticCosts::uniform(1.0, 0.1)
}

fn failed_robot(o: &Outcome) -> Option<usize> {
    o.failure().map(|f| f.robot)
}

fn solved_clean(inst: &prioplan_core::problem::ProblemInstance, o: &Outcome) -> bool {
    o.solution().is_some_and(|s| verify_solution(inst, s).is_empty())
}

#[test]
fn corridor_swap_defeats_every_planner() {
    let inst = scenarios::corridor_swap().unwrap();
    assert!(pp(&inst, &cfg(), &mut costs()).unwrap().failure().is_some());
    let rev = inst.permuted(&[1, 0]);
    assert!(pp(&rev, &cfg(), &mut costs()).unwrap().failure().is_some());
    assert!(rpp(&inst, &cfg(), &mut costs()).unwrap().failure().is_some());
    assert!(!check_rpp_solvable(&inst).unwrap().solvable);
    let sd = run_sd(&inst, &SimConfig::new(Solver::SdRpp), &mut costs()).unwrap();
    assert!(!sd.succeeded());
}

#[test]
fn type_a() {
    let inst = scenarios::type_a().unwrap();
    let p = pp(&inst, &cfg(), &mut costs()).unwrap();
    assert_eq!(failed_robot(&p), Some(2));
    let r = rpp(&inst, &cfg(), &mut costs()).unwrap();
    assert!(solved_clean(&inst, &r), "{r:?}");
}

#[test]
fn type_b() {
    let inst = scenarios::type_b().unwrap();
    let p = pp(&inst, &cfg(), &mut costs()).unwrap();
    assert_eq!(failed_robot(&p), Some(2));
    let r = rpp(&inst, &cfg(), &mut costs()).unwrap();
    assert!(solved_clean(&inst, &r), "{r:?}");
}

#[test]
fn rpp_limitation() {
    let inst = scenarios::rpp_limitation().unwrap();
    let p = pp(&inst, &cfg(), &mut costs()).unwrap();
    assert!(solved_clean(&inst, &p));
    let r = rpp(&inst, &cfg(), &mut costs()).unwrap();
    let f = r.failure().expect("rpp must fail");
    assert_eq!(f.robot, 1);
    assert_eq!(f.reason, FailureReason::NoStaticPath);
    assert!(!check_rpp_solvable(&inst).unwrap().solvable);
}

#[test]
fn start_avoid_detour_costs_robot_one() {
    let inst = scenarios::start_avoid_detour().unwrap();
    let p = pp(&inst, &cfg(), &mut costs()).unwrap();
    let r = rpp(&inst, &cfg(), &mut costs()).unwrap();
    assert!(solved_clean(&inst, &p) && solved_clean(&inst, &r));
    let g = inst.goal_point(0);
    let tp = p.solution().unwrap().trajectory_of(1).unwrap().arrival_time(g).unwrap();
    let tr = r.solution().unwrap().trajectory_of(1).unwrap().arrival_time(g).unwrap();
    assert_eq!(tp, 9.0);
    assert!(tr > tp, "{tr} vs {tp}");
}

#[test]
fn oracle_solves_solvable_goldens() {
    let inst = scenarios::start_avoid_detour().unwrap();
    let o = sequential_oracle(&inst, &cfg()).unwrap();
    assert!(solved_clean(&inst, &o));
}

#[test]
fn slow_bystander_ad_beats_sd() {
    let inst = scenarios::slow_bystander().unwrap();
    let table = SyntheticCosts::uniform(1.0, 0.1).with_plan(2, 5.0);
    let sd = run_sd(&inst, &SimConfig::new(Solver::SdRpp), &mut table.clone()).unwrap();
    let ad = run_ad(&inst, &SimConfig::new(Solver::AdRpp), &mut table.clone()).unwrap();
    assert!(sd.succeeded() && ad.succeeded());
    assert!(ad.time_to_solution < sd.time_to_solution, "ad {} sd {}", ad.time_to_solution, sd.time_to_solution);
    for o in [&sd, &ad] {
        assert!(verify_solution(&inst, o.solution.as_ref().unwrap()).is_empty());
        assert_eq!(o.messages_from(0), 1);
    }
}

#[test]
fn two_conflicts_ad_sends_more() {
    let inst = scenarios::two_conflict().unwrap();
    let sd = run_sd(&inst, &SimConfig::new(Solver::SdPp), &mut costs()).unwrap();
    let ad = run_ad(&inst, &SimConfig::new(Solver::AdPp), &mut costs()).unwrap();
    assert!(sd.succeeded() && ad.succeeded());
    assert_eq!(sd.replans[2], 2, "{:?}", sd.replans);
    assert_eq!(ad.replans[2], 3, "{:?}", ad.replans);
    assert!(ad.messages > sd.messages);
}

#[test]
fn single_robot_runs() {
    let inst = scenarios::slow_bystander().unwrap().truncated(1);
    let sd = run_sd(&inst, &SimConfig::new(Solver::SdPp), &mut costs()).unwrap();
    assert!(sd.succeeded());
    assert_eq!(sd.messages, 1);
    assert_eq!(sd.rounds, Some(2));
    let ad = run_ad(&inst, &SimConfig::new(Solver::AdPp), &mut costs()).unwrap();
    assert_eq!(ad.status, SimStatus::Success);
    assert_eq!(ad.messages, 1);
    assert!((ad.time_to_solution - 1.0).abs() < 1e-12);
}
