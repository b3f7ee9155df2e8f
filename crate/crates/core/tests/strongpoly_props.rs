mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

use common::{instance, matrix_upto};
use graver_ilp::augment::{ExactGraverOracle, GraverBestOracle};
use graver_ilp::ilp::{brute_force_optima, brute_force_solve};
use graver_ilp::strongpoly::{
    distance_inf, feasibility_phase, hnf_solve, lp_feasible, proximity_cinf, proximity_radius, reduce_bounds,
    solve_lp_relaxation, solve_with, LpStatus, Reduction,
};
use graver_ilp::Status;

fn q(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pipeline_matches_brute_force(inst in instance(4, 3, 2, 3)) {
        let oracle = ExactGraverOracle::for_matrix(inst.a()).unwrap();
        let got = solve_with(&inst, &oracle).unwrap();
        let want = brute_force_solve(&inst, None).unwrap();
        prop_assert_eq!(&got.status, &want.status);
        prop_assert_eq!(&got.objective, &want.objective);
        if let Some(x) = &got.point {
            prop_assert!(inst.is_feasible(x).unwrap());
        }
        for run in &got.runs {
            prop_assert!(BigInt::from(run.steps) <= run.step_budget());
        }
    }

    #[test]
    fn relaxation_bounds_the_integer_optimum(inst in instance(4, 3, 2, 3)) {
        let lp = solve_lp_relaxation(&inst).unwrap();
        let ilp = brute_force_solve(&inst, None).unwrap();
        match lp.status {
            LpStatus::Infeasible => prop_assert_eq!(ilp.status, Status::Infeasible),
            LpStatus::Unbounded => prop_assert!(false, "bounded instance reported unbounded"),
            LpStatus::Optimal => {
                let y = lp.point.unwrap();
                prop_assert!(lp_feasible(&inst, &y));
                let value: BigRational = y.iter().zip(inst.w()).map(|(v, w)| v * q(w)).sum();
                prop_assert_eq!(Some(&value), lp.objective.as_ref());
                if let Some(obj) = ilp.objective {
                    prop_assert!(value <= q(&obj));
                }
            }
        }
    }

    #[test]
    fn some_integer_optimum_is_close(inst in instance(4, 3, 2, 3)) {
        let lp = solve_lp_relaxation(&inst).unwrap();
        prop_assume!(lp.status == LpStatus::Optimal);
        let Some((_, optima)) = brute_force_optima(&inst, None).unwrap() else { return Ok(()) };
        let y = lp.point.unwrap();
        let radius = q(&(BigInt::from(inst.n()) * proximity_cinf(inst.a()).unwrap()));
        prop_assert!(optima.iter().any(|x| distance_inf(x, &y) <= radius));
    }

    #[test]
    fn reduction_keeps_the_optimum(inst in instance(4, 3, 2, 3)) {
        let lp = solve_lp_relaxation(&inst).unwrap();
        prop_assume!(lp.status == LpStatus::Optimal);
        let y = lp.point.unwrap();
        let want = brute_force_solve(&inst, None).unwrap();
        match reduce_bounds(&inst, &y).unwrap() {
            Reduction::Infeasible => prop_assert_eq!(want.status, Status::Infeasible),
            Reduction::Reduced(red) => {
                let radius = proximity_radius(inst.a());
                prop_assert_eq!(&red.radius, &radius);
                for (l, u) in red.instance.l().iter().zip(red.instance.u()) {
                    prop_assert!(l.finite().unwrap().abs() <= radius);
                    prop_assert!(u.finite().unwrap().abs() <= radius);
                }
                let got = brute_force_solve(&red.instance, None).unwrap();
                prop_assert_eq!(&got.status, &want.status);
                let offset = inst.objective(&red.shift);
                prop_assert_eq!(got.objective.map(|v| v + offset), want.objective);
                if let Some(p) = got.point {
                    prop_assert!(inst.is_feasible(&red.lift(&p)).unwrap());
                }
            }
        }
    }

    #[test]
    fn hnf_solutions_satisfy_the_equations(a in matrix_upto(3, 4, 3), x in proptest::collection::vec(-4i64..=4, 4)) {
        let x: Vec<BigInt> = x[..a.cols()].iter().map(|&v| BigInt::from(v)).collect();
        let b = a.mul_vec(&x).unwrap();
        let z = hnf_solve(&a, &b).unwrap();
        prop_assert!(z.is_some());
        prop_assert_eq!(a.mul_vec(&z.unwrap()).unwrap(), b);
    }

    #[test]
    fn feasibility_phase_makes_progress(inst in instance(4, 2, 2, 3)) {
        let lp = solve_lp_relaxation(&inst).unwrap();
        prop_assume!(lp.status == LpStatus::Optimal);
        let Reduction::Reduced(red) = reduce_bounds(&inst, &lp.point.unwrap()).unwrap() else { return Ok(()) };
        let Some(z) = hnf_solve(red.instance.a(), red.instance.b()).unwrap() else { return Ok(()) };
        let oracle = ExactGraverOracle::for_matrix(inst.a()).unwrap();
        let out = feasibility_phase(&red.instance, &z, &oracle as &dyn GraverBestOracle).unwrap();
        prop_assert!(out.violations.windows(2).all(|w| w[1] <= w[0]));
        let feasible = brute_force_solve(&red.instance, None).unwrap().status != Status::Infeasible;
        prop_assert_eq!(out.point.is_some(), feasible);
        if let Some(p) = out.point {
            prop_assert!(red.instance.is_feasible(&p).unwrap());
            prop_assert_eq!(*out.violations.last().unwrap(), 0);
        }
    }
}
