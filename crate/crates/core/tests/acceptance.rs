//! The acceptance gate: twelve exact checks, one line of output each.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qbrst::bar::{verify_chain_map, verify_subcomplex, verify_w_identity, BarChain, Ideal};
use qbrst::braid::{self, compute_height, verify_braid_suite, Height, Representation};
use qbrst::brst::{
    build_brst_explicit, build_brst_recursive, q_squared, test_monomials, verify_closed_action, verify_constructions,
    BrstCoefficients, GhostAlgebra,
};
use qbrst::format::{bundled, BUNDLED};
use qbrst::graded::{
    check_twisted_yang_baxter, super_permutation_sigma, transform_structure, twisted_super_permutation,
    validate_grading, GradingMatrix,
};
use qbrst::linop::{digits, LinOp};
use qbrst::qlie::{perturb_bracket, StructureConstants};
use qbrst::report::VerificationReport;
use qbrst::Scalar;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn first_failure(reports: &[VerificationReport]) -> Option<String> {
    reports.iter().flat_map(|r| r.failures().map(move |c| (r, c))).next().map(|(r, c)| {
        let w = c
            .witness
            .as_ref()
            .map(|w| format!(" at {}: {} != {}", w.component, w.left, w.right))
            .unwrap_or_default();
        format!("{}: {} [{}]{w}", r.subject, c.id, c.subject)
    })
}

fn summarize(reports: &[VerificationReport], budget: Duration, elapsed: Duration) -> Outcome {
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    let skipped: usize = reports.iter().map(|r| r.summary().skipped).sum();
    if let Some(f) = first_failure(reports) {
        return Outcome::new(false, f);
    }
    if skipped > 0 {
        return Outcome::new(false, format!("{skipped} of {checks} checks skipped"));
    }
    if elapsed > budget {
        return Outcome::new(false, format!("{checks} checks passed but took {elapsed:?} (budget {budget:?})"));
    }
    Outcome::new(true, format!("{checks} checks"))
}

fn algebras() -> Vec<StructureConstants> {
    BUNDLED.iter().map(|n| bundled(n).unwrap()).collect()
}

fn recursive(sc: &StructureConstants, r_max: usize) -> BrstCoefficients {
    build_brst_recursive(sc, &sc.solve_t_lift().unwrap().t, r_max).unwrap()
}

/// Ghost degree used by the Q² and chain-map criteria.
fn test_degree(sc: &StructureConstants) -> usize {
    match compute_height(&sc.sigma_rep(), 4) {
        Height::Exact(h) => h.min(3),
        Height::AtLeast(_) => 3,
    }
}

fn structure_validation() -> Outcome {
    let mut reports = Vec::new();
    for sc in algebras() {
        let start = Instant::now();
        let mut rep = sc.validate_structure();
        rep.extend(sc.check_yang_baxter());
        if start.elapsed() > Duration::from_secs(5) {
            return Outcome::new(false, format!("{} took {:?}", sc.name, start.elapsed()));
        }
        reports.push(rep);
    }
    let base = summarize(&reports, Duration::MAX, Duration::ZERO);
    if !base.pass {
        return base;
    }
    let broken = perturb_bracket(&bundled("sl2").unwrap(), 2, 3, 1, 1);
    let rep = broken.validate_structure();
    let rejected = rep.failures().find(|c| c.witness.is_some()).map(|c| c.id.clone());
    match rejected {
        Some(id) => Outcome::new(true, format!("{}; perturbed sl2 fails {id} with a witness", base.detail)),
        None => Outcome::new(false, "perturbed sl2 is not rejected with a witness"),
    }
}

fn braid_suite() -> Outcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    for sc in algebras() {
        reports.push(verify_braid_suite(&sc.sigma_rep(), 4, &format!("{} σ", sc.name)));
        reports.push(verify_braid_suite(&sc.extended_rep(), 4, &format!("{} R", sc.name)));
    }
    summarize(&reports, Duration::from_secs(30), start.elapsed())
}

fn heights() -> Outcome {
    let start = Instant::now();
    let cases = [
        ("permutation d=2", Representation::permutation(2), Height::Exact(2)),
        ("sl2", bundled("sl2").unwrap().sigma_rep(), Height::Exact(3)),
        ("hecke2", bundled("hecke2").unwrap().sigma_rep(), Height::Exact(2)),
        ("abelian1", bundled("abelian1").unwrap().sigma_rep(), Height::Exact(1)),
    ];
    let mut found = Vec::new();
    for (name, rep, want) in cases {
        let h = compute_height(&rep, 5);
        if h != want {
            return Outcome::new(false, format!("{name}: height {h}, expected {want}"));
        }
        found.push(format!("{name} {h}"));
    }
    if start.elapsed() > Duration::from_secs(5) {
        return Outcome::new(false, format!("took {:?}", start.elapsed()));
    }
    Outcome::new(true, found.join(", "))
}

fn jucys_murphy() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for sc in algebras() {
        let rep = sc.extended_rep();
        let js: Vec<LinOp> = (1..=4)
            .map(|r| rep.evaluate(&braid::build_jucys_murphy(r).unwrap(), 4).unwrap())
            .collect();
        for a in &js {
            for b in &js {
                if a.compose(b).unwrap() != b.compose(a).unwrap() {
                    return Outcome::new(false, format!("{}: Jucys–Murphy elements do not commute", sc.name));
                }
                count += 1;
            }
        }
        for r in 1..=3 {
            let z = sc.build_z(r + 1).unwrap();
            if sc.jucys_murphy_block(r + 1).unwrap() != z {
                return Outcome::new(false, format!("{}: block of J_{} differs from Z_{}", sc.name, r + 1, r + 1));
            }
            if sc.build_z_explicit(r + 1).unwrap() != z {
                return Outcome::new(false, format!("{}: Z_{} recursion differs from the explicit sum", sc.name, r + 1));
            }
            count += 2;
        }
    }
    if start.elapsed() > Duration::from_secs(10) {
        return Outcome::new(false, format!("took {:?}", start.elapsed()));
    }
    Outcome::new(true, format!("{count} identities"))
}

fn brst_constructions() -> Outcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    for (name, r_max) in [("sl2", 2), ("gl11", 3)] {
        let sc = bundled(name).unwrap();
        let rep = verify_constructions(&sc, r_max);
        if rep.find("brst_recursive_vs_explicit").count() != r_max {
            return Outcome::new(false, format!("{name}: expected {r_max} degree comparisons"));
        }
        reports.push(rep);
    }
    for name in ["hecke2", "abelian1"] {
        let sc = bundled(name).unwrap();
        if !recursive(&sc, 3).is_zero() || !build_brst_explicit(&sc, 3).unwrap().is_zero() {
            return Outcome::new(false, format!("{name}: nonzero BRST coefficient"));
        }
    }
    let out = summarize(&reports, Duration::from_secs(10), start.elapsed());
    Outcome::new(out.pass, format!("{}; hecke2 and abelian1 vanish", out.detail))
}

fn nilpotency() -> Outcome {
    let start = Instant::now();
    let mut monomials = 0;
    let mut not_in_ideal = None;
    let mut linear_nonzero = Vec::new();
    for sc in algebras() {
        let deg = test_degree(&sc);
        let coeffs = recursive(&sc, deg.saturating_sub(1).max(1));
        let alg = GhostAlgebra::new(&sc, deg).unwrap();
        let ideal = Ideal::new(&sc, 3);
        let mut linear = 0;
        for d in 1..=deg {
            for (a, j) in test_monomials(sc.n(), d) {
                let o = q_squared(&alg, &coeffs, &ideal, &a, &j).unwrap();
                monomials += 1;
                if !o.in_ideal && not_in_ideal.is_none() {
                    not_in_ideal = Some(format!("{} a={a:?} j={j:?}", sc.name));
                }
                if !o.chi_linear_zero {
                    linear += 1;
                }
            }
        }
        if linear > 0 {
            linear_nonzero.push(format!("{} on {linear} monomials", sc.name));
        }
    }
    let elapsed = start.elapsed();
    if let Some(m) = not_in_ideal {
        return Outcome::new(false, format!("Q² not in the ideal for {m}"));
    }
    let reduced = format!("Q² ≡ 0 mod ideal on {monomials} monomials in {elapsed:.1?}");
    if !linear_nonzero.is_empty() {
        return Outcome::new(
            false,
            format!("{reduced}; χ-linear part nonzero before reduction for {}", linear_nonzero.join(", ")),
        );
    }
    if elapsed > Duration::from_secs(60) {
        return Outcome::new(false, format!("{reduced}, over the 60s budget"));
    }
    Outcome::new(true, format!("{reduced}; χ-linear part vanishes before reduction"))
}

fn closed_action() -> Outcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    for name in ["sl2", "gl11"] {
        let sc = bundled(name).unwrap();
        let alg = GhostAlgebra::new(&sc, 3).unwrap();
        reports.push(verify_closed_action(&alg, &recursive(&sc, 2), 3));
    }
    summarize(&reports, Duration::MAX, start.elapsed())
}

fn random_chain(rng: &mut ChaCha8Rng) -> BarChain {
    let degree = rng.gen_range(1..=4);
    let mut c = BarChain::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let slots: Vec<Vec<usize>> = (0..=degree)
            .map(|_| (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..3)).collect())
            .collect();
        c.add_term(slots, &Scalar::from(rng.gen_range(-5i64..=5)));
    }
    c
}

fn bar_complex() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for k in 0..200 {
        let c = random_chain(&mut rng);
        let b = c.boundary().unwrap();
        let deep = c.terms().all(|(s, _)| s.len() >= 3);
        if deep && !b.boundary().unwrap().is_zero() {
            return Outcome::new(false, format!("b² ≠ 0 on chain {k}"));
        }
        if b.homotopy().add(&c.homotopy().boundary().unwrap()) != c {
            return Outcome::new(false, format!("δb + bδ ≠ id on chain {k}"));
        }
    }
    Outcome::new(true, "200 chains")
}

fn w_identity() -> Outcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    for name in ["sl2", "gl11"] {
        let sc = bundled(name).unwrap();
        let rep = verify_w_identity(&sc, 3);
        if rep.find("w_lift_identity").count() <= 3 {
            return Outcome::new(false, format!("{name}: no kernel-shifted lifts were tested"));
        }
        reports.push(rep);
        reports.push(verify_subcomplex(&sc, 4));
    }
    summarize(&reports, Duration::MAX, start.elapsed())
}

fn chain_map() -> Outcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    for name in ["sl2", "gl11", "hecke2"] {
        let sc = bundled(name).unwrap();
        let deg = test_degree(&sc);
        let alg = GhostAlgebra::new(&sc, deg).unwrap();
        reports.push(verify_chain_map(&alg, &recursive(&sc, deg.saturating_sub(1).max(1)), deg));
    }
    summarize(&reports, Duration::MAX, start.elapsed())
}

fn classical_oracle() -> Outcome {
    let sc = bundled("sl2").unwrap();
    let coeffs = recursive(&sc, 2);
    let alg = GhostAlgebra::new(&sc, 3).unwrap();
    let mut count = 0;
    for deg in 1..=3 {
        let sign = if deg % 2 == 1 { 1 } else { -1 };
        for a in [vec![], vec![0], vec![1], vec![2]] {
            for flat in 0..3usize.pow(deg as u32) {
                let j = digits(flat, deg, 3);
                let q = common::q_chain(&alg, &coeffs, &a, &j);
                let d = common::scaled(&common::ce_differential(common::sl2_bracket, &a, &j), sign);
                if q != d {
                    return Outcome::new(false, format!("a={a:?} j={j:?}: Q differs from (−1)^(n+1) d"));
                }
                count += 1;
            }
        }
    }
    Outcome::new(true, format!("Q = (−1)^(n+1) d on {count} monomials"))
}

fn grading() -> Outcome {
    let sc = bundled("gl11").unwrap();
    let d = GradingMatrix::of(&sc).unwrap().expect("gl11 carries a grading");
    let parities = d.parities().expect("parity grading").to_vec();
    let v = validate_grading(&sc, &d).unwrap();
    if !v.all_passed() {
        return Outcome::new(false, first_failure(&[v]).unwrap());
    }
    if transform_structure(&sc, &d).unwrap() != sc {
        return Outcome::new(false, "transform is not a fixed point");
    }
    let yb = check_twisted_yang_baxter(&sc, &d).unwrap();
    if !yb.all_passed() {
        return Outcome::new(false, first_failure(&[yb]).unwrap());
    }
    if sc.sigma != super_permutation_sigma(&parities) {
        return Outcome::new(false, "σ is not the super-permutation");
    }
    // D₁σD₁⁻¹ entry by entry against −(−1)^{(p_m+1)(p_k+1)} δ^m_j δ^k_i
    let n = sc.n();
    let d1 = d.matrix().kron(&LinOp::identity(n, 1)).unwrap();
    let d1_inv = d.inverse().kron(&LinOp::identity(n, 1)).unwrap();
    let tw = d1.compose(&sc.sigma).unwrap().compose(&d1_inv).unwrap();
    for out in 0..n * n {
        for inp in 0..n * n {
            let (i, j) = (out / n, out % n);
            let (m, k) = (inp / n, inp % n);
            let expected = if m == j && k == i {
                let e = (parities[m] as i64 + 1) * (parities[k] as i64 + 1);
                Scalar::from(if e % 2 == 0 { -1 } else { 1 })
            } else {
                Scalar::zero()
            };
            if tw.at(out, inp) != &expected {
                return Outcome::new(false, format!("twisted σ at ({i},{j};{m},{k})"));
            }
        }
    }
    if tw != twisted_super_permutation(&parities) {
        return Outcome::new(false, "library twisted formula differs");
    }
    Outcome::new(true, "validate, fixed point, twisted YB, twisted super-permutation")
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("structure validation", structure_validation),
        ("braid suite", braid_suite),
        ("heights", heights),
        ("Jucys–Murphy", jucys_murphy),
        ("BRST constructions", brst_constructions),
        ("Q² = 0", nilpotency),
        ("closed action", closed_action),
        ("bar complex", bar_complex),
        ("W identity and subcomplex", w_identity),
        ("chain map", chain_map),
        ("classical oracle", classical_oracle),
        ("grading", grading),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {} ({:.2?})", k + 1, o.detail, start.elapsed());
        if !o.pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
