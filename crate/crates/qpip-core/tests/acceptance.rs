//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the test harness so the lines always print. The process fails
//! when a criterion's status differs from `EXPECTED`, not when a criterion
//! fails: a criterion the implementation cannot meet stays FAIL and is listed
//! there with the reason.

use std::time::{Duration, Instant};

use qpip_core::audit::stats::{binomial_sigma, chi2_uniform};
use qpip_core::audit::{
    blindness_audit, clifford_confidence, lemma_suite, named_policy, poly_confidence_scan, run_experiment,
    shipped_policies, AdversaryPolicy, KeyAverageMode, LemmaScope, ProtocolConfig, BETA_FLOOR,
};
use qpip_core::cliffauth::{cqas_security_experiment, default_environment, CliffordQasParams, KeyAverage};
use qpip_core::pcalg::clifford::enumerate_clifford;
use qpip_core::pcalg::gates::GateTag;
use qpip_core::pcalg::pauli::SymbolicPauli;
use qpip_core::polyauth::{pqas_security_experiment, sign_key_security_scan, PauliAverage};
use qpip_core::polycode::{
    apply_logical, codeword_state, encode_ek, is_k_correlated, Block, CodeParams, LogicalGateTag, SignKey,
};
use qpip_core::qcore::linalg::{root_of_unity, C64};
use qpip_core::qcore::rng::{random_density, random_state, random_unitary, seeded, ExperimentRng};
use qpip_core::qcore::{DensityMatrix, RegisterShape, StateVector, UnitaryMatrix};
use qpip_core::qpip::circuit::{CircuitIR, CircuitOp};
use qpip_core::qpip::clifford::{biased_test_circuit, zeno_test_circuit};
use qpip_core::qpip::prover::Claim;
use qpip_core::qpip::{magic_state, toffoli_gadget, PolyEngine};

type Outcome = Result<(bool, String), String>;

/// Criteria expected to fail, with the reason.
const EXPECTED: &[(u32, &str)] = &[(
    2,
    "up to four sign keys correlate a single Pauli; the averaged mass reaches 2^-d = 0.5, \
     not 1/2^(m-1) = 0.25",
)];

const Q: u32 = 5;

fn code() -> CodeParams {
    CodeParams::new(Q, 1, vec![1, 2, 3]).unwrap()
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn within(t: Instant, limit_s: u64) -> bool {
    t.elapsed() <= Duration::from_secs(limit_s)
}

// ---------------------------------------------------------------- criterion 1

fn clifford_qas() -> Outcome {
    let t = Instant::now();
    let mut rng = seeded(101);
    let params = CliffordQasParams::new(1, 1).map_err(err)?;
    let group = enumerate_clifford(2).map_err(err)?;
    if group.len() != 11520 {
        return Ok((false, format!("group has {} elements", group.len())));
    }
    let psi = random_state(RegisterShape::qubits(1).map_err(err)?, &mut rng);
    let env = default_environment();
    let env_id = UnitaryMatrix::identity(env.shape().clone());
    let mut attacks: Vec<UnitaryMatrix> = SymbolicPauli::all(2, 2)
        .skip(1)
        .map(|p| p.matrix().tensor(&env_id))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let joint = RegisterShape::qubits(3).map_err(err)?;
    attacks.extend((0..50).map(|_| random_unitary(joint.clone(), &mut rng)));
    let (mut worst, mut form) = (f64::MIN, 0.0f64);
    for u in &attacks {
        let r = cqas_security_experiment::<ExperimentRng>(&params, &psi, u, &env, KeyAverage::Exact(&group))
            .map_err(err)?;
        worst = worst.max(r.tr_pi0);
        form = form.max(r.form_residual.unwrap_or(f64::INFINITY));
    }
    let ok = attacks.len() == 65 && worst <= 0.5 + 1e-8 && form <= 1e-8 && within(t, 300);
    Ok((
        ok,
        format!("{} attacks, max Tr(pi0 rho) {worst:.6} <= 0.5, two-term residual {form:.1e}", attacks.len()),
    ))
}

// ---------------------------------------------------------------- criterion 2

/// Independent characterization of `k`-correlated Paulis for `d = 1`: the X part
/// must be a signed evaluation vector `k_i g(alpha_i)` of a degree-1 polynomial,
/// and the Z part must satisfy `sum_i z_i k_i alpha_i = 0` so its phase only
/// depends on the logical value.
fn correlated_oracle(op: &SymbolicPauli, k: &[i64], p: &CodeParams) -> bool {
    let q = p.q() as i64;
    let al: Vec<i64> = p.alphas().iter().map(|&a| a as i64).collect();
    let x: Vec<i64> = op.x().iter().map(|&v| v as i64).collect();
    let z: Vec<i64> = op.z().iter().map(|&v| v as i64).collect();
    let x_ok = (0..q).any(|g0| {
        (0..q).any(|g1| (0..3).all(|i| (k[i] * (g0 + g1 * al[i]) - x[i]).rem_euclid(q) == 0))
    });
    let z_ok = (0..3).map(|i| z[i] * k[i] * al[i]).sum::<i64>().rem_euclid(q) == 0;
    x_ok && z_ok
}

fn sign_key_scan() -> Outcome {
    let t = Instant::now();
    let p = code();
    let psi = StateVector::basis(RegisterShape::qudits(1, Q as usize).map_err(err)?, &[0]).map_err(err)?;
    let scan = sign_key_security_scan(&p, &psi).map_err(err)?;
    let keys: Vec<SignKey> = SignKey::all(3).collect();
    let (mut over_two, mut max_keys, mut disagreements, mut paulis) = (0usize, 0usize, 0usize, 0usize);
    for op in SymbolicPauli::all(Q, 3).skip(1) {
        paulis += 1;
        let mut n = 0;
        for k in &keys {
            let core = is_k_correlated(&op, k, &p).map_err(err)?;
            let signs: Vec<i64> = k.signs().iter().map(|&s| s as i64).collect();
            if core != correlated_oracle(&op, &signs, &p) {
                disagreements += 1;
            }
            n += core as usize;
        }
        over_two += (n > 2) as usize;
        max_keys = max_keys.max(n);
    }
    let stated_holds = scan.max_mass <= 0.5 + 1e-10;
    let ok = keys.len() == 8
        && paulis == 15624
        && disagreements == 0
        && scan.max_mass <= 0.25 + 1e-10
        && over_two == 0
        && within(t, 600);
    Ok((
        ok,
        format!(
            "max averaged mass {:.4} vs 0.25; {over_two} Paulis correlated with >2 keys (up to {max_keys}); \
             2^-d bound {}; correlation oracle disagreements {disagreements}",
            scan.max_mass,
            if stated_holds { "holds" } else { "VIOLATED" }
        ),
    ))
}

// ---------------------------------------------------------------- criterion 3

fn poly_qas() -> Outcome {
    let t = Instant::now();
    let mut rng = seeded(303);
    let p = code();
    let psi = random_state(RegisterShape::qudits(1, Q as usize).map_err(err)?, &mut rng);
    let scan = sign_key_security_scan(&p, &psi).map_err(err)?;
    let env_shape = RegisterShape::qudits(1, Q as usize).map_err(err)?;
    let joint = RegisterShape::qudits(4, Q as usize).map_err(err)?;
    let mut worst = f64::MIN;
    for _ in 0..50 {
        let env = random_density(env_shape.clone(), &mut rng);
        let u = random_unitary(joint.clone(), &mut rng);
        let r = pqas_security_experiment::<ExperimentRng>(&p, &psi, &u, &env, PauliAverage::Decoherence(&scan))
            .map_err(err)?;
        worst = worst.max(r.tr_pi0 - r.proof_bound);
    }
    // second route: literal sum over every key for one attack
    let none = DensityMatrix::maximally_mixed(RegisterShape::new(vec![]).map_err(err)?);
    let u = random_unitary(RegisterShape::qudits(3, Q as usize).map_err(err)?, &mut rng);
    let fast = pqas_security_experiment::<ExperimentRng>(&p, &psi, &u, &none, PauliAverage::Decoherence(&scan))
        .map_err(err)?;
    let lit = pqas_security_experiment::<ExperimentRng>(&p, &psi, &u, &none, PauliAverage::Literal).map_err(err)?;
    let routes = (fast.tr_pi0 - lit.tr_pi0).abs();
    let ok = worst <= 1e-8 && routes <= 1e-8 && within(t, 300);
    Ok((
        ok,
        format!("50 attacks, max Tr(pi0 rho) - (1-alpha_I)/2^(m-1) = {worst:.4}; literal vs decomposed {routes:.1e}"),
    ))
}

// ---------------------------------------------------------------- criterion 4

fn lemmas() -> Outcome {
    let t = Instant::now();
    let ledger = lemma_suite(&LemmaScope::All, &code(), 404).map_err(err)?;
    let worst = ledger
        .checks
        .iter()
        .filter(|c| c.tolerance > 0.0)
        .map(|c| c.residual)
        .fold(0.0, f64::max);
    let exact_ok = ledger.checks.iter().filter(|c| c.tolerance == 0.0).all(|c| c.residual == 0.0);
    let failed: Vec<&str> = ledger.failures().iter().map(|c| c.name.as_str()).collect();
    let ok = ledger.all_passed && ledger.missing.is_empty() && worst < 1e-8 && exact_ok && within(t, 600);
    Ok((
        ok,
        format!(
            "{} checks, worst float residual {worst:.1e}, failures {failed:?}, unregistered {:?}",
            ledger.checks.len(),
            ledger.missing
        ),
    ))
}

// ---------------------------------------------------------------- criterion 5

/// `q^{-d/2} sum_{f(0)=a} |k f(alpha)>` built straight from the definition.
fn codeword_oracle(a: u32, k: &SignKey, p: &CodeParams) -> StateVector {
    let q = p.q() as i64;
    let shape = RegisterShape::qudits(3, p.q() as usize).unwrap();
    let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
    let amp = 1.0 / (q as f64).sqrt();
    for g1 in 0..q {
        let digits: Vec<usize> = (0..3)
            .map(|i| ((k.signs()[i] as i64) * (a as i64 + g1 * p.alphas()[i] as i64)).rem_euclid(q) as usize)
            .collect();
        amps[shape.index(&digits).unwrap()] += C64::new(amp, 0.0);
    }
    StateVector::new(shape, amps).unwrap()
}

/// `1 - Re<want|got>`: sensitive to phases, unlike the fidelity.
fn phase_gap(want: &StateVector, got: &StateVector) -> f64 {
    1.0 - want.inner(got).re
}

fn superpose(terms: &[(C64, StateVector)]) -> StateVector {
    let shape = terms[0].1.shape().clone();
    let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
    for (c, s) in terms {
        for (o, v) in amps.iter_mut().zip(s.amplitudes()) {
            *o += *c * *v;
        }
    }
    StateVector::new(shape, amps).unwrap()
}

fn encoding_and_gates() -> Outcome {
    let p = code();
    let one = RegisterShape::qudits(1, Q as usize).unwrap();
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for k in SignKey::all(3) {
        let cw: Vec<StateVector> = (0..Q).map(|a| codeword_oracle(a, &k, &p)).collect();
        let b1 = [Block::new(0, k.clone())];
        let b2 = [Block::new(0, k.clone()), Block::new(3, k.clone())];
        for a in 0..Q {
            let basis = StateVector::basis(one.clone(), &[a as usize]).map_err(err)?;
            worst = worst.max(1.0 - encode_ek(&basis, &k, &p).map_err(err)?.fidelity(&cw[a as usize]));
            worst = worst.max(phase_gap(&cw[a as usize], &codeword_state(a, &k, &p).map_err(err)?));
            let s = &cw[a as usize];
            for x in 1..Q {
                let got = apply_logical(LogicalGateTag::LX(x), s, &b1, &p).map_err(err)?;
                worst = worst.max(phase_gap(&cw[((a + x) % Q) as usize], &got));
                let got = apply_logical(LogicalGateTag::LZ(x), s, &b1, &p).map_err(err)?;
                let want = superpose(&[(root_of_unity((a * x) as u64, Q), s.clone())]);
                worst = worst.max(phase_gap(&want, &got));
                let got = apply_logical(LogicalGateTag::LMul(x), s, &b1, &p).map_err(err)?;
                worst = worst.max(phase_gap(&cw[((a * x) % Q) as usize], &got));
                cases += 3;
            }
            let got = apply_logical(LogicalGateTag::LF, s, &b1, &p).map_err(err)?;
            let norm = 1.0 / (Q as f64).sqrt();
            let terms: Vec<(C64, StateVector)> =
                (0..Q).map(|b| (root_of_unity((a * b) as u64, Q) * norm, cw[b as usize].clone())).collect();
            worst = worst.max(phase_gap(&superpose(&terms), &got));
            for b in 0..Q {
                let s2 = s.tensor(&cw[b as usize]).map_err(err)?;
                let got = apply_logical(LogicalGateTag::LSum, &s2, &b2, &p).map_err(err)?;
                let want = s.tensor(&cw[((a + b) % Q) as usize]).map_err(err)?;
                worst = worst.max(phase_gap(&want, &got));
            }
            cases += 1 + Q as usize;
        }
    }
    Ok((
        worst < 1e-9,
        format!("{cases} logical-gate cases and 40 encodings over 8 sign keys, worst infidelity {worst:.1e}"),
    ))
}

// ---------------------------------------------------------------- criterion 6

/// `|a, b, c> -> |a, b, c + ab>` by moving amplitudes.
fn toffoli_oracle(psi: &StateVector) -> StateVector {
    let shape = psi.shape().clone();
    let mut out = vec![C64::new(0.0, 0.0); shape.total_dim()];
    for (i, amp) in psi.amplitudes().iter().enumerate() {
        let d = shape.digits(i);
        let target = [d[0], d[1], (d[2] + d[0] * d[1]) % Q as usize];
        out[shape.index(&target).unwrap()] = *amp;
    }
    StateVector::new(shape, out).unwrap()
}

fn toffoli_gadget_branches() -> Outcome {
    let mut rng = seeded(606);
    let shape = RegisterShape::qudits(3, Q as usize).unwrap();
    let magic = magic_state(Q);
    let mut counts = vec![0usize; 125];
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let psi = random_state(shape.clone(), &mut rng);
        let input = psi.tensor(&magic).map_err(err)?;
        let (l, out) = toffoli_gadget(&input, [0, 1, 2], [3, 4, 5], Q, &mut rng).map_err(err)?;
        let digits: Vec<usize> = l.iter().map(|&v| v as usize).collect();
        let corrected = out.slice(&[0, 1, 2], &digits).map_err(err)?;
        // each branch leaves its own global phase
        worst = worst.max(1.0 - toffoli_oracle(&psi).fidelity(&corrected));
        counts[shape.index(&digits).unwrap()] += 1;
    }
    let (stat, pval) = chi2_uniform(&counts);
    Ok((
        worst < 1e-8 && pval > 0.01,
        format!("1000 branches, worst infidelity to T psi {worst:.1e}; outcome chi2 {stat:.1} (124 dof), p = {pval:.3}"),
    ))
}

// ---------------------------------------------------------------- criterion 7

fn clifford_qpip() -> Outcome {
    let t = Instant::now();
    let circuit = biased_test_circuit(&mut seeded(9)).map_err(err)?;
    let proto = ProtocolConfig::Clifford {
        e: 1,
        broken_variant: false,
    };
    let trials = 10_000;
    let honest = run_experiment(&proto, &circuit, &[0, 1], &AdversaryPolicy::Honest, trials, 701).map_err(err)?;
    let target = 1.0 - circuit.gamma;
    let honest_ok = (honest.accept_rate - target).abs() <= 3.0 * binomial_sigma(target, trials);
    let mut worst = (f64::MIN, String::new());
    let mut all_within = true;
    let policies = shipped_policies(2, 2).map_err(err)?;
    for (i, pol) in policies.iter().enumerate() {
        let r = run_experiment(&proto, &circuit, &[0, 0], pol, trials, 710 + i as u64).map_err(err)?;
        let bound = circuit.gamma + 0.5 + 3.0 * binomial_sigma(circuit.gamma + 0.5, trials);
        all_within &= r.wrong_accept_rate <= bound && r.within_budget;
        if r.wrong_accept_rate > worst.0 {
            worst = (r.wrong_accept_rate, pol.name());
        }
    }
    let zeno = zeno_test_circuit(40).map_err(err)?;
    let broken = ProtocolConfig::Clifford {
        e: 1,
        broken_variant: true,
    };
    let nc = run_experiment(&broken, &zeno, &[0, 0], &AdversaryPolicy::zeno_default(), trials, 799).map_err(err)?;
    let beaten = nc.wrong_accept_rate > nc.bound + 3.0 * nc.sigma;
    let ok = honest_ok && all_within && beaten && within(t, 900);
    Ok((
        ok,
        format!(
            "honest accept {:.4} vs {target:.2}; worst of {} policies {:.4} ({}) <= 0.7 + 3 sigma; \
             broken variant vs slow rotation {:.4} > {:.2} + 3 sigma",
            honest.accept_rate,
            policies.len(),
            worst.0,
            worst.1,
            nc.wrong_accept_rate,
            nc.bound
        ),
    ))
}

// ---------------------------------------------------------------- criterion 8

fn poly_qpip() -> Outcome {
    let t = Instant::now();
    let p = code();
    let dense = ProtocolConfig::Poly {
        params: p.clone(),
        engine: PolyEngine::Dense,
    };
    // x, times 2, F twice (negation): a -> -2(a + 1)
    let mut c = CircuitIR::qudits(1, Q);
    c.push(CircuitOp::gate(GateTag::X, &[0])).map_err(err)?;
    c.push(CircuitOp::gate(GateTag::Mr(2), &[0])).map_err(err)?;
    c.push(CircuitOp::gate(GateTag::F, &[0])).map_err(err)?;
    c.push(CircuitOp::gate(GateTag::F, &[0])).map_err(err)?;
    let mut rng = seeded(801);
    let mut honest_ok = true;
    for a in 0..Q {
        let want = ((-2 * (a as i64 + 1)).rem_euclid(Q as i64)) as u32;
        honest_ok &= c.reference_output(&[a as usize]).map_err(err)?.0[0] as u32 == want;
        for _ in 0..50 {
            let mut prover = AdversaryPolicy::Honest.prover(Claim::Yes).map_err(err)?;
            let rec = dense.run(&c, &[a], &mut prover, &mut rng).map_err(err)?;
            honest_ok &= rec.invalid_rounds.is_empty()
                && rec.output.as_ref().map(|o| o[0]) == Some(want)
                && rec.accepted() == (want == 1);
        }
    }
    let xflip = named_policy("x-flip", 3).map_err(err)?;
    let trials = 2000;
    let r = run_experiment(&dense, &c, &[0], &xflip, trials, 802).map_err(err)?;
    let abort_ok = r.abort_rate >= 0.75 - 3.0 * binomial_sigma(0.75, trials);

    let frame = ProtocolConfig::Poly {
        params: p,
        engine: PolyEngine::LogicalFrame,
    };
    let tof = CircuitIR::new(vec![Q as usize; 3], vec![CircuitOp::gate(GateTag::Toffoli, &[1, 2, 0])], 0.0)
        .map_err(err)?;
    // 0 + 2 * 3 = 1 mod 5
    let h = run_experiment(&frame, &tof, &[0, 2, 3], &AdversaryPolicy::Honest, 1000, 803).map_err(err)?;
    let frame_ok = h.reference_output == 1 && h.accepts == 1000 && h.wrong_accepts == 0;
    let mut budget_ok = true;
    for (i, name) in ["x-flip", "z-flip"].iter().enumerate() {
        let pol = named_policy(name, 3).map_err(err)?;
        let r = run_experiment(&frame, &tof, &[0, 0, 0], &pol, 1000, 810 + i as u64).map_err(err)?;
        budget_ok &= r.within_budget;
    }
    let ok = honest_ok && abort_ok && frame_ok && budget_ok && within(t, 900);
    Ok((
        ok,
        format!(
            "dense: honest outputs correct for all 5 inputs: {honest_ok}; x-flip abort {:.4} >= 0.75 - 3 sigma; \
             frame Toffoli honest accepts {}/1000; Pauli adversaries within budget: {budget_ok}",
            r.abort_rate, h.accepts
        ),
    ))
}

// ---------------------------------------------------------------- criterion 9

fn blindness() -> Outcome {
    let biased = biased_test_circuit(&mut seeded(9)).map_err(err)?;
    let cliff = ProtocolConfig::Clifford {
        e: 1,
        broken_variant: false,
    };
    let ce = blindness_audit(&cliff, &biased, &[0, 0], &[1, 1], KeyAverageMode::Exact, 901).map_err(err)?;
    let mut shift = CircuitIR::qudits(1, Q);
    shift.push(CircuitOp::gate(GateTag::F, &[0])).map_err(err)?;
    shift.push(CircuitOp::gate(GateTag::X, &[0])).map_err(err)?;
    let poly = ProtocolConfig::Poly {
        params: code(),
        engine: PolyEngine::Dense,
    };
    let pe = blindness_audit(&poly, &shift, &[0], &[3], KeyAverageMode::Exact, 902).map_err(err)?;
    let sampled = KeyAverageMode::Sampled { keys: 10_000 };
    let cs = blindness_audit(&cliff, &biased, &[0, 0], &[1, 1], sampled, 903).map_err(err)?;
    // the sampled poly audit compares classical traffic, which only Toffoli rounds carry
    let tof = CircuitIR::new(vec![Q as usize; 3], vec![CircuitOp::gate(GateTag::Toffoli, &[1, 2, 0])], 0.0)
        .map_err(err)?;
    let ps = blindness_audit(&poly, &tof, &[0, 2, 3], &[4, 1, 1], sampled, 904).map_err(err)?;
    let ok = ce.max_to_mixed < 1e-8
        && pe.max_between < 1e-8
        && !cs.views.is_empty()
        && !ps.views.is_empty()
        && cs.max_between < 0.02
        && ps.max_between < 0.02;
    Ok((
        ok,
        format!(
            "exact: Clifford view to mixed {:.1e}, poly input-pair {:.1e}; sampled at 10^4 keys over {} and {} views: \
             {:.4}, {:.4}",
            ce.max_to_mixed,
            pe.max_between,
            cs.views.len(),
            ps.views.len(),
            cs.max_between,
            ps.max_between
        ),
    ))
}

// --------------------------------------------------------------- criterion 10

fn confidence() -> Outcome {
    let biased = biased_test_circuit(&mut seeded(9)).map_err(err)?;
    let (mut checked, mut skipped, mut worst) = (0usize, 0usize, 0.0f64);
    let mut ok = true;
    for pol in shipped_policies(2, 2).map_err(err)? {
        if !matches!(pol, AdversaryPolicy::FixedPauli { .. }) {
            continue;
        }
        for input in [[0, 0], [0, 1]] {
            match clifford_confidence(&biased, &input, 1, &pol) {
                Ok(r) if r.beta >= BETA_FLOOR => {
                    let bound = 0.5 / r.beta;
                    ok &= r.distance <= bound + 1e-6;
                    worst = worst.max(r.distance / bound);
                    checked += 1;
                }
                // attacks detected almost surely leave nothing to condition on
                Ok(_) | Err(_) => skipped += 1,
            }
        }
    }
    let p = code();
    let mut poly_worst = 0.0f64;
    for a in 0..Q {
        let (ratio, _) = poly_confidence_scan(a, &p, 0.25).map_err(err)?;
        poly_worst = poly_worst.max(ratio);
    }
    ok &= checked > 0 && poly_worst <= 1.0 + 1e-9;
    Ok((
        ok,
        format!(
            "Clifford: {checked} (policy, input) pairs, worst distance / (eps/beta) {worst:.3}, {skipped} below the \
             beta floor; poly: worst distance / (2 eps/beta) over all Paulis and outputs {poly_worst:.3}"
        ),
    ))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "Clifford authentication security", clifford_qas),
        (2, "sign-key security, two-key bound", sign_key_scan),
        (3, "polynomial authentication security", poly_qas),
        (4, "identity suite", lemmas),
        (5, "encoding and logical gates", encoding_and_gates),
        (6, "Toffoli gadget", toffoli_gadget_branches),
        (7, "Clifford interactive proof", clifford_qpip),
        (8, "polynomial interactive proof", poly_qpip),
        (9, "blindness", blindness),
        (10, "confidence", confidence),
    ];
    let mut mismatches = Vec::new();
    let mut passed = 0;
    for (id, title, f) in criteria {
        let t = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        passed += ok as usize;
        let expected = EXPECTED.iter().find(|(i, _)| *i == id);
        let note = match (ok, expected) {
            (false, Some((_, why))) => format!(" [expected: {why}]"),
            _ => String::new(),
        };
        println!(
            "criterion {id:>2} {}: {title} ({:.1} s): {detail}{note}",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        if ok == expected.is_some() {
            mismatches.push(id);
        }
    }
    println!("acceptance: {passed}/10 PASS");
    if !mismatches.is_empty() {
        println!("acceptance: status differs from the expected table for criteria {mismatches:?}");
        std::process::exit(1);
    }
}
