//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gainwalk::gain_graph::PhaseMode;
use gainwalk::hamiltonian::{binomial, sector_masks};
use gainwalk::spectral::{chebyshev_t, chebyshev_t_coeffs, chebyshev_u, IntPolynomial};
use gainwalk::{
    adjacency_matrix, charpoly, complete_family, cycle_det_laplace, cycle_charpoly_closed_form,
    cycle_family, directed_cycle, eigendecompose, is_normal, lift_full, propagator, random_tree,
    split_constant_alpha, tree_gauge, tridiag_det_sequence, underlying_undirected,
    verify_gauge_invariance, zero_transfer_certificate, Arc, Complex64, GainGraph,
    HermitianMatrix, Polynomial, Verdict, DEFAULT_CLUSTER_TOL,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.random_range(-2.0..2.0), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianMatrix::from_matrix(m, 0.0).unwrap()
}

fn lift_block_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let n = 2 + trial % 7;
        let m = random_hermitian(&mut rng, n);
        let lifted = lift_full(&m).map_err(|e| e.to_string())?;
        let block = lifted.excitation_block(1).map_err(|e| e.to_string())?;
        worst = worst.max(block.max_abs_diff(&m));
        ensure!(
            lifted.cross_sector_nonzeros() == 0,
            "n={n}: {} cross-sector entries",
            lifted.cross_sector_nonzeros()
        );
        for k in 0..=n {
            let dim = lifted.excitation_block(k).map_err(|e| e.to_string())?.dim();
            ensure!(
                dim == binomial(n, k) && sector_masks(n, k).len() == dim,
                "n={n} k={k}: sector dim {dim}"
            );
        }
    }
    ensure!(worst <= 1e-12, "block deviation {worst:e}");
    Ok(format!("50 matrices, max block deviation {worst:.1e}"))
}

fn tree_gauge_invariance() -> Outcome {
    let times: Vec<f64> = (0..20).map(|i| 20.0 * i as f64 / 19.0).collect();
    let (mut gauge_worst, mut amp_worst) = (0.0f64, 0.0f64);
    for seed in 0..50u64 {
        let n = 2 + (seed as usize % 11);
        let g = random_tree(n, seed, PhaseMode::Uniform).map_err(|e| e.to_string())?;
        let d = tree_gauge(&g).map_err(|e| e.to_string())?;
        let h = adjacency_matrix(&g);
        let h0 = adjacency_matrix(&underlying_undirected(&g));
        let conj = d.conjugate(h.matrix());
        let dev = (conj - h0.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        gauge_worst = gauge_worst.max(dev);
        amp_worst = amp_worst.max(verify_gauge_invariance(&g, &times).map_err(|e| e.to_string())?);
    }
    ensure!(gauge_worst <= 1e-12, "gauge residual {gauge_worst:e}");
    ensure!(amp_worst <= 1e-10, "amplitude deviation {amp_worst:e}");
    Ok(format!(
        "50 trees, gauge residual {gauge_worst:.1e}, amplitude deviation {amp_worst:.1e}"
    ))
}

fn zero_transfer() -> Outcome {
    let times: Vec<f64> = (0..1000).map(|i| 100.0 * i as f64 / 999.0).collect();
    let (mut idem_worst, mut p_worst) = (0.0f64, 0.0f64);
    let mut cases = 0;
    for m in 2..=8usize {
        let n = 2 * m;
        for k in [1, 2, m, 2 * m] {
            let g = cycle_family(n, k, PI / k as f64).map_err(|e| e.to_string())?;
            let h = adjacency_matrix(&g);
            let spec = eigendecompose(&h, DEFAULT_CLUSTER_TOL).map_err(|e| e.to_string())?;
            for a in 0..n {
                let b = (a + m) % n;
                let cert =
                    zero_transfer_certificate(&spec, &h, a, b, 1e-10).map_err(|e| e.to_string())?;
                ensure!(
                    cert.verdict == Verdict::CertifiedZero,
                    "C_{n} k={k} ({a},{b}): {}",
                    cert.verdict.as_str()
                );
                idem_worst = idem_worst.max(cert.max_idempotent_entry);
            }
            for &t in &times {
                let u = propagator(&spec, t);
                for a in 0..n {
                    p_worst = p_worst.max(u[((a + m) % n, a)].norm_sqr());
                }
            }
            cases += 1;
        }
    }
    ensure!(idem_worst <= 1e-10, "idempotent entry {idem_worst:e}");
    ensure!(p_worst <= 1e-18, "sampled probability {p_worst:e}");
    Ok(format!(
        "{cases} cycles certified, max idempotent entry {idem_worst:.1e}, max P {p_worst:.1e}"
    ))
}

fn negative_control() -> Outcome {
    let times: Vec<f64> = (0..1001).map(|i| 100.0 * i as f64 / 1000.0).collect();
    let mut peaks = Vec::new();
    for alpha in [PI / 16.0, PI / 32.0] {
        let g = cycle_family(16, 8, alpha).map_err(|e| e.to_string())?;
        let h = adjacency_matrix(&g);
        let spec = eigendecompose(&h, DEFAULT_CLUSTER_TOL).map_err(|e| e.to_string())?;
        let cert = zero_transfer_certificate(&spec, &h, 0, 8, 1e-10).map_err(|e| e.to_string())?;
        ensure!(cert.verdict == Verdict::NotZero, "alpha={alpha}: certified zero");
        let peak = times
            .iter()
            .map(|&t| propagator(&spec, t)[(8, 0)].norm_sqr())
            .fold(0.0, f64::max);
        ensure!(peak > 1e-3, "alpha={alpha}: peak {peak:e}");
        peaks.push(peak);
    }
    Ok(format!("peaks P(0->8) = {:.3}, {:.3}", peaks[0], peaks[1]))
}

fn charpoly_identities() -> Outcome {
    let mut worst = 0.0f64;
    for m in 2..=16usize {
        let n = 2 * m;
        let c0 = cycle_family(n, n, 0.0).map_err(|e| e.to_string())?;
        let p0 = charpoly(&adjacency_matrix(&c0)).map_err(|e| e.to_string())?;
        let closed = Polynomial::from(&cycle_charpoly_closed_form(m).map_err(|e| e.to_string())?);
        let expected_det = if m % 2 == 0 { 0.0 } else { -4.0 };
        let det0 = cycle_det_laplace(&c0).map_err(|e| e.to_string())?;
        ensure!((det0 - expected_det).abs() <= 1e-8, "det C_{n} = {det0}");
        ensure!(
            (p0.coeff(0) - expected_det).abs() <= 1e-8,
            "charpoly(0) of C_{n} = {}",
            p0.coeff(0)
        );
        worst = worst.max((det0 - expected_det).abs());
        for k in [1, 2, m, n] {
            let g = cycle_family(n, k, PI / k as f64).map_err(|e| e.to_string())?;
            let pa = charpoly(&adjacency_matrix(&g)).map_err(|e| e.to_string())?;
            let shift = pa.sub(&p0).sub(&Polynomial::constant(4.0)).max_abs_coeff();
            let closed_dev = pa.max_coeff_diff(&closed);
            let det_a = cycle_det_laplace(&g).map_err(|e| e.to_string())?;
            let det_dev = (det_a - (expected_det + 4.0)).abs();
            ensure!(shift <= 1e-8, "m={m} k={k}: shift deviation {shift:e}");
            ensure!(closed_dev <= 1e-8, "m={m} k={k}: closed form deviation {closed_dev:e}");
            ensure!(det_dev <= 1e-8, "m={m} k={k}: det deviation {det_dev:e}");
            worst = worst.max(shift).max(closed_dev).max(det_dev);
        }
    }
    Ok(format!("m = 2..16, max coefficient deviation {worst:.1e}"))
}

fn exact_recurrences() -> Outcome {
    let len = 2 * 32 + 1;
    let f = tridiag_det_sequence(&vec![0; len], &vec![1; len - 1], &vec![1; len - 1])
        .map_err(|e| e.to_string())?;
    for k in 0..=32usize {
        let even = if k % 2 == 0 { 1 } else { -1 };
        ensure!(f[2 * k] == even, "f_{} = {}", 2 * k, f[2 * k]);
        ensure!(f[2 * k + 1] == 0, "f_{} = {}", 2 * k + 1, f[2 * k + 1]);
    }

    let grid: Vec<f64> = (0..101).map(|i| -1.0 + 2.0 * i as f64 / 100.0).collect();
    let mut worst = 0.0f64;
    for n in 0..=32usize {
        for &x in &grid {
            if n >= 2 {
                let d = chebyshev_t(n, x) - 0.5 * (chebyshev_u(n, x) - chebyshev_u(n - 2, x));
                worst = worst.max(d.abs());
            }
            let d = chebyshev_t(2 * n, x) - (2.0 * chebyshev_t(n, x).powi(2) - 1.0);
            worst = worst.max(d.abs());
            // trigonometric form as an independent oracle
            worst = worst.max((chebyshev_t(n, x) - (n as f64 * x.acos()).cos()).abs());
        }
        let t = chebyshev_t_coeffs(n).map_err(|e| e.to_string())?;
        let t2 = chebyshev_t_coeffs(2 * n).map_err(|e| e.to_string())?;
        let rhs = t
            .checked_mul(&t)
            .and_then(|p| p.checked_scale(2))
            .and_then(|p| p.checked_sub(&IntPolynomial::constant(1)))
            .map_err(|e| e.to_string())?;
        ensure!(t2 == rhs, "T_{} != 2T_{n}^2 - 1 over the integers", 2 * n);
    }
    ensure!(worst <= 1e-10, "Chebyshev identity deviation {worst:e}");
    Ok(format!("f_0..f_{} exact, Chebyshev deviation {worst:.1e}", len))
}

fn exp_i(h: &HermitianMatrix, t: f64) -> Result<DMatrix<Complex64>, String> {
    let spec = eigendecompose(h, DEFAULT_CLUSTER_TOL).map_err(|e| e.to_string())?;
    Ok(propagator(&spec, t))
}

fn normal_factorization() -> Outcome {
    let times: Vec<f64> = (0..20).map(|i| 0.37 + 0.91 * i as f64).collect();
    let mut worst = 0.0f64;
    for n in 3..=8usize {
        for alpha in [PI / 7.0, PI / 3.0, 2.0] {
            let g = directed_cycle(n, alpha).map_err(|e| e.to_string())?;
            ensure!(is_normal(&g, 1e-12), "C_{n} arc matrix not normal");
            let split = split_constant_alpha(&g, alpha).map_err(|e| e.to_string())?;
            let sym = HermitianMatrix::from_real(&(&split.symmetric_part * alpha.cos()))
                .map_err(|e| e.to_string())?;
            let skew = HermitianMatrix::from_matrix(
                split.skew_part.matrix() * Complex64::new(alpha.sin(), 0.0),
                1e-14,
            )
            .map_err(|e| e.to_string())?;
            let h = adjacency_matrix(&g);
            for &t in &times {
                let lhs = exp_i(&h, t)?;
                let rhs = exp_i(&sym, t)? * exp_i(&skew, t)?;
                worst = worst.max((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
    }
    ensure!(worst <= 1e-9, "factorization deviation {worst:e}");
    for n in 2..=10usize {
        let k = complete_family(n, PI / 4.0).map_err(|e| e.to_string())?;
        ensure!(!is_normal(&k, 1e-12), "K_{n} arc matrix reported normal");
    }
    Ok(format!("C_3..C_8 normal, factorization deviation {worst:.1e}, K_2..K_10 not normal"))
}

fn random_gain_graph(rng: &mut ChaCha8Rng, n: usize) -> GainGraph {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.4) {
                let (from, to) = if rng.random_bool(0.5) { (u, v) } else { (v, u) };
                arcs.push(Arc {
                    from,
                    to,
                    alpha: rng.random_range(0.0..2.0 * PI),
                });
            }
        }
    }
    let potentials = rng
        .random_bool(0.3)
        .then(|| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
    GainGraph::new(n, arcs, potentials).unwrap()
}

fn walk_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut unit, mut reversal, mut symmetry) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.random_range(1..=16usize);
        let g = random_gain_graph(&mut rng, n);
        let spec = eigendecompose(&adjacency_matrix(&g), DEFAULT_CLUSTER_TOL)
            .map_err(|e| e.to_string())?;
        let spec0 = eigendecompose(&adjacency_matrix(&underlying_undirected(&g)), DEFAULT_CLUSTER_TOL)
            .map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let t = rng.random_range(0.0..30.0);
            let (fwd, bwd) = (propagator(&spec, t), propagator(&spec, -t));
            let u0 = propagator(&spec0, t);
            for a in 0..n {
                let sum: f64 = (0..n).map(|b| fwd[(b, a)].norm_sqr()).sum();
                unit = unit.max((sum - 1.0).abs());
                for b in 0..n {
                    reversal =
                        reversal.max((fwd[(b, a)].norm_sqr() - bwd[(a, b)].norm_sqr()).abs());
                    symmetry = symmetry.max((u0[(b, a)].norm_sqr() - u0[(a, b)].norm_sqr()).abs());
                }
            }
        }
    }
    ensure!(unit <= 1e-10, "unitarity deviation {unit:e}");
    ensure!(reversal <= 1e-10, "time reversal deviation {reversal:e}");
    ensure!(symmetry <= 1e-10, "undirected symmetry deviation {symmetry:e}");
    Ok(format!(
        "100 graphs, unitarity {unit:.1e}, reversal {reversal:.1e}, symmetry {symmetry:.1e}"
    ))
}

fn run_sweep(dir: &Path, threads: &str, args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_gainwalk"))
        .arg("sweep")
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env("GAINWALK_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        status.status.success(),
        "sweep {args:?} failed: {}",
        String::from_utf8_lossy(&status.stderr)
    );
    Ok(())
}

fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ensure!(!text.contains('\r'), "{}: CR in output", path.display());
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or("empty CSV")?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|v| v.parse::<f64>().map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((header, rows))
}

fn check_rows(path: &Path, n: usize) -> Result<usize, String> {
    let (header, rows) = read_csv(path)?;
    ensure!(header.len() == n + 1 && header[0] == "t", "{}: header {header:?}", path.display());
    for (v, name) in header[1..].iter().enumerate() {
        ensure!(*name == format!("p_{v}"), "{}: column {name}", path.display());
    }
    for row in &rows {
        ensure!(row.len() == n + 1, "{}: ragged row", path.display());
        let sum: f64 = row[1..].iter().sum();
        ensure!((sum - 1.0).abs() <= 1e-10, "{}: row sum {sum}", path.display());
        ensure!(row[1..].iter().all(|p| (0.0..=1.0).contains(p)), "{}: probability out of range", path.display());
    }
    Ok(rows.len())
}

fn sweep_regeneration() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let jobs: [(&str, usize, Vec<&str>); 3] = [
        (
            "k6",
            6,
            vec!["--family", "complete", "--n", "6", "--alphas", "pi/6,pi/3,pi/2,0", "--t-max", "10", "--steps", "501"],
        ),
        (
            "c26",
            26,
            vec!["--family", "cycle", "--n", "26", "--alphas", "pi/8,-pi/8,pi/4,-pi/4,pi/2,-pi/2", "--at", "10pi"],
        ),
        (
            "c16",
            16,
            vec![
                "--family", "cycle", "--n", "16", "--weighted-arcs", "8", "--alphas", "pi/8,pi/16,pi/32",
                "--t-max", "100", "--steps", "1001", "--target", "8",
            ],
        ),
    ];
    let mut files = 0;
    for (name, n, args) in &jobs {
        let one = root.path().join(format!("{name}_1"));
        let many = root.path().join(format!("{name}_4"));
        run_sweep(&one, "1", args)?;
        run_sweep(&many, "4", args)?;
        let mut entries: Vec<_> = std::fs::read_dir(&one)
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().file_name())
            .collect();
        entries.sort();
        for file in &entries {
            let a = std::fs::read(one.join(file)).map_err(|e| e.to_string())?;
            let b = std::fs::read(many.join(file)).map_err(|e| e.to_string())?;
            ensure!(a == b, "{name}/{file:?} differs between thread counts");
            if Path::new(file).extension().is_some_and(|x| x == "csv") {
                check_rows(&one.join(file), *n)?;
                files += 1;
            }
        }
    }

    // reflection: p_j(alpha) == p_{-j}(-alpha) on C_26 at t = 10 pi
    let dir = root.path().join("c26_1");
    let mut reflection = 0.0f64;
    for (pos, neg) in [("00_pi_8", "01_mpi_8"), ("02_pi_4", "03_mpi_4"), ("04_pi_2", "05_mpi_2")] {
        let (_, p) = read_csv(&dir.join(format!("cycle_n26_{pos}.csv")))?;
        let (_, q) = read_csv(&dir.join(format!("cycle_n26_{neg}.csv")))?;
        ensure!(p.len() == 1 && q.len() == 1, "expected single-row distributions");
        ensure!((p[0][0] - 10.0 * PI).abs() < 1e-12, "time column {}", p[0][0]);
        for j in 0..26 {
            reflection = reflection.max((p[0][1 + j] - q[0][1 + (26 - j) % 26]).abs());
        }
    }
    ensure!(reflection <= 1e-10, "reflection deviation {reflection:e}");

    let manifest = std::fs::read_to_string(root.path().join("c16_1").join("sweep.json"))
        .map_err(|e| e.to_string())?;
    let manifest: serde_json::Value = serde_json::from_str(&manifest).map_err(|e| e.to_string())?;
    ensure!(manifest["schema"] == "1", "manifest schema {}", manifest["schema"]);
    let peak = manifest["entries"][0]["max_target_probability"].as_f64().unwrap_or(f64::NAN);
    ensure!(peak <= 1e-18, "C_16 pi/8 antipodal peak {peak:e}");

    Ok(format!("{files} CSVs deterministic, reflection deviation {reflection:.1e}"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "lift block identity", budget: Duration::from_secs(30), check: lift_block_identity },
        Criterion { id: 2, name: "tree gauge invariance", budget: Duration::from_secs(30), check: tree_gauge_invariance },
        Criterion { id: 3, name: "antipodal zero transfer", budget: Duration::from_secs(60), check: zero_transfer },
        Criterion { id: 4, name: "zero transfer negative control", budget: Duration::from_secs(10), check: negative_control },
        Criterion { id: 5, name: "characteristic polynomial identities", budget: Duration::from_secs(10), check: charpoly_identities },
        Criterion { id: 6, name: "exact recurrences", budget: Duration::from_secs(5), check: exact_recurrences },
        Criterion { id: 7, name: "normal arc matrix factorization", budget: Duration::from_secs(10), check: normal_factorization },
        Criterion { id: 8, name: "global walk invariants", budget: Duration::from_secs(30), check: walk_invariants },
        Criterion { id: 9, name: "sweep data regeneration", budget: Duration::from_secs(60), check: sweep_regeneration },
    ];

    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.check))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            })
            .and_then(|detail| {
                let elapsed = start.elapsed();
                if elapsed > c.budget {
                    Err(format!("{detail}; took {elapsed:.1?}, budget {:?}", c.budget))
                } else {
                    Ok(detail)
                }
            });
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("criterion {} PASS {} ({elapsed:.2?}): {detail}", c.id, c.name),
            Err(reason) => {
                failed += 1;
                println!("criterion {} FAIL {} ({elapsed:.2?}): {reason}", c.id, c.name);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
