//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! (with detail lines underneath) and exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use cohdisc::bounds::{
    gaussian_receiver_rates, helstrom_bound, optimal_id_bound, usd_bound, GaussianMeasurementParams,
};
use cohdisc::emulator::{
    estimate_rates, simulate_parallel, EstimationContext, ExperimentConfig, Receiver,
};
use cohdisc::qkd::{key_rate_sweep, EveModel, KeyRateOptions, KeyRatePoint, ReceiverKind};
use cohdisc::receivers::{likelihood_to_quadrature_threshold, quadrature_to_likelihood_threshold};
use cohdisc::special::poisson_pmf;
use cohdisc::tradeoff::{homodyne_threshold_for_inconclusive, optimize_displacement};
use cohdisc::{
    homodyne_receiver, pnr_receiver, DiscriminationResult, HomodyneReceiverConfig,
    PnrReceiverConfig, SignalEnsemble,
};

struct Report {
    details: Vec<String>,
    ok: bool,
}

impl Report {
    fn new() -> Self {
        Self {
            details: Vec::new(),
            ok: true,
        }
    }

    fn check(&mut self, pass: bool, what: String) {
        self.ok &= pass;
        self.details
            .push(format!("    [{}] {what}", if pass { "ok" } else { "FAIL" }));
    }

    fn info(&mut self, what: String) {
        self.details.push(format!("    [info] {what}"));
    }
}

fn ens(alpha_sq: f64) -> SignalEnsemble {
    SignalEnsemble::from_mean_photons(alpha_sq).unwrap()
}

fn err(r: &DiscriminationResult) -> f64 {
    r.p_err.expect("conclusive outcomes exist")
}

fn criterion_1(r: &mut Report) {
    let h = helstrom_bound(&ens(0.47));
    r.check(
        (h - 0.00586).abs() <= 1e-4,
        format!("helstrom(0.47) = {h:.8}, want 0.00586 +- 1e-4"),
    );
    let hd = err(&homodyne_receiver(&ens(0.47), &HomodyneReceiverConfig::ideal(0.0)).unwrap());
    r.check(
        (hd - 0.08517).abs() <= 1e-4,
        format!("homodyne MESD(0.47) = {hd:.8}, want 0.08517 +- 1e-4"),
    );
    let e = ens(0.24);
    let k = err(&pnr_receiver(&e, &PnrReceiverConfig::kennedy(e.alpha())).unwrap());
    r.check(
        (k - 0.19145).abs() <= 1e-5,
        format!("Kennedy(0.24) = {k:.8}, want 0.19145 +- 1e-5"),
    );
}

/// Independent term-by-term summation for the ideal receiver.
fn brute_force_pnr(alpha: f64, beta: f64, m: u32) -> (f64, f64) {
    let means = [(beta - alpha).powi(2), (beta + alpha).powi(2)];
    let mut inc = [0.0; 2];
    let mut wrong = [0.0; 2];
    for (k, &mu) in means.iter().enumerate() {
        let mut total = 0.0;
        for n in 0..400u32 {
            let p = poisson_pmf(mu, n);
            total += p;
            if (1..=m).contains(&n) {
                inc[k] += p;
            }
        }
        let vacuum = poisson_pmf(mu, 0);
        let click = total - vacuum - inc[k];
        wrong[k] = if k == 0 { click } else { vacuum };
    }
    let p_inc = 0.5 * (inc[0] + inc[1]);
    (p_inc, 0.5 * (wrong[0] + wrong[1]) / (1.0 - p_inc))
}

fn criterion_2(r: &mut Report) {
    let e = ens(0.24);
    let res = pnr_receiver(&e, &PnrReceiverConfig::ideal(1.0, 1)).unwrap();
    let (p_inc, p_err) = (res.p_inc, err(&res));
    r.check(
        (p_inc - 0.22099).abs() <= 1e-4,
        format!("p_inc = {p_inc:.8}, want 0.22099 +- 1e-4"),
    );
    r.check(
        (p_err - 0.08812).abs() <= 1e-4,
        format!("p_err = {p_err:.8}, want 0.08812 +- 1e-4"),
    );
    let (bf_inc, bf_err) = brute_force_pnr(e.alpha(), 1.0, 1);
    r.check(
        (bf_inc - p_inc).abs() <= 1e-10 && (bf_err - p_err).abs() <= 1e-10,
        format!(
            "brute force agrees: dp_inc = {:.1e}, dp_err = {:.1e}",
            bf_inc - p_inc,
            bf_err - p_err
        ),
    );
}

fn criterion_3(r: &mut Report) {
    let mut points = 0;
    let mut violations = 0;
    let mut worst: f64 = f64::NEG_INFINITY;
    for alpha_sq in [0.1, 0.24, 0.47, 1.0] {
        let e = ens(alpha_sq);
        for sq in [0.0, 0.5, 1.0, 2.0, 4.0] {
            for phi in [0.0, PI / 4.0, PI / 2.0, PI] {
                for lambda in [1.0, 2.0, 5.0, 20.0] {
                    let params = GaussianMeasurementParams::new(sq, phi, lambda).unwrap();
                    let g = gaussian_receiver_rates(&e, &params).unwrap();
                    let Some(g_err) = g.p_err else { continue };
                    if g.p_inc >= 1.0 - 1e-12 {
                        continue;
                    }
                    let (_, hd) = homodyne_threshold_for_inconclusive(
                        &e,
                        &HomodyneReceiverConfig::ideal(0.0),
                        g.p_inc,
                    )
                    .unwrap();
                    let gap = err(&hd) - g_err;
                    worst = worst.max(gap);
                    points += 1;
                    if gap > 1e-10 {
                        violations += 1;
                    }
                }
            }
        }
    }
    r.check(
        violations == 0,
        format!(
            "{points} Gaussian points, {violations} violations, max(p_hd - p_gauss) = {worst:.3e}"
        ),
    );
}

fn criterion_4(r: &mut Report) {
    let mut pnr_wins = 0;
    let mut bound_ok = 0;
    let mut total = 0;
    for i in 1..=10 {
        let alpha_sq = 0.1 * f64::from(i);
        let e = ens(alpha_sq);
        let usd = usd_bound(&e).unwrap().p_inc;
        for m in [1, 2] {
            total += 1;
            let opt = optimize_displacement(&e, m, &PnrReceiverConfig::ideal(0.0, m)).unwrap();
            let p_pnr = err(&opt.rates);
            let (_, hd) = homodyne_threshold_for_inconclusive(
                &e,
                &HomodyneReceiverConfig::ideal(0.0),
                opt.rates.p_inc,
            )
            .unwrap();
            let p_hd = err(&hd);
            // Above the USD inconclusive rate an error-free measurement exists.
            let p_id = if opt.rates.p_inc >= usd {
                0.0
            } else {
                optimal_id_bound(&e, opt.rates.p_inc).unwrap().p_err_min
            };
            if p_pnr < p_hd {
                pnr_wins += 1;
            }
            if p_id <= p_pnr + 1e-9 && p_id <= p_hd + 1e-9 {
                bound_ok += 1;
            }
            r.info(format!(
                "a^2={alpha_sq:.1} m={m}: beta={:.4} p_inc={:.5} pnr={p_pnr:.6} hd={p_hd:.6} id={p_id:.6}",
                opt.beta, opt.rates.p_inc
            ));
        }
    }
    r.check(
        pnr_wins == total,
        format!("PNR beats matched homodyne at {pnr_wins}/{total} points"),
    );
    r.check(
        bound_ok == total,
        format!("optimal ID lower-bounds both at {bound_ok}/{total} points"),
    );
}

fn criterion_5(r: &mut Report) {
    let mut monotone = true;
    for i in 1..=10 {
        let e = ens(0.1 * f64::from(i));
        let betas: Vec<f64> = (0..=3)
            .map(|m| {
                optimize_displacement(&e, m, &PnrReceiverConfig::ideal(0.0, m))
                    .unwrap()
                    .beta
            })
            .collect();
        monotone &= betas.windows(2).all(|w| w[1] >= w[0] - 1e-6);
    }
    r.check(
        monotone,
        "beta_opt non-decreasing in m on a^2 = 0.1..1.0, m = 0..3".into(),
    );
    let e = ens(0.47);
    let errs: Vec<f64> = (0..=2)
        .map(|m| {
            err(
                &optimize_displacement(&e, m, &PnrReceiverConfig::ideal(0.0, m))
                    .unwrap()
                    .rates,
            )
        })
        .collect();
    r.check(
        errs[1] < errs[0] && errs[2] < errs[1],
        format!(
            "p_err at a^2=0.47: m=0 {:.6}, m=1 {:.6}, m=2 {:.6}",
            errs[0], errs[1], errs[2]
        ),
    );
    r.info(format!(
        "ideal error-reduction ratio m=0 -> m=2: {:.4}",
        errs[0] / errs[2]
    ));
}

fn criterion_6(r: &mut Report) {
    const TRIALS: u64 = 1_000_000;
    let mut cells_ok = 0;
    let mut reproducible = true;
    for (i, alpha_sq) in [0.1, 0.24, 0.47].into_iter().enumerate() {
        for m in 0..3u32 {
            let alpha = f64::sqrt(alpha_sq);
            let cfg = ExperimentConfig::ideal(alpha, 0.3, 1.0, m)
                .with_trials(TRIALS, 1000 + 10 * i as u64 + u64::from(m));
            let records = simulate_parallel(&cfg).unwrap();
            if i == 0 && m == 0 {
                reproducible &= simulate_parallel(&cfg).unwrap() == records;
            }
            let (hd, pnr) = cfg.analytic_rates().unwrap();
            let ctx = EstimationContext::new(alpha).with_z(3.0);
            let mut cell = true;
            for (rx, exact) in [(Receiver::Homodyne, hd), (Receiver::Pnr, pnr)] {
                let est = estimate_rates(&records, rx, &ctx).unwrap();
                cell &= est.p_inc.contains(exact.p_inc);
                cell &= est.p_err.is_some_and(|p| p.contains(err(&exact)));
            }
            if cell {
                cells_ok += 1;
            }
            r.info(format!(
                "a^2={alpha_sq} m={m}: {}",
                if cell { "inside 3 sigma" } else { "outside" }
            ));
        }
    }
    r.check(
        cells_ok >= 8,
        format!("{cells_ok}/9 cells agree within 3 Wilson sigma"),
    );
    r.check(
        reproducible,
        "same seed reproduces identical records".into(),
    );
}

fn criterion_7(r: &mut Report) {
    let etas = [0.01, 0.05, 0.1, 0.5, 0.9, 1.0];
    let sweep = |eve| {
        let opts = KeyRateOptions {
            eve,
            ..KeyRateOptions::default()
        };
        (
            key_rate_sweep(&etas, ReceiverKind::Pnr, &opts).unwrap(),
            key_rate_sweep(&etas, ReceiverKind::Homodyne, &opts).unwrap(),
        )
    };
    let evaluate = |pnr: &[KeyRatePoint], hd: &[KeyRatePoint], r: &mut Report, enforce: bool| {
        let mut add = |pass: bool, msg: String| {
            if enforce {
                r.check(pass, msg);
            } else {
                r.info(format!("{} {msg}", if pass { "holds:" } else { "fails:" }));
            }
        };
        for (p, h) in pnr.iter().zip(hd) {
            let plob = -(1.0 - p.eta).log2();
            r_info_line(p, h, plob, &mut add);
        }
        add(
            pnr.iter().zip(hd).all(|(p, h)| p.g >= h.g),
            "G_pnr >= G_hd at every eta".into(),
        );
        let ratio = |k: usize| pnr[k].g / hd[k].g;
        let (r_lo, r_hi) = (ratio(0), ratio(4));
        add(
            hd[0].g > 0.0 && hd[4].g > 0.0 && r_lo > r_hi,
            format!("G_pnr/G_hd at eta=0.01 ({r_lo:.4}) exceeds that at eta=0.9 ({r_hi:.4})"),
        );
        let ms: Vec<u32> = pnr.iter().map(|p| p.m_opt.unwrap_or(0)).collect();
        add(
            ms.windows(2).all(|w| w[1] <= w[0]) && ms.iter().all(|&m| m <= 10),
            format!("m_opt non-increasing in eta and <= 10: {ms:?}"),
        );
        let g1 = pnr[5].g;
        add(
            g1 >= 0.92483 - 1e-6,
            format!("G(eta=1, PNR) = {g1:.8} >= 0.92483"),
        );
    };
    let (pnr, hd) = sweep(EveModel::Unconditioned);
    evaluate(&pnr, &hd, r, true);
    r.info("same sweep with the postselected eavesdropper model:".into());
    let (pnr, hd) = sweep(EveModel::Postselected);
    evaluate(&pnr, &hd, r, false);
}

fn r_info_line(p: &KeyRatePoint, h: &KeyRatePoint, plob: f64, add: &mut impl FnMut(bool, String)) {
    add(
        true,
        format!(
            "eta={}: G_pnr={:.4e} (a={:.3}, m={:?}) G_hd={:.4e} (a={:.3}) capacity={:.4e}",
            p.eta, p.g, p.alpha_opt, p.m_opt, h.g, h.alpha_opt, plob
        ),
    );
}

fn criterion_8(r: &mut Report) {
    let mut complete = true;
    let mut normalized = true;
    for i in 0..10 {
        let alpha = 0.1 + 0.15 * f64::from(i);
        for j in 0..10 {
            let e = SignalEnsemble::with_prior_minus(alpha, 0.1 + 0.08 * f64::from(j)).unwrap();
            let pnr = pnr_receiver(
                &e,
                &PnrReceiverConfig::experimental(0.3 * f64::from(j), j % 4),
            )
            .unwrap();
            let hd = homodyne_receiver(
                &e,
                &HomodyneReceiverConfig::experimental(0.1 * f64::from(j)),
            )
            .unwrap();
            for res in [pnr, hd] {
                for o in [res.given_minus, res.given_plus] {
                    complete &= (o.total() - 1.0).abs() < 1e-12;
                    normalized &= [o.guess_minus, o.guess_plus, o.inconclusive]
                        .iter()
                        .all(|p| (0.0..=1.0).contains(p));
                }
                normalized &= (0.0..=1.0).contains(&res.p_inc)
                    && res.p_err.is_none_or(|p| (0.0..=1.0).contains(&p));
            }
        }
    }
    r.check(complete, "POVM completeness on a 100-point grid".into());
    r.check(normalized, "all probabilities in [0, 1]".into());

    let mut inc_mono = true;
    let mut err_mono = 0;
    let mut cases = 0;
    for i in 0..20 {
        let e = ens(0.05 + 0.05 * f64::from(i));
        for beta in [0.2, 0.6, 1.0, 1.5] {
            let rates: Vec<_> = (0..=3)
                .map(|m| pnr_receiver(&e, &PnrReceiverConfig::ideal(beta, m)).unwrap())
                .collect();
            inc_mono &= rates.windows(2).all(|w| w[1].p_inc >= w[0].p_inc);
            cases += 1;
            if rates.windows(2).all(|w| err(&w[1]) <= err(&w[0])) {
                err_mono += 1;
            }
        }
    }
    r.check(
        inc_mono,
        "PNR p_inc non-decreasing in m at fixed beta".into(),
    );
    r.check(
        err_mono == cases,
        format!("PNR conditional p_err non-increasing in m at fixed beta: {err_mono}/{cases} (alpha, beta) pairs"),
    );

    let mut dark = 0;
    for alpha_sq in [0.1, 0.24, 0.47] {
        let e = ens(alpha_sq);
        for m in 0..3 {
            let base = PnrReceiverConfig::ideal(1.0, m);
            let noisy = PnrReceiverConfig {
                dark_count_mean: 0.01,
                ..base
            };
            let (clean, noisy) = (
                err(&pnr_receiver(&e, &base).unwrap()),
                err(&pnr_receiver(&e, &noisy).unwrap()),
            );
            if noisy > clean {
                dark += 1;
            } else {
                r.info(format!(
                    "a^2={alpha_sq} m={m}: p_err {clean:.6} -> {noisy:.6} with dark counts"
                ));
            }
        }
    }
    r.check(
        dark == 9,
        format!("dark counts increase PNR p_err: {dark}/9 configs (beta = 1)"),
    );

    let mut xi_mono = true;
    for alpha_sq in [0.1, 0.47, 1.0] {
        let e = ens(alpha_sq);
        let kennedy = PnrReceiverConfig::kennedy(e.alpha());
        let errs: Vec<f64> = [1.0, 0.999, 0.99, 0.95]
            .iter()
            .map(|&xi| {
                err(&pnr_receiver(
                    &e,
                    &PnrReceiverConfig {
                        mode_match: xi,
                        ..kennedy
                    },
                )
                .unwrap())
            })
            .collect();
        xi_mono &= errs.windows(2).all(|w| w[1] > w[0]);
    }
    r.check(
        xi_mono,
        "lower mode matching raises the Kennedy error floor".into(),
    );

    let mut hd_mono = true;
    for alpha_sq in [0.1, 0.47, 1.0] {
        let e = ens(alpha_sq);
        let rates: Vec<_> = (0..40)
            .map(|k| {
                homodyne_receiver(&e, &HomodyneReceiverConfig::ideal(0.05 * f64::from(k))).unwrap()
            })
            .collect();
        hd_mono &= rates
            .windows(2)
            .all(|w| w[1].p_inc > w[0].p_inc && err(&w[1]) < err(&w[0]));
    }
    r.check(
        hd_mono,
        "homodyne p_inc increasing and p_err decreasing in B".into(),
    );

    let mut worst: f64 = 0.0;
    for alpha in [0.2, 0.5, 1.0, 2.0] {
        for lambda in [1.0, 1.1, 2.0, 10.0, 1e3] {
            let b = likelihood_to_quadrature_threshold(lambda, alpha).unwrap();
            let back = quadrature_to_likelihood_threshold(b, alpha).unwrap();
            let b2 = likelihood_to_quadrature_threshold(back, alpha).unwrap();
            worst = worst.max((b2 - b).abs());
        }
    }
    r.check(
        worst <= 1e-12,
        format!("B <-> Lambda_B round trip, max deviation {worst:.1e}"),
    );
}

type Criterion = (&'static str, fn(&mut Report));

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("closed-form anchors", criterion_1),
        ("PNR worked point", criterion_2),
        ("Gaussian optimality", criterion_3),
        ("non-Gaussian advantage", criterion_4),
        ("displacement optimization", criterion_5),
        ("Monte Carlo fidelity", criterion_6),
        ("QKD ordering", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let mut report = Report::new();
        let start = Instant::now();
        run(&mut report);
        let verdict = if report.ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {verdict}  {name} ({:.1} s)",
            k + 1,
            start.elapsed().as_secs_f64()
        );
        for line in &report.details {
            println!("{line}");
        }
        failed += usize::from(!report.ok);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
