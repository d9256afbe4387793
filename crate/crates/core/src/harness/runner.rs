use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, LambdaMode};
use crate::channel::{
    add_estimation_error, apply_spatial_correlation, build_q, exp_correlation_matrix,
    generate_channel, prg_average, ChannelRealization, MitigationWeights, TdlProfile,
};
use crate::error::{Error, Result};
use crate::mimo::{equalize, estimated_evm, generate_symbols, precode, rzf_precoder, Precoder, SymbolGrid};
use crate::numerics::{db_to_linear, linear_to_db, ComplexMatrix, RngStream};
use crate::solvers::{kkt_check, solve, Engine, ResidualTrace, Snapshot};
use crate::waveform::{
    aclr_db, ccdf, default_rolloff, ipapr_samples, papr_db, percentile, predicted_evm, psd,
    raised_cosine_window, to_time, tx_evm, CcdfCurve, ResourceGrid, SubcarrierLayout, TimeSignal, DB_FLOOR,
    IPAPR_PERCENTILE,
};

/// One long-format metric value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub drop: usize,
    pub metric: String,
    pub index: usize,
    pub value: f64,
}

/// Drop-level summary; every field is recomputable from the drop's rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropSummary {
    pub papr_db_max: f64,
    pub aclr_db_max: f64,
    /// RMS over symbols of the per-symbol wideband values.
    pub txevm_wb: f64,
    pub predevm_wb: f64,
    pub estevm_wb: f64,
    pub iterations_mean: f64,
    pub stopped_early: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropRecord {
    pub drop: usize,
    pub rows: Vec<MetricRow>,
    pub summary: DropSummary,
    /// First symbol's residuals, normalised by its `||x0||`.
    pub trace: ResidualTrace,
    pub warnings: Vec<String>,
    pub elapsed_s: f64,
    ipapr: Vec<f64>,
    psd_lin: Vec<f64>,
    psd_windowed_lin: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropFailure {
    pub drop: usize,
    pub error: String,
}

/// Means over successful drops of the drop summaries, plus pooled extremes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub drops_ok: usize,
    pub papr_db_max: f64,
    pub papr_db_mean: f64,
    pub aclr_db_max: f64,
    pub ipapr_p9999_db: f64,
    pub txevm_wb: f64,
    pub predevm_wb: f64,
    pub estevm_wb: f64,
    pub iterations_mean: f64,
}

#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub config: ExperimentConfig,
    pub sweep_index: usize,
    pub drops: Vec<DropRecord>,
    pub failures: Vec<DropFailure>,
    pub aggregate: Option<Aggregate>,
    /// Mean spectrum over drops, symbols and antennas, FFT bin order, dB.
    pub psd_db: Vec<f64>,
    pub psd_windowed_db: Option<Vec<f64>>,
    /// CCDF of the pooled instantaneous PAPR samples.
    pub ccdf: Option<CcdfCurve>,
    pub wall_time_s: f64,
}

impl MetricsReport {
    pub fn all_failed(&self) -> bool {
        self.drops.is_empty() && !self.failures.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &MetricRow> {
        self.drops.iter().flat_map(|d| d.rows.iter())
    }
}

const STREAM_CHANNEL: u64 = 1;
const STREAM_ESTIMATION: u64 = 2;
const STREAM_SYMBOLS: u64 = 3;
const STREAM_AGEING: u64 = 4;

/// Stream ids: sweep point in the high bits, then drop, then purpose.
fn stream_id(sweep_index: usize, drop: usize, purpose: u64) -> u64 {
    ((sweep_index as u64) << 40) | ((drop as u64) << 8) | purpose
}

/// Bessel J0 by its power series; accurate for the small arguments of CSI
/// ageing (|x| well below 10).
fn bessel_j0(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..60 {
        term *= q / (m as f64 * m as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn profile_of(cfg: &ExperimentConfig) -> Result<TdlProfile> {
    let c = &cfg.channel;
    let mut p = TdlProfile::exponential(c.n_taps, c.delay_spread_ns * 1e-9)?;
    p.subcarrier_spacing_hz = cfg.grid.subcarrier_spacing_hz;
    if c.los {
        p = p.with_los(c.k_factor_linear)?;
    }
    Ok(p)
}

struct DropSetup {
    h_true: ChannelRealization,
    w: Precoder,
    q: MitigationWeights,
}

fn setup_drop(
    cfg: &ExperimentConfig,
    profile: &TdlProfile,
    sweep_index: usize,
    drop: usize,
) -> Result<DropSetup> {
    let m = &cfg.mimo;
    let c = &cfg.channel;
    let n_active = cfg.grid.active_subcarriers;
    let mut rng = RngStream::new(cfg.seed, stream_id(sweep_index, drop, STREAM_CHANNEL));
    let mut h = generate_channel(profile, m.n_tx, m.n_rx, n_active, &mut rng)?;
    if c.corr_tx > 0.0 || c.corr_rx > 0.0 {
        let r_tx = exp_correlation_matrix(m.n_tx, c.corr_tx)?;
        let r_rx = exp_correlation_matrix(m.n_rx, c.corr_rx)?;
        h = apply_spatial_correlation(&h, &r_tx, &r_rx)?;
    }
    // the estimate is taken on an older channel that has since decorrelated
    let mut h_csi = h.clone();
    if c.doppler_hz > 0.0 && c.csi_delay_ms > 0.0 {
        let rho = bessel_j0(2.0 * std::f64::consts::PI * c.doppler_hz * c.csi_delay_ms * 1e-3);
        let mut rng_age = RngStream::new(cfg.seed, stream_id(sweep_index, drop, STREAM_AGEING));
        let mut other = generate_channel(profile, m.n_tx, m.n_rx, n_active, &mut rng_age)?;
        if c.corr_tx > 0.0 || c.corr_rx > 0.0 {
            let r_tx = exp_correlation_matrix(m.n_tx, c.corr_tx)?;
            let r_rx = exp_correlation_matrix(m.n_rx, c.corr_rx)?;
            other = apply_spatial_correlation(&other, &r_tx, &r_rx)?;
        }
        let s = (1.0 - rho * rho).max(0.0).sqrt();
        let mixed = h
            .matrices()
            .iter()
            .zip(other.matrices())
            .map(|(a, b)| a.scale_real(rho).add(&b.scale_real(s)))
            .collect::<Result<Vec<_>>>()?;
        h_csi = ChannelRealization::new(mixed, h.metadata().clone())?;
    }
    let mut rng_est = RngStream::new(cfg.seed, stream_id(sweep_index, drop, STREAM_ESTIMATION));
    let h_est = add_estimation_error(&h_csi, c.error_variance(), &mut rng_est)?;
    let h_est = prg_average(&h_est, c.prg_subcarriers)?;
    let w = rzf_precoder(&h_est, m.rzf_alpha)?.first_layers(m.n_layers)?;
    let wt = &cfg.weights;
    let q = if wt.csi_aware {
        let q = build_q(&h_est, wt.nu, &vec![wt.lambda; n_active])?;
        match wt.lambda_mode {
            LambdaMode::Fixed => q,
            LambdaMode::Normalized => q.normalized(wt.lambda),
        }
    } else {
        MitigationWeights::scaled_identity(m.n_tx, &vec![wt.lambda * wt.nu; n_active])?
    };
    Ok(DropSetup { h_true: h, w, q })
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Snapshot of the metrics at an intermediate `Z`.
fn snapshot(
    iter: usize,
    z: &ComplexMatrix,
    x0: &ResourceGrid,
    s: &SymbolGrid,
    setup: &DropSetup,
) -> Result<Snapshot> {
    let g = x0.with_data(z.clone())?;
    let t = to_time(&g)?;
    let n = g.n_tx();
    let papr = max_of((0..n).map(|j| papr_db(&t, j)).collect::<Result<Vec<_>>>()?);
    let aclr = max_of((0..n).map(|j| aclr_db(&g, j)).collect::<Result<Vec<_>>>()?);
    let eq = equalize(&setup.h_true, &setup.w, &g)?;
    Ok(Snapshot {
        iter,
        papr_db_max: papr,
        txevm_wb: tx_evm(&g, x0)?.wideband,
        predevm_wb: predicted_evm(&setup.h_true, &g, x0)?.wideband,
        estevm_wb: estimated_evm(&eq.estimates, s, &eq.rank_deficient)?.wideband,
        aclr_db_max: aclr,
    })
}

/// Back-to-back symbols with a cyclic prefix of `cp` samples. With a nonzero
/// `rolloff` each symbol also carries a cyclic suffix of that length, both
/// edges are tapered and the suffix overlaps the next symbol's prefix, so the
/// symbol period stays `n + cp`.
fn transmit_stream(symbols: &[TimeSignal], cp: usize, rolloff: usize) -> Result<TimeSignal> {
    let n = symbols[0].len();
    let n_tx = symbols[0].n_tx();
    if cp > n || rolloff > cp {
        return Err(Error::Parameter(format!(
            "cyclic prefix {cp} and rolloff {rolloff} do not fit a {n}-sample symbol"
        )));
    }
    let period = n + cp;
    let mut out = ComplexMatrix::zeros(period * symbols.len() + rolloff, n_tx);
    for (s, sym) in symbols.iter().enumerate() {
        let ext = ComplexMatrix::from_fn(period + rolloff, n_tx, |i, j| {
            sym.samples()[((i + n - cp) % n, j)]
        });
        let ext = raised_cosine_window(&TimeSignal::new(ext), rolloff)?;
        for i in 0..period + rolloff {
            for j in 0..n_tx {
                out[(s * period + i, j)] += ext.samples()[(i, j)];
            }
        }
    }
    Ok(TimeSignal::new(out))
}

/// Linear PSD averaged over antennas.
fn stream_psd(sig: &TimeSignal, bins: usize) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; bins];
    for j in 0..sig.n_tx() {
        for (a, v) in acc.iter_mut().zip(psd(sig, bins, j)?) {
            *a += db_to_linear(v);
        }
    }
    acc.iter_mut().for_each(|v| *v /= sig.n_tx() as f64);
    Ok(acc)
}

fn run_drop(
    cfg: &ExperimentConfig,
    layout: &Arc<SubcarrierLayout>,
    profile: &TdlProfile,
    sweep_index: usize,
    drop: usize,
) -> Result<DropRecord> {
    let start = Instant::now();
    let setup = setup_drop(cfg, profile, sweep_index, drop)?;
    let m = &cfg.mimo;
    let n_tx = m.n_tx;
    let n_active = layout.n_active();
    let bins = layout.total_bins();
    let n_sym = cfg.symbols_per_drop;
    let mut rng_sym = RngStream::new(cfg.seed, stream_id(sweep_index, drop, STREAM_SYMBOLS));

    let mut rows = Vec::new();
    let mut push = |metric: &str, index: usize, value: f64| {
        rows.push(MetricRow {
            drop,
            metric: metric.to_string(),
            index,
            value,
        })
    };
    let mut warnings = Vec::new();
    let mut trace = ResidualTrace::default();
    let mut wb = [Vec::new(), Vec::new(), Vec::new()];
    let mut sc_sq = [vec![0.0; n_active], vec![0.0; n_active], vec![0.0; n_active]];
    let mut sc_count = vec![0usize; n_active];
    let mut ipapr_per_antenna: Vec<Vec<f64>> = vec![Vec::new(); n_tx];
    let mut symbols_t = Vec::with_capacity(n_sym);
    let mut papr_all = Vec::new();
    let mut aclr_all = Vec::new();
    let mut iters = Vec::new();
    let mut stopped_early = 0;

    for sym in 0..n_sym {
        let s = generate_symbols(m.n_layers, n_active, m.bits_per_symbol, &mut rng_sym)?;
        let x0 = precode(&s, &setup.w, layout.clone())?;
        let x0_norm = x0.data().frobenius_norm();
        let snap_on = sym == 0 && cfg.solver.snapshot_every > 0;
        let mut obs = |it: usize, z: &ComplexMatrix| snapshot(it, z, &x0, &s, &setup).ok();
        let out = solve(
            &x0,
            &setup.q,
            &cfg.solver,
            if snap_on { Some(&mut obs) } else { None },
        )?;
        for w in &out.warnings {
            if !warnings.contains(w) {
                warnings.push(w.clone());
            }
        }
        let z = &out.solution;
        let k = sym * n_tx;
        let t_in = to_time(&x0)?;
        let t = to_time(z)?;
        for (j, ip) in ipapr_per_antenna.iter_mut().enumerate() {
            push("papr_db_input", k + j, papr_db(&t_in, j)?);
            let p = papr_db(&t, j)?;
            let a = aclr_db(z, j)?;
            push("papr_db", k + j, p);
            push("aclr_db", k + j, a);
            papr_all.push(p);
            aclr_all.push(a);
            ip.extend(ipapr_samples(&t, j)?);
        }
        symbols_t.push(t);

        let tx = tx_evm(z, &x0)?;
        let pred = predicted_evm(&setup.h_true, z, &x0)?;
        let eq = equalize(&setup.h_true, &setup.w, z)?;
        let est = estimated_evm(&eq.estimates, &s, &eq.rank_deficient)?;
        push("txevm_wb", sym, tx.wideband);
        push("predevm_wb", sym, pred.wideband);
        push("estevm_wb", sym, est.wideband);
        for (l, v) in est.wideband_per_layer.iter().enumerate() {
            push("estevm_wb_layer", sym * m.n_layers + l, *v);
        }
        wb[0].push(tx.wideband);
        wb[1].push(pred.wideband);
        wb[2].push(est.wideband);
        let est_sc = est.per_subcarrier();
        for i in 0..n_active {
            if est_sc[i].is_finite() {
                sc_sq[0][i] += tx.per_subcarrier[i].powi(2);
                sc_sq[1][i] += pred.per_subcarrier[i].powi(2);
                sc_sq[2][i] += est_sc[i].powi(2);
                sc_count[i] += 1;
            }
        }

        let iters_done = out.state.residuals.len();
        iters.push(iters_done as f64);
        stopped_early += usize::from(out.stopped_early);
        push("iterations", sym, iters_done as f64);
        push("x0_norm", sym, x0_norm);
        if let Some((p, d)) = out.state.residuals.last() {
            push("primal_rel", sym, p / x0_norm);
            push("dual_rel", sym, d / x0_norm);
        }
        if cfg.solver.engine != Engine::Icf {
            let kkt = kkt_check(&out.state, &x0, &setup.q, &cfg.solver)?;
            push("kkt_primal_gap", sym, kkt.primal_gap);
            push("kkt_stationarity_aclr", sym, kkt.stationarity_aclr);
            push("kkt_stationarity_papr", sym, kkt.stationarity_papr);
        }
        if sym == 0 && cfg.output.trace {
            let r = &out.state.residuals;
            trace = ResidualTrace {
                primal: r.primal.iter().map(|v| v / x0_norm).collect(),
                dual: r.dual.iter().map(|v| v / x0_norm).collect(),
                snapshots: r.snapshots.clone(),
            };
        }
    }

    for (name, acc) in ["txevm_sc", "predevm_sc", "estevm_sc"].iter().zip(&sc_sq) {
        for i in 0..n_active {
            let v = if sc_count[i] > 0 {
                (acc[i] / sc_count[i] as f64).sqrt()
            } else {
                f64::NAN
            };
            push(name, i, v);
        }
    }
    for (j, samples) in ipapr_per_antenna.iter().enumerate() {
        push("ipapr_p9999_db", j, percentile(samples, IPAPR_PERCENTILE)?);
    }
    let summary = DropSummary {
        papr_db_max: max_of(papr_all.iter().copied()),
        aclr_db_max: max_of(aclr_all.iter().copied()),
        txevm_wb: rms(&wb[0]),
        predevm_wb: rms(&wb[1]),
        estevm_wb: rms(&wb[2]),
        iterations_mean: iters.iter().sum::<f64>() / iters.len() as f64,
        stopped_early,
    };
    let cp = cfg.grid.cp_len_samples;
    let psd_lin = stream_psd(&transmit_stream(&symbols_t, cp, 0)?, bins)?;
    let psd_win = if cfg.grid.window {
        let r = default_rolloff(cp);
        Some(stream_psd(&transmit_stream(&symbols_t, cp, r)?, bins)?)
    } else {
        None
    };
    Ok(DropRecord {
        drop,
        rows,
        summary,
        trace,
        warnings,
        elapsed_s: start.elapsed().as_secs_f64(),
        ipapr: ipapr_per_antenna.concat(),
        psd_lin,
        psd_windowed_lin: psd_win,
    })
}

fn to_db(lin: &[f64]) -> Vec<f64> {
    lin.iter()
        .map(|v| if *v > 0.0 { linear_to_db(*v).max(DB_FLOOR) } else { DB_FLOOR })
        .collect()
}

fn mean_lin(drops: &[DropRecord], pick: impl Fn(&DropRecord) -> Option<&Vec<f64>>) -> Option<Vec<f64>> {
    let mut acc: Option<Vec<f64>> = None;
    for d in drops {
        let v = pick(d)?;
        match acc.as_mut() {
            None => acc = Some(v.clone()),
            Some(a) => a.iter_mut().zip(v).for_each(|(x, y)| *x += y),
        }
    }
    let n = drops.len() as f64;
    acc.map(|a| a.into_iter().map(|v| v / n).collect())
}

fn aggregate(drops: &[DropRecord]) -> Result<Option<Aggregate>> {
    if drops.is_empty() {
        return Ok(None);
    }
    let n = drops.len() as f64;
    let mean = |f: fn(&DropSummary) -> f64| drops.iter().map(|d| f(&d.summary)).sum::<f64>() / n;
    let paprs: Vec<f64> = drops
        .iter()
        .flat_map(|d| d.rows.iter().filter(|r| r.metric == "papr_db").map(|r| r.value))
        .collect();
    let pooled: Vec<f64> = drops.iter().flat_map(|d| d.ipapr.iter().copied()).collect();
    Ok(Some(Aggregate {
        drops_ok: drops.len(),
        papr_db_max: max_of(paprs.iter().copied()),
        papr_db_mean: paprs.iter().sum::<f64>() / paprs.len() as f64,
        aclr_db_max: max_of(drops.iter().map(|d| d.summary.aclr_db_max)),
        ipapr_p9999_db: percentile(&pooled, IPAPR_PERCENTILE)?,
        txevm_wb: mean(|s| s.txevm_wb),
        predevm_wb: mean(|s| s.predevm_wb),
        estevm_wb: mean(|s| s.estevm_wb),
        iterations_mean: mean(|s| s.iterations_mean),
    }))
}

fn run_indexed(cfg: &ExperimentConfig, sweep_index: usize) -> Result<MetricsReport> {
    cfg.validate()?;
    let start = Instant::now();
    let layout = Arc::new(SubcarrierLayout::centered(
        cfg.grid.fft_bins,
        cfg.grid.active_subcarriers,
    )?);
    let profile = profile_of(cfg)?;
    let work = || {
        (0..cfg.drops)
            .into_par_iter()
            .map(|d| run_drop(cfg, &layout, &profile, sweep_index, d).map_err(|e| (d, e)))
            .collect::<Vec<_>>()
    };
    let results = if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.workers)))?
            .install(work)
    } else {
        work()
    };
    let mut drops = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(d) => drops.push(d),
            Err((drop, e)) => failures.push(DropFailure {
                drop,
                error: e.to_string(),
            }),
        }
    }
    let aggregate = aggregate(&drops)?;
    let psd_db = mean_lin(&drops, |d| Some(&d.psd_lin)).map(|v| to_db(&v)).unwrap_or_default();
    let psd_windowed_db = mean_lin(&drops, |d| d.psd_windowed_lin.as_ref()).map(|v| to_db(&v));
    let pooled: Vec<f64> = drops
        .iter()
        .flat_map(|d| d.ipapr.iter().map(|v| v.max(DB_FLOOR)))
        .collect();
    let ccdf = if pooled.is_empty() { None } else { Some(ccdf(&pooled)?) };
    Ok(MetricsReport {
        config: cfg.clone(),
        sweep_index,
        drops,
        failures,
        aggregate,
        psd_db,
        psd_windowed_db,
        ccdf,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Runs every drop of `cfg`. Per-drop failures are collected in the report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<MetricsReport> {
    run_indexed(cfg, 0)
}

/// One report per value of the dotted config path `param`. All points share
/// the base seed; the sweep position selects distinct RNG streams.
pub fn sweep(cfg: &ExperimentConfig, param: &str, values: &[String]) -> Result<Vec<MetricsReport>> {
    let cfgs = values
        .iter()
        .map(|v| cfg.with_override(param, v))
        .collect::<Result<Vec<_>>>()?;
    cfgs.iter()
        .enumerate()
        .map(|(i, c)| run_indexed(c, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_j0_reference_values() {
        assert_eq!(bessel_j0(0.0), 1.0);
        // tabulated J0(1) and J0(2.404825557695773) = 0
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!(bessel_j0(2.404_825_557_695_773).abs() < 1e-12);
    }

    fn clipped_symbols(n_sym: usize) -> (Arc<SubcarrierLayout>, Vec<TimeSignal>) {
        use crate::numerics::complex_gaussian;
        use crate::prox::proj_linf_ball;
        let layout = Arc::new(SubcarrierLayout::centered(256, 64).unwrap());
        let mut rng = RngStream::new(31, 0);
        let syms = (0..n_sym)
            .map(|_| {
                let mut g = ResourceGrid::zeros(layout.clone(), 1);
                let v = complex_gaussian(&mut rng, 64, 1.0).unwrap();
                for (i, &k) in layout.active().iter().enumerate() {
                    g.data_mut()[(0, k)] = v[i];
                }
                let t = to_time(&g).unwrap().antenna(0);
                TimeSignal::from_antenna(proj_linf_ball(&t, 0.06))
            })
            .collect();
        (layout, syms)
    }

    #[test]
    fn stream_without_rolloff_is_cp_concatenation() {
        let (_, syms) = clipped_symbols(3);
        let s = transmit_stream(&syms, 16, 0).unwrap();
        assert_eq!(s.len(), 3 * 272);
        let a = s.antenna(0);
        let x1 = syms[1].antenna(0);
        assert_eq!(&a[272 + 16..544], &x1[..]);
        assert_eq!(&a[272..272 + 16], &x1[240..]);
        assert!(transmit_stream(&syms, 16, 17).is_err());
    }

    #[test]
    fn windowing_lowers_out_of_band_median() {
        let (layout, syms) = clipped_symbols(40);
        let raw = stream_psd(&transmit_stream(&syms, 64, 0).unwrap(), 256).unwrap();
        let win = stream_psd(&transmit_stream(&syms, 64, 16).unwrap(), 256).unwrap();
        let median = |p: &[f64]| {
            let v: Vec<f64> = layout.guard().iter().map(|&k| p[k]).collect();
            percentile(&v, 50.0).unwrap()
        };
        assert!(median(&win) < median(&raw), "{} vs {}", median(&win), median(&raw));
    }

    #[test]
    fn stream_ids_distinct() {
        let mut ids = std::collections::BTreeSet::new();
        for s in 0..3 {
            for d in 0..20 {
                for p in [STREAM_CHANNEL, STREAM_ESTIMATION, STREAM_SYMBOLS, STREAM_AGEING] {
                    assert!(ids.insert(stream_id(s, d, p)));
                }
            }
        }
    }
}
