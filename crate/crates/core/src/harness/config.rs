use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::SolverConfig;

/// Frequency grid. Desk scale: 1024 bins with 300 active subcarriers
/// (4x oversampling of a 256-point symbol), down from 20 MHz / 1200
/// subcarriers so a 1000-iteration drop stays well under a minute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub fft_bins: usize,
    pub active_subcarriers: usize,
    pub subcarrier_spacing_hz: f64,
    /// Cyclic prefix at the oversampled rate; sets the window ramp length.
    pub cp_len_samples: usize,
    /// Also report the spectrum after edge windowing.
    pub window: bool,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            fft_bins: 1024,
            active_subcarriers: 300,
            subcarrier_spacing_hz: 15e3,
            cp_len_samples: 288,
            window: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MimoSection {
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_layers: usize,
    pub bits_per_symbol: u32,
    pub rzf_alpha: f64,
}

impl Default for MimoSection {
    fn default() -> Self {
        Self {
            n_tx: 16,
            n_rx: 2,
            n_layers: 2,
            bits_per_symbol: 8,
            rzf_alpha: 0.001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub n_taps: usize,
    pub delay_spread_ns: f64,
    /// Ricean first tap.
    pub los: bool,
    pub k_factor_linear: f64,
    /// Exponential correlation coefficients at transmitter and receiver.
    pub corr_tx: f64,
    pub corr_rx: f64,
    /// Estimation SNR at the transmitter; ignored when the variance is set.
    pub estimation_snr_db: f64,
    pub estimation_error_variance: Option<f64>,
    pub prg_subcarriers: usize,
    /// CSI ageing; zero Doppler keeps the estimate on the current drop.
    pub doppler_hz: f64,
    pub csi_delay_ms: f64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            n_taps: 12,
            delay_spread_ns: 300.0,
            los: false,
            k_factor_linear: 9.0,
            corr_tx: 0.0,
            corr_rx: 0.0,
            estimation_snr_db: 5.0,
            estimation_error_variance: None,
            prg_subcarriers: 24,
            doppler_hz: 0.0,
            csi_delay_ms: 1.0,
        }
    }
}

impl ChannelSection {
    pub fn error_variance(&self) -> f64 {
        self.estimation_error_variance
            .unwrap_or_else(|| crate::channel::error_variance_from_snr_db(self.estimation_snr_db))
    }
}

/// How the per-subcarrier multipliers in the weights are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaMode {
    /// `lambda` used as given.
    Fixed,
    /// One common multiplier so the largest eigenvalue over all subcarriers
    /// equals `lambda`, which keeps the gradient step inside its stable range
    /// regardless of antenna count.
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightsSection {
    /// Use the estimated channel in the weights; otherwise `Q = lambda nu I`.
    pub csi_aware: bool,
    pub nu: f64,
    pub lambda: f64,
    pub lambda_mode: LambdaMode,
}

impl Default for WeightsSection {
    fn default() -> Self {
        Self {
            csi_aware: true,
            nu: 0.001,
            lambda: 1.0,
            lambda_mode: LambdaMode::Normalized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Residual trace of the first symbol of each drop.
    pub trace: bool,
    /// Lowest CCDF threshold written to ccdf.csv.
    pub ccdf_min_db: f64,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            trace: true,
            ccdf_min_db: -10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub seed: u64,
    pub drops: usize,
    pub symbols_per_drop: usize,
    /// Parallel drop workers; 0 uses every core.
    pub workers: usize,
    pub grid: GridSection,
    pub mimo: MimoSection,
    pub channel: ChannelSection,
    pub weights: WeightsSection,
    pub solver: SolverConfig,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: "desk".into(),
            seed: 1,
            drops: 10,
            symbols_per_drop: 14,
            workers: 0,
            grid: GridSection::default(),
            mimo: MimoSection::default(),
            channel: ChannelSection::default(),
            weights: WeightsSection::default(),
            solver: SolverConfig::default(),
            output: OutputSection::default(),
        }
    }
}

/// Every recognised key with its meaning, for `--help`.
pub const CONFIG_KEYS: &str = "\
Configuration keys (TOML; omitted keys take the defaults shown):
  scenario = \"desk\"                 run label
  seed = 1                          base RNG seed
  drops = 10                        Monte-Carlo channel drops
  symbols_per_drop = 14             OFDM symbols per drop
  workers = 0                       parallel drops (0 = all cores)
  [grid]
  fft_bins = 1024                   oversampled IDFT size (power of two)
  active_subcarriers = 300          data subcarriers, centred on DC
  subcarrier_spacing_hz = 15000
  cp_len_samples = 288              window ramp is 10% of this
  window = true                     also report the windowed spectrum
  [mimo]
  n_tx = 16, n_rx = 2, n_layers = 2
  bits_per_symbol = 8               2, 4, 6 or 8
  rzf_alpha = 0.001                 RZF regularisation
  [channel]
  n_taps = 12, delay_spread_ns = 300
  los = false, k_factor_linear = 9  Ricean first tap
  corr_tx = 0.0, corr_rx = 0.0      exponential correlation coefficients
  estimation_snr_db = 5.0           CSI error variance = 10^(-snr/10)
  estimation_error_variance         overrides estimation_snr_db when set
  prg_subcarriers = 24              CSI averaging group
  doppler_hz = 0.0, csi_delay_ms = 1.0
  [weights]
  csi_aware = true                  false: Q = lambda*nu*I
  nu = 0.001, lambda = 1.0
  lambda_mode = \"normalized\"        or \"fixed\"
  [solver]
  engine = \"topadmm\"                topadmm | badmm | dys | icf
  mode = \"p3\"                       p3 (moving radii) | p4 (fixed radii)
  radius_source = \"split\"           split (PAPR from Z, ACLR from X) | xbar
  tau = 1.945                       TOP-ADMM / DYS step
  rho = 0.01, badmm_rho_x = 1.0, badmm_rho_z = 1.0, badmm_tau = 0.01
  dys_mu = 1.0
  max_iters = 1000
  gamma_par_db = 4.0, psi_aclr_db = -50.0
  zeta = 0.0                        defaults to 0.05 when csi_aware = false
  stop_tol = 1e-4, early_stop = true
  snapshot_every = 0                metric snapshots in trace.csv
  [output]
  trace = true, ccdf_min_db = -10.0
";

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let raw: toml::Value =
            toml::from_str(s).map_err(|e| Error::Config(format!("invalid TOML: {e}")))?;
        let csi_given = raw
            .get("weights")
            .and_then(|w| w.get("csi_aware"))
            .and_then(|v| v.as_bool());
        let zeta_given = raw.get("solver").and_then(|s| s.get("zeta")).is_some();
        let mut cfg: Self = raw
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        if csi_given == Some(false) && !zeta_given {
            cfg.solver.zeta = 0.05;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&s)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(Error::Config(m));
        let g = &self.grid;
        let m = &self.mimo;
        let c = &self.channel;
        if !g.fft_bins.is_power_of_two() || g.fft_bins < 2 {
            return cfg_err(format!("fft_bins = {} is not a power of two", g.fft_bins));
        }
        if g.active_subcarriers == 0 || g.active_subcarriers > g.fft_bins {
            return cfg_err(format!(
                "active_subcarriers = {} must lie in 1..={}",
                g.active_subcarriers, g.fft_bins
            ));
        }
        if !(g.subcarrier_spacing_hz > 0.0) {
            return cfg_err("subcarrier_spacing_hz must be > 0".into());
        }
        if g.window && 4 * (g.cp_len_samples / 10) >= g.fft_bins {
            return cfg_err("window ramp must be shorter than a quarter symbol".into());
        }
        if m.n_tx == 0 || m.n_rx == 0 || m.n_layers == 0 {
            return cfg_err("n_tx, n_rx and n_layers must be >= 1".into());
        }
        if m.n_layers > m.n_tx.min(m.n_rx) {
            return cfg_err(format!(
                "n_layers = {} exceeds min(n_tx, n_rx) = {}",
                m.n_layers,
                m.n_tx.min(m.n_rx)
            ));
        }
        if m.n_rx > m.n_tx {
            return cfg_err("RZF precoding needs n_rx <= n_tx".into());
        }
        if !matches!(m.bits_per_symbol, 2 | 4 | 6 | 8) {
            return cfg_err(format!("bits_per_symbol = {} unsupported", m.bits_per_symbol));
        }
        if !(m.rzf_alpha >= 0.0) {
            return cfg_err("rzf_alpha must be >= 0".into());
        }
        if c.n_taps == 0 || !(c.delay_spread_ns >= 0.0) || !(c.k_factor_linear >= 0.0) {
            return cfg_err("channel needs n_taps >= 1, delay spread >= 0 and K-factor >= 0".into());
        }
        if !(0.0..=1.0).contains(&c.corr_tx) || !(0.0..=1.0).contains(&c.corr_rx) {
            return cfg_err("correlation coefficients must lie in [0, 1]".into());
        }
        if !(c.error_variance() >= 0.0) || !c.error_variance().is_finite() {
            return cfg_err("estimation error variance must be >= 0".into());
        }
        if c.prg_subcarriers == 0 {
            return cfg_err("prg_subcarriers must be >= 1".into());
        }
        if !(c.doppler_hz >= 0.0) || !(c.csi_delay_ms >= 0.0) {
            return cfg_err("doppler_hz and csi_delay_ms must be >= 0".into());
        }
        let w = &self.weights;
        if !(w.nu >= 0.0) || !(w.lambda >= 0.0) {
            return cfg_err("weights need nu >= 0 and lambda >= 0".into());
        }
        if self.drops == 0 || self.symbols_per_drop == 0 {
            return cfg_err("drops and symbols_per_drop must be >= 1".into());
        }
        self.solver.validate()
    }

    /// Sets the value at a dotted key path such as `mimo.n_tx`. The value is
    /// parsed as a TOML scalar, falling back to a plain string.
    pub fn with_override(&self, path: &str, value: &str) -> Result<Self> {
        let mut tree = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        let mut node = &mut tree;
        for part in path.split('.') {
            node = node
                .as_object_mut()
                .and_then(|o| o.get_mut(part))
                .ok_or_else(|| Error::Config(format!("unknown parameter path '{path}'")))?;
        }
        if node.is_object() {
            return Err(Error::Config(format!("'{path}' is a section, not a value")));
        }
        *node = parse_scalar(value);
        let cfg: Self = serde_json::from_value(tree)
            .map_err(|e| Error::Config(format!("bad value '{value}' for '{path}': {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_scalar(v: &str) -> serde_json::Value {
    let wrapped = format!("v = {v}");
    match toml::from_str::<toml::Table>(&wrapped).ok().and_then(|t| t.get("v").cloned()) {
        Some(toml::Value::Integer(i)) => serde_json::Value::from(i),
        Some(toml::Value::Float(f)) => serde_json::Value::from(f),
        Some(toml::Value::Boolean(b)) => serde_json::Value::from(b),
        Some(toml::Value::String(s)) => serde_json::Value::from(s),
        _ => serde_json::Value::from(v.to_string()),
    }
}
