//! Initial conditions and forces built from settings.

use nsreg::bounds_engine::ConstantLedger;
use nsreg::ns_solver::ForcingSpec;
use nsreg::spectral_field::snapshot::read_snapshot;
use nsreg::spectral_field::{
    random_divfree_field, shear_flow, sobolev_norm_sq, Complex64, SobolevIndex, SpectralVelocity, VectorSpectrum,
    WaveGrid, DEFAULT_DIV_TOLERANCE,
};

use crate::args::{ForcingKind, InitKind};
use crate::config::SimSettings;
use crate::error::CliError;

pub fn grid(n: usize) -> Result<WaveGrid, CliError> {
    Ok(WaveGrid::periodic_2pi(n)?)
}

pub fn forcing(s: &SimSettings, g: WaveGrid) -> ForcingSpec {
    match s.forcing {
        ForcingKind::Zero => ForcingSpec::Zero,
        ForcingKind::Shear => ForcingSpec::Steady(shear_flow(g, s.force_amplitude)),
    }
}

/// Initial state and force. A snapshot fixes the grid; otherwise `s.n` does.
pub fn initial_state(s: &SimSettings, seed: u64) -> Result<(SpectralVelocity, ForcingSpec), CliError> {
    let u0 = match s.init {
        InitKind::Snapshot => {
            let path = s.snapshot.as_ref().expect("checked when resolving settings");
            read_snapshot(path)?.0
        }
        InitKind::Zero => SpectralVelocity::zeros(grid(s.n)?),
        InitKind::Shear => shear_flow(grid(s.n)?, s.amplitude),
        InitKind::Random => random_divfree_field(grid(s.n)?, seed, s.slope, s.amplitude)?,
        // stationary under f = F sin y: νAu = f
        InitKind::Kolmogorov => shear_flow(grid(s.n)?, s.force_amplitude / s.nu),
    };
    let f = forcing(s, *u0.grid());
    Ok((u0, f))
}

/// `‖u‖` and `‖u‖₁²`.
pub fn norms(u: &SpectralVelocity) -> (f64, f64) {
    (
        sobolev_norm_sq(u, SobolevIndex::L2).sqrt(),
        sobolev_norm_sq(u, SobolevIndex::H1),
    )
}

/// Scale `u` so that `c₁₁‖su‖² + arctan ‖su‖₁²` equals `target`.
pub fn scale_to_free_lhs(u: &SpectralVelocity, ledger: &ConstantLedger, target: f64) -> SpectralVelocity {
    let (l2, h1) = norms(u);
    let e = l2 * l2;
    if e == 0.0 {
        return u.clone();
    }
    let lhs = |s2: f64| ledger.energy * s2 * e + (s2 * h1).atan();
    // lhs is increasing in s²; bracket, then bisect
    let mut hi = 1.0;
    while lhs(hi) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // the lower end keeps the LHS at or below the target, up to the rounding
    // of the rescaled field's own norms
    loop {
        let v = u.scaled(lo.sqrt());
        let (l2, h1) = norms(&v);
        if ledger.energy * l2 * l2 + h1.atan() <= target || lo == 0.0 {
            return v;
        }
        lo *= 1.0 - 1e-12;
    }
}

/// `a (sin y, 0, 0) + b (1, −1, 0) sin(m(x + y + z)) / √2` with `m` the
/// largest resolved wavenumber, tuned so that `‖u‖ = l2` and `‖u‖₁² = h1_sq`.
/// `None` when the ratio `h1_sq / l2²` lies outside `[1, 3m²]`.
pub fn two_shell_field(g: WaveGrid, l2: f64, h1_sq: f64) -> Option<SpectralVelocity> {
    let m = g.dealias_cutoff();
    let kappa = (3 * m * m) as f64;
    let e = l2 * l2;
    if e == 0.0 {
        return (h1_sq == 0.0).then(|| SpectralVelocity::zeros(g));
    }
    let ratio = h1_sq / e;
    if !(1.0..=kappa).contains(&ratio) || m < 2 {
        return None;
    }
    // ‖(sin·, 0, 0)‖² = L³/2
    let unit = g.volume() / 2.0;
    let b2 = (h1_sq - e) / (kappa - 1.0);
    let a2 = e - b2;
    let (a, b) = ((a2.max(0.0) / unit).sqrt(), (b2 / unit).sqrt());
    let mut raw = VectorSpectrum::zeros(g);
    let z = Complex64::default();
    raw.set_hermitian_pair([0, 1, 0], [Complex64::new(0.0, -0.5 * a), z, z]);
    let c = Complex64::new(0.0, -0.5 * b / 2f64.sqrt());
    raw.set_hermitian_pair([m, m, m], [c, -c, z]);
    SpectralVelocity::try_from_spectrum(raw, DEFAULT_DIV_TOLERANCE).ok()
}
