use std::f64::consts::SQRT_2;

use crate::dynamics::{
    evolve_no_jump, Coefficient, CollapseChannel, HamiltonianTerm, HilbertSpace, LindbladModel, Operator,
    QuantumState, Tolerances,
};
use crate::error::{Error, Result};

use super::pulse::ControlPulse;
use super::scheme::{BuildOptions, CrossedCavityParams, Level, LevelScheme, RecyclingScope};

pub const ATOM: &str = "atom";
pub const TELECOM_PLUS: &str = "t+";
pub const TELECOM_MINUS: &str = "t-";
pub const HERALD: &str = "h";
pub const HERALD_SECOND: &str = "hv";

/// Time after the pulse (centre + 1.5 FWHM) that the window keeps running.
pub const WINDOW_TAIL: f64 = 100e-9;

/// What a collapse channel means physically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    TelecomOutput,
    TelecomLoss,
    HeraldOutput,
    HeraldLoss,
    SecondHeraldOutput,
    SecondHeraldLoss,
    FreeSpace,
}

/// Everything needed to build a model except the pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSetup {
    pub scheme: LevelScheme,
    pub cavities: CrossedCavityParams,
    pub options: BuildOptions,
}

impl CascadeSetup {
    pub fn reference() -> Self {
        Self {
            scheme: LevelScheme::rubidium87(),
            cavities: CrossedCavityParams::reference(),
            options: BuildOptions::default(),
        }
    }

    pub fn build(&self, pulse: &ControlPulse) -> Result<CascadeModel> {
        build_model(&self.scheme, &self.cavities, pulse, &self.options)
    }
}

/// A cascade [`LindbladModel`] together with its bookkeeping.
#[derive(Debug, Clone)]
pub struct CascadeModel {
    model: LindbladModel,
    pulse: ControlPulse,
    window: (f64, f64),
    levels: Vec<Level>,
    kinds: Vec<ChannelKind>,
    cavities: CrossedCavityParams,
}

impl CascadeModel {
    pub fn lindblad(&self) -> &LindbladModel {
        &self.model
    }

    pub fn space(&self) -> &HilbertSpace {
        self.model.space()
    }

    pub fn pulse(&self) -> &ControlPulse {
        &self.pulse
    }

    pub fn cavities(&self) -> &CrossedCavityParams {
        &self.cavities
    }

    /// Simulated time interval.
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn with_window(mut self, window: (f64, f64)) -> Result<Self> {
        if !(window.1 > window.0) {
            return Err(Error::invalid("window", "end must be after start"));
        }
        self.window = window;
        Ok(self)
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level_index(&self, level: Level) -> Option<usize> {
        self.levels.iter().position(|l| *l == level)
    }

    pub fn channel_kinds(&self) -> &[ChannelKind] {
        &self.kinds
    }

    /// Atom in the initial state, all modes empty.
    pub fn initial_state(&self) -> QuantumState {
        let digits = vec![0; self.space().factors().len()];
        QuantumState::basis(self.space(), &digits).expect("ground state exists")
    }

    /// Photon-number operator of a mode factor.
    pub fn number_operator(&self, mode: &str) -> Result<Operator> {
        let a = Operator::annihilation(self.space(), mode)?;
        a.adjoint().mul(&a)
    }

    /// Population left in the initial atomic level at the end of the window.
    pub fn ground_residual(&self) -> Result<f64> {
        let g = self.level_index(Level::Ground).expect("ground level");
        if self.model.channel_feeds(ATOM, g) {
            let grid = [self.window.0, self.window.1];
            let out = crate::dynamics::evolve_master(
                &self.model,
                &self.initial_state(),
                &grid,
                &Default::default(),
            )?;
            return out[1].factor_population(ATOM, g);
        }
        // Nothing returns to g, so its population is that of the no-jump branch.
        let psi = evolve_no_jump(&self.model, &self.initial_state(), self.window, Tolerances::default())?;
        let which = self.space().index_of(ATOM).unwrap();
        Ok(psi
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space().digits(*i)[which] == g)
            .map(|(_, z)| z.norm_sqr())
            .sum())
    }
}

fn default_window(pulse: &ControlPulse) -> (f64, f64) {
    (0.0, pulse.center + 1.5 * pulse.fwhm + WINDOW_TAIL)
}

struct Builder<'a> {
    space: &'a HilbertSpace,
    levels: &'a [Level],
}

impl Builder<'_> {
    fn idx(&self, l: Level) -> usize {
        self.levels.iter().position(|x| *x == l).expect("level present")
    }

    /// |to⟩⟨from| on the atom.
    fn flip(&self, to: Level, from: Level) -> Result<Operator> {
        Operator::local_transition(self.space, ATOM, self.idx(to), self.idx(from))
    }

    fn create(&self, mode: &str) -> Result<Operator> {
        Ok(Operator::annihilation(self.space, mode)?.adjoint())
    }

    fn hermitian(op: Operator) -> Result<Operator> {
        op.add(&op.adjoint())
    }
}

/// Builds the crossed-cavity cascade for one control pulse.
pub fn build_model(
    scheme: &LevelScheme,
    cavities: &CrossedCavityParams,
    pulse: &ControlPulse,
    options: &BuildOptions,
) -> Result<CascadeModel> {
    scheme.validate()?;
    cavities.validate()?;
    if !(options.recycling_rate_scale >= 0.0) || !options.recycling_rate_scale.is_finite() {
        return Err(Error::invalid("recycling_rate_scale", "must be non-negative"));
    }
    let telecom_dim = match (options.telecom_photons, options.worst_case_recycling) {
        (None, false) => 2,
        (None, true) => 3,
        (Some(n), true) if n < 2 => {
            return Err(Error::invalid(
                "telecom_photons",
                "worst-case recycling needs room for two telecom photons",
            ))
        }
        (Some(0), _) => return Err(Error::invalid("telecom_photons", "must be at least 1")),
        (Some(n), _) => n + 1,
    };

    let mut levels = vec![
        Level::Ground,
        Level::Upper,
        Level::IntermediatePlus,
        Level::IntermediateMinus,
        Level::FinalPlus,
        Level::FinalMinus,
        Level::Sink,
    ];
    if cavities.second_herald.is_some() {
        levels.extend([Level::FinalZero, Level::FinalPlusTwo, Level::FinalMinusTwo]);
    }
    if options.broadband_loss.is_some() {
        levels.push(Level::UpperDark);
    }
    let mut factors = vec![
        (ATOM, levels.len()),
        (TELECOM_PLUS, telecom_dim),
        (TELECOM_MINUS, telecom_dim),
        (HERALD, 2),
    ];
    if cavities.second_herald.is_some() {
        factors.push((HERALD_SECOND, 2));
    }
    let space = HilbertSpace::new(factors)?;
    let b = Builder { space: &space, levels: &levels };
    use Level::*;

    let mut terms = Vec::new();
    let mut constant = |c: f64, op: Operator| {
        if c != 0.0 {
            terms.push(HamiltonianTerm { coefficient: Coefficient::Constant(c), operator: op });
        }
    };

    // drive Ω(t)/2 (|e⟩⟨g| + h.c.)
    let drive = Builder::hermitian(b.flip(Upper, Ground)?)?;
    constant(options.light_shift, b.flip(Upper, Upper)?);

    // telecom emission e → i∓ with a σ± photon
    let tel = b
        .create(TELECOM_PLUS)?
        .mul(&b.flip(IntermediateMinus, Upper)?)?
        .add(&b.create(TELECOM_MINUS)?.mul(&b.flip(IntermediatePlus, Upper)?)?.scale_re(scheme.telecom_sign))?;
    constant(cavities.entangling.coupling, Builder::hermitian(tel)?);

    // herald emission i± → f± with a π photon
    let her = b
        .create(HERALD)?
        .mul(&b.flip(FinalMinus, IntermediateMinus)?)?
        .add(&b.create(HERALD)?.mul(&b.flip(FinalPlus, IntermediatePlus)?)?.scale_re(scheme.herald_sign))?;
    constant(cavities.heralding.coupling, Builder::hermitian(her)?);

    if let Some(second) = cavities.second_herald {
        let (a, bb, c) = scheme.herald_amplitudes;
        let av = b.create(HERALD_SECOND)?;
        let to_zero = av
            .mul(&b.flip(FinalZero, IntermediateMinus)?)?
            .add(&av.mul(&b.flip(FinalZero, IntermediatePlus)?)?.scale_re(scheme.herald_sign))?;
        let to_two = av
            .mul(&b.flip(FinalMinusTwo, IntermediateMinus)?)?
            .add(&av.mul(&b.flip(FinalPlusTwo, IntermediatePlus)?)?.scale_re(scheme.herald_sign))?;
        let gh = cavities.heralding.coupling;
        constant(gh * a / (bb * SQRT_2), Builder::hermitian(to_zero)?);
        constant(gh * c / (bb * SQRT_2), Builder::hermitian(to_two)?);
        constant(second.detuning, av.mul(&av.adjoint())?);
    }

    let mut drive_terms = vec![(1.0, drive)];
    if let Some(bl) = options.broadband_loss {
        constant(bl.detuning, b.flip(UpperDark, UpperDark)?);
        drive_terms.push((bl.relative_strength, Builder::hermitian(b.flip(UpperDark, Ground)?)?));
    }
    for (scale, op) in drive_terms {
        terms.push(HamiltonianTerm { coefficient: pulse.coefficient(0.5 * scale), operator: op });
    }

    // collapse channels
    let mut channels = Vec::new();
    let mut kinds = Vec::new();
    let mut push = |label: &str, kind: ChannelKind, rate: f64, op: Operator| {
        channels.push(CollapseChannel { label: label.to_string(), operator: op.scale_re(rate.sqrt()) });
        kinds.push(kind);
    };
    for mode in [TELECOM_PLUS, TELECOM_MINUS] {
        let a = Operator::annihilation(&space, mode)?;
        push(&format!("{mode}_oc"), ChannelKind::TelecomOutput, 2.0 * cavities.entangling.kappa_oc, a.clone());
        push(&format!("{mode}_loss"), ChannelKind::TelecomLoss, 2.0 * cavities.entangling.kappa_loss, a);
    }
    let a = Operator::annihilation(&space, HERALD)?;
    push("h_oc", ChannelKind::HeraldOutput, 2.0 * cavities.heralding.kappa_oc, a.clone());
    push("h_loss", ChannelKind::HeraldLoss, 2.0 * cavities.heralding.kappa_loss, a);
    if cavities.second_herald.is_some() {
        let a = Operator::annihilation(&space, HERALD_SECOND)?;
        push("hv_oc", ChannelKind::SecondHeraldOutput, 2.0 * cavities.heralding.kappa_oc, a.clone());
        push("hv_loss", ChannelKind::SecondHeraldLoss, 2.0 * cavities.heralding.kappa_loss, a);
    }

    let recycle = |feeds: bool| {
        if options.worst_case_recycling && feeds {
            (Ground, options.recycling_rate_scale)
        } else {
            (Sink, 1.0)
        }
    };
    let all = options.recycling_scope == RecyclingScope::AllEscapes;
    let (escape, escape_scale) = recycle(true);
    let (dark, dark_scale) = recycle(all);
    let fs = ChannelKind::FreeSpace;
    let si = scheme;
    push("fs_e_i+", fs, si.gamma_upper_to_intermediate, b.flip(IntermediatePlus, Upper)?);
    push("fs_e_i-", fs, si.gamma_upper_to_intermediate, b.flip(IntermediateMinus, Upper)?);
    push("fs_e_out", fs, escape_scale * si.gamma_upper_other(), b.flip(escape, Upper)?);
    push("fs_i+_f+", fs, si.gamma_intermediate_to_final, b.flip(FinalPlus, IntermediatePlus)?);
    push("fs_i-_f-", fs, si.gamma_intermediate_to_final, b.flip(FinalMinus, IntermediateMinus)?);
    push("fs_i+_g", fs, escape_scale * si.gamma_intermediate_to_ground, b.flip(escape, IntermediatePlus)?);
    push("fs_i-_g", fs, escape_scale * si.gamma_intermediate_to_ground, b.flip(escape, IntermediateMinus)?);
    push("fs_i+_out", fs, dark_scale * si.gamma_intermediate_other(), b.flip(dark, IntermediatePlus)?);
    push("fs_i-_out", fs, dark_scale * si.gamma_intermediate_other(), b.flip(dark, IntermediateMinus)?);
    if options.broadband_loss.is_some() {
        push("fs_e3_out", fs, escape_scale * scheme.gamma_upper, b.flip(escape, UpperDark)?);
    }

    let max_step = pulse.fwhm / 4.0;
    let model = LindbladModel::new(space, terms, channels)?.with_max_step(max_step);
    Ok(CascadeModel {
        model,
        pulse: *pulse,
        window: default_window(pulse),
        levels,
        kinds,
        cavities: *cavities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_dimension_is_56() {
        let m = CascadeSetup::reference().build(&ControlPulse::centered(5.9e-9, 1e8).unwrap()).unwrap();
        assert_eq!(m.space().dim(), 56);
        let mut s = CascadeSetup::reference();
        s.options.worst_case_recycling = true;
        let m = s.build(&ControlPulse::centered(5.9e-9, 1e8).unwrap()).unwrap();
        assert_eq!(m.space().dim(), 7 * 3 * 3 * 2);
        assert!(m.lindblad().channel_feeds(ATOM, 0));
    }

    #[test]
    fn inconsistent_truncation_rejected() {
        let mut s = CascadeSetup::reference();
        s.options.worst_case_recycling = true;
        s.options.telecom_photons = Some(1);
        assert!(s.build(&ControlPulse::centered(5.9e-9, 1e8).unwrap()).is_err());
    }

    #[test]
    fn hamiltonian_is_hermitian_with_all_options() {
        let mut s = CascadeSetup::reference();
        s.cavities.second_herald = Some(super::super::scheme::SecondHeraldMode { detuning: 1e7 });
        s.options.broadband_loss = Some(super::super::scheme::BroadbandLoss { detuning: 1e9, relative_strength: 0.5 });
        s.options.light_shift = 1e6;
        let m = s.build(&ControlPulse::centered(5.9e-9, 1e8).unwrap()).unwrap();
        assert!(m.lindblad().hamiltonian_at(12e-9).is_hermitian(1e-6));
        assert_eq!(m.space().dim(), 11 * 2 * 2 * 2 * 2);
    }
}
