//! ⁸⁷Rb cascade emitter in crossed entangling and heralding cavities.
//!
//! The atom is driven from `g` to `e`; the `e → i±` step emits a σ± telecom
//! photon into the entangling cavity and the `i± → f±` step a π herald photon
//! into the heralding cavity.

mod model;
mod outcome;
mod pulse;
mod scheme;

pub use model::{
    build_model, CascadeModel, CascadeSetup, ChannelKind, ATOM, HERALD, HERALD_SECOND, TELECOM_MINUS,
    TELECOM_PLUS, WINDOW_TAIL,
};
pub use outcome::{
    flux_curves, multiphoton_fraction, success_probability, sweep_fwhm, ArrivalRecord, ArrivalSampleSet,
    CascadeOutcome, FluxCurves, LossChannel, MultiphotonEstimate, SweepPoint,
};
pub use pulse::{calibrate_pulse, calibrated_model, default_center, Calibration, ControlPulse, TARGET_RESIDUAL};
pub use scheme::{
    BroadbandLoss, BuildOptions, CrossedCavityParams, Level, LevelScheme, ModeRates, RecyclingScope,
    SecondHeraldMode,
};
