//! Inputs shared by the criterion benchmarks.

use cocofj::synth::{Naming, Scheme, SynthConfig};
use cocofj::{Session, Tuning, VarGen};

/// Configurations measured by the benchmarks: every scheme with unique
/// names at two sizes.
pub fn configs() -> Vec<SynthConfig> {
    let mut out = Vec::new();
    for scheme in Scheme::ALL {
        for k in [4, 8] {
            out.push(SynthConfig::new(scheme, Naming::Unique, k, 4));
        }
    }
    out
}

/// A session over the synthesized program with every node memoized.
pub fn warm_session(config: &SynthConfig, tuning: Tuning) -> Session {
    let mut s = Session::with_vars(cocofj::synth::synthesize(config), tuning, VarGen::new());
    s.check();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn warm_session_is_fully_memoized() {
        let cfg = SynthConfig::new(Scheme::AccumSuper, Naming::Unique, 2, 2);
        let s = warm_session(&cfg, Tuning::default());
        assert_eq!(s.memo_len(), s.program().node_count());
        assert_eq!(configs().len(), 6);
    }
}
