use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{c, Ket, C64};

/// Largest detector count for which `2^N`-dimensional vectors are built.
pub const MAX_FULL_SPACE_SITES: usize = 14;

/// Family of initial detector states.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeSpec {
    /// Equal superposition of every basis string with exactly `k` `|u+>` factors.
    Symmetric { n: usize, k: usize },
    /// `((|u+> + |u->)/sqrt 2)^(x)N`.
    Separable { n: usize },
    /// `(|u+ u-> + |u- u+>)/sqrt 2`.
    TwoDetectorOptimal,
    /// Arbitrary amplitudes (normalized on construction), length `2^N`.
    Custom(Vec<C64>),
}

impl ProbeSpec {
    /// `|floor(N/2); N>`.
    pub fn balanced(n: usize) -> Self {
        Self::Symmetric { n, k: n / 2 }
    }

    pub fn n(&self) -> Option<usize> {
        match self {
            Self::Symmetric { n, .. } | Self::Separable { n } => Some(*n),
            Self::TwoDetectorOptimal => Some(2),
            Self::Custom(amps) => {
                (amps.len().is_power_of_two() && amps.len() >= 2).then(|| amps.len().trailing_zeros() as usize)
            }
        }
    }
}

/// Probe families selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProbeKind {
    Entangled,
    Separable,
}

impl ProbeKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Entangled => "entangled",
            Self::Separable => "separable",
        }
    }

    pub fn spec(self, n: usize) -> ProbeSpec {
        match self {
            Self::Entangled => ProbeSpec::balanced(n),
            Self::Separable => ProbeSpec::Separable { n },
        }
    }
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ProbeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "entangled" | "symmetric" => Ok(Self::Entangled),
            "separable" | "product" => Ok(Self::Separable),
            other => Err(format!("unknown probe kind '{other}' (expected entangled or separable)")),
        }
    }
}

pub(crate) fn check_symmetric(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewDetectors { n, min: 2 });
    }
    if k > n {
        return Err(Error::ExcitationOutOfRange { k, n });
    }
    Ok(())
}

fn check_full_space(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewDetectors { n, min: 2 });
    }
    if n > MAX_FULL_SPACE_SITES {
        return Err(Error::UnsupportedDetectorCount { n, min: 2, max: MAX_FULL_SPACE_SITES });
    }
    Ok(())
}

/// Expands a probe specification into a normalized `2^N`-dimensional ket.
pub fn build_probe(spec: &ProbeSpec) -> Result<Ket> {
    match spec {
        &ProbeSpec::Symmetric { n, k } => {
            check_symmetric(n, k)?;
            check_full_space(n)?;
            // bit value 1 marks |u->, so k plus factors means n - k set bits
            let minus = (n - k) as u32;
            let amps =
                (0..1usize << n).map(|b| if b.count_ones() == minus { c(1.0, 0.0) } else { C64::default() }).collect();
            Ket::new(amps)
        }
        &ProbeSpec::Separable { n } => {
            check_full_space(n)?;
            let dim = 1usize << n;
            Ket::new(vec![c(1.0, 0.0); dim])
        }
        ProbeSpec::TwoDetectorOptimal => build_probe(&ProbeSpec::Symmetric { n: 2, k: 1 }),
        ProbeSpec::Custom(amps) => {
            let n =
                spec.n().ok_or_else(|| Error::InvalidProbe(format!("length {} is not a power of two", amps.len())))?;
            check_full_space(n)?;
            Ket::new(amps.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn two_detector_symmetric_state() {
        let k = build_probe(&ProbeSpec::Symmetric { n: 2, k: 1 }).unwrap();
        let want = [0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0];
        for (a, w) in k.amplitudes().iter().zip(want) {
            assert_abs_diff_eq!((a - c(w, 0.0)).norm(), 0.0, epsilon = 1e-15);
        }
        assert_eq!(build_probe(&ProbeSpec::TwoDetectorOptimal).unwrap(), k);
    }

    #[test]
    fn separable_two_detector_state() {
        let k = build_probe(&ProbeSpec::Separable { n: 2 }).unwrap();
        for a in k.amplitudes() {
            assert_abs_diff_eq!((a - c(0.5, 0.0)).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn dicke_four_two() {
        let k = build_probe(&ProbeSpec::Symmetric { n: 4, k: 2 }).unwrap();
        let nonzero: Vec<_> = k.amplitudes().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 6);
        for a in nonzero {
            assert_abs_diff_eq!(a.re, 1.0 / 6f64.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn invalid_specs() {
        assert_eq!(build_probe(&ProbeSpec::Symmetric { n: 3, k: 4 }), Err(Error::ExcitationOutOfRange { k: 4, n: 3 }));
        assert_eq!(build_probe(&ProbeSpec::Symmetric { n: 1, k: 0 }), Err(Error::TooFewDetectors { n: 1, min: 2 }));
        assert_eq!(build_probe(&ProbeSpec::Separable { n: 1 }), Err(Error::TooFewDetectors { n: 1, min: 2 }));
        assert!(matches!(build_probe(&ProbeSpec::Separable { n: 15 }), Err(Error::UnsupportedDetectorCount { .. })));
        assert!(matches!(build_probe(&ProbeSpec::Custom(vec![c(1.0, 0.0); 3])), Err(Error::InvalidProbe(_))));
        assert_eq!(build_probe(&ProbeSpec::Custom(vec![C64::default(); 4])), Err(Error::ZeroNorm));
    }

    #[test]
    fn custom_is_normalized() {
        let k = build_probe(&ProbeSpec::Custom(vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0)])).unwrap();
        assert_abs_diff_eq!(k.vector().norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn probe_kind_parsing() {
        assert_eq!("entangled".parse::<ProbeKind>(), Ok(ProbeKind::Entangled));
        assert_eq!("separable".parse::<ProbeKind>(), Ok(ProbeKind::Separable));
        assert!("bogus".parse::<ProbeKind>().is_err());
        assert_eq!(ProbeKind::Entangled.spec(5), ProbeSpec::Symmetric { n: 5, k: 2 });
    }
}
