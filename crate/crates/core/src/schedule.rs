//! Detection of stabilization times for subaccumulation patterns.
//!
//! For factors with positive diagonals, the pattern of a growing window
//! accumulation only ever gains entries. Growing a window until its pattern
//! has stayed unchanged for a confirmation span yields a cut; repeating
//! produces candidate windows, and keeping the longest suffix of windows
//! with identical patterns approximates the eventual common pattern. Since
//! no finite horizon can prove stabilization, the result carries an honest
//! `stabilized` flag instead.

use crate::error::{Error, Result};
use crate::gantmacher::{gantmacher_form_of_pattern, GantmacherForm};
use crate::matrix::StochasticMatrix;
use crate::pattern::ZeroPattern;
use crate::scalar::Scalar;
use crate::seq::{backward_accumulate, forward_accumulate, MatrixSource};

/// Direction of the accumulation the schedule refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// A(t, s) = A(t-1) ... A(s), new factors on the left.
    Backward,
    /// A(s, t) = A(s) ... A(t-1), new factors on the right.
    Forward,
}

/// Stabilization times t_0 < t_1 < ... with the common window pattern.
/// Window i covers steps `times[i]..times[i+1]`.
#[derive(Debug, Clone)]
pub struct AccumulationSchedule {
    pub times: Vec<usize>,
    pub common_pattern: ZeroPattern,
    pub direction: Direction,
    /// Last step examined during detection.
    pub horizon: usize,
    /// True when at least two confirmed windows share the common pattern and
    /// no later window deviates from it.
    pub stabilized: bool,
}

impl AccumulationSchedule {
    /// Number of confirmed windows.
    pub fn window_count(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    /// The i-th window as a step range.
    pub fn window(&self, i: usize) -> std::ops::Range<usize> {
        self.times[i]..self.times[i + 1]
    }

    /// Gantmacher form of the common pattern.
    pub fn form(&self) -> Result<GantmacherForm> {
        gantmacher_form_of_pattern(&self.common_pattern)
    }
}

/// Number of additional factors a window pattern must survive unchanged
/// before a cut is declared: the square of the dimension.
pub fn default_confirmation_span(n: usize) -> usize {
    n * n
}

fn factor_pattern<F: Scalar, S: MatrixSource<F> + ?Sized>(
    seq: &S,
    t: usize,
    eps_z: F,
) -> Result<ZeroPattern> {
    let factor = seq.get(t)?;
    let pat = factor.pattern(eps_z);
    for i in 0..pat.n() {
        if !pat.get(i, i) {
            return Err(Error::MissingPositiveDiagonal { index: i });
        }
    }
    Ok(pat)
}

/// Detect a schedule over a finite horizon.
///
/// Grows a window from the current cut until the accumulated pattern stops
/// gaining entries for `confirmation_span` consecutive factors, declares the
/// cut at the earliest step attaining that pattern, then repeats. The first
/// grown segment, starting at step 0, is the head of the product and never a
/// window. Finally the longest suffix of windows with identical patterns is
/// kept, discarding the transient prefix.
pub fn detect_schedule<F: Scalar, S: MatrixSource<F> + ?Sized>(
    seq: &S,
    horizon: usize,
    eps_z: F,
    direction: Direction,
    confirmation_span: Option<usize>,
) -> Result<AccumulationSchedule> {
    let n = seq.dim();
    let span = confirmation_span.unwrap_or_else(|| default_confirmation_span(n)).max(1);
    let horizon = match seq.len() {
        Some(len) => horizon.min(len),
        None => horizon,
    };

    let mut cuts: Vec<usize> = Vec::new();
    let mut window_patterns: Vec<ZeroPattern> = Vec::new();
    let mut cursor = 0usize;
    let mut last_examined = 0usize;

    'outer: while cursor < horizon {
        let mut acc: Option<ZeroPattern> = None;
        let mut last_gain = cursor;
        let mut t = cursor;
        loop {
            if t >= horizon {
                // Horizon exhausted before this window could be confirmed.
                last_examined = t;
                break 'outer;
            }
            let fp = factor_pattern(seq, t, eps_z)?;
            t += 1;
            last_examined = t;
            let next = match &acc {
                None => fp,
                Some(prev) => match direction {
                    Direction::Backward => fp.product(prev)?,
                    Direction::Forward => prev.product(&fp)?,
                },
            };
            if let Some(prev) = &acc {
                debug_assert!(prev.is_subset_of(&next), "window pattern must be monotone");
                if &next != prev {
                    last_gain = t;
                }
            } else {
                last_gain = t;
            }
            acc = Some(next);
            if t - last_gain >= span {
                // Cut at the earliest step attaining the confirmed pattern.
                if !cuts.is_empty() {
                    window_patterns.push(acc.clone().expect("window has factors"));
                }
                cuts.push(last_gain);
                cursor = last_gain;
                break;
            }
        }
    }

    // Keep the longest suffix of windows sharing one pattern.
    let keep_from = match window_patterns.last() {
        Some(last) => {
            let mut k = window_patterns.len() - 1;
            while k > 0 && window_patterns[k - 1] == *last {
                k -= 1;
            }
            k
        }
        None => 0,
    };

    let times: Vec<usize> = cuts[keep_from..].to_vec();
    let confirmed = window_patterns.len() - keep_from;
    let (common_pattern, stabilized) = match window_patterns.last() {
        Some(last) => (last.clone(), confirmed >= 2),
        None => (ZeroPattern::diagonal(n), false),
    };

    Ok(AccumulationSchedule {
        times,
        common_pattern,
        direction,
        horizon: last_examined,
        stabilized,
    })
}

/// Recompute each window accumulation pattern (over the boolean semiring,
/// immune to float underflow) and compare with the schedule's common
/// pattern. Returns the first violating window index, if any.
pub fn verify_schedule<F: Scalar, S: MatrixSource<F> + ?Sized>(
    seq: &S,
    schedule: &AccumulationSchedule,
    eps_z: F,
) -> Result<(bool, Option<usize>)> {
    for i in 0..schedule.window_count() {
        let range = schedule.window(i);
        let mut acc: Option<ZeroPattern> = None;
        for t in range {
            let fp = factor_pattern(seq, t, eps_z)?;
            acc = Some(match acc {
                None => fp,
                Some(prev) => match schedule.direction {
                    Direction::Backward => fp.product(&prev)?,
                    Direction::Forward => prev.product(&fp)?,
                },
            });
        }
        if acc.as_ref() != Some(&schedule.common_pattern) {
            return Ok((false, Some(i)));
        }
    }
    Ok((true, None))
}

/// The window accumulations A(i) as float matrices, for the spectral and
/// convergence machinery.
pub fn window_accumulations<F: Scalar, S: MatrixSource<F> + ?Sized>(
    seq: &S,
    schedule: &AccumulationSchedule,
) -> Result<Vec<StochasticMatrix<F>>> {
    (0..schedule.window_count())
        .map(|i| {
            let w = schedule.window(i);
            match schedule.direction {
                Direction::Backward => backward_accumulate(seq, w.start, w.end),
                Direction::Forward => forward_accumulate(seq, w.start, w.end),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{ConstantSequence, ExplicitSequence};

    fn sm(rows: &[&[f64]]) -> StochasticMatrix<f64> {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        StochasticMatrix::validate(&rows, 1e-10, false).unwrap()
    }

    /// Reflexive-transitive closure by Warshall's algorithm.
    fn closure(p: &ZeroPattern) -> ZeroPattern {
        let n = p.n();
        let mut c = p.clone();
        for i in 0..n {
            c.set(i, i, true);
        }
        for k in 0..n {
            for i in 0..n {
                if !c.get(i, k) {
                    continue;
                }
                for j in 0..n {
                    if c.get(k, j) {
                        c.set(i, j, true);
                    }
                }
            }
        }
        c
    }

    #[test]
    fn constant_positive_matrix_gives_consecutive_times() {
        let a = sm(&[&[0.6, 0.4], &[0.3, 0.7]]);
        let seq = ConstantSequence::new(a);
        let s = detect_schedule(&seq, 200, 1e-12, Direction::Backward, None).unwrap();
        assert!(s.stabilized);
        assert_eq!(s.common_pattern, ZeroPattern::all_true(2));
        // Pattern closes after a single factor, so cuts are consecutive.
        let diffs: Vec<usize> = s.times.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(diffs.iter().all(|&d| d == 1), "window lengths {diffs:?}");
    }

    #[test]
    fn constant_sequence_pattern_is_the_closure() {
        // 0 <- 1 <- 2 chain: closure is lower triangular.
        let a = sm(&[&[1.0, 0.0, 0.0], &[0.5, 0.5, 0.0], &[0.0, 0.5, 0.5]]);
        let seq = ConstantSequence::new(a.clone());
        let s = detect_schedule(&seq, 500, 1e-12, Direction::Backward, None).unwrap();
        assert!(s.stabilized);
        assert_eq!(s.common_pattern, closure(&a.pattern(1e-12)));
        // Window length stays below the dimension.
        for w in s.times.windows(2) {
            assert!(w[1] - w[0] <= 2);
        }
        let (ok, violation) = verify_schedule(&seq, &s, 1e-12).unwrap();
        assert!(ok, "violation at {violation:?}");
    }

    #[test]
    fn alternating_pair_closes_in_two_steps() {
        let a = sm(&[&[0.5, 0.5], &[0.0, 1.0]]);
        let b = sm(&[&[1.0, 0.0], &[0.5, 0.5]]);
        let pair: Vec<StochasticMatrix<f64>> =
            (0..400).map(|t| if t % 2 == 0 { a.clone() } else { b.clone() }).collect();
        let seq = ExplicitSequence::new(pair).unwrap();
        let s = detect_schedule(&seq, 400, 1e-12, Direction::Backward, None).unwrap();
        assert!(s.stabilized);
        assert_eq!(s.common_pattern, ZeroPattern::all_true(2));
        for w in s.times.windows(2) {
            assert_eq!(w[1] - w[0], 2);
        }
    }

    #[test]
    fn first_time_is_strictly_positive() {
        let seq = ConstantSequence::new(sm(&[&[0.5, 0.5], &[0.5, 0.5]]));
        let s = detect_schedule(&seq, 100, 1e-12, Direction::Backward, None).unwrap();
        assert!(s.stabilized);
        assert!(s.times[0] > 0);
    }

    #[test]
    fn horizon_too_small_reports_unstabilized() {
        let a = sm(&[&[0.6, 0.4], &[0.3, 0.7]]);
        let seq = ConstantSequence::new(a);
        // Confirmation span 4 needs ~5 steps per window; horizon 3 cannot
        // confirm two windows.
        let s = detect_schedule(&seq, 3, 1e-12, Direction::Backward, None).unwrap();
        assert!(!s.stabilized);
    }

    #[test]
    fn consensus_windows_verify_for_any_times() {
        let k = sm(&[&[0.3, 0.7], &[0.3, 0.7]]);
        let seq = ConstantSequence::new(k.clone());
        let schedule = AccumulationSchedule {
            times: vec![1, 4, 9, 11],
            common_pattern: k.pattern(1e-12),
            direction: Direction::Backward,
            horizon: 11,
            stabilized: true,
        };
        let (ok, _) = verify_schedule(&seq, &schedule, 1e-12).unwrap();
        assert!(ok);
    }

    #[test]
    fn verify_flags_a_perturbed_window() {
        // Factors alternate supports; a length-1 window misses the closure.
        let a = sm(&[&[0.5, 0.5], &[0.0, 1.0]]);
        let b = sm(&[&[1.0, 0.0], &[0.5, 0.5]]);
        let pair: Vec<StochasticMatrix<f64>> =
            (0..40).map(|t| if t % 2 == 0 { a.clone() } else { b.clone() }).collect();
        let seq = ExplicitSequence::new(pair).unwrap();
        let good = detect_schedule(&seq, 40, 1e-12, Direction::Backward, None).unwrap();
        let mut bad = good.clone();
        // Shrink the first window to length 1.
        bad.times[0] = bad.times[1] - 1;
        let (ok, violation) = verify_schedule(&seq, &bad, 1e-12).unwrap();
        assert!(!ok);
        assert_eq!(violation, Some(0));
    }

    #[test]
    fn forward_direction_contracts_hold() {
        let a = sm(&[&[1.0, 0.0, 0.0], &[0.5, 0.5, 0.0], &[0.0, 0.5, 0.5]]);
        let seq = ConstantSequence::new(a.clone());
        let s = detect_schedule(&seq, 500, 1e-12, Direction::Forward, None).unwrap();
        assert!(s.stabilized);
        assert_eq!(s.common_pattern, closure(&a.pattern(1e-12)));
        let (ok, _) = verify_schedule(&seq, &s, 1e-12).unwrap();
        assert!(ok);
    }

    #[test]
    fn window_accumulations_match_direct_products() {
        let a = sm(&[&[0.9, 0.1], &[0.2, 0.8]]);
        let b = sm(&[&[0.5, 0.5], &[0.4, 0.6]]);
        let factors: Vec<StochasticMatrix<f64>> =
            (0..60).map(|t| if t % 3 == 0 { a.clone() } else { b.clone() }).collect();
        let seq = ExplicitSequence::new(factors).unwrap();
        let s = detect_schedule(&seq, 60, 1e-12, Direction::Backward, None).unwrap();
        let windows = window_accumulations(&seq, &s).unwrap();
        assert_eq!(windows.len(), s.window_count());
        for (i, w) in windows.iter().enumerate() {
            let range = s.window(i);
            let direct = backward_accumulate(&seq, range.start, range.end).unwrap();
            assert!(w.as_dense().max_abs_diff(direct.as_dense()) < 1e-14);
        }
        // Consecutive times would give back the raw factors.
        let consecutive = AccumulationSchedule {
            times: vec![3, 4, 5],
            common_pattern: s.common_pattern.clone(),
            direction: Direction::Backward,
            horizon: 60,
            stabilized: true,
        };
        let raw = window_accumulations(&seq, &consecutive).unwrap();
        assert!(raw[0].as_dense().max_abs_diff(seq.get(3).unwrap().as_dense()) < 1e-15);
        assert!(raw[1].as_dense().max_abs_diff(seq.get(4).unwrap().as_dense()) < 1e-15);
    }

    #[test]
    fn missing_diagonal_is_fatal() {
        let flip = sm(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let seq = ConstantSequence::new(flip);
        assert!(matches!(
            detect_schedule(&seq, 50, 1e-12, Direction::Backward, None),
            Err(Error::MissingPositiveDiagonal { .. })
        ));
    }
}
