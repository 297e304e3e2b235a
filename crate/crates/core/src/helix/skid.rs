//! Skids: bursts during which a pseudo-helix residual leaves its laminar band.

use std::io::{self, Write};

use serde::{Serialize, Serializer};

use crate::engine::FracStream;

use super::HelixError;

/// Thresholds for [`skid_scan`]. An episode starts when the residual exceeds
/// `theta` for `h` consecutive indices and ends when it stays below
/// `theta / 4` for `h` consecutive indices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SkidParams {
    pub theta: f64,
    pub h: usize,
    /// Indices below this are ignored.
    pub transient: u64,
}

impl Default for SkidParams {
    fn default() -> Self {
        SkidParams { theta: 0.02, h: 3, transient: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub above_theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkidStats {
    pub j: usize,
    pub c: f64,
    pub episodes: Vec<(u64, u64)>,
    pub laminar_lengths: Vec<u64>,
    #[serde(serialize_with = "decimal_opt")]
    pub mean_laminar: Option<f64>,
    pub first_escape: u64,
    pub theta: f64,
    pub hysteresis: usize,
    pub residual: ResidualSummary,
}

fn decimal_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&format!("{x:.6}")),
        None => s.serialize_none(),
    }
}

impl SkidStats {
    /// Episodes as `start,end,laminar_gap` (gap is empty for the first episode).
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "start,end,laminar_gap")?;
        for (k, (s, e)) in self.episodes.iter().enumerate() {
            match k {
                0 => writeln!(out, "{s},{e},")?,
                _ => writeln!(out, "{s},{e},{}", self.laminar_lengths[k - 1])?,
            }
        }
        Ok(())
    }
}

fn median(v: &mut [f64]) -> f64 {
    let mid = v.len() / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    *m
}

/// Residuals s(n) = |u(n+j) − u(n) − c| over the stream past the transient.
fn residuals(fs: &FracStream, j: usize, c: f64, transient: u64) -> (u64, Vec<f64>) {
    let start = fs.start().max(transient);
    let end = fs.end().saturating_sub(j as u64);
    if start > end {
        return (start, Vec::new());
    }
    let s = (start..=end).map(|n| (fs.diff(n, n + j as u64).expect("in range") - c).abs()).collect();
    (start, s)
}

/// Laminar-episode statistics of a pseudo-helix with period j and increment c.
///
/// The scan starts inside an escape (the transient) and only begins recording
/// once the residual first settles. Two escapes separated by a laminar stretch
/// shorter than a quarter of the median stretch are one escape that briefly
/// re-hung, and are merged.
pub fn skid_scan(fs: &FracStream, j: usize, c: f64, params: &SkidParams) -> Result<SkidStats, HelixError> {
    let (start, s) = residuals(fs, j, c, params.transient);
    let theta = params.theta;
    let exit = theta / 4.0;
    let h = params.h.max(1);
    if s.is_empty() {
        return Err(HelixError::Window("trajectory too short for the requested period".into()));
    }
    let above = s.iter().filter(|&&x| x > theta).count();
    let above_frac = above as f64 / s.len() as f64;
    let mut sorted = s.clone();
    let summary = ResidualSummary {
        count: s.len(),
        min: s.iter().copied().fold(f64::INFINITY, f64::min),
        median: median(&mut sorted),
        max: s.iter().copied().fold(0.0, f64::max),
        above_theta: above_frac,
    };
    if above_frac > 0.9 {
        return Err(HelixError::NoLaminarPhase(above_frac));
    }

    // Hysteresis pass. `settled` marks where the initial escape ended.
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut inside = true;
    let mut settled: Option<u64> = None;
    let mut open: Option<u64> = None;
    let mut run = 0usize;
    for (k, &x) in s.iter().enumerate() {
        let n = start + k as u64;
        if inside {
            run = if x < exit { run + 1 } else { 0 };
            if run >= h {
                let end = n + 1 - h as u64;
                match open.take() {
                    Some(st) => raw.push((st, end)),
                    None => settled = Some(end),
                }
                inside = false;
                run = 0;
            }
        } else {
            run = if x > theta { run + 1 } else { 0 };
            if run >= h {
                open = Some(n + 1 - h as u64);
                inside = true;
                run = 0;
            }
        }
    }
    let last = start + s.len() as u64 - 1;
    if let Some(st) = open {
        raw.push((st, last));
    }
    let Some(settled) = settled else {
        return Err(HelixError::NoEpisodes);
    };

    // Merge escapes split by a short re-hang.
    let stretches: Vec<f64> = raw
        .iter()
        .enumerate()
        .map(|(k, (st, _))| (st - if k == 0 { settled } else { raw[k - 1].1 }) as f64)
        .collect();
    let mut episodes: Vec<(u64, u64)> = Vec::new();
    if !raw.is_empty() {
        let cutoff = 0.25 * median(&mut stretches.clone());
        for (k, ep) in raw.iter().enumerate() {
            if stretches[k] < cutoff {
                if let Some(prev) = episodes.last_mut() {
                    prev.1 = ep.1;
                }
                // A short stretch before the first episode means it belongs to the transient.
                continue;
            }
            episodes.push(*ep);
        }
    }
    if episodes.is_empty() {
        return Err(HelixError::NoEpisodes);
    }
    let laminar_lengths: Vec<u64> = episodes.windows(2).map(|w| w[1].0 - w[0].0).collect();
    let mean_laminar = (!laminar_lengths.is_empty())
        .then(|| laminar_lengths.iter().sum::<u64>() as f64 / laminar_lengths.len() as f64);
    Ok(SkidStats {
        j,
        c,
        first_escape: episodes[0].0,
        episodes,
        laminar_lengths,
        mean_laminar,
        theta,
        hysteresis: h,
        residual: summary,
    })
}

/// Best guess at a nearby ordered regime: the smallest j whose one-period
/// differences sit within θ/4 of their median on at least half the indices.
/// Returns (j, median difference).
pub fn pseudo_helix_candidate(fs: &FracStream, j_max: usize, theta: f64, transient: u64) -> Option<(usize, f64)> {
    let start = fs.start().max(transient);
    for j in 1..=j_max {
        let end = fs.end().saturating_sub(j as u64);
        if start > end {
            return None;
        }
        let mut d: Vec<f64> = (start..=end).map(|n| fs.diff(n, n + j as u64).expect("in range")).collect();
        let m = median(&mut d);
        let close = d.iter().filter(|x| (*x - m).abs() <= theta / 4.0).count();
        if 2 * close >= d.len() {
            return Some((j, m));
        }
    }
    None
}

/// Threshold in the middle (geometrically) of the widest range of θ over
/// which the number of detected episodes stays constant.
///
/// Laminar residuals spread over several decades, so their histogram is
/// rarely cleanly bimodal; a stable episode count is the property that
/// actually matters for the scan.
pub fn calibrate_threshold(fs: &FracStream, j: usize, c: f64, transient: u64) -> Option<f64> {
    const LO: f64 = -4.0;
    const STEP: f64 = 0.05;
    const STEPS: usize = 74;
    let count = |k: usize| {
        let theta = 10f64.powf(LO + STEP * k as f64);
        skid_scan(fs, j, c, &SkidParams { theta, transient, ..SkidParams::default() })
            .ok()
            .map(|s| s.episodes.len())
    };
    let counts: Vec<Option<usize>> = (0..=STEPS).map(count).collect();
    let mut best: Option<(usize, usize)> = None;
    let mut k = 0;
    while k <= STEPS {
        let mut e = k;
        while e < STEPS && counts[e + 1] == counts[k] {
            e += 1;
        }
        if counts[k].is_some() && best.map_or(true, |(s, t)| e - k > t - s) {
            best = Some((k, e));
        }
        k = e + 1;
    }
    best.map(|(s, e)| 10f64.powf(LO + STEP * (s + e) as f64 / 2.0))
}
