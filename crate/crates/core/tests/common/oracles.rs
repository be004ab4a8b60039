//! Deliberately naive reference implementations used by the integration and
//! acceptance suites. None of these call into the code paths they check.
#![allow(dead_code)]

use ctstd_core::Class;

/// Per-pixel `(2k+1)^2` mean with clamped coordinates, rounded half up.
pub fn naive_mean_filter(slice: &[u16], w: usize, h: usize, k: usize) -> Vec<u16> {
    let n = ((2 * k + 1) * (2 * k + 1)) as u64;
    let mut out = vec![0u16; w * h];
    for r in 0..h as isize {
        for c in 0..w as isize {
            let mut sum = 0u64;
            for dr in -(k as isize)..=k as isize {
                for dc in -(k as isize)..=k as isize {
                    let rr = (r + dr).clamp(0, h as isize - 1) as usize;
                    let cc = (c + dc).clamp(0, w as isize - 1) as usize;
                    sum += slice[rr * w + cc] as u64;
                }
            }
            out[r as usize * w + c as usize] = ((sum + n / 2) / n) as u16;
        }
    }
    out
}

/// Exhaustive Otsu over every candidate threshold, class statistics
/// recounted from scratch per candidate. Returns the smallest maximizer of
/// the between-class variance for the `v >= t` split.
pub fn brute_force_otsu(pixels: &[u16], levels: usize) -> Option<u16> {
    let mut hist = vec![0u64; levels];
    for &p in pixels {
        hist[p as usize] += 1;
    }
    let mut best: Option<(u16, f64)> = None;
    for t in 1..levels {
        let (mut n0, mut s0, mut n1, mut s1) = (0u64, 0u128, 0u64, 0u128);
        for (v, &c) in hist.iter().enumerate() {
            if v < t {
                n0 += c;
                s0 += v as u128 * c as u128;
            } else {
                n1 += c;
                s1 += v as u128 * c as u128;
            }
        }
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let d = (s0 as i128 * n1 as i128 - s1 as i128 * n0 as i128) as f64;
        let score = d * d / (n0 as f64 * n1 as f64);
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((t as u16, score));
        }
    }
    best.map(|(t, _)| t)
}

/// Float-mean formulation of the between-class variance, for a
/// second-opinion check that the optimum is not an artefact of the integer
/// form.
pub fn between_class_variance(pixels: &[u16], t: u16) -> f64 {
    let (mut n0, mut s0, mut n1, mut s1) = (0f64, 0f64, 0f64, 0f64);
    for &p in pixels {
        if p < t {
            n0 += 1.0;
            s0 += p as f64;
        } else {
            n1 += 1.0;
            s1 += p as f64;
        }
    }
    if n0 == 0.0 || n1 == 0.0 {
        return 0.0;
    }
    let n = n0 + n1;
    let (m0, m1) = (s0 / n0, s1 / n1);
    (n0 / n) * (n1 / n) * (m0 - m1) * (m0 - m1)
}

/// 3x3 opening with clipped neighbourhoods, written per pixel.
pub fn naive_open(mask: &[u8], w: usize, h: usize) -> Vec<u8> {
    let neighbours = |r: usize, c: usize| {
        let mut out = Vec::new();
        for rr in r.saturating_sub(1)..=(r + 1).min(h - 1) {
            for cc in c.saturating_sub(1)..=(c + 1).min(w - 1) {
                out.push(rr * w + cc);
            }
        }
        out
    };
    let mut eroded = vec![0u8; w * h];
    for r in 0..h {
        for c in 0..w {
            eroded[r * w + c] = u8::from(neighbours(r, c).iter().all(|&p| mask[p] == 1));
        }
    }
    let mut opened = vec![0u8; w * h];
    for r in 0..h {
        for c in 0..w {
            opened[r * w + c] = u8::from(neighbours(r, c).iter().any(|&p| eroded[p] == 1));
        }
    }
    opened
}

/// 4-connected component labels by repeated label propagation until stable.
pub fn naive_components(mask: &[u8], w: usize, h: usize) -> Vec<Vec<usize>> {
    let mut label: Vec<usize> = (0..w * h).collect();
    loop {
        let mut changed = false;
        for p in 0..w * h {
            if mask[p] == 0 {
                continue;
            }
            let (r, c) = (p / w, p % w);
            let mut nb = Vec::new();
            if r > 0 {
                nb.push(p - w);
            }
            if r + 1 < h {
                nb.push(p + w);
            }
            if c > 0 {
                nb.push(p - 1);
            }
            if c + 1 < w {
                nb.push(p + 1);
            }
            for q in nb {
                if mask[q] == 1 && label[q] < label[p] {
                    label[p] = label[q];
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for p in 0..w * h {
        if mask[p] == 1 {
            groups.entry(label[p]).or_default().push(p);
        }
    }
    groups.into_values().collect()
}

pub fn naive_refine(mask: &[u8], w: usize, h: usize, fraction: f64) -> Vec<u8> {
    let mut opened = naive_open(mask, w, h);
    let min = fraction * (w * h) as f64;
    for comp in naive_components(&opened.clone(), w, h) {
        if (comp.len() as f64) < min {
            for p in comp {
                opened[p] = 0;
            }
        }
    }
    opened
}

/// (row_min, row_max, col_min, col_max) over every set pixel of every mask.
pub fn brute_bbox(masks: &[Vec<u8>], w: usize) -> Option<(usize, usize, usize, usize)> {
    let mut b: Option<(usize, usize, usize, usize)> = None;
    for m in masks {
        for (i, &v) in m.iter().enumerate() {
            if v == 1 {
                let (r, c) = (i / w, i % w);
                b = Some(match b {
                    None => (r, r, c, c),
                    Some((r0, r1, c0, c1)) => (r0.min(r), r1.max(r), c0.min(c), c1.max(c)),
                });
            }
        }
    }
    b
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Kernel density evaluated term by term.
pub fn kde_pdf(areas: &[f64], h: f64, x: f64) -> f64 {
    areas.iter().map(|&a| normal_pdf((x - a) / h)).sum::<f64>() / (areas.len() as f64 * h)
}

/// Trapezoidal running integral of the density on `grid`, starting at zero
/// at `grid[0]`.
pub fn trapezoid_cdf(areas: &[f64], h: f64, grid: &[f64]) -> Vec<f64> {
    let f: Vec<f64> = grid.iter().map(|&x| kde_pdf(areas, h, x)).collect();
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..grid.len() {
        acc += 0.5 * (f[i] + f[i - 1]) * (grid[i] - grid[i - 1]);
        out.push(acc);
    }
    out
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Two-pass sample variance, n - 1 denominator.
pub fn two_pass_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    let corr: f64 = xs.iter().map(|x| x - mean).sum();
    (ss - corr * corr / n) / (n - 1.0)
}

/// Greedy nearest-area assignment replayed from a list of quantiles.
pub fn greedy_replay(areas: &[f64], quantiles: &[f64]) -> Vec<usize> {
    if areas.len() <= quantiles.len() {
        return (0..areas.len()).collect();
    }
    let mut used = vec![false; areas.len()];
    let mut picked = Vec::new();
    for &q in quantiles {
        let mut cands: Vec<(f64, usize)> = (0..areas.len())
            .filter(|&i| !used[i])
            .map(|i| ((areas[i] - q).abs(), i))
            .collect();
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        used[cands[0].1] = true;
        picked.push(cands[0].1);
    }
    picked.sort();
    picked
}

/// Neumaier-compensated sum.
pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    compensated_sum(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y))).sqrt()
}

pub fn mean_vec(vs: &[Vec<f64>]) -> Vec<f64> {
    let d = vs[0].len();
    (0..d)
        .map(|k| compensated_sum(vs.iter().map(|v| v[k])) / vs.len() as f64)
        .collect()
}

/// Double loop over ordered index pairs i < j.
pub fn mean_pair_dist(vs: &[Vec<f64>]) -> f64 {
    let mut terms = Vec::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            terms.push(dist(&vs[i], &vs[j]));
        }
    }
    compensated_sum(terms.iter().copied()) / terms.len() as f64
}

pub struct Labelled<'a> {
    pub vectors: &'a [Vec<f64>],
    pub labels: &'a [Class],
    pub sources: &'a [u32],
}

impl Labelled<'_> {
    pub fn select(&self, source: Option<u32>, class: Class) -> Vec<Vec<f64>> {
        (0..self.vectors.len())
            .filter(|&i| self.labels[i] == class && source.is_none_or(|s| self.sources[i] == s))
            .map(|i| self.vectors[i].clone())
            .collect()
    }

    pub fn source_ids(&self) -> Vec<u32> {
        let mut s = self.sources.to_vec();
        s.sort();
        s.dedup();
        s
    }

    pub fn fisher(&self) -> f64 {
        let a = self.select(None, Class::Covid);
        let b = self.select(None, Class::NonCovid);
        dist(&mean_vec(&a), &mean_vec(&b)) / (0.5 * (mean_pair_dist(&a) + mean_pair_dist(&b)))
    }

    pub fn separability(&self) -> f64 {
        let ids = self.source_ids();
        let terms = ids.iter().map(|&s| {
            let a = self.select(Some(s), Class::Covid);
            let b = self.select(Some(s), Class::NonCovid);
            dist(&mean_vec(&a), &mean_vec(&b)) / (mean_pair_dist(&a) + mean_pair_dist(&b))
        });
        compensated_sum(terms) / ids.len() as f64
    }

    pub fn inter_source(&self, class: Class) -> f64 {
        let cents: Vec<Vec<f64>> = self
            .source_ids()
            .into_iter()
            .map(|s| self.select(Some(s), class))
            .filter(|c| !c.is_empty())
            .map(|c| mean_vec(&c))
            .collect();
        mean_pair_dist(&cents)
    }
}

/// Sweeps every distinct score as a threshold (`score >= thr` is positive),
/// builds the (FPR, TPR) polyline from (0,0) to (1,1) and integrates it
/// with the trapezoid rule.
pub fn trapezoid_auc(truth: &[Class], scores: &[f64]) -> f64 {
    let pos = truth.iter().filter(|&&c| c == Class::Covid).count() as f64;
    let neg = truth.len() as f64 - pos;
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let mut pts = vec![(0.0, 0.0)];
    for &thr in &thresholds {
        let tp = (0..scores.len())
            .filter(|&i| scores[i] >= thr && truth[i] == Class::Covid)
            .count() as f64;
        let fp = (0..scores.len())
            .filter(|&i| scores[i] >= thr && truth[i] == Class::NonCovid)
            .count() as f64;
        pts.push((fp / neg, tp / pos));
    }
    let mut area = 0.0;
    for w in pts.windows(2) {
        area += (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0;
    }
    area
}

/// Per-class F1 from an explicit 2x2 confusion matrix, as a percentage.
pub fn hand_macro_f1(truth: &[Class], pred: &[Class]) -> f64 {
    let mut m = [[0u32; 2]; 2];
    for (&t, &p) in truth.iter().zip(pred) {
        m[(t == Class::NonCovid) as usize][(p == Class::NonCovid) as usize] += 1;
    }
    let f1 = |k: usize| {
        let tp = m[k][k] as f64;
        let fp = m[1 - k][k] as f64;
        let fn_ = m[k][1 - k] as f64;
        if 2.0 * tp + fp + fn_ == 0.0 {
            0.0
        } else {
            2.0 * tp / (2.0 * tp + fp + fn_)
        }
    };
    100.0 * (f1(0) + f1(1)) / 2.0
}
