//! Binary 3x3 morphology and 4-connected component filtering on 0/1 masks.
//!
//! Neighbourhoods are clipped at the image border: out-of-bounds pixels
//! neither block erosion nor seed dilation.

fn line_min_max(line: &mut [u8], scratch: &mut Vec<u8>, take_min: bool) {
    scratch.clear();
    scratch.extend_from_slice(line);
    let n = line.len();
    for (i, out) in line.iter_mut().enumerate() {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(n - 1);
        let window = &scratch[lo..=hi];
        *out = if take_min {
            *window.iter().min().unwrap()
        } else {
            *window.iter().max().unwrap()
        };
    }
}

fn separable(mask: &[u8], w: usize, h: usize, take_min: bool) -> Vec<u8> {
    let mut out = mask.to_vec();
    let mut scratch = Vec::with_capacity(w.max(h));
    for row in out.chunks_mut(w) {
        line_min_max(row, &mut scratch, take_min);
    }
    let mut column = vec![0u8; h];
    for c in 0..w {
        for r in 0..h {
            column[r] = out[r * w + c];
        }
        line_min_max(&mut column, &mut scratch, take_min);
        for r in 0..h {
            out[r * w + c] = column[r];
        }
    }
    out
}

pub fn erode3x3(mask: &[u8], w: usize, h: usize) -> Vec<u8> {
    separable(mask, w, h, true)
}

pub fn dilate3x3(mask: &[u8], w: usize, h: usize) -> Vec<u8> {
    separable(mask, w, h, false)
}

/// Erosion followed by dilation with a 3x3 square.
pub fn open3x3(mask: &[u8], w: usize, h: usize) -> Vec<u8> {
    dilate3x3(&erode3x3(mask, w, h), w, h)
}

/// Zeroes every 4-connected foreground component with fewer than
/// `min_size` pixels.
pub fn remove_small_components(mask: &mut [u8], w: usize, h: usize, min_size: f64) {
    let mut seen = vec![false; w * h];
    let mut stack = Vec::new();
    let mut component = Vec::new();
    for start in 0..w * h {
        if mask[start] == 0 || seen[start] {
            continue;
        }
        component.clear();
        seen[start] = true;
        stack.push(start);
        while let Some(p) = stack.pop() {
            component.push(p);
            let (r, c) = (p / w, p % w);
            let mut visit = |q: usize| {
                if mask[q] != 0 && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            };
            if r > 0 {
                visit(p - w);
            }
            if r + 1 < h {
                visit(p + w);
            }
            if c > 0 {
                visit(p - 1);
            }
            if c + 1 < w {
                visit(p + 1);
            }
        }
        if (component.len() as f64) < min_size {
            for &p in &component {
                mask[p] = 0;
            }
        }
    }
}
