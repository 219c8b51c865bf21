use super::plot::{row_words, RecurrencePlot};
use crate::numeric::shannon_entropy;

const STRENGTH_BINS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct RqaMeasures {
    pub recurrence_rate_pct: f64,
    pub determinism_pct: f64,
    pub max_diagonal_line: usize,
    pub mean_diagonal_line: f64,
    /// Shannon entropy (nats) of the diagonal line-length distribution.
    pub diagonal_entropy: f64,
    pub laminarity_pct: f64,
    /// Mean vertical line length; `None` without vertical lines of at least `v_min`.
    pub trapping_time: Option<f64>,
    pub max_vertical_line: usize,
    /// `None` when the plot was built without strengths.
    pub weighted_recurrence_entropy: Option<f64>,
}

/// Line-length histograms over the upper triangle outside the Theiler band.
struct Histograms {
    diagonal: Vec<u64>,
    vertical: Vec<u64>,
    points: u64,
}

fn set_bits(words: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &w) in words.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            f(wi * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
}

// Rows are visited top to bottom. Diagonal k continues through bit k of
// consecutive rows; column j continues through bit j − i of row i, so the
// row is shifted into absolute column positions before comparing. Horizontal
// runs in the upper triangle are the vertical runs of the lower one.
fn scan(plot: &RecurrencePlot) -> Histograms {
    let n = plot.len();
    let w = plot.theiler();
    let full_words = n.div_ceil(64);
    let mut h = Histograms { diagonal: vec![0; n + 1], vertical: vec![0; n + 1], points: 0 };
    let mut diag_run = vec![0u32; n];
    let mut diag_active = vec![0u64; full_words];
    let mut col_run = vec![0u32; n];
    let mut col_active = vec![0u64; full_words];
    let mut row = vec![0u64; full_words];
    let mut shifted = vec![0u64; full_words + 1];

    for i in 0..n {
        let len = n - i;
        let nw = row_words(n, i);
        row[..nw].copy_from_slice(plot.triangle_row(i));
        row[nw..].fill(0);
        // clear the band k ≤ w
        for k in 0..=w.min(len - 1) {
            row[k / 64] &= !(1 << (k % 64));
        }
        h.points += row[..nw].iter().map(|x| u64::from(x.count_ones())).sum::<u64>();

        // diagonals
        for wi in 0..full_words {
            let ended = diag_active[wi] & !row[wi];
            let mut e = ended;
            while e != 0 {
                let k = wi * 64 + e.trailing_zeros() as usize;
                h.diagonal[diag_run[k] as usize] += 1;
                diag_run[k] = 0;
                e &= e - 1;
            }
            diag_active[wi] = row[wi];
        }
        set_bits(&row[..nw], |k| diag_run[k] += 1);

        // horizontal runs
        let mut run = 0usize;
        let mut last = usize::MAX;
        set_bits(&row[..nw], |k| {
            if run > 0 && last + 1 == k {
                run += 1;
            } else {
                if run > 0 {
                    h.vertical[run] += 1;
                }
                run = 1;
            }
            last = k;
        });
        if run > 0 {
            h.vertical[run] += 1;
        }

        // columns: shifted[j] = row[j − i]
        shifted.fill(0);
        let (ws, bs) = (i / 64, i % 64);
        for wi in 0..nw {
            let v = row[wi];
            if bs == 0 {
                shifted[ws + wi] |= v;
            } else {
                shifted[ws + wi] |= v << bs;
                shifted[ws + wi + 1] |= v >> (64 - bs);
            }
        }
        for wi in 0..full_words {
            let mut e = col_active[wi] & !shifted[wi];
            while e != 0 {
                let j = wi * 64 + e.trailing_zeros() as usize;
                h.vertical[col_run[j] as usize] += 1;
                col_run[j] = 0;
                e &= e - 1;
            }
            col_active[wi] = shifted[wi];
        }
        set_bits(&shifted[..full_words], |j| col_run[j] += 1);
    }
    for r in diag_run {
        if r > 0 {
            h.diagonal[r as usize] += 1;
        }
    }
    for r in col_run {
        if r > 0 {
            h.vertical[r as usize] += 1;
        }
    }
    h
}

fn weighted(hist: &[u64], min: usize) -> (u64, u64) {
    hist.iter()
        .enumerate()
        .skip(min)
        .fold((0, 0), |(s, c), (l, &k)| (s + l as u64 * k, c + k))
}

fn strength_entropy(s: &[f64]) -> f64 {
    let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(hi > lo) {
        return 0.0;
    }
    let mut counts = vec![0u64; STRENGTH_BINS];
    for &v in s {
        let b = ((v - lo) / (hi - lo) * STRENGTH_BINS as f64).floor() as usize;
        counts[b.min(STRENGTH_BINS - 1)] += 1;
    }
    shannon_entropy(counts)
}

/// Recurrence quantification of a plot with minimum diagonal and vertical
/// line lengths `l_min` and `v_min`.
pub fn quantify(plot: &RecurrencePlot, l_min: usize, v_min: usize) -> RqaMeasures {
    let n = plot.len() as u64;
    let w = plot.theiler() as u64;
    let h = scan(plot);
    // cells strictly above the band
    let cells = if n > w + 1 { (n - w - 1) * (n - w) / 2 } else { 0 };
    // the lower triangle mirrors every count
    let diagonal: Vec<u64> = h.diagonal.iter().map(|c| 2 * c).collect();
    let points = 2 * h.points;
    let (dsum, dcount) = weighted(&diagonal, l_min.max(1));
    let (vsum, vcount) = weighted(&h.vertical, v_min.max(1));
    let pct = |a: u64| if points == 0 { 0.0 } else { 100.0 * a as f64 / points as f64 };
    let longest = |hist: &[u64]| hist.iter().rposition(|&c| c > 0).unwrap_or(0);
    let diagonal_entropy = if dcount == 0 {
        0.0
    } else {
        shannon_entropy(diagonal.iter().skip(l_min.max(1)).copied())
    };
    RqaMeasures {
        recurrence_rate_pct: if cells == 0 { 0.0 } else { 100.0 * points as f64 / (2 * cells) as f64 },
        determinism_pct: pct(dsum),
        max_diagonal_line: longest(&diagonal),
        mean_diagonal_line: if dcount == 0 { 0.0 } else { dsum as f64 / dcount as f64 },
        diagonal_entropy,
        laminarity_pct: pct(vsum),
        trapping_time: (vcount > 0).then(|| vsum as f64 / vcount as f64),
        max_vertical_line: longest(&h.vertical),
        weighted_recurrence_entropy: plot.strengths().map(strength_entropy),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rqa::RqaParams;
    use crate::statespace::StateMatrix;

    #[test]
    fn single_off_diagonal_line() {
        // 0, 1, 2 recur at positions 10..=12 and nowhere else
        let x = [0.0, 1.0, 2.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0, 110.0, 0.0, 1.0, 2.0];
        let pts = StateMatrix::from_flat(x.to_vec(), 1).unwrap();
        let plot = RecurrencePlot::build(&pts, &RqaParams::new(0.5), None).unwrap();
        let m = quantify(&plot, 2, 2);
        assert_eq!(m.max_diagonal_line, 3);
        assert_eq!(m.determinism_pct, 100.0);
        assert_eq!(m.mean_diagonal_line, 3.0);
        assert_eq!(m.diagonal_entropy, 0.0);
        assert_eq!(m.laminarity_pct, 0.0);
        assert_eq!(m.trapping_time, None);
        assert_eq!(m.max_vertical_line, 1);
        let cells = 13.0 * 12.0;
        assert!((m.recurrence_rate_pct - 100.0 * 6.0 / cells).abs() < 1e-12);
    }

    #[test]
    fn constant_state_is_one_block() {
        let pts = StateMatrix::from_flat(vec![1.0; 130], 1).unwrap();
        let plot = RecurrencePlot::build(&pts, &RqaParams::new(0.1), None).unwrap();
        let m = quantify(&plot, 2, 2);
        assert_eq!(m.recurrence_rate_pct, 100.0);
        assert_eq!(m.max_diagonal_line, 129);
        assert_eq!(m.max_vertical_line, 129);
        // only the corner cell (0, 129) is a line shorter than 2
        assert!((m.determinism_pct - 100.0 * 8384.0 / 8385.0).abs() < 1e-12);
        assert_eq!(m.weighted_recurrence_entropy, Some(0.0));
    }
}
