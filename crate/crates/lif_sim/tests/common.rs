#![allow(dead_code)]

/// Pearson correlation of spike counts in consecutive `bin` ms bins.
pub fn binned_correlation(x: &[f64], y: &[f64], duration: f64, bin: f64) -> f64 {
    let nb = (duration / bin).floor() as usize;
    let hist = |tr: &[f64]| {
        let mut h = vec![0.0; nb];
        for &t in tr {
            let k = (t / bin) as usize;
            if k < nb {
                h[k] += 1.0;
            }
        }
        h
    };
    let (a, b) = (hist(x), hist(y));
    let n = nb as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for k in 0..nb {
        sab += (a[k] - ma) * (b[k] - mb);
        saa += (a[k] - ma).powi(2);
        sbb += (b[k] - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}
