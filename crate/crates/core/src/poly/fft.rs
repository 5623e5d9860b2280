//! FFT-backed complex convolution used by the polynomial products.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

const CZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Below this operand length a schoolbook product is cheaper than an FFT and
/// keeps structurally sparse factors exact.
pub(crate) const SCHOOLBOOK_CUTOFF: usize = 16;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place FFT; the inverse direction is normalized by `1/len`.
pub(crate) fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let len = buf.len();
    if len <= 1 {
        return;
    }
    PLANNER.with(|planner| {
        let mut planner = planner.borrow_mut();
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        fft.process(buf);
    });
    if inverse {
        let scale = 1.0 / len as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

pub(crate) fn schoolbook(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![CZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == CZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Linear convolution of two coefficient slices. Empty input means the zero
/// polynomial and yields an empty result.
pub(crate) fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().min(b.len()) <= SCHOOLBOOK_CUTOFF {
        return schoolbook(a, b);
    }
    let out_len = a.len() + b.len() - 1;
    let n = out_len.next_power_of_two();
    let mut fa = vec![CZERO; n];
    fa[..a.len()].copy_from_slice(a);
    let mut fb = vec![CZERO; n];
    fb[..b.len()].copy_from_slice(b);
    fft_in_place(&mut fa, false);
    fft_in_place(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft_in_place(&mut fa, true);
    fa.truncate(out_len);
    fa
}

/// 2x2 matrix polynomial product over row-major coefficient vectors
/// (`[11, 12, 21, 22]`), `result = a * b`. Shares forward FFTs between the
/// eight pairwise convolutions when the operands are large.
pub(crate) fn mat_convolve(a: &[Vec<Complex64>; 4], b: &[Vec<Complex64>; 4]) -> [Vec<Complex64>; 4] {
    let max_a = a.iter().map(Vec::len).max().unwrap_or(0);
    let max_b = b.iter().map(Vec::len).max().unwrap_or(0);
    let small = max_a.min(max_b) <= SCHOOLBOOK_CUTOFF;

    // c[i][j] = sum_k a[i][k] * b[k][j]; flat index i*2+j.
    let term = |i: usize, k: usize, j: usize| (&a[i * 2 + k], &b[k * 2 + j]);

    if small || max_a == 0 || max_b == 0 {
        let mut out: [Vec<Complex64>; 4] = Default::default();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc: Vec<Complex64> = Vec::new();
                for k in 0..2 {
                    let (x, y) = term(i, k, j);
                    let prod = convolve(x, y);
                    add_assign(&mut acc, &prod);
                }
                out[i * 2 + j] = acc;
            }
        }
        return out;
    }

    let n = (max_a + max_b - 1).next_power_of_two();
    let forward = |v: &Vec<Complex64>| -> Option<Vec<Complex64>> {
        if v.is_empty() {
            return None;
        }
        let mut buf = vec![CZERO; n];
        buf[..v.len()].copy_from_slice(v);
        fft_in_place(&mut buf, false);
        Some(buf)
    };
    let sa: [Option<Vec<Complex64>>; 4] = [forward(&a[0]), forward(&a[1]), forward(&a[2]), forward(&a[3])];
    let sb: [Option<Vec<Complex64>>; 4] = [forward(&b[0]), forward(&b[1]), forward(&b[2]), forward(&b[3])];

    let mut out: [Vec<Complex64>; 4] = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            let mut acc: Option<Vec<Complex64>> = None;
            let mut exact_len = 0usize;
            for k in 0..2 {
                let (x, y) = term(i, k, j);
                if x.is_empty() || y.is_empty() {
                    continue;
                }
                exact_len = exact_len.max(x.len() + y.len() - 1);
                let (fx, fy) = (sa[i * 2 + k].as_ref().unwrap(), sb[k * 2 + j].as_ref().unwrap());
                match &mut acc {
                    None => {
                        acc = Some(fx.iter().zip(fy).map(|(u, v)| u * v).collect());
                    }
                    Some(acc) => {
                        for ((dst, u), v) in acc.iter_mut().zip(fx).zip(fy) {
                            *dst += u * v;
                        }
                    }
                }
            }
            out[i * 2 + j] = match acc {
                None => Vec::new(),
                Some(mut buf) => {
                    fft_in_place(&mut buf, true);
                    buf.truncate(exact_len);
                    buf
                }
            };
        }
    }
    out
}

pub(crate) fn add_assign(dst: &mut Vec<Complex64>, src: &[Complex64]) {
    if dst.len() < src.len() {
        dst.resize(src.len(), CZERO);
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}
