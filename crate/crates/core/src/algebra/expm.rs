use super::{CMatrix, C64};
use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm bound under which the degree-13 Padé approximant is accurate to
/// double precision without scaling.
const THETA13: f64 = 5.371920351148152;

/// `exp(M·t)` by scaling and squaring with a degree-13 Padé approximant.
///
/// Valid for defective `M`; negative `t` is allowed.
pub fn expm(m: &CMatrix, t: f64) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("expm of a {}x{} matrix", m.rows(), m.cols())));
    }
    if !t.is_finite() {
        return Err(Error::Validation(format!("non-finite time {t}")));
    }
    let n = m.rows();
    let a = m.scale_real(t);
    let norm = a.norm1();
    if norm == 0.0 {
        return Ok(CMatrix::identity(n));
    }
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale_real(0.5f64.powi(s));

    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let id = CMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let lin = |c6: usize, c4: usize, c2: usize, c0: usize| -> CMatrix {
        let mut acc = a6.scale(b(c6));
        acc = &acc + &a4.scale(b(c4));
        acc = &acc + &a2.scale(b(c2));
        &acc + &id.scale(b(c0))
    };
    let u_inner = {
        let mut hi = a6.scale(b(13));
        hi = &hi + &a4.scale(b(11));
        hi = &hi + &a2.scale(b(9));
        let hi = &a6 * &hi;
        &hi + &lin(7, 5, 3, 1)
    };
    let u = &a * &u_inner;
    let v = {
        let mut hi = a6.scale(b(12));
        hi = &hi + &a4.scale(b(10));
        hi = &hi + &a2.scale(b(8));
        let hi = &a6 * &hi;
        &hi + &lin(6, 4, 2, 0)
    };

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.solve(&p).map_err(|_| Error::Numerical("singular Padé denominator in expm".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::Numerical("expm overflowed".into()));
    }
    Ok(r)
}
