//! Least-squares dc voltages cancelling a stray field at the nil.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use super::{Point, TrapModel};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Compensation {
    pub voltages: BTreeMap<String, f64>,
    /// `|E_stray + sum_i V_i E_i|` with `E_i = -grad b_i`, V/m.
    pub residual: f64,
}

/// Voltages `V_i` on `electrodes` minimizing the total field
/// `E_stray - sum_i V_i grad b_i(nil)` at the nil (minimum-norm solution).
///
/// Fails with [`Error::RankDeficient`] when the electrode fields at the nil do
/// not span all three directions; the error names a direction that cannot be
/// compensated.
pub fn compensate_stray_field(
    model: &TrapModel,
    nil: &Point,
    electrodes: &[&str],
    stray: &Vector3<f64>,
) -> Result<Compensation> {
    let n = electrodes.len();
    let mut a = DMatrix::zeros(3, n);
    for (k, id) in electrodes.iter().enumerate() {
        let g = model.basis().get(id)?.gradient(nil)?;
        a.set_column(k, &g);
    }
    if n < 3 {
        return Err(rank_error(&a));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = 1e-10 * smax;
    if smax == 0.0 || svd.singular_values.iter().filter(|&&s| s > tol).count() < 3 {
        return Err(rank_error(&a));
    }
    let b = DVector::from_column_slice(stray.as_slice());
    let v = svd.solve(&b, tol).map_err(|e| Error::Analysis(e.to_string()))?;
    let total = stray - &a * &v;
    let voltages = electrodes.iter().zip(v.iter()).map(|(id, x)| (id.to_string(), *x)).collect();
    Ok(Compensation { voltages, residual: Vector3::new(total[0], total[1], total[2]).norm() })
}

/// Unit vector orthogonal to the span of the electrode fields.
fn rank_error(a: &DMatrix<f64>) -> Error {
    // left singular vectors of the full 3x3 product span the field space
    let m = a * a.transpose();
    let eig = nalgebra::SymmetricEigen::new(nalgebra::Matrix3::from_fn(|i, j| m[(i, j)]));
    let k = eig.eigenvalues.imin();
    let v = eig.eigenvectors.column(k).into_owned();
    Error::RankDeficient { null_direction: v }
}
