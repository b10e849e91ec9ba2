//! Compositing: naive label copy for diagnostics and gradient-domain
//! fusion for the final output.
//!
//! The fusion keeps the target image's gradients over the target-labeled
//! side of the cut (plus the target-only region) and anchors the values
//! on the reference side of the seam, solving the discrete Poisson
//! equation with a Jacobi-preconditioned conjugate gradient on the
//! 5-point Laplacian.

use crate::config::StitchConfig;
use crate::error::{Result, StitchError};
use crate::graphcut::Labeling;
use crate::image::Image;
use crate::overlap::AlignedPair;

/// Where each composite pixel came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Outside both footprints.
    Empty,
    /// Copied from the reference image.
    Ref,
    /// Copied from the target image.
    Target,
    /// Solved by the gradient-domain fusion.
    Blended,
}

/// A full-canvas composite with its per-pixel provenance.
#[derive(Debug, Clone)]
pub struct Composite {
    pub image: Image,
    pub provenance: Vec<Provenance>,
}

impl Composite {
    pub fn provenance_at(&self, x: u32, y: u32) -> Provenance {
        self.provenance[y as usize * self.image.width() as usize + x as usize]
    }
}

/// Copies each pixel from its labeled source: exclusive regions from
/// their sole image, overlap pixels from the image their label names.
pub fn composite_naive(pair: &AlignedPair, labeling: &Labeling) -> Result<Composite> {
    let region = pair.region();
    if labeling.len() != region.len() {
        return Err(StitchError::DimensionMismatch(format!(
            "labeling holds {} labels for {} overlap pixels",
            labeling.len(),
            region.len()
        )));
    }
    let (w, h) = (region.canvas_width(), region.canvas_height());
    let mut image = Image::new(w, h);
    let mut provenance = vec![Provenance::Empty; w as usize * h as usize];
    for y in 0..h {
        for x in 0..w {
            let idx = y as usize * w as usize + x as usize;
            if region.ref_only().get(x, y) {
                image.set_pixel(x, y, pair.reference().pixel(x, y));
                provenance[idx] = Provenance::Ref;
            } else if region.target_only().get(x, y) {
                image.set_pixel(x, y, pair.target().pixel(x, y));
                provenance[idx] = Provenance::Target;
            } else if let Some(id) = region.id_at(x as i64, y as i64) {
                if labeling.get(id) == 0 {
                    image.set_pixel(x, y, pair.reference().pixel(x, y));
                    provenance[idx] = Provenance::Ref;
                } else {
                    image.set_pixel(x, y, pair.target().pixel(x, y));
                    provenance[idx] = Provenance::Target;
                }
            }
        }
    }
    Ok(Composite { image, provenance })
}

/// The sparse Poisson system over the fused region: 5-point Laplacian
/// rows with Dirichlet boundary values folded into the right-hand side.
struct PoissonSystem {
    /// Canvas coordinates of each unknown.
    coords: Vec<(u32, u32)>,
    /// Diagonal (number of counted neighbors) per unknown.
    diagonal: Vec<f64>,
    /// Off-diagonal neighbors (unknown indices) per unknown.
    neighbors: Vec<Vec<usize>>,
    /// Right-hand side per channel.
    rhs: [Vec<f64>; 3],
}

impl PoissonSystem {
    /// `y = A x` for the implicit matrix.
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..x.len() {
            let mut acc = self.diagonal[i] * x[i];
            for &j in &self.neighbors[i] {
                acc -= x[j];
            }
            y[i] = acc;
        }
    }

    fn residual_norm(&self, channel: usize, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; x.len()];
        self.apply(x, &mut ax);
        self.rhs[channel]
            .iter()
            .zip(&ax)
            .map(|(b, a)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }
}

fn build_system(pair: &AlignedPair, labeling: &Labeling, naive: &Composite) -> PoissonSystem {
    let region = pair.region();
    let (w, h) = (region.canvas_width(), region.canvas_height());
    let target = pair.target();

    // Omega: target-labeled overlap pixels plus the target-only region.
    let mut index = vec![usize::MAX; w as usize * h as usize];
    let mut coords = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let in_omega = match region.id_at(x as i64, y as i64) {
                Some(id) => labeling.get(id) == 1,
                None => region.target_only().get(x, y),
            };
            if in_omega {
                index[y as usize * w as usize + x as usize] = coords.len();
                coords.push((x, y));
            }
        }
    }

    let n = coords.len();
    let mut diagonal = vec![0.0; n];
    let mut neighbors = vec![Vec::new(); n];
    let mut rhs = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let in_target = |x: i64, y: i64| -> bool {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            return false;
        }
        region.target_only().get(x as u32, y as u32)
            || region.overlap().get(x as u32, y as u32)
    };

    for (i, &(x, y)) in coords.iter().enumerate() {
        let p_in_target = in_target(x as i64, y as i64);
        for (nx, ny) in crate::graphcut::neighbors4(x, y) {
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue; // off canvas: natural boundary
            }
            let nidx = ny as usize * w as usize + nx as usize;
            let j = index[nidx];
            let has_value = naive.provenance[nidx] != Provenance::Empty;
            if j == usize::MAX && !has_value {
                continue; // empty pixel: natural boundary
            }
            diagonal[i] += 1.0;
            // Guidance: the target image's gradient wherever both ends
            // carry target data.
            if p_in_target && in_target(nx, ny) {
                let gp = target.pixel(x, y);
                let gq = target.pixel(nx as u32, ny as u32);
                for c in 0..3 {
                    rhs[c][i] += gp[c] - gq[c];
                }
            }
            if j != usize::MAX {
                neighbors[i].push(j);
            } else {
                // Dirichlet neighbor: its composite value moves to the rhs.
                let v = naive.image.pixel(nx as u32, ny as u32);
                for c in 0..3 {
                    rhs[c][i] += v[c];
                }
            }
        }
    }

    PoissonSystem {
        coords,
        diagonal,
        neighbors,
        rhs,
    }
}

/// Jacobi-preconditioned conjugate gradient. Returns the iteration count.
fn solve_pcg(
    system: &PoissonSystem,
    channel: usize,
    x: &mut [f64],
    tolerance: f64,
    max_iterations: usize,
) -> Result<usize> {
    let n = x.len();
    let b = &system.rhs[channel];
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        x.fill(0.0);
        return Ok(0);
    }
    let target = tolerance * b_norm;

    let mut ax = vec![0.0; n];
    system.apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r
        .iter()
        .zip(&system.diagonal)
        .map(|(r, d)| if *d > 0.0 { r / d } else { *r })
        .collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];

    for iteration in 0..max_iterations {
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= target {
            return Ok(iteration);
        }
        system.apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break; // loss of positive definiteness: bail to the error below
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = if system.diagonal[i] > 0.0 {
                r[i] / system.diagonal[i]
            } else {
                r[i]
            };
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    let residual = r.iter().map(|v| v * v).sum::<f64>().sqrt() / b_norm;
    if residual <= tolerance {
        return Ok(max_iterations);
    }
    Err(StitchError::SolverDivergence {
        residual,
        iterations: max_iterations,
    })
}

/// Gradient-domain fusion across the seam. Pixels outside the fused
/// region keep their naive composite values exactly; the solution is
/// clamped to `[0, 1]`.
pub fn poisson_fuse(pair: &AlignedPair, labeling: &Labeling, cfg: &StitchConfig) -> Result<Composite> {
    let mut composite = composite_naive(pair, labeling)?;
    let system = build_system(pair, labeling, &composite);
    let n = system.coords.len();
    if n == 0 {
        return Ok(composite);
    }
    let max_iterations = 10 * n;

    for channel in 0..3 {
        // Warm start from the target/naive values over omega.
        let mut x: Vec<f64> = system
            .coords
            .iter()
            .map(|&(px, py)| composite.image.pixel(px, py)[channel])
            .collect();
        solve_pcg(&system, channel, &mut x, cfg.poisson_tolerance, max_iterations)?;
        for (i, &(px, py)) in system.coords.iter().enumerate() {
            let mut rgb = composite.image.pixel(px, py);
            rgb[channel] = x[i].clamp(0.0, 1.0);
            composite.image.set_pixel(px, py, rgb);
        }
    }
    for &(px, py) in &system.coords {
        let idx = py as usize * composite.image.width() as usize + px as usize;
        composite.provenance[idx] = Provenance::Blended;
    }
    Ok(composite)
}

/// Recomputes the relative residual of a fused composite against the
/// system it solved; used to audit convergence independently.
pub fn fusion_residual(pair: &AlignedPair, labeling: &Labeling, fused: &Composite) -> Result<f64> {
    let naive = composite_naive(pair, labeling)?;
    let system = build_system(pair, labeling, &naive);
    let mut worst: f64 = 0.0;
    for channel in 0..3 {
        let x: Vec<f64> = system
            .coords
            .iter()
            .map(|&(px, py)| fused.image.pixel(px, py)[channel])
            .collect();
        let b_norm = system.rhs[channel]
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        let r = system.residual_norm(channel, &x);
        worst = worst.max(if b_norm > 0.0 { r / b_norm } else { r });
    }
    Ok(worst)
}
