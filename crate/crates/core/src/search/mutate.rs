use rand::Rng;

use crate::models::{ModelKind, ModelSpec};

pub const DEPTH_RANGE: (usize, usize) = (1, 4);
pub const QUBIT_RANGE: (usize, usize) = (4, 10);
pub const WIDTH_RANGE: (usize, usize) = (4, 64);
pub const THRESHOLD_RANGE: (f64, f64) = (0.25, 8.0);

/// Kinds the scripted generator toggles between.
pub const TOGGLE_KINDS: [ModelKind; 3] = [ModelKind::Qmlp, ModelKind::Qff, ModelKind::Qbp];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Depth,
    Qubits,
    Width,
    Threshold,
    Kind,
}

/// Perturbs exactly one field of `spec` that its kind actually reads.
/// Steps are clamped, so a perturbation at a bound may leave the value unchanged.
pub fn mutate<R: Rng + ?Sized>(spec: &ModelSpec, rng: &mut R) -> ModelSpec {
    let mut fields = Vec::with_capacity(5);
    if spec.kind.is_quantum() {
        fields.extend([Field::Depth, Field::Qubits]);
    }
    if spec.kind.uses_widths() && !spec.classical_widths.is_empty() {
        fields.push(Field::Width);
    }
    if spec.kind.is_forward_forward() {
        fields.push(Field::Threshold);
    }
    fields.push(Field::Kind);

    let mut out = spec.clone();
    match fields[rng.gen_range(0..fields.len())] {
        Field::Depth => {
            out.ansatz_depth = step(spec.ansatz_depth, rng.gen_bool(0.5), DEPTH_RANGE);
        }
        Field::Qubits => {
            out.num_qubits = step(spec.num_qubits, rng.gen_bool(0.5), QUBIT_RANGE);
        }
        Field::Width => {
            let i = rng.gen_range(0..spec.classical_widths.len());
            let w = spec.classical_widths[i];
            let scaled = if rng.gen_bool(0.5) { w * 2 } else { w / 2 };
            out.classical_widths[i] = scaled.clamp(WIDTH_RANGE.0, WIDTH_RANGE.1);
        }
        Field::Threshold => {
            let t = if rng.gen_bool(0.5) {
                spec.ff_threshold * 1.5
            } else {
                spec.ff_threshold / 1.5
            };
            out.ff_threshold = t.clamp(THRESHOLD_RANGE.0, THRESHOLD_RANGE.1);
        }
        Field::Kind => {
            let others: Vec<ModelKind> = TOGGLE_KINDS
                .iter()
                .copied()
                .filter(|&k| k != spec.kind)
                .collect();
            out.kind = others[rng.gen_range(0..others.len())];
            // keep the result valid when arriving from a classical kind
            out.ansatz_depth = out.ansatz_depth.max(1);
            if out.kind.is_forward_forward() && !(out.ff_threshold > 0.0) {
                out.ff_threshold = 1.0;
            }
        }
    }
    out
}

fn step(value: usize, up: bool, (lo, hi): (usize, usize)) -> usize {
    let v = if up { value + 1 } else { value.saturating_sub(1) };
    v.clamp(lo, hi)
}
