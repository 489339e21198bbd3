//! Bundled example problems.

use crate::framing::Framing;
use crate::naimark;
use crate::numlin::{self, CMatrix, C_I};
use crate::problem::{FramingPayload, GeneratorPayload, Kind, OvmPayload, Payload};

pub const DEMO_NAMES: [&str; 6] = [
    "onb",
    "mercedes",
    "derivative-volterra",
    "coin",
    "qubit-povm",
    "framing-to-naimark",
];

/// Grid size of the derivative/Volterra pair.
pub const DIFFERENCE_GRID: usize = 8;

/// `(Af)_k = −i·d·(f_{k+1} − f_k)` for `k < d − 1`; the last row is zero.
pub fn forward_difference(d: usize) -> CMatrix {
    let mut a = CMatrix::zeros(d, d);
    let scale = -C_I * d as f64;
    for k in 0..d.saturating_sub(1) {
        a[(k, k + 1)] = scale;
        a[(k, k)] = -scale;
    }
    a
}

/// `(Bf)_k = (i/d)·Σ_{j≤k} f_j`. With `A` from [`forward_difference`],
/// `B·A* = diag(1, …, 1, 0)`.
pub fn cumulative_sum(d: usize) -> CMatrix {
    let w = C_I / d as f64;
    CMatrix::from_fn(d, d, |r, c| if c <= r { w } else { numlin::C_ZERO })
}

/// A demo is a problem kind and payload; `chain_naimark` runs the POVM
/// obtained from an OVM through the Naimark dilation.
pub struct Demo {
    pub kind: Kind,
    pub payload: Payload,
    pub chain_naimark: bool,
}

pub fn demo(name: &str) -> Option<Demo> {
    let plain = |kind, payload| Demo {
        kind,
        payload,
        chain_naimark: false,
    };
    let framing = |fr| {
        Payload::Framing(FramingPayload {
            framing: fr,
            subspace: None,
        })
    };
    Some(match name {
        "onb" => plain(Kind::Framing, framing(Framing::orthonormal_basis(3))),
        "mercedes" => plain(Kind::Framing, framing(Framing::mercedes())),
        "derivative-volterra" => {
            let d = DIFFERENCE_GRID;
            plain(
                Kind::Generator,
                Payload::Generator(GeneratorPayload {
                    framing: Framing::orthonormal_basis(d),
                    a: numlin::matrix_to_rows(&forward_difference(d)),
                    b: numlin::matrix_to_rows(&cumulative_sum(d)),
                    subspace: None,
                }),
            )
        }
        "coin" => plain(Kind::Naimark, Payload::Naimark(naimark::coin())),
        "qubit-povm" => plain(Kind::Naimark, Payload::Naimark(naimark::qubit_povm())),
        "framing-to-naimark" => Demo {
            kind: Kind::Ovm,
            payload: Payload::Ovm(OvmPayload {
                framing: Framing::mercedes_self_dual(),
                a: None,
                b: None,
                subspace: None,
            }),
            chain_naimark: true,
        },
        _ => return None,
    })
}

/// The payload as JSON, suitable for a problem file.
pub fn payload_json(p: &Payload) -> serde_json::Value {
    let v = match p {
        Payload::Framing(x) => serde_json::to_value(x),
        Payload::Generator(x) => serde_json::to_value(x),
        Payload::Ovm(x) => serde_json::to_value(x),
        Payload::Dilation(x) => serde_json::to_value(x),
        Payload::Naimark(x) => serde_json::to_value(x),
    };
    v.expect("payloads serialize")
}
