//! Checks of the Schottky axioms for form-pair data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::linalg::c;
use crate::projective::ProjPoint;
use crate::sampling;

use super::region::{region_disjoint_with, region_image, Disjointness, QuadricRegion};
use super::{RegionRef, SchottkyData, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Unknown,
}

impl Status {
    /// `Fail` dominates `Unknown`, which dominates `Pass`.
    pub fn combine(statuses: impl IntoIterator<Item = Status>) -> Status {
        statuses.into_iter().fold(Status::Pass, |acc, s| match (acc, s) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Unknown, _) | (_, Status::Unknown) => Status::Unknown,
            _ => Status::Pass,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    GeneratorCount {
        g: usize,
    },
    /// Counts of positive and negative eigenvalues of the region form.
    Signature {
        positive: usize,
        negative: usize,
    },
    /// A positive definite convex combination of two region forms.
    Pencil {
        mu: f64,
        margin: f64,
    },
    /// The image form is a positive multiple of the target form.
    FormMatch {
        scale: f64,
        residual: f64,
    },
    /// No violation among this many sampled points.
    Sampled {
        samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub subject: String,
    pub status: Status,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<ProjPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: usize,
    pub g: usize,
    pub samples: usize,
    pub seed: u64,
    pub status: Status,
    pub checks: Vec<AxiomCheck>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn checks_for<'a>(&'a self, axiom: &'a str) -> impl Iterator<Item = &'a AxiomCheck> + 'a {
        self.checks.iter().filter(move |c| c.axiom == axiom)
    }

    pub fn axiom_status(&self, axiom: &str) -> Status {
        Status::combine(self.checks_for(axiom).map(|c| c.status))
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }
}

pub const AXIOM_GENERATORS: &str = "generator_count";
pub const AXIOM_INTERIOR: &str = "interior_of_closure";
pub const AXIOM_DISJOINT: &str = "disjointness";
pub const AXIOM_MAPPING: &str = "mapping";

pub fn verify_schottky(s: &SchottkyData, samples: usize) -> VerificationReport {
    verify_schottky_with(s, samples, 0, &Tolerances::default())
}

enum Task {
    Interior(RegionRef),
    Disjoint(RegionRef, RegionRef),
    Mapping(usize),
}

/// Runs every check; the report lists them in a fixed order regardless of
/// how the work is scheduled.
pub fn verify_schottky_with(s: &SchottkyData, samples: usize, seed: u64, tol: &Tolerances) -> VerificationReport {
    let refs = s.region_refs();
    let mut tasks: Vec<Task> = refs.iter().map(|&r| Task::Interior(r)).collect();
    for i in 0..refs.len() {
        for j in i + 1..refs.len() {
            tasks.push(Task::Disjoint(refs[i], refs[j]));
        }
    }
    tasks.extend((1..=s.g()).map(Task::Mapping));

    let mut checks = vec![generator_count(s)];
    checks.extend(
        tasks
            .par_iter()
            .enumerate()
            .map(|(index, task)| {
                let task_seed = sampling::derive_seed(seed, index as u64);
                match *task {
                    Task::Interior(r) => interior_check(s, r),
                    Task::Disjoint(a, b) => disjoint_check(s, a, b, task_seed, tol),
                    Task::Mapping(j) => mapping_check(s, j, samples, task_seed, tol),
                }
            })
            .collect::<Vec<_>>(),
    );

    let mut notes = Vec::new();
    if let Some(params) = s.nori() {
        notes.push(literal_threshold_note(s, params.alpha, tol));
    }
    let status = Status::combine(checks.iter().map(|c| c.status));
    VerificationReport { n: s.n(), g: s.g(), samples, seed, status, checks, notes }
}

fn generator_count(s: &SchottkyData) -> AxiomCheck {
    let g = s.g();
    let ok = g >= 2;
    AxiomCheck {
        axiom: AXIOM_GENERATORS.into(),
        subject: "generators".into(),
        status: if ok { Status::Pass } else { Status::Fail },
        detail: if ok {
            format!("{g} generators")
        } else {
            format!("{g} generator(s); Schottky data needs at least 2")
        },
        certificate: Some(Certificate::GeneratorCount { g }),
        witness: None,
    }
}

fn interior_check(s: &SchottkyData, r: RegionRef) -> AxiomCheck {
    let (positive, negative) = s.region(r).signature();
    let ok = positive > 0 && negative > 0;
    AxiomCheck {
        axiom: AXIOM_INTERIOR.into(),
        subject: r.to_string(),
        status: if ok { Status::Pass } else { Status::Fail },
        detail: format!("form signature ({positive}, {negative})"),
        certificate: Some(Certificate::Signature { positive, negative }),
        witness: None,
    }
}

fn disjoint_check(s: &SchottkyData, a: RegionRef, b: RegionRef, seed: u64, tol: &Tolerances) -> AxiomCheck {
    let subject = format!("{a}/{b}");
    match region_disjoint_with(s.region(a), s.region(b), tol, seed) {
        Disjointness::Certificate { mu, margin } => AxiomCheck {
            axiom: AXIOM_DISJOINT.into(),
            subject,
            status: Status::Pass,
            detail: format!("positive definite combination at mu = {mu:.6}"),
            certificate: Some(Certificate::Pencil { mu, margin }),
            witness: None,
        },
        Disjointness::Counterexample { point, values } => AxiomCheck {
            axiom: AXIOM_DISJOINT.into(),
            subject,
            status: Status::Fail,
            detail: format!("point in both closures (values {:.3e}, {:.3e})", values[0], values[1]),
            certificate: None,
            witness: Some(point),
        },
        Disjointness::Unknown { samples } => AxiomCheck {
            axiom: AXIOM_DISJOINT.into(),
            subject,
            status: Status::Unknown,
            detail: format!("no certificate and no shared point among {samples} samples"),
            certificate: None,
            witness: None,
        },
    }
}

/// `gamma_j(R_j) = P^n - closure(S_j)`: exact when the image form is a
/// positive multiple of the target form, otherwise sampled in both directions.
fn mapping_check(s: &SchottkyData, j: usize, samples: usize, seed: u64, tol: &Tolerances) -> AxiomCheck {
    let subject = format!("gamma{j}");
    let r = s.region(RegionRef { generator: j, side: Side::R });
    let target = s.region(RegionRef { generator: j, side: Side::S }).complement();
    let gamma = s.generator(j, 1);
    let image = match region_image(r, gamma) {
        Ok(image) => image,
        Err(e) => {
            return AxiomCheck {
                axiom: AXIOM_MAPPING.into(),
                subject,
                status: Status::Unknown,
                detail: e.to_string(),
                certificate: None,
                witness: None,
            }
        }
    };
    if let Some((scale, residual)) = image.form_ratio(&target) {
        if residual <= tol.form_match {
            return AxiomCheck {
                axiom: AXIOM_MAPPING.into(),
                subject,
                status: Status::Pass,
                detail: "image form is a positive multiple of the complement form".into(),
                certificate: Some(Certificate::FormMatch { scale, residual }),
                witness: None,
            };
        }
    }
    match sampled_mapping_witness(s, j, &target, samples, seed, tol) {
        Some((point, detail)) => AxiomCheck {
            axiom: AXIOM_MAPPING.into(),
            subject,
            status: Status::Fail,
            detail,
            certificate: None,
            witness: Some(point),
        },
        None => AxiomCheck {
            axiom: AXIOM_MAPPING.into(),
            subject,
            status: Status::Unknown,
            detail: format!("image and complement forms differ, but {samples} samples found no violation"),
            certificate: Some(Certificate::Sampled { samples }),
            witness: None,
        },
    }
}

fn sampled_mapping_witness(
    s: &SchottkyData,
    j: usize,
    target: &QuadricRegion,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Option<(ProjPoint, String)> {
    let r = s.region(RegionRef { generator: j, side: Side::R });
    let s_region = s.region(RegionRef { generator: j, side: Side::S });
    let gamma = s.generator(j, 1);
    let gamma_inv = s.generator(j, -1);
    let mut rng = sampling::substream(seed, 1);
    for i in 0..samples {
        if i % 2 == 0 {
            let x = r.sample_inside(&mut rng);
            let y = gamma.apply(&x).ok()?;
            if s_region.value_at(&y) <= tol.boundary {
                return Some((x, format!("gamma{j} maps this point of R{j} into the closure of S{j}")));
            }
        } else {
            let y = target.sample_inside(&mut rng);
            let x = gamma_inv.apply(&y).ok()?;
            if r.value_at(&x) >= -tol.boundary {
                return Some((y, format!("this point outside the closure of S{j} is not gamma{j} of a point of R{j}")));
            }
        }
    }
    None
}

/// Compares against the reading `S_j = {phi_j > alpha}`, whose closure meets
/// that of `R_j = {phi_j < alpha}`.
fn literal_threshold_note(s: &SchottkyData, alpha: f64, tol: &Tolerances) -> String {
    let params = s.nori().expect("caller checked");
    let frame = &params.frames[0];
    let inv = frame.clone().try_inverse().expect("frames are invertible");
    let half = frame.ncols() / 2;
    let top =
        crate::linalg::real_diagonal(&(0..frame.ncols()).map(|i| if i < half { 1.0 } else { 0.0 }).collect::<Vec<_>>());
    let gram = inv.adjoint() * &inv;
    let top_form = inv.adjoint() * top * &inv;
    let literal = QuadricRegion::from_form(&(&gram * c(alpha, 0.0) - top_form));
    let r = s.region(RegionRef { generator: 1, side: Side::R });
    match literal.map(|l| region_disjoint_with(r, &l, tol, 0)) {
        Ok(Disjointness::Counterexample { point, .. }) => format!(
            "S_j uses the threshold phi_j > 1 - alpha = {:.6}; with phi_j > alpha the closures of R1 and S1 share points such as phi_1 = {:.6}",
            1.0 - alpha,
            params.phi(1, point.lift())
        ),
        _ => format!("S_j uses the threshold phi_j > 1 - alpha = {:.6}", 1.0 - alpha),
    }
}
