//! Declarative job layer: JSON configs in, code descriptors out, then
//! certification and repair simulation over reloaded descriptors.
//!
//! Construction is deterministic in the config, so `certify` always rebuilds
//! from the embedded config and cross-checks the stored zeros/generator
//! before trusting anything else in the file.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bicyclic::{
    availability_certificate, build_bicyclic, code_view, dimension_lower_bound,
    hyperbolic_designed_distance, product_baseline, AvailabilityCertificate, BicyclicCounts,
    ProductBaseline,
};
use crate::conv::{
    build_block_code, column_distance, column_distance_bound, column_distance_propagation,
    row_locality_verify, sliding_window_repair, tailbiting_column_distance, tailbiting_encode,
    tailbiting_generator, to_convolutional, window_span_oracle, ConvGenerator, ErasurePattern,
    RowLocalityReport, TailbitingView, TailbitingWord,
};
use crate::cyclic::ZeroSet;
use crate::error::{gate, Error, Result};
use crate::field::Field;
use crate::hlrc::{
    construct, derive_profile, singleton_bound_r_delta, unbounded_construct, HlrcCertificate,
    UnboundedCertificate,
};
use crate::oracle::{
    erase_decode, locality_verify, min_distance, Budget, CodeView, EraseOutcome, OracleReport,
    SimRow,
};

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldDesc {
    pub p: u64,
    pub m: u32,
}

impl FieldDesc {
    pub fn build(&self) -> Result<Field> {
        Field::new(self.p, self.m)
    }
}

/// Claims supplied alongside a config; certify checks them against ground
/// truth and flags mismatches without failing the certificate.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct Claims {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<usize>,
}

/// A construction job. The `kind` tag selects the family.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind")]
pub enum JobConfig {
    #[serde(rename = "hlrc")]
    Hlrc {
        field: FieldDesc,
        r: Vec<usize>,
        delta1: usize,
        nu: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        claimed: Option<Claims>,
    },
    #[serde(rename = "hlrc-unbounded")]
    HlrcUnbounded {
        field: FieldDesc,
        m_ext: u32,
        r: Vec<usize>,
        delta1: usize,
        nu: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        claimed: Option<Claims>,
    },
    #[serde(rename = "conv")]
    Conv {
        field: FieldDesc,
        n: usize,
        k: usize,
        j: usize,
        r: usize,
        delta: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        claimed: Option<Claims>,
    },
    #[serde(rename = "bicyclic")]
    Bicyclic {
        field: FieldDesc,
        n: usize,
        r: Vec<usize>,
        delta: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        claimed: Option<Claims>,
    },
}

impl JobConfig {
    pub fn from_json(s: &str) -> Result<JobConfig> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Bounds-only summary written at construction time, before any oracle runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PreCertificate {
    pub dimension: usize,
    pub distance_lower: usize,
    pub distance_upper: i64,
    pub locality_claimed: Vec<(usize, usize)>,
}

/// The on-disk result of `construct`: parameters, zeros, generator, and the
/// bounds-only pre-certificate, with the originating config embedded.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Descriptor {
    pub config: JobConfig,
    pub q: u32,
    /// Extension degree of the working field over its prime field.
    pub m_ext: u32,
    pub n: usize,
    pub k: usize,
    pub alpha: u16,
    /// Zero exponents (cyclic kinds) or flattened pairs i*n+j (bicyclic).
    pub zeros: Vec<usize>,
    /// Generator polynomial coefficients, low to high (empty for bicyclic).
    pub generator: Vec<u16>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conv: Option<ConvGenerator>,
    pub pre_certificate: PreCertificate,
}

impl Descriptor {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serialization")
    }
    pub fn from_json(s: &str) -> Result<Descriptor> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }
}

fn claims_of(config: &JobConfig) -> Claims {
    match config {
        JobConfig::Hlrc { claimed, .. }
        | JobConfig::HlrcUnbounded { claimed, .. }
        | JobConfig::Conv { claimed, .. }
        | JobConfig::Bicyclic { claimed, .. } => claimed.unwrap_or_default(),
    }
}

/// Run the construction for a config and assemble its descriptor.
pub fn construct_job(config: &JobConfig) -> Result<Descriptor> {
    match config {
        JobConfig::Hlrc { field, r, delta1, nu, .. } => {
            let f = field.build()?;
            let profile = derive_profile(r, *delta1, nu)?;
            let (code, cert) = construct(&profile, &f)?;
            Ok(Descriptor {
                config: config.clone(),
                q: f.q(),
                m_ext: f.m(),
                n: cert.n,
                k: cert.dim_verified,
                alpha: code.code.alpha(),
                zeros: code.code.zeros().to_vec(),
                generator: code.code.generator_poly().coeffs().to_vec(),
                conv: None,
                pre_certificate: PreCertificate {
                    dimension: cert.dim_verified,
                    distance_lower: cert.bch_lower,
                    distance_upper: cert.singleton_upper,
                    locality_claimed: cert.locality_claimed.clone(),
                },
            })
        }
        JobConfig::HlrcUnbounded { field, m_ext, r, delta1, nu, claimed } => {
            let profile = derive_profile(r, *delta1, nu)?;
            let (code, cert) = unbounded_construct(
                &profile,
                field.p,
                field.m,
                *m_ext,
                claimed.and_then(|c| c.dimension),
            )?;
            Ok(Descriptor {
                config: config.clone(),
                q: code.code.field().q(),
                m_ext: code.code.field().m(),
                n: cert.n,
                k: cert.dim_from_zero_set,
                alpha: code.code.alpha(),
                zeros: code.code.zeros().to_vec(),
                generator: code.code.generator_poly().coeffs().to_vec(),
                conv: None,
                pre_certificate: PreCertificate {
                    dimension: cert.dim_from_zero_set,
                    distance_lower: cert.bch_lower,
                    distance_upper: cert.singleton_upper,
                    locality_claimed: cert.locality_claimed.clone(),
                },
            })
        }
        JobConfig::Conv { field, n, k, j, r, delta, .. } => {
            let f = field.build()?;
            let block = build_block_code(*n, *k, *j, *r, *delta, &f)?;
            let conv = match to_convolutional(&block, &f) {
                Ok(g) => g,
                Err(Error::SingularSubmatrix { .. }) => tailbiting_generator(&block, &f)?,
                Err(e) => return Err(e),
            };
            Ok(Descriptor {
                config: config.clone(),
                q: f.q(),
                m_ext: f.m(),
                n: block.block.n(),
                k: block.block.k(),
                alpha: block.block.alpha(),
                zeros: block.block.zeros().to_vec(),
                generator: block.block.generator_poly().coeffs().to_vec(),
                conv: Some(conv),
                pre_certificate: PreCertificate {
                    dimension: block.block.k(),
                    distance_lower: block.designed_distance,
                    distance_upper: singleton_bound_r_delta(
                        block.block.n(),
                        block.block.k(),
                        *r,
                        *delta,
                    ),
                    locality_claimed: vec![(*r, *delta)],
                },
            })
        }
        JobConfig::Bicyclic { field, n, r, delta, .. } => {
            if r.len() != 2 {
                return Err(gate("bicyclic config needs exactly two localities in r"));
            }
            let f = field.build()?;
            let (code, _counts) = build_bicyclic(*n, r[0], r[1], *delta, &f)?;
            let designed = hyperbolic_designed_distance(&code.zeros);
            Ok(Descriptor {
                config: config.clone(),
                q: f.q(),
                m_ext: f.m(),
                n: n * n,
                k: code.dim,
                alpha: code.alpha,
                zeros: code.zeros.pairs.iter().map(|&(i, j)| i * n + j).collect(),
                generator: vec![],
                conv: None,
                pre_certificate: PreCertificate {
                    dimension: code.dim,
                    distance_lower: designed,
                    distance_upper: crate::hlrc::singleton_bound_r(n * n, code.dim, r[0]),
                    locality_claimed: vec![(r[0], 2), (r[1], 2)],
                },
            })
        }
    }
}

/// Overall verdict of a certification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    StronglyOptimal,
    Optimal,
    Consistent,
    Refuted,
}

/// One claimed-vs-verified line of the certificate table.
#[derive(Clone, Debug, Serialize)]
pub struct ClaimLine {
    pub quantity: String,
    pub claimed: String,
    pub verified: String,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum KindCertificate {
    #[serde(rename = "hlrc")]
    Hlrc(HlrcCertificate),
    #[serde(rename = "hlrc-unbounded")]
    HlrcUnbounded(UnboundedCertificate),
    #[serde(rename = "conv")]
    Conv {
        block_designed_distance: usize,
        /// Error text when the systematic circulant reduction is singular.
        strict_reduction_singular: Option<String>,
        /// Rows of the faithful tailbiting realization.
        realization_rows: usize,
        window_column_distance: crate::conv::ColumnDistanceReport,
        truncated_column_distances: Vec<crate::conv::ColumnDistanceReport>,
        column_distance_bounds: Vec<i64>,
        window_span_agrees: Option<bool>,
        propagation_holds: bool,
        row_locality: RowLocalityReport,
        tailbiting_equals_block: Option<bool>,
    },
    #[serde(rename = "bicyclic")]
    Bicyclic {
        counts: BicyclicCounts,
        hyperbolic_designed: usize,
        dimension_lower_bound: f64,
        product: ProductBaseline,
        dim_beats_product: bool,
        availability: AvailabilityCertificate,
    },
}

/// Full certification output: kind-specific detail, the claims table, the
/// oracle reports, and the overall verdict.
#[derive(Clone, Debug, Serialize)]
pub struct CertifyOutput {
    pub verdict: Verdict,
    /// Claim mismatches reported without failing the verdict.
    pub flags: Vec<String>,
    pub claims: Vec<ClaimLine>,
    pub oracle_reports: Vec<OracleReport>,
    pub detail: KindCertificate,
}

impl CertifyOutput {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialization")
    }
    pub fn exit_ok(&self) -> bool {
        self.verdict != Verdict::Refuted
    }
}

fn check_descriptor_integrity(d: &Descriptor, zeros: &[usize], generator: &[u16]) -> Result<()> {
    if d.zeros != zeros {
        return Err(Error::Config(
            "descriptor zeros differ from the deterministic reconstruction".into(),
        ));
    }
    if d.generator != generator {
        return Err(Error::Config(
            "descriptor generator differs from the deterministic reconstruction".into(),
        ));
    }
    Ok(())
}

/// Re-run the construction from the embedded config, verify the descriptor
/// matches it, then run every applicable invariant suite and oracle.
pub fn certify_job(d: &Descriptor, budget: &Budget) -> Result<CertifyOutput> {
    let claims = claims_of(&d.config);
    let mut flags = Vec::new();
    let mut claim_lines = Vec::new();
    let mut oracle_reports = Vec::new();

    let push_claim = |lines: &mut Vec<ClaimLine>, q: &str, claimed: String, verified: String, ok: bool| {
        lines.push(ClaimLine {
            quantity: q.into(),
            claimed,
            verified,
            consistent: ok,
        });
    };

    match &d.config {
        JobConfig::Hlrc { field, r, delta1, nu, .. } => {
            let f = field.build()?;
            let profile = derive_profile(r, *delta1, nu)?;
            let (code, cert) = construct(&profile, &f)?;
            check_descriptor_integrity(
                d,
                &code.code.zeros().to_vec(),
                code.code.generator_poly().coeffs(),
            )?;

            let mut consistent = cert.dim_claimed == cert.dim_verified
                && cert.level_checks.iter().all(|c| c.cardinality_ok && c.congruence_ok)
                && cert.optimality.closed_form_matches
                && cert.locality.iter().all(|l| l.dim_actual <= l.dim_bound);
            push_claim(
                &mut claim_lines,
                "dimension",
                cert.dim_claimed.to_string(),
                cert.dim_verified.to_string(),
                cert.dim_claimed == cert.dim_verified,
            );
            push_claim(
                &mut claim_lines,
                "distance",
                format!("[{}, {}]", cert.bch_lower, cert.singleton_upper),
                cert.distance_exact.map_or("interval".into(), |d| d.to_string()),
                cert.bch_lower as i64 <= cert.singleton_upper,
            );

            // oracle distance when the message space fits the budget
            let view = CodeView::from_cyclic(&code.code, "hlrc");
            let rep = min_distance(
                &view,
                budget,
                Some(cert.bch_lower as i64),
                Some(cert.singleton_upper),
            );
            if rep.outcome == crate::oracle::Outcome::Refuted {
                consistent = false;
            }
            oracle_reports.push(rep);

            // oracle locality on the innermost level's repair groups
            if let Some(l1) = cert.locality.first() {
                let lrep = locality_verify(
                    &view,
                    cert.locality_claimed[0].0,
                    cert.locality_claimed[0].1,
                    &l1.repair_groups,
                    budget,
                );
                if !lrep.pass {
                    consistent = false;
                }
            }

            if let Some(ck) = claims.dimension {
                let ok = ck == cert.dim_verified;
                if !ok {
                    flags.push(format!(
                        "claimed dimension {ck} is inconsistent with the zero-set dimension {}",
                        cert.dim_verified
                    ));
                }
                push_claim(&mut claim_lines, "claimed-dimension", ck.to_string(), cert.dim_verified.to_string(), ok);
            }
            if let Some(cd) = claims.distance {
                let in_range = cert.bch_lower <= cd && cd as i64 <= cert.singleton_upper;
                if !in_range {
                    flags.push(format!("claimed distance {cd} lies outside the certified interval"));
                }
                push_claim(
                    &mut claim_lines,
                    "claimed-distance",
                    cd.to_string(),
                    format!("[{}, {}]", cert.bch_lower, cert.singleton_upper),
                    in_range,
                );
            }

            let verdict = if !consistent {
                Verdict::Refuted
            } else if cert.strongly_optimal {
                Verdict::StronglyOptimal
            } else if cert.optimal {
                Verdict::Optimal
            } else {
                Verdict::Consistent
            };
            Ok(CertifyOutput {
                verdict,
                flags,
                claims: claim_lines,
                oracle_reports,
                detail: KindCertificate::Hlrc(cert),
            })
        }
        JobConfig::HlrcUnbounded { field, m_ext, r, delta1, nu, claimed } => {
            let profile = derive_profile(r, *delta1, nu)?;
            let (code, cert) = unbounded_construct(
                &profile,
                field.p,
                field.m,
                *m_ext,
                claimed.and_then(|c| c.dimension),
            )?;
            check_descriptor_integrity(
                d,
                &code.code.zeros().to_vec(),
                code.code.generator_poly().coeffs(),
            )?;

            let mut consistent = cert.dims_agree && cert.subfield_ok;
            push_claim(
                &mut claim_lines,
                "dimension",
                cert.dim_formula.to_string(),
                cert.dim_from_zero_set.to_string(),
                cert.dims_agree,
            );
            push_claim(
                &mut claim_lines,
                "distance",
                format!("[{}, {}]", cert.bch_lower, cert.singleton_upper),
                cert.distance_exact.map_or("interval".into(), |d| d.to_string()),
                true,
            );
            if cert.claimed_dimension_consistent == Some(false) {
                flags.push(format!(
                    "claimed dimension {} is inconsistent with the zero-set dimension {}",
                    cert.claimed_dimension.unwrap(),
                    cert.dim_from_zero_set
                ));
            }

            let view = CodeView::from_cyclic(&code.code, "hlrc-unbounded");
            let rep = min_distance(
                &view,
                budget,
                Some(cert.bch_lower as i64),
                Some(cert.singleton_upper),
            );
            if rep.outcome == crate::oracle::Outcome::Refuted {
                consistent = false;
            }
            oracle_reports.push(rep);

            let verdict = if !consistent {
                Verdict::Refuted
            } else if cert.optimal && cert.strong_optimality {
                Verdict::StronglyOptimal
            } else if cert.optimal {
                Verdict::Optimal
            } else {
                Verdict::Consistent
            };
            Ok(CertifyOutput {
                verdict,
                flags,
                claims: claim_lines,
                oracle_reports,
                detail: KindCertificate::HlrcUnbounded(cert),
            })
        }
        JobConfig::Conv { field, n, k, j, r, delta, .. } => {
            let f = field.build()?;
            let block = build_block_code(*n, *k, *j, *r, *delta, &f)?;
            let (conv, strict_singular) = match to_convolutional(&block, &f) {
                Ok(g) => (g, None),
                Err(e @ Error::SingularSubmatrix { .. }) => {
                    (tailbiting_generator(&block, &f)?, Some(e.to_string()))
                }
                Err(e) => return Err(e),
            };
            check_descriptor_integrity(
                d,
                &block.block.zeros().to_vec(),
                block.block.generator_poly().coeffs(),
            )?;

            let mut consistent = true;

            // block distance oracle
            let view = CodeView::from_cyclic(&block.block, "conv-block");
            let brep = min_distance(
                &view,
                budget,
                Some(block.designed_distance as i64),
                Some(block.designed_distance as i64),
            );
            if brep.outcome == crate::oracle::Outcome::Refuted {
                consistent = false;
            }
            push_claim(
                &mut claim_lines,
                "block-distance",
                block.designed_distance.to_string(),
                brep.verified.map_or("budget".into(), |v| v.to_string()),
                brep.outcome != crate::oracle::Outcome::Refuted,
            );
            oracle_reports.push(brep);

            // tailbiting set equality, exhaustive when in budget
            let q = f.q() as u64;
            let kk_conv = (conv.k * (conv.j + 1)) as u32;
            let tb_equal = match q.checked_pow(kk_conv) {
                Some(t) if t <= budget.max_enumerations => {
                    Some(tailbiting_set_equals_block(&conv, &block, &f))
                }
                _ => None,
            };
            if tb_equal == Some(false) {
                consistent = false;
            }

            // row locality on the realization
            let row_loc = row_locality_verify(&conv, &f, *r, *delta, budget)?;
            if !row_loc.pass {
                consistent = false;
            }

            // window column distance of the tailbiting word, its bounds, and
            // the span characterization
            let wrep = tailbiting_column_distance(&block, budget);
            let bounds: Vec<i64> = (0..=*j)
                .map(|jt| column_distance_bound(*n, *k, *r, *delta, jt))
                .collect();
            let window_span = match wrep.exact {
                Some(dv) => match window_span_oracle(&block, dv, budget) {
                    Ok(ok) => {
                        if !ok {
                            consistent = false;
                        }
                        Some(ok)
                    }
                    Err(_) => None,
                },
                None => None,
            };
            if let Some(dv) = wrep.exact {
                if dv < block.designed_distance || dv as i64 > wrep.upper_bound {
                    consistent = false;
                }
            }
            let window_values: Vec<(usize, usize)> =
                wrep.exact.map(|dv| (*j, dv)).into_iter().collect();
            let propagation = column_distance_propagation(&window_values, *n, *k, *r, *delta);
            if !propagation {
                consistent = false;
            }

            // truncated column distances of the realization, reported as-is
            let trunc_reports: Vec<_> = (0..=*j)
                .map(|jt| column_distance(&conv, &f, jt, *r, *delta, budget))
                .collect();

            let verdict = if consistent { Verdict::Consistent } else { Verdict::Refuted };
            Ok(CertifyOutput {
                verdict,
                flags,
                claims: claim_lines,
                oracle_reports,
                detail: KindCertificate::Conv {
                    block_designed_distance: block.designed_distance,
                    strict_reduction_singular: strict_singular,
                    realization_rows: conv.k,
                    window_column_distance: wrep,
                    truncated_column_distances: trunc_reports,
                    column_distance_bounds: bounds,
                    window_span_agrees: window_span,
                    propagation_holds: propagation,
                    row_locality: row_loc,
                    tailbiting_equals_block: tb_equal,
                },
            })
        }
        JobConfig::Bicyclic { field, n, r, delta, .. } => {
            let f = field.build()?;
            let (code, counts) = build_bicyclic(*n, r[0], r[1], *delta, &f)?;
            let flat: Vec<usize> = code.zeros.pairs.iter().map(|&(i, j)| i * n + j).collect();
            check_descriptor_integrity(d, &flat, &[])?;

            let designed = hyperbolic_designed_distance(&code.zeros);
            let lb = dimension_lower_bound(*n, r[0], r[1], *delta);
            let product = product_baseline(*n, r[0], r[1], integer_sqrt_ceil(*delta));
            let avail = availability_certificate(&code);
            let mut consistent = counts.counts_agree
                && designed >= *delta
                && code.dim as f64 >= lb
                && code.dim >= product.product_dim
                && avail.pass;

            push_claim(
                &mut claim_lines,
                "dimension",
                format!("{}", (*n) * (*n) - counts.union_inclusion_exclusion),
                code.dim.to_string(),
                true,
            );
            push_claim(
                &mut claim_lines,
                "distance",
                format!(">= {delta}"),
                format!(">= {designed}"),
                designed >= *delta,
            );
            if let Some(ck) = claims.dimension {
                let ok = ck == code.dim;
                if !ok {
                    flags.push(format!(
                        "claimed dimension {ck} is inconsistent with the zero-set dimension {}",
                        code.dim
                    ));
                }
                push_claim(&mut claim_lines, "claimed-dimension", ck.to_string(), code.dim.to_string(), ok);
            }

            // exact distance only at tiny scale
            let view = code_view(&code, "bicyclic");
            let rep = min_distance(&view, budget, Some(designed as i64), None);
            if rep.outcome == crate::oracle::Outcome::Refuted {
                consistent = false;
            }
            oracle_reports.push(rep);

            let verdict = if consistent { Verdict::Consistent } else { Verdict::Refuted };
            Ok(CertifyOutput {
                verdict,
                flags,
                claims: claim_lines,
                oracle_reports,
                detail: KindCertificate::Bicyclic {
                    counts,
                    hyperbolic_designed: designed,
                    dimension_lower_bound: lb,
                    dim_beats_product: code.dim >= product.product_dim,
                    product,
                    availability: avail,
                },
            })
        }
    }
}

fn integer_sqrt_ceil(v: usize) -> usize {
    let mut s = 1;
    while s * s < v {
        s += 1;
    }
    s
}

fn tailbiting_set_equals_block(
    conv: &ConvGenerator,
    block: &crate::conv::QuasiCyclicLrc,
    f: &Field,
) -> bool {
    let q = f.q() as usize;
    let w = conv.j + 1;
    let kk_conv = conv.k * w;
    let mut tb = std::collections::BTreeSet::new();
    for idx in 0..q.pow(kk_conv as u32) {
        let mut digits = Vec::with_capacity(kk_conv);
        let mut x = idx;
        for _ in 0..kk_conv {
            digits.push((x % q) as u16);
            x /= q;
        }
        let u: Vec<Vec<u16>> = digits.chunks(w).map(|c| c.to_vec()).collect();
        tb.insert(tailbiting_encode(conv, f, &u).unwrap().to_natural());
    }
    let kk = block.block.k();
    let mut bl = std::collections::BTreeSet::new();
    for idx in 0..q.pow(kk as u32) {
        let mut digits = Vec::with_capacity(kk);
        let mut x = idx;
        for _ in 0..kk {
            digits.push((x % q) as u16);
            x /= q;
        }
        bl.insert(block.block.encode(&digits).unwrap());
    }
    tb == bl
}

/// Pattern grammar for `simulate`:
///  - `random:<count>`            count random erasures per trial
///  - `explicit:p1;p2;..`         fixed erasure positions (flat coordinates)
///  - `grid:<l>,<s>;..`           fixed grid erasures (conv kind)
///  - `window:<rows>:<l>,<s>;..`  fixed grid erasures, repaired through a
///                                rows-stream tailbiting view (cyclic kinds)
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternSpec {
    Random { count: usize },
    Explicit { positions: Vec<usize> },
    Grid { positions: Vec<(usize, usize)> },
    Window { rows: usize, positions: Vec<(usize, usize)> },
}

impl PatternSpec {
    pub fn parse(s: &str) -> Result<PatternSpec> {
        let bad = |m: &str| Error::Config(format!("pattern spec `{s}`: {m}"));
        if let Some(rest) = s.strip_prefix("random:") {
            let count = rest.parse().map_err(|_| bad("count must be an integer"))?;
            return Ok(PatternSpec::Random { count });
        }
        if let Some(rest) = s.strip_prefix("explicit:") {
            let positions = rest
                .split(';')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| bad("positions must be integers")))
                .collect::<Result<Vec<usize>>>()?;
            return Ok(PatternSpec::Explicit { positions });
        }
        let parse_pairs = |rest: &str| -> Result<Vec<(usize, usize)>> {
            rest.split(';')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    let (a, b) = t.split_once(',').ok_or_else(|| bad("expected l,s pairs"))?;
                    Ok((
                        a.parse().map_err(|_| bad("bad row index"))?,
                        b.parse().map_err(|_| bad("bad column index"))?,
                    ))
                })
                .collect()
        };
        if let Some(rest) = s.strip_prefix("grid:") {
            return Ok(PatternSpec::Grid { positions: parse_pairs(rest)? });
        }
        if let Some(rest) = s.strip_prefix("window:") {
            let (rows_s, tail) = rest
                .split_once(':')
                .ok_or_else(|| bad("expected window:<rows>:<pairs>"))?;
            let rows = rows_s.parse().map_err(|_| bad("bad stream count"))?;
            return Ok(PatternSpec::Window { rows, positions: parse_pairs(tail)? });
        }
        Err(bad("unknown pattern kind"))
    }
}

/// Run the repair simulation for a descriptor. Deterministic in the seed;
/// the same invocation always produces identical CSV bytes.
pub fn simulate_job(
    d: &Descriptor,
    pattern: &PatternSpec,
    seed: u64,
    trials: u64,
) -> Result<Vec<SimRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match &d.config {
        JobConfig::Conv { field, n, k, j, r, delta, .. } => {
            let f = field.build()?;
            let block = build_block_code(*n, *k, *j, *r, *delta, &f)?;
            let conv = match to_convolutional(&block, &f) {
                Ok(g) => g,
                Err(Error::SingularSubmatrix { .. }) => tailbiting_generator(&block, &f)?,
                Err(e) => return Err(e),
            };
            let view = TailbitingView::from_quasicyclic(&block)?;
            let d_window = block.designed_distance;
            let width = *j + 1;
            let mut rows = Vec::new();
            for t in 0..trials {
                let msg: Vec<Vec<u16>> = (0..conv.k)
                    .map(|_| (0..width).map(|_| rng.random_range(0..f.q()) as u16).collect())
                    .collect();
                let word = tailbiting_encode(&conv, &f, &msg)?;
                let pat = match pattern {
                    PatternSpec::Random { count } => random_grid_pattern(&mut rng, *n, width, *count),
                    PatternSpec::Grid { positions } | PatternSpec::Window { positions, .. } => {
                        ErasurePattern::new(positions.iter().copied())
                    }
                    PatternSpec::Explicit { .. } => {
                        return Err(gate("conv simulation takes grid or window patterns"))
                    }
                };
                let res = sliding_window_repair(&view, &word, &pat, d_window)?;
                rows.push(SimRow {
                    pattern_id: t,
                    erasure_count: pat.len(),
                    recovered: res.recovered,
                    rounds: res.rounds,
                    trace_length: res.trace.len(),
                });
            }
            Ok(rows)
        }
        JobConfig::Hlrc { field, r, delta1, nu, .. } => {
            let f = field.build()?;
            let profile = derive_profile(r, *delta1, nu)?;
            let (code, cert) = construct(&profile, &f)?;
            simulate_cyclic(&mut rng, code.code, cert.bch_lower, pattern, trials)
        }
        JobConfig::HlrcUnbounded { field, m_ext, r, delta1, nu, claimed } => {
            let profile = derive_profile(r, *delta1, nu)?;
            let (code, cert) = unbounded_construct(
                &profile,
                field.p,
                field.m,
                *m_ext,
                claimed.and_then(|c| c.dimension),
            )?;
            simulate_cyclic(&mut rng, code.code, cert.bch_lower, pattern, trials)
        }
        JobConfig::Bicyclic { field, n, r, delta, .. } => {
            let f = field.build()?;
            let (code, _) = build_bicyclic(*n, r[0], r[1], *delta, &f)?;
            let view = code_view(&code, "bicyclic");
            let count = match pattern {
                PatternSpec::Random { count } => *count,
                _ => return Err(gate("bicyclic simulation supports random patterns only")),
            };
            let mut rows = Vec::new();
            for t in 0..trials {
                let msg: Vec<u16> =
                    (0..code.dim).map(|_| rng.random_range(0..f.q()) as u16).collect();
                let w = code.encode(&msg)?;
                let mut word: Vec<Option<u16>> = w.iter().map(|&v| Some(v)).collect();
                let mut chosen = std::collections::BTreeSet::new();
                while chosen.len() < count.min(word.len()) {
                    chosen.insert(rng.random_range(0..word.len()));
                }
                for &p in &chosen {
                    word[p] = None;
                }
                let ok = matches!(erase_decode(&view, &word), EraseOutcome::Filled(ref out) if *out == w);
                rows.push(SimRow {
                    pattern_id: t,
                    erasure_count: chosen.len(),
                    recovered: ok,
                    rounds: 1,
                    trace_length: chosen.len(),
                });
            }
            Ok(rows)
        }
    }
}

fn random_grid_pattern(
    rng: &mut ChaCha8Rng,
    rows: usize,
    width: usize,
    count: usize,
) -> ErasurePattern {
    let mut set = std::collections::BTreeSet::new();
    while set.len() < count.min(rows * width) {
        set.insert((rng.random_range(0..rows), rng.random_range(0..width)));
    }
    ErasurePattern { positions: set }
}

fn simulate_cyclic(
    rng: &mut ChaCha8Rng,
    code: crate::cyclic::CyclicCode,
    distance_lower: usize,
    pattern: &PatternSpec,
    trials: u64,
) -> Result<Vec<SimRow>> {
    let f = code.field().clone();
    let q = f.q();
    match pattern {
        PatternSpec::Window { rows, positions } => {
            // reinterpret the cyclic word as a rows-stream tailbiting grid
            // and run the sliding-window engine with the certified bound
            let (r, delta) = infer_pair_locality(&code)?;
            let view = TailbitingView::new(code.clone(), *rows, r, delta)?;
            let mut out = Vec::new();
            for t in 0..trials {
                let msg: Vec<u16> = (0..code.k()).map(|_| rng.random_range(0..q) as u16).collect();
                let natural = code.encode(&msg)?;
                let word = TailbitingWord::from_natural(&natural, *rows);
                let pat = ErasurePattern::new(positions.iter().copied());
                let res = sliding_window_repair(&view, &word, &pat, distance_lower)?;
                out.push(SimRow {
                    pattern_id: t,
                    erasure_count: pat.len(),
                    recovered: res.recovered,
                    rounds: res.rounds,
                    trace_length: res.trace.len(),
                });
            }
            Ok(out)
        }
        PatternSpec::Random { count } => {
            let view = CodeView::from_cyclic(&code, "sim");
            let mut out = Vec::new();
            for t in 0..trials {
                let msg: Vec<u16> = (0..code.k()).map(|_| rng.random_range(0..q) as u16).collect();
                let w = code.encode(&msg)?;
                let mut word: Vec<Option<u16>> = w.iter().map(|&v| Some(v)).collect();
                let mut chosen = std::collections::BTreeSet::new();
                while chosen.len() < (*count).min(word.len()) {
                    chosen.insert(rng.random_range(0..word.len()));
                }
                for &p in &chosen {
                    word[p] = None;
                }
                let ok = matches!(erase_decode(&view, &word), EraseOutcome::Filled(ref out) if *out == w);
                out.push(SimRow {
                    pattern_id: t,
                    erasure_count: chosen.len(),
                    recovered: ok,
                    rounds: 1,
                    trace_length: chosen.len(),
                });
            }
            Ok(out)
        }
        PatternSpec::Explicit { positions } => {
            let view = CodeView::from_cyclic(&code, "sim");
            let mut out = Vec::new();
            for t in 0..trials {
                let msg: Vec<u16> = (0..code.k()).map(|_| rng.random_range(0..q) as u16).collect();
                let w = code.encode(&msg)?;
                let mut word: Vec<Option<u16>> = w.iter().map(|&v| Some(v)).collect();
                for &p in positions {
                    if p >= word.len() {
                        return Err(gate(format!("explicit position {p} out of range")));
                    }
                    word[p] = None;
                }
                let ok = matches!(erase_decode(&view, &word), EraseOutcome::Filled(ref out) if *out == w);
                out.push(SimRow {
                    pattern_id: t,
                    erasure_count: positions.len(),
                    recovered: ok,
                    rounds: 1,
                    trace_length: positions.len(),
                });
            }
            Ok(out)
        }
        PatternSpec::Grid { .. } => Err(gate("grid patterns apply to conv descriptors")),
    }
}

/// Recover the (r, delta) pair of the innermost locality from the
/// pre-certificate convention used by the cyclic kinds: the level-1 claim.
fn infer_pair_locality(code: &crate::cyclic::CyclicCode) -> Result<(usize, usize)> {
    // Find the smallest m dividing n whose residue structure is honored by
    // the zeros: the level-1 local geometry.
    let n = code.n();
    for m in 2..=n {
        if n % m != 0 {
            continue;
        }
        for z in 1..m {
            let zloc = ZeroSet::run_from_one(m, z + 1);
            let ok = (0..n / m).all(|s| zloc.shift_into(s * m, n).is_subset_of(code.zeros()));
            if ok && z + 1 <= m {
                // largest delta for this m
                let mut delta = z + 1;
                for z2 in z + 1..m {
                    let zl = ZeroSet::run_from_one(m, z2 + 1);
                    if (0..n / m).all(|s| zl.shift_into(s * m, n).is_subset_of(code.zeros())) {
                        delta = z2 + 1;
                    } else {
                        break;
                    }
                }
                return Ok((m - (delta - 1), delta));
            }
        }
    }
    Err(gate("code zeros carry no stride locality"))
}

pub fn sim_rows_to_csv(rows: &[SimRow]) -> String {
    let mut out = String::from(SimRow::csv_header());
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hlrc_config() -> JobConfig {
        JobConfig::from_json(
            r#"{"kind":"hlrc","field":{"p":13,"m":1},"r":[2,4],"delta1":2,"nu":[4]}"#,
        )
        .unwrap()
    }

    #[test]
    fn config_parsing_matches_schema() {
        let c = JobConfig::from_json(
            r#"{"kind":"hlrc","field":{"p":163,"m":1},"r":[2,3,5,7],"delta1":2,"nu":[3,3,3]}"#,
        )
        .unwrap();
        assert!(matches!(c, JobConfig::Hlrc { .. }));
        let u = JobConfig::from_json(
            r#"{"kind":"hlrc-unbounded","field":{"p":2,"m":2},"m_ext":2,"r":[2],"delta1":2,"nu":[]}"#,
        )
        .unwrap();
        assert!(matches!(u, JobConfig::HlrcUnbounded { .. }));
        let v = JobConfig::from_json(
            r#"{"kind":"conv","n":4,"k":1,"j":1,"r":1,"delta":2,"field":{"p":3,"m":2}}"#,
        )
        .unwrap();
        assert!(matches!(v, JobConfig::Conv { .. }));
        let b = JobConfig::from_json(
            r#"{"kind":"bicyclic","n":21,"r":[2,6],"delta":9,"field":{"p":2,"m":6}}"#,
        )
        .unwrap();
        assert!(matches!(b, JobConfig::Bicyclic { .. }));
        assert!(JobConfig::from_json(r#"{"kind":"nope"}"#).is_err());
    }

    #[test]
    fn construct_certify_roundtrip_identical() {
        let cfg = hlrc_config();
        let desc = construct_job(&cfg).unwrap();
        let json = desc.to_json();
        let reloaded = Descriptor::from_json(&json).unwrap();
        let a = certify_job(&desc, &Budget::default()).unwrap();
        let b = certify_job(&reloaded, &Budget::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.verdict, Verdict::StronglyOptimal);
    }

    #[test]
    fn tampered_descriptor_is_rejected() {
        let cfg = hlrc_config();
        let mut desc = construct_job(&cfg).unwrap();
        desc.zeros.pop();
        assert!(certify_job(&desc, &Budget::default()).is_err());
    }

    #[test]
    fn hlrc_12_4_certificate() {
        let desc = construct_job(&hlrc_config()).unwrap();
        assert_eq!(desc.n, 12);
        assert_eq!(desc.k, 4);
        assert_eq!(desc.pre_certificate.distance_lower, 8);
        let out = certify_job(&desc, &Budget::default()).unwrap();
        assert_eq!(out.verdict, Verdict::StronglyOptimal);
        let rep = &out.oracle_reports[0];
        assert_eq!(rep.verified, Some(8));
    }

    #[test]
    fn conv_certify_small_instance() {
        let cfg = JobConfig::from_json(
            r#"{"kind":"conv","n":4,"k":1,"j":1,"r":1,"delta":2,"field":{"p":3,"m":2}}"#,
        )
        .unwrap();
        let desc = construct_job(&cfg).unwrap();
        assert!(desc.conv.is_some());
        let out = certify_job(&desc, &Budget::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Consistent);
        match &out.detail {
            KindCertificate::Conv {
                strict_reduction_singular,
                realization_rows,
                tailbiting_equals_block,
                window_span_agrees,
                window_column_distance,
                propagation_holds,
                row_locality,
                ..
            } => {
                assert!(strict_reduction_singular.is_some());
                assert_eq!(*realization_rows, 2);
                assert_eq!(*tailbiting_equals_block, Some(true));
                assert_eq!(*window_span_agrees, Some(true));
                assert_eq!(window_column_distance.exact, Some(6));
                assert!(*propagation_holds);
                assert!(row_locality.pass);
            }
            _ => panic!("wrong certificate kind"),
        }
    }

    #[test]
    fn pattern_spec_grammar() {
        assert_eq!(PatternSpec::parse("random:5").unwrap(), PatternSpec::Random { count: 5 });
        assert_eq!(
            PatternSpec::parse("explicit:1;4;7").unwrap(),
            PatternSpec::Explicit { positions: vec![1, 4, 7] }
        );
        assert_eq!(
            PatternSpec::parse("grid:0,1;3,0").unwrap(),
            PatternSpec::Grid { positions: vec![(0, 1), (3, 0)] }
        );
        assert_eq!(
            PatternSpec::parse("window:4:0,0;1,5").unwrap(),
            PatternSpec::Window { rows: 4, positions: vec![(0, 0), (1, 5)] }
        );
        assert!(PatternSpec::parse("bogus").is_err());
    }

    #[test]
    fn simulate_deterministic_bytes() {
        let desc = construct_job(&hlrc_config()).unwrap();
        let pat = PatternSpec::Random { count: 3 };
        let a = sim_rows_to_csv(&simulate_job(&desc, &pat, 42, 50).unwrap());
        let b = sim_rows_to_csv(&simulate_job(&desc, &pat, 42, 50).unwrap());
        assert_eq!(a, b);
        // all trials with 3 <= d-1 erasures recover
        for row in simulate_job(&desc, &pat, 42, 50).unwrap() {
            assert!(row.recovered);
        }
    }

    #[test]
    fn simulate_zero_trials_header_only() {
        let desc = construct_job(&hlrc_config()).unwrap();
        let rows = simulate_job(&desc, &PatternSpec::Random { count: 1 }, 7, 0).unwrap();
        assert!(rows.is_empty());
        assert_eq!(sim_rows_to_csv(&rows), format!("{}\n", SimRow::csv_header()));
    }
}
