//! Binary feature extraction for captioned tables.
//!
//! Nineteen bits: thirteen describe how the caption's main variable
//! relates to the other variables (exactly one of these "structure" bits
//! is set when a relationship is recognized), one flags distribution
//! wording, and five one-hot encode the result size.

use crate::types::{FeatureSchema, FeatureVector};

use super::align::{AlignedVar, CaptionAlignment};
use super::{CaptionIR, PhraseSource, PhraseType};

/// Sort key implementing the other-variable precedence T, then OC, then Q:
/// a time axis is the strongest structural signal a caption can carry, a
/// category next, another measure last.
fn precedence(ptype: PhraseType) -> u8 {
    match ptype {
        PhraseType::T => 0,
        PhraseType::OC => 1,
        PhraseType::Q => 2,
    }
}

/// Bit for a (main, other) pair where the other variable is aligned with a
/// column — the combinations the schema defines.
fn aligned_pair_bit(main: PhraseType, other: PhraseType) -> Option<usize> {
    match (main, other) {
        (PhraseType::Q, PhraseType::T) => Some(4),
        (PhraseType::Q, PhraseType::OC) => Some(5),
        (PhraseType::T, PhraseType::Q) => Some(6),
        (PhraseType::OC, PhraseType::Q) => Some(7),
        _ => None,
    }
}

/// Bit for a (main, other) pair where the other variable stayed unaligned.
fn unaligned_pair_bit(main: PhraseType, other: PhraseType) -> Option<usize> {
    match (main, other) {
        (PhraseType::Q, PhraseType::T) => Some(0),
        (PhraseType::Q, PhraseType::OC) => Some(1),
        (PhraseType::T, PhraseType::Q) => Some(2),
        (PhraseType::OC, PhraseType::Q) => Some(3),
        _ => None,
    }
}

fn first_defined_bit(
    main: PhraseType,
    others: &[&AlignedVar],
    pair_bit: fn(PhraseType, PhraseType) -> Option<usize>,
) -> Option<usize> {
    let mut sorted: Vec<&&AlignedVar> = others.iter().collect();
    sorted.sort_by_key(|v| precedence(v.ptype));
    sorted.iter().find_map(|v| pair_bit(main, v.ptype))
}

/// Extract the 19-bit feature vector for a caption aligned with its table.
///
/// One structure bit is chosen by falling through four levels: a pair row
/// over aligned other variables (bits 4–7), a multi-variable row over all
/// known others (bits 9–12), a pair row over unaligned others (bits 0–3),
/// and finally the bare-timespan row (bit 8) for a quantified caption
/// whose span found no temporal column.  The distribution bit (13) and the
/// size one-hot (14–18) are set independently.
pub fn extract_caption_features(
    ir: &CaptionIR,
    alignment: &CaptionAlignment,
    row_count: usize,
) -> FeatureVector {
    let mut fv = FeatureVector::zeros(FeatureSchema::Cap19);

    // Other variables: everything except the main phrase and the columns
    // that merely carry the main measure (a measure series).  A timespan
    // appears here only when it validated against a temporal column.
    let series_cols: &[String] = alignment
        .roles
        .measure_series
        .as_ref()
        .map(|s| s.columns.as_slice())
        .unwrap_or(&[]);
    let others: Vec<&AlignedVar> = alignment
        .vars
        .iter()
        .filter(|v| !v.is_main)
        .filter(|v| v.column.as_ref().map(|c| !series_cols.contains(c)).unwrap_or(true))
        .filter(|v| v.source != PhraseSource::Timespan || v.column.is_some())
        .collect();

    if let Some(main) = ir.main_phrase() {
        let aligned: Vec<&AlignedVar> =
            others.iter().copied().filter(|v| v.column.is_some()).collect();
        let unaligned: Vec<&AlignedVar> =
            others.iter().copied().filter(|v| v.column.is_none()).collect();
        let q = others.iter().filter(|v| v.ptype == PhraseType::Q).count();
        let oc = others.iter().filter(|v| v.ptype == PhraseType::OC).count();
        let t = others.iter().filter(|v| v.ptype == PhraseType::T).count();

        let structure = first_defined_bit(main.ptype, &aligned, aligned_pair_bit)
            .or(match main.ptype {
                PhraseType::Q if oc >= 2 => Some(9),
                PhraseType::OC if q >= 2 => Some(10),
                PhraseType::Q if oc >= 1 && t >= 1 => Some(11),
                PhraseType::Q if t >= 2 => Some(12),
                _ => None,
            })
            .or_else(|| first_defined_bit(main.ptype, &unaligned, unaligned_pair_bit))
            .or_else(|| {
                let bare_span = ir.timespan.is_some() && !alignment.timespan_validated;
                (main.ptype == PhraseType::Q && bare_span).then_some(8)
            });
        if let Some(bit) = structure {
            fv.set(bit);
        }

        if main.ptype == PhraseType::OC && ir.caption.to_ascii_lowercase().contains("distribution")
        {
            fv.set(13);
        }
    }

    // Caption-side size buckets name exact small counts: one data point,
    // two data points, then the shared 3–8 / 9–30 / >30 ranges.  Ingest
    // rejects captioned tables with zero rows, so 0 is unreachable here;
    // clamp it into the smallest bucket rather than panic.
    let (size_start, _) = FeatureSchema::Cap19.size_group();
    let size_offset = match row_count {
        0 | 1 => 0,
        2 => 1,
        3..=8 => 2,
        9..=30 => 3,
        _ => 4,
    };
    fv.set(size_start + size_offset);

    debug_assert!(fv.validate().is_ok());
    fv
}
