/// Counts describing one run of track mining.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompressionInput {
    pub proposals_per_frame: f64,
    pub frames: u64,
    pub tracklets: u64,
    pub tracks: u64,
    /// Average number of tracks visible in a frame, when known.
    pub tracks_per_frame: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompressionStats {
    pub total_proposals: f64,
    /// Proposals per frame over tracks per frame; `None` when either is unknown or zero.
    pub per_image: Option<f64>,
    /// All proposals of the sequence over the number of final tracks.
    pub per_sequence: Option<f64>,
    pub tracklets_per_track: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

pub fn compression_report(input: &CompressionInput) -> CompressionStats {
    let total = input.proposals_per_frame * input.frames as f64;
    CompressionStats {
        total_proposals: total,
        per_image: input
            .tracks_per_frame
            .and_then(|t| ratio(input.proposals_per_frame, t)),
        per_sequence: ratio(total, input.tracks as f64),
        tracklets_per_track: ratio(input.tracklets as f64, input.tracks as f64),
    }
}
