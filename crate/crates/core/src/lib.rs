//! Event-camera denoising with subsampled timestamp maps.
//!
//! The crate covers the whole offline path from a recording to learning
//! inputs: reading AEDAT 2.0 or CSV streams ([`io`]), filtering them through
//! the shared-memory filter pipeline ([`filter`]), measuring how much was
//! removed per packet ([`metrics`]), and turning the result into Temporal
//! Binary Representation frames ([`tbr`]) or region-of-interest feature
//! sequences ([`roi`]). [`synth`] renders labelled synthetic scenes so filter
//! quality can be scored against ground truth.

pub mod config;
pub mod event;
pub mod filter;
pub mod io;
pub mod metrics;
pub mod roi;
pub mod synth;
pub mod tbr;

pub use config::ToolConfig;
pub use event::{
    mirror_event, packetize, packetize_events, Event, EventError, EventPacket, EventStream,
    Polarity, SensorGeometry,
};
pub use filter::{
    apply_pipeline, filter_stream, subsample_coords, ConfigError, FilterConfig, FilterError,
    FilterKind, FilterPipeline, FilterState, Verdict,
};
pub use metrics::{build_series, pct_filtered, MetricSeries, PacketMetrics, SeriesMode};
pub use roi::{RoiConfig, RoiFeature};
pub use synth::{ConfusionCounts, Label, LabeledEvent, SceneScript};
pub use tbr::{TbrConfig, TbrFrame};
