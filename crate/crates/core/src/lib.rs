pub mod algebra;
pub mod partitions;
pub mod thetanum;
pub mod thetaids;
pub mod macdonald;
pub mod ehs;
pub mod kawanaka;
pub mod sampler;
pub mod registry;
