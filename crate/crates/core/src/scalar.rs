use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rand::distributions::uniform::SampleUniform;
use serde::{de::DeserializeOwned, Serialize};

/// Floating-point scalar the whole crate is generic over: `f32` or `f64`.
///
/// All tolerances quoted in this crate's docs and tests assume `f64`; the
/// concrete types exported at the crate root default to it.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + SampleUniform
    + Serialize
    + DeserializeOwned
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + NumAssign
        + FromPrimitive
        + SampleUniform
        + Serialize
        + DeserializeOwned
        + Debug
        + Display
        + LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Convert an `f64` literal into the working scalar type.
pub(crate) fn cast<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal not representable in scalar type")
}
