use mpcore::Error;

/// Integer results of every exported call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(i32)]
pub enum Status {
    Ok = 0,
    InvalidHandle = 1,
    DimensionMismatch = 2,
    Singular = 3,
    Parse = 4,
    Overflow = 5,
    /// Also returned for invalid arguments and for a handle in use by
    /// another call.
    Internal = 6,
}

impl From<Error> for Status {
    fn from(e: Error) -> Self {
        match e {
            Error::Singular { .. } => Status::Singular,
            Error::DimensionMismatch { .. } => Status::DimensionMismatch,
            Error::Parse(_) => Status::Parse,
            Error::Overflow | Error::DivideByZero => Status::Overflow,
            _ => Status::Internal,
        }
    }
}
